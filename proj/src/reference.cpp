#include "imbl/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace imbl {

namespace {
constexpr double kZero = -1.0;  // printed as "0" in the source table
}

const std::vector<ReferenceTable>& reference_tables() {
    static const std::vector<ReferenceTable> tables = {
        {"F-measure",
         "table_fm.csv",
         {4.0469, 5.0312, 4.1406, 3.3906, 2.9062, 1.4844},
         {{{kZero, kZero, kZero},
           {kZero, kZero, kZero},
           {kZero, kZero, kZero},
           {2.3e-04, 9.2e-05, 9.2e-05},
           {1.2e-02, 2.4e-03, 2.4e-03}}}},
        {"GMean",
         "table_gmean.csv",
         {5.3438, 3.9688, 3.5625, 3.3125, 3.0000, 1.8125},
         {{{kZero, kZero, kZero},
           {2.0e-05, 1.6e-05, 1.6e-05},
           {9.1e-04, 5.5e-04, 5.5e-04},
           {6.7e-03, 2.7e-03, 2.7e-03},
           {5.6e-02, 1.1e-02, 1.1e-02}}}},
        {"AUC",
         "table_auc.csv",
         {5.3125, 3.9375, 3.3750, 3.4062, 3.0000, 1.9688},
         {{{kZero, kZero, kZero},
           {1.3e-04, 1.0e-04, 1.0e-04},
           {1.1e-02, 6.3e-03, 5.3e-03},
           {1.3e-02, 6.3e-03, 5.3e-03},
           {1.4e-01, 2.7e-02, 2.7e-02}}}},
    };
    return tables;
}

std::string format_p(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1E", p);
    return buf;
}

namespace {

bool match_cell(double computed, double expected, std::string& shown) {
    if (expected == kZero) {
        shown = format_p(computed) + " (expect < 1E-04)";
        return computed < 1e-4;
    }
    shown = format_p(computed) + " vs " + format_p(expected);
    return format_p(computed) == format_p(expected);
}

}  // namespace

std::vector<FixtureCheck> check_fixtures(const std::string& fixture_dir) {
    std::vector<FixtureCheck> out;
    for (const ReferenceTable& ref : reference_tables()) {
        FixtureCheck check;
        check.metric = ref.metric;
        const ResultMatrix matrix =
            load_result_matrix(fixture_dir + "/" + ref.fixture_file, true);
        check.ranks = friedman(matrix);
        check.report = posthoc(check.ranks);

        for (std::size_t j = 0; j < check.ranks.mean_ranks.size(); ++j) {
            const bool ok =
                std::fabs(check.ranks.mean_ranks[j] - ref.mean_ranks[j]) <= 1e-4;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s rank %-10s %.4f vs %.4f  %s",
                          ref.metric.c_str(), check.ranks.column_names[j].c_str(),
                          check.ranks.mean_ranks[j], ref.mean_ranks[j],
                          ok ? "PASS" : "FAIL");
            check.lines.emplace_back(buf);
            check.all_pass &= ok;
        }

        // Reference rows are ordered by ascending raw p; order our
        // comparisons the same way before matching cell by cell.
        std::vector<const PosthocComparison*> ordered;
        for (const auto& c : check.report.comparisons) ordered.push_back(&c);
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const auto* a, const auto* b) { return a->p_raw < b->p_raw; });
        for (std::size_t i = 0; i < ordered.size(); ++i) {
            const auto& row = ref.posthoc[i];
            const double computed[3] = {ordered[i]->p_bonferroni, ordered[i]->p_holm,
                                        ordered[i]->p_hochberg};
            const double expected[3] = {row.bonferroni, row.holm, row.hochberg};
            const char* kind[3] = {"bonf", "holm", "hochberg"};
            for (int t = 0; t < 3; ++t) {
                std::string shown;
                const bool ok = match_cell(computed[t], expected[t], shown);
                check.lines.push_back(ref.metric + " " + check.report.control +
                                      " vs " + ordered[i]->name + " p_" + kind[t] +
                                      " " + shown + "  " + (ok ? "PASS" : "FAIL"));
                check.all_pass &= ok;
            }
        }
        out.push_back(std::move(check));
    }
    return out;
}

void print_fixture_checks(const std::vector<FixtureCheck>& checks, std::ostream& os) {
    bool all = true;
    for (const auto& c : checks) {
        os << "== " << c.metric << " (chi2=" << c.ranks.friedman_chi2
           << ", F=" << c.ranks.iman_davenport_f << ", control=" << c.report.control
           << ") ==\n";
        for (const auto& line : c.lines) os << "  " << line << "\n";
        all &= c.all_pass;
    }
    os << (all ? "ALL PASS" : "FAILURES PRESENT") << "\n";
}

}  // namespace imbl
