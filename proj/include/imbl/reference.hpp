#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "imbl/stats.hpp"

namespace imbl {

// Published benchmark results that the bundled fixture tables were
// transcribed from: mean ranks per approach and post-hoc adjusted p-values
// (2 significant digits; entries below display precision are flagged).

struct ReferencePosthocRow {
    // Rows are ordered by ascending raw p, as in the published table.
    double bonferroni, holm, hochberg;  // < 0 means "printed as 0": assert < 1e-4
};

struct ReferenceTable {
    std::string metric;
    std::string fixture_file;
    std::array<double, 6> mean_ranks;  // Ori, RU, RO, SMOTE, PSO, Integrated
    std::array<ReferencePosthocRow, 5> posthoc;
};

const std::vector<ReferenceTable>& reference_tables();

struct FixtureCheck {
    std::string metric;
    RankSummary ranks;
    PosthocReport report;
    std::vector<std::string> lines;  // per-cell PASS/FAIL description
    bool all_pass = true;
};

// Runs friedman + posthoc on each fixture CSV and compares against the
// reference values: ranks to +-1e-4, adjusted p-values at 2 significant
// digits (below-precision cells assert p < 1e-4).
std::vector<FixtureCheck> check_fixtures(const std::string& fixture_dir);

void print_fixture_checks(const std::vector<FixtureCheck>& checks, std::ostream& os);

// Formats like the published tables: 2 significant digits, scientific.
std::string format_p(double p);

}  // namespace imbl
