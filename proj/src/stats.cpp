#include "imbl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace imbl {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 1000;

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by Lentz continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for the incomplete beta (Lentz).
double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0) throw DataError("gamma_q: a must be positive");
    if (x < 0.0) throw DataError("gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw DataError("incomplete_beta: invalid shape");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                                  std::lgamma(b) + a * std::log(x) +
                                  b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double chi_square_upper_tail(double x, double df) {
    if (df <= 0.0) throw DataError("chi_square_upper_tail: invalid df");
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

double f_upper_tail(double x, double df1, double df2) {
    if (df1 <= 0.0 || df2 <= 0.0) throw DataError("f_upper_tail: invalid df");
    if (x <= 0.0) return 1.0;
    return incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x));
}

ResultMatrix load_result_matrix(const std::string& path, bool higher_is_better) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open result matrix: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty result matrix: " + path);

    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
                cell.pop_back();
            cells.push_back(cell);
        }
        return cells;
    };

    std::vector<std::string> header = split(line);
    const bool has_row_names = !header.empty() && header.front() == "case";
    ResultMatrix m;
    m.higher_is_better = higher_is_better;
    m.column_names.assign(header.begin() + (has_row_names ? 1 : 0), header.end());
    if (m.column_names.size() < 2)
        throw DataError(path + ": need at least 2 approach columns");
    m.values = Matrix(0, m.column_names.size());

    std::vector<double> row(m.column_names.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line);
        if (cells.size() != header.size())
            throw DataError(path + ": ragged row with " + std::to_string(cells.size()) +
                            " cells");
        std::size_t ci = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (has_row_names && i == 0) {
                m.row_names.push_back(cells[i]);
                continue;
            }
            try {
                row[ci++] = std::stod(cells[i]);
            } catch (const std::exception&) {
                throw DataError(path + ": non-numeric cell '" + cells[i] + "'");
            }
        }
        m.values.append_row(row.data());
    }
    if (m.values.rows() < 2) throw DataError(path + ": need at least 2 case rows");
    return m;
}

void save_result_matrix(const ResultMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write result matrix: " + path);
    if (!m.row_names.empty()) out << "case,";
    for (std::size_t c = 0; c < m.column_names.size(); ++c)
        out << m.column_names[c] << (c + 1 < m.column_names.size() ? "," : "\n");
    char buf[32];
    for (std::size_t r = 0; r < m.values.rows(); ++r) {
        if (!m.row_names.empty()) out << m.row_names[r] << ',';
        for (std::size_t c = 0; c < m.values.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.6f", m.values.at(r, c));
            out << buf << (c + 1 < m.values.cols() ? "," : "\n");
        }
    }
}

RankSummary friedman(const ResultMatrix& matrix) {
    const std::size_t n = matrix.values.rows();
    const std::size_t k = matrix.values.cols();
    if (n < 2 || k < 2) throw DataError("friedman: degenerate matrix");

    RankSummary s;
    s.column_names = matrix.column_names;
    s.cases = n;
    s.approaches = k;
    s.mean_ranks.assign(k, 0.0);

    std::vector<std::size_t> order(k);
    for (std::size_t r = 0; r < n; ++r) {
        std::iota(order.begin(), order.end(), 0);
        const double sign = matrix.higher_is_better ? -1.0 : 1.0;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return sign * matrix.values.at(r, a) < sign * matrix.values.at(r, b);
        });
        // average ranks over tied runs
        std::size_t i = 0;
        while (i < k) {
            std::size_t j = i;
            while (j + 1 < k && matrix.values.at(r, order[j + 1]) ==
                                    matrix.values.at(r, order[i]))
                ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t) s.mean_ranks[order[t]] += avg;
            i = j + 1;
        }
    }
    for (double& v : s.mean_ranks) v /= static_cast<double>(n);

    const double dn = static_cast<double>(n), dk = static_cast<double>(k);
    double sum_sq = 0.0;
    for (double v : s.mean_ranks) sum_sq += v * v;
    s.friedman_chi2 =
        12.0 * dn / (dk * (dk + 1.0)) * (sum_sq - dk * (dk + 1.0) * (dk + 1.0) / 4.0);
    s.friedman_p = chi_square_upper_tail(s.friedman_chi2, dk - 1.0);

    const double denom = dn * (dk - 1.0) - s.friedman_chi2;
    if (denom <= 0.0) {
        s.iman_davenport_f = std::numeric_limits<double>::infinity();
        s.iman_davenport_p = 0.0;
    } else {
        s.iman_davenport_f = (dn - 1.0) * s.friedman_chi2 / denom;
        s.iman_davenport_p =
            f_upper_tail(s.iman_davenport_f, dk - 1.0, (dk - 1.0) * (dn - 1.0));
    }
    return s;
}

PosthocReport posthoc(const RankSummary& ranks, double alpha) {
    const std::size_t k = ranks.approaches;
    const double se = std::sqrt(static_cast<double>(k) * (k + 1.0) /
                                (6.0 * static_cast<double>(ranks.cases)));
    const std::size_t control = static_cast<std::size_t>(
        std::min_element(ranks.mean_ranks.begin(), ranks.mean_ranks.end()) -
        ranks.mean_ranks.begin());

    PosthocReport report;
    report.control = ranks.column_names[control];
    report.omnibus_significant = ranks.friedman_p < alpha;
    for (std::size_t j = 0; j < k; ++j) {
        if (j == control) continue;
        PosthocComparison c;
        c.name = ranks.column_names[j];
        c.rank_delta = ranks.mean_ranks[j] - ranks.mean_ranks[control];
        c.z = c.rank_delta / se;
        c.p_raw = std::min(1.0, 2.0 * normal_upper_tail(std::fabs(c.z)));
        report.comparisons.push_back(c);
    }

    const std::size_t m = report.comparisons.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.comparisons[a].p_raw < report.comparisons[b].p_raw;
    });

    for (auto& c : report.comparisons)
        c.p_bonferroni = std::min(1.0, static_cast<double>(m) * c.p_raw);
    double running_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {  // Holm step-down
        auto& c = report.comparisons[order[i]];
        running_max = std::max(running_max, static_cast<double>(m - i) * c.p_raw);
        c.p_holm = std::min(1.0, running_max);
    }
    double running_min = 1.0;
    for (std::size_t i = m; i-- > 0;) {  // Hochberg step-up
        auto& c = report.comparisons[order[i]];
        running_min = std::min(running_min, static_cast<double>(m - i) * c.p_raw);
        c.p_hochberg = std::min(1.0, running_min);
    }
    return report;
}

}  // namespace imbl
