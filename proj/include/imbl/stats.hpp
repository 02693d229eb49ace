#pragma once

#include <string>
#include <vector>

#include "imbl/dataset.hpp"

namespace imbl {

// Upper-tail probabilities, accurate to ~1e-10 absolute on the ranges used
// (|z| <= 8, chi-square <= 200, F <= 100).
double normal_upper_tail(double z);
double chi_square_upper_tail(double x, double df);
double f_upper_tail(double x, double df1, double df2);

// Regularized incomplete gamma Q(a, x) and incomplete beta I_x(a, b).
double gamma_q(double a, double x);
double incomplete_beta(double a, double b, double x);

struct ResultMatrix {
    Matrix values;  // rows = cases (dataset x classifier), columns = approaches
    std::vector<std::string> column_names;
    std::vector<std::string> row_names;  // optional
    bool higher_is_better = true;
};

ResultMatrix load_result_matrix(const std::string& path, bool higher_is_better);
void save_result_matrix(const ResultMatrix& m, const std::string& path);

struct RankSummary {
    std::vector<double> mean_ranks;  // rank 1 = best
    std::vector<std::string> column_names;
    std::size_t cases = 0;       // N
    std::size_t approaches = 0;  // k
    double friedman_chi2 = 0.0;
    double friedman_p = 1.0;
    double iman_davenport_f = 0.0;
    double iman_davenport_p = 1.0;
};

// Per-row average ranks (ties averaged), Friedman chi-square with k-1 df and
// the Iman-Davenport F correction with (k-1, (k-1)(N-1)) df.
RankSummary friedman(const ResultMatrix& matrix);

struct PosthocComparison {
    std::string name;
    double rank_delta = 0.0;
    double z = 0.0;
    double p_raw = 1.0;
    double p_bonferroni = 1.0;
    double p_holm = 1.0;
    double p_hochberg = 1.0;
};

struct PosthocReport {
    std::string control;  // column with the lowest (best) mean rank
    std::vector<PosthocComparison> comparisons;  // one per non-control column
    bool omnibus_significant = false;            // Friedman p < alpha flag
};

PosthocReport posthoc(const RankSummary& ranks, double alpha = 0.05);

}  // namespace imbl
