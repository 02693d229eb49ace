#pragma once

#include <cstddef>
#include <vector>

#include "imbl/dataset.hpp"

namespace imbl {

struct ConfusionMatrix {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
};

struct MetricReport {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;  // TP rate
    double tn_rate = 0;
    double fp_rate = 0;
    double f_measure = 0;
    double gmean = 0;
    double auc = 0;  // (1 + recall - fp_rate) / 2, from hard predictions
};

ConfusionMatrix confusion(const std::vector<Label>& predicted,
                          const std::vector<Label>& actual);

// Requires both classes present among actuals (tp+fn >= 1 and fp+tn >= 1).
// Conventions: precision = 0 when tp+fp = 0; f_measure = 0 when
// precision+recall = 0.
MetricReport score(const ConfusionMatrix& cm);

// Unweighted field-wise mean. Aggregated fields do not in general satisfy
// the single-matrix identities (mean of gmeans != gmean of means).
MetricReport aggregate_folds(const std::vector<MetricReport>& reports);

}  // namespace imbl
