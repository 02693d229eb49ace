#include "imbl/metrics.hpp"

#include <cmath>

namespace imbl {

ConfusionMatrix confusion(const std::vector<Label>& predicted,
                          const std::vector<Label>& actual) {
    if (predicted.size() != actual.size())
        throw DataError("confusion: length mismatch");
    if (actual.empty()) throw DataError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == Label::positive)
            (predicted[i] == Label::positive ? cm.tp : cm.fn)++;
        else
            (predicted[i] == Label::positive ? cm.fp : cm.tn)++;
    }
    return cm;
}

MetricReport score(const ConfusionMatrix& cm) {
    const double pos = static_cast<double>(cm.tp + cm.fn);
    const double neg = static_cast<double>(cm.fp + cm.tn);
    if (pos < 1 || neg < 1)
        throw DataError("score: a class is absent from the actual labels");
    MetricReport r;
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / (pos + neg);
    r.recall = static_cast<double>(cm.tp) / pos;
    r.tn_rate = static_cast<double>(cm.tn) / neg;
    r.fp_rate = static_cast<double>(cm.fp) / neg;
    r.precision = (cm.tp + cm.fp) > 0
                      ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp)
                      : 0.0;
    r.f_measure = (r.precision + r.recall) > 0.0
                      ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                      : 0.0;
    r.gmean = std::sqrt(r.tn_rate * r.recall);
    r.auc = (1.0 + r.recall - r.fp_rate) / 2.0;
    return r;
}

MetricReport aggregate_folds(const std::vector<MetricReport>& reports) {
    if (reports.empty()) throw DataError("aggregate_folds: empty sequence");
    MetricReport m;
    for (const auto& r : reports) {
        m.accuracy += r.accuracy;
        m.precision += r.precision;
        m.recall += r.recall;
        m.tn_rate += r.tn_rate;
        m.fp_rate += r.fp_rate;
        m.f_measure += r.f_measure;
        m.gmean += r.gmean;
        m.auc += r.auc;
    }
    const double n = static_cast<double>(reports.size());
    m.accuracy /= n;
    m.precision /= n;
    m.recall /= n;
    m.tn_rate /= n;
    m.fp_rate /= n;
    m.f_measure /= n;
    m.gmean /= n;
    m.auc /= n;
    return m;
}

}  // namespace imbl
