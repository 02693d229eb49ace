#include "imbl/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbl/neighbors.hpp"
#include "imbl/rng.hpp"

namespace imbl {

ClassifierKind classifier_kind_from(const std::string& name) {
    if (name == "knn") return ClassifierKind::knn;
    if (name == "gnb") return ClassifierKind::gnb;
    if (name == "tree") return ClassifierKind::tree;
    if (name == "bagging") return ClassifierKind::bagging;
    if (name == "random_forest") return ClassifierKind::random_forest;
    if (name == "adaboost") return ClassifierKind::adaboost;
    throw DataError("unknown classifier kind: " + name);
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::gnb: return "gnb";
        case ClassifierKind::tree: return "tree";
        case ClassifierKind::bagging: return "bagging";
        case ClassifierKind::random_forest: return "random_forest";
        case ClassifierKind::adaboost: return "adaboost";
    }
    return "?";
}

namespace {

class Params {
public:
    Params(const std::map<std::string, double>& given,
           std::map<std::string, double> defaults)
        : values_(std::move(defaults)) {
        for (const auto& [key, value] : given) {
            auto it = values_.find(key);
            if (it == values_.end())
                throw DataError("unknown hyperparameter '" + key + "'");
            it->second = value;
        }
    }
    double get(const std::string& key) const { return values_.at(key); }
    std::size_t get_count(const std::string& key) const {
        const double v = values_.at(key);
        if (v < 0 || v != std::floor(v))
            throw DataError("hyperparameter '" + key + "' must be a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

private:
    std::map<std::string, double> values_;
};

void check_dim(const Matrix& features, std::size_t d) {
    if (features.cols() != d)
        throw DataError("predict: feature dimension " + std::to_string(features.cols()) +
                        " does not match training dimension " + std::to_string(d));
}

std::vector<Label> threshold_scores(const std::vector<double>& scores) {
    std::vector<Label> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        out[i] = scores[i] >= 0.5 ? Label::positive : Label::negative;
    return out;
}

// ---------------------------------------------------------------------------
// k-nearest neighbours

class KnnModel final : public Model {
public:
    KnnModel(const Dataset& ds, std::size_t k) : train_(ds), k_(std::min(k, ds.size())) {
        if (k == 0) throw DataError("knn: k must be positive");
    }

    std::vector<double> score_positive(const Matrix& features) const override {
        check_dim(features, train_.dim());
        std::vector<double> out(features.rows());
        for (std::size_t r = 0; r < features.rows(); ++r) {
            const auto nn = knn_indices(features.row(r), train_.features, k_);
            std::size_t pos = 0;
            for (std::size_t idx : nn)
                if (train_.labels[idx] == Label::positive) ++pos;
            out[r] = static_cast<double>(pos) / static_cast<double>(k_);
        }
        return out;
    }

    // Vote tie resolves to the positive (minority) class.
    std::vector<Label> predict(const Matrix& features) const override {
        return threshold_scores(score_positive(features));
    }

private:
    Dataset train_;
    std::size_t k_;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

class GnbModel final : public Model {
public:
    GnbModel(const Dataset& ds, double var_floor) {
        d_ = ds.dim();
        for (int cls = 0; cls < 2; ++cls) {
            const Label l = cls == 0 ? Label::negative : Label::positive;
            const auto rows = ds.indices_of(l);
            const double n = static_cast<double>(rows.size());
            log_prior_[cls] = std::log(n / static_cast<double>(ds.size()));
            mean_[cls].assign(d_, 0.0);
            var_[cls].assign(d_, 0.0);
            for (std::size_t r : rows)
                for (std::size_t c = 0; c < d_; ++c)
                    mean_[cls][c] += ds.features.at(r, c);
            for (std::size_t c = 0; c < d_; ++c) mean_[cls][c] /= n;
            for (std::size_t r : rows)
                for (std::size_t c = 0; c < d_; ++c) {
                    const double dev = ds.features.at(r, c) - mean_[cls][c];
                    var_[cls][c] += dev * dev;
                }
            for (std::size_t c = 0; c < d_; ++c)
                var_[cls][c] = std::max(var_[cls][c] / n, var_floor);
        }
    }

    std::vector<double> score_positive(const Matrix& features) const override {
        check_dim(features, d_);
        std::vector<double> out(features.rows());
        for (std::size_t r = 0; r < features.rows(); ++r) {
            double ll[2];
            for (int cls = 0; cls < 2; ++cls) {
                double s = log_prior_[cls];
                for (std::size_t c = 0; c < d_; ++c) {
                    const double dev = features.at(r, c) - mean_[cls][c];
                    s -= 0.5 * (std::log(2.0 * M_PI * var_[cls][c]) +
                                dev * dev / var_[cls][c]);
                }
                ll[cls] = s;
            }
            const double m = std::max(ll[0], ll[1]);
            const double e0 = std::exp(ll[0] - m), e1 = std::exp(ll[1] - m);
            out[r] = e1 / (e0 + e1);
        }
        return out;
    }

    std::vector<Label> predict(const Matrix& features) const override {
        return threshold_scores(score_positive(features));
    }

private:
    std::size_t d_ = 0;
    double log_prior_[2] = {0, 0};
    std::vector<double> mean_[2], var_[2];
};

// ---------------------------------------------------------------------------
// CART-style binary decision tree (Gini impurity, midpoint thresholds,
// optional per-split feature subsetting, sample weights)

struct TreeParams {
    std::size_t max_depth = 10;
    std::size_t min_leaf = 2;
    std::size_t mtry = 0;  // 0 = all features
};

class DecisionTree {
public:
    void fit(const Matrix& x, const std::vector<Label>& y,
             const std::vector<double>& w, const TreeParams& params, Rng* rng) {
        params_ = params;
        nodes_.clear();
        std::vector<std::size_t> rows(y.size());
        std::iota(rows.begin(), rows.end(), 0);
        build(x, y, w, rows, 0, rng);
    }

    double leaf_positive_fraction(const double* point) const {
        std::size_t node = 0;
        while (nodes_[node].feature != kLeaf)
            node = point[nodes_[node].feature] <= nodes_[node].threshold
                       ? nodes_[node].left
                       : nodes_[node].right;
        return nodes_[node].pos_fraction;
    }

    Label predict_one(const double* point) const {
        return leaf_positive_fraction(point) >= 0.5 ? Label::positive : Label::negative;
    }

private:
    static constexpr std::size_t kLeaf = static_cast<std::size_t>(-1);

    struct Node {
        std::size_t feature = kLeaf;
        double threshold = 0.0;
        std::size_t left = 0, right = 0;
        double pos_fraction = 0.0;  // weighted, leaves only
    };

    TreeParams params_;
    std::vector<Node> nodes_;

    static double gini(double pos, double total) {
        if (total <= 0.0) return 0.0;
        const double p = pos / total;
        return 2.0 * p * (1.0 - p);
    }

    std::size_t build(const Matrix& x, const std::vector<Label>& y,
                      const std::vector<double>& w,
                      const std::vector<std::size_t>& rows, std::size_t depth,
                      Rng* rng) {
        double pos_w = 0.0, total_w = 0.0;
        for (std::size_t r : rows) {
            total_w += w[r];
            if (y[r] == Label::positive) pos_w += w[r];
        }

        const std::size_t self = nodes_.size();
        nodes_.emplace_back();
        nodes_[self].pos_fraction = total_w > 0.0 ? pos_w / total_w : 1.0;

        const bool pure = pos_w <= 0.0 || pos_w >= total_w;
        if (pure || depth >= params_.max_depth || rows.size() < 2 * params_.min_leaf)
            return self;

        const std::size_t d = x.cols();
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), 0);
        if (params_.mtry > 0 && params_.mtry < d && rng) {
            for (std::size_t i = 0; i < params_.mtry; ++i)
                std::swap(features[i], features[i + rng->index(d - i)]);
            features.resize(params_.mtry);
            std::sort(features.begin(), features.end());  // tie-break order
        }

        const double parent_impurity = gini(pos_w, total_w);
        double best_gain = 0.0, best_threshold = 0.0;
        std::size_t best_feature = kLeaf;

        std::vector<std::pair<double, std::size_t>> sorted(rows.size());
        for (std::size_t f : features) {
            for (std::size_t i = 0; i < rows.size(); ++i)
                sorted[i] = {x.at(rows[i], f), rows[i]};
            std::sort(sorted.begin(), sorted.end());

            double left_pos = 0.0, left_total = 0.0;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                const std::size_t r = sorted[i].second;
                left_total += w[r];
                if (y[r] == Label::positive) left_pos += w[r];
                if (sorted[i].first == sorted[i + 1].first) continue;
                if (i + 1 < params_.min_leaf || sorted.size() - i - 1 < params_.min_leaf)
                    continue;
                const double right_total = total_w - left_total;
                const double gain =
                    parent_impurity -
                    (left_total * gini(left_pos, left_total) +
                     right_total * gini(pos_w - left_pos, right_total)) /
                        total_w;
                if (gain > best_gain + 1e-12) {  // ties keep lowest feature/threshold
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
                }
            }
        }
        if (best_feature == kLeaf) return self;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows)
            (x.at(r, best_feature) <= best_threshold ? left_rows : right_rows)
                .push_back(r);
        if (left_rows.empty() || right_rows.empty()) return self;

        nodes_[self].feature = best_feature;
        nodes_[self].threshold = best_threshold;
        const std::size_t left = build(x, y, w, left_rows, depth + 1, rng);
        const std::size_t right = build(x, y, w, right_rows, depth + 1, rng);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }
};

class TreeModel final : public Model {
public:
    TreeModel(const Dataset& ds, const TreeParams& params) {
        d_ = ds.dim();
        std::vector<double> w(ds.size(), 1.0);
        tree_.fit(ds.features, ds.labels, w, params, nullptr);
    }

    std::vector<double> score_positive(const Matrix& features) const override {
        check_dim(features, d_);
        std::vector<double> out(features.rows());
        for (std::size_t r = 0; r < features.rows(); ++r)
            out[r] = tree_.leaf_positive_fraction(features.row(r));
        return out;
    }

    std::vector<Label> predict(const Matrix& features) const override {
        return threshold_scores(score_positive(features));
    }

private:
    std::size_t d_ = 0;
    DecisionTree tree_;
};

// ---------------------------------------------------------------------------
// Bootstrap ensembles (bagging / random forest)

class BaggedModel final : public Model {
public:
    BaggedModel(const Dataset& ds, std::size_t members, const TreeParams& params,
                std::uint64_t seed) {
        d_ = ds.dim();
        trees_.resize(members);
        const std::size_t n = ds.size();
        for (std::size_t m = 0; m < members; ++m) {
            Rng rng(derive_seed(seed, m));
            if (members == 1) {
                // A single-member ensemble degenerates to one tree on the
                // full sample (no bootstrap), matching the plain tree.
                std::vector<double> w(n, 1.0);
                trees_[m].fit(ds.features, ds.labels, w, params, &rng);
                continue;
            }
            std::vector<std::size_t> bag(n);
            for (std::size_t i = 0; i < n; ++i) bag[i] = rng.index(n);
            Dataset sample = ds.subset(bag);
            std::vector<double> w(n, 1.0);
            trees_[m].fit(sample.features, sample.labels, w, params, &rng);
        }
    }

    std::vector<double> score_positive(const Matrix& features) const override {
        check_dim(features, d_);
        std::vector<double> out(features.rows(), 0.0);
        for (std::size_t r = 0; r < features.rows(); ++r) {
            std::size_t pos = 0;
            for (const auto& t : trees_)
                if (t.predict_one(features.row(r)) == Label::positive) ++pos;
            out[r] = static_cast<double>(pos) / static_cast<double>(trees_.size());
        }
        return out;
    }

    std::vector<Label> predict(const Matrix& features) const override {
        return threshold_scores(score_positive(features));
    }

private:
    std::size_t d_ = 0;
    std::vector<DecisionTree> trees_;
};

// ---------------------------------------------------------------------------
// Discrete AdaBoost with shallow trees

class AdaBoostModel final : public Model {
public:
    AdaBoostModel(const Dataset& ds, std::size_t stages, const TreeParams& params) {
        d_ = ds.dim();
        const std::size_t n = ds.size();
        std::vector<double> w(n, 1.0 / static_cast<double>(n));
        for (std::size_t m = 0; m < stages; ++m) {
            DecisionTree tree;
            tree.fit(ds.features, ds.labels, w, params, nullptr);
            double err = 0.0;
            std::vector<bool> wrong(n);
            for (std::size_t i = 0; i < n; ++i) {
                wrong[i] = tree.predict_one(ds.features.row(i)) != ds.labels[i];
                if (wrong[i]) err += w[i];
            }
            if (err >= 0.5) {
                if (stages_.empty()) stages_.push_back({std::move(tree), 1.0});
                break;
            }
            if (err <= 0.0) {
                stages_.push_back({std::move(tree), 1.0});
                break;  // perfect stage dominates; nothing left to reweight
            }
            const double alpha = 0.5 * std::log((1.0 - err) / err);
            stages_.push_back({std::move(tree), alpha});
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] *= std::exp(wrong[i] ? alpha : -alpha);
                sum += w[i];
            }
            for (double& wi : w) wi /= sum;
        }
    }

    std::vector<double> score_positive(const Matrix& features) const override {
        check_dim(features, d_);
        std::vector<double> out(features.rows());
        double alpha_sum = 0.0;
        for (const auto& s : stages_) alpha_sum += s.alpha;
        for (std::size_t r = 0; r < features.rows(); ++r) {
            double vote = 0.0;
            for (const auto& s : stages_)
                vote += s.tree.predict_one(features.row(r)) == Label::positive
                            ? s.alpha
                            : -s.alpha;
            out[r] = alpha_sum > 0.0 ? 0.5 * (1.0 + vote / alpha_sum) : 0.5;
        }
        return out;
    }

    std::vector<Label> predict(const Matrix& features) const override {
        return threshold_scores(score_positive(features));
    }

    std::size_t stage_count() const { return stages_.size(); }

private:
    struct Stage {
        DecisionTree tree;
        double alpha;
    };
    std::size_t d_ = 0;
    std::vector<Stage> stages_;
};

}  // namespace

std::unique_ptr<Model> train(const ClassifierSpec& spec, const Dataset& ds) {
    ds.require_trainable();
    switch (spec.kind) {
        case ClassifierKind::knn: {
            Params p(spec.params, {{"k", 10}});
            return std::make_unique<KnnModel>(ds, p.get_count("k"));
        }
        case ClassifierKind::gnb: {
            Params p(spec.params, {{"var_floor", 1e-9}});
            if (p.get("var_floor") <= 0.0)
                throw DataError("gnb: var_floor must be positive");
            return std::make_unique<GnbModel>(ds, p.get("var_floor"));
        }
        case ClassifierKind::tree: {
            Params p(spec.params, {{"max_depth", 10}, {"min_leaf", 2}});
            TreeParams tp{p.get_count("max_depth"), p.get_count("min_leaf"), 0};
            return std::make_unique<TreeModel>(ds, tp);
        }
        case ClassifierKind::bagging: {
            Params p(spec.params,
                     {{"n_estimators", 100}, {"max_depth", 5}, {"min_leaf", 1}});
            TreeParams tp{p.get_count("max_depth"), p.get_count("min_leaf"), 0};
            return std::make_unique<BaggedModel>(ds, p.get_count("n_estimators"), tp,
                                                 spec.seed);
        }
        case ClassifierKind::random_forest: {
            Params p(spec.params,
                     {{"n_trees", 1000}, {"max_depth", 10}, {"min_leaf", 1}, {"mtry", 0}});
            std::size_t mtry = p.get_count("mtry");
            if (mtry == 0)
                mtry = static_cast<std::size_t>(
                    std::ceil(std::sqrt(static_cast<double>(ds.dim()))));
            TreeParams tp{p.get_count("max_depth"), p.get_count("min_leaf"),
                          mtry >= ds.dim() ? 0 : mtry};
            return std::make_unique<BaggedModel>(ds, p.get_count("n_trees"), tp,
                                                 spec.seed);
        }
        case ClassifierKind::adaboost: {
            Params p(spec.params,
                     {{"n_estimators", 100}, {"max_depth", 3}, {"min_leaf", 1}});
            TreeParams tp{p.get_count("max_depth"), p.get_count("min_leaf"), 0};
            return std::make_unique<AdaBoostModel>(ds, p.get_count("n_estimators"), tp);
        }
    }
    throw DataError("unreachable classifier kind");
}

}  // namespace imbl
