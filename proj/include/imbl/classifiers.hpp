#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "imbl/dataset.hpp"

namespace imbl {

enum class ClassifierKind { knn, gnb, tree, bagging, random_forest, adaboost };

ClassifierKind classifier_kind_from(const std::string& name);
std::string to_string(ClassifierKind kind);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::knn;
    std::map<std::string, double> params;  // overrides; unknown keys are errors
    std::uint64_t seed = 0;
};

class Model {
public:
    virtual ~Model() = default;
    virtual std::vector<Label> predict(const Matrix& features) const = 0;
    // Positive-class score in [0, 1] (vote fraction / posterior / leaf fraction).
    virtual std::vector<double> score_positive(const Matrix& features) const = 0;
};

// Defaults: knn k=10; tree max_depth=10 min_leaf=2; bagging n_estimators=100
// max_depth=5; adaboost n_estimators=100 max_depth=3; random_forest
// n_trees=1000, per-split feature subset of ceil(sqrt(d)).
std::unique_ptr<Model> train(const ClassifierSpec& spec, const Dataset& ds);

}  // namespace imbl
