#include <doctest.h>

#include "imbl/classifiers.hpp"
#include "imbl/dataset.hpp"
#include "imbl/metrics.hpp"
#include "imbl/rng.hpp"

using namespace imbl;

namespace {

Dataset one_dimensional(const std::vector<double>& xs, const std::vector<Label>& ys) {
    Dataset ds;
    ds.features = Matrix(xs.size(), 1);
    for (std::size_t r = 0; r < xs.size(); ++r) ds.features.at(r, 0) = xs[r];
    ds.labels = ys;
    return ds;
}

ClassifierSpec spec_of(ClassifierKind kind,
                       std::map<std::string, double> params = {},
                       std::uint64_t seed = 0) {
    ClassifierSpec s;
    s.kind = kind;
    s.params = std::move(params);
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("a depth-1 tree separates signed 1-D data perfectly") {
    const Dataset ds = one_dimensional(
        {-3, -2, -1, 1, 2, 3},
        {Label::negative, Label::negative, Label::negative, Label::positive,
         Label::positive, Label::positive});
    const auto model = train(spec_of(ClassifierKind::tree, {{"max_depth", 1}, {"min_leaf", 1}}), ds);
    CHECK(model->predict(ds.features) == ds.labels);
}

TEST_CASE("gnb places the boundary at zero for symmetric classes") {
    Rng rng(8);
    std::vector<double> xs;
    std::vector<Label> ys;
    for (int i = 0; i < 200; ++i) {
        xs.push_back(-3.0 + rng.normal());
        ys.push_back(Label::negative);
        xs.push_back(3.0 + rng.normal());
        ys.push_back(Label::positive);
    }
    const auto model = train(spec_of(ClassifierKind::gnb), one_dimensional(xs, ys));
    Matrix probe(2, 1);
    probe.at(0, 0) = -0.4;
    probe.at(1, 0) = 0.4;
    const auto labels = model->predict(probe);
    CHECK(labels[0] == Label::negative);
    CHECK(labels[1] == Label::positive);
}

TEST_CASE("gnb positive score behaves as a posterior") {
    const Dataset ds = one_dimensional(
        {-2, -1.5, -1, 1, 1.5, 2},
        {Label::negative, Label::negative, Label::negative, Label::positive,
         Label::positive, Label::positive});
    const auto model = train(spec_of(ClassifierKind::gnb), ds);
    const auto scores = model->score_positive(ds.features);
    const auto labels = model->predict(ds.features);
    for (std::size_t r = 0; r < scores.size(); ++r) {
        CHECK(scores[r] > 0.0);
        CHECK(scores[r] < 1.0);  // the complement class keeps the residual mass
        CHECK((scores[r] >= 0.5) == (labels[r] == Label::positive));
    }
}

TEST_CASE("knn with k=1 memorizes the training labels") {
    SyntheticSpec gen{60, 0.7, 4, 1.0, 12};
    const Dataset ds = generate_synthetic(gen);
    const auto model = train(spec_of(ClassifierKind::knn, {{"k", 1}}), ds);
    CHECK(model->predict(ds.features) == ds.labels);
}

TEST_CASE("knn vote ties go to the positive class") {
    const Dataset ds = one_dimensional(
        {-1, 1}, {Label::negative, Label::positive});
    const auto model = train(spec_of(ClassifierKind::knn, {{"k", 2}}), ds);
    Matrix probe(1, 1);  // both neighbours vote, one each way
    probe.at(0, 0) = 0.0;
    CHECK(model->predict(probe)[0] == Label::positive);
}

TEST_CASE("a single-member bagged ensemble equals the plain tree") {
    SyntheticSpec gen{120, 0.75, 5, 2.0, 6};
    const Dataset ds = generate_synthetic(gen);
    const auto tree = train(
        spec_of(ClassifierKind::tree, {{"max_depth", 10}, {"min_leaf", 1}}), ds);
    const auto bag = train(
        spec_of(ClassifierKind::bagging,
                {{"n_estimators", 1}, {"max_depth", 10}, {"min_leaf", 1}}, 5),
        ds);
    const auto forest = train(
        spec_of(ClassifierKind::random_forest,
                {{"n_trees", 1}, {"max_depth", 10}, {"min_leaf", 1}, {"mtry", 5}}, 5),
        ds);
    CHECK(bag->predict(ds.features) == tree->predict(ds.features));
    CHECK(forest->predict(ds.features) == tree->predict(ds.features));
}

TEST_CASE("unanimous ensembles vote like one member") {
    const Dataset ds = one_dimensional(
        {-2, -1, 1, 2},
        {Label::negative, Label::negative, Label::positive, Label::positive});
    // trivially separable, so every bootstrap tree learns the same boundary
    const auto bag = train(
        spec_of(ClassifierKind::bagging,
                {{"n_estimators", 100}, {"max_depth", 5}, {"min_leaf", 1}}, 3),
        ds);
    const auto tree =
        train(spec_of(ClassifierKind::tree, {{"max_depth", 5}, {"min_leaf", 1}}), ds);
    Matrix probe(4, 1);
    probe.at(0, 0) = -5.0;
    probe.at(1, 0) = -0.9;
    probe.at(2, 0) = 0.9;
    probe.at(3, 0) = 5.0;
    CHECK(bag->predict(probe) == tree->predict(probe));
}

TEST_CASE("random forest separates the wide-margin generator instance") {
    SyntheticSpec gen{600, 0.7, 20, 6.0, 3};
    const Dataset ds = generate_synthetic(gen);
    const FoldPlan plan = stratified_folds(ds, 2, 1);
    const Dataset tr = ds.subset(plan.fold_rows(0));
    const Dataset te = ds.subset(plan.fold_rows(1));
    const auto model =
        train(spec_of(ClassifierKind::random_forest, {{"n_trees", 100}}, 9), tr);
    const auto m = score(confusion(model->predict(te.features), te.labels));
    CHECK(m.gmean > 0.9);
}

TEST_CASE("adaboost halts after a perfect first stage") {
    const Dataset ds = one_dimensional(
        {-3, -2, -1, 1, 2, 3},
        {Label::negative, Label::negative, Label::negative, Label::positive,
         Label::positive, Label::positive});
    const auto model = train(spec_of(ClassifierKind::adaboost), ds);
    CHECK(model->predict(ds.features) == ds.labels);
    // with a lone perfect stage the vote is unanimous: scores are exactly 0/1
    for (double s : model->score_positive(ds.features))
        CHECK((s == 0.0 || s == 1.0));
}

TEST_CASE("adaboost improves on its depth-limited base tree") {
    SyntheticSpec gen{400, 0.75, 6, 1.5, 21};
    const Dataset ds = generate_synthetic(gen);
    const FoldPlan plan = stratified_folds(ds, 2, 3);
    const Dataset tr = ds.subset(plan.fold_rows(0));
    const Dataset te = ds.subset(plan.fold_rows(1));
    const auto stump = train(
        spec_of(ClassifierKind::tree, {{"max_depth", 1}, {"min_leaf", 1}}), tr);
    const auto boosted = train(
        spec_of(ClassifierKind::adaboost, {{"n_estimators", 50}, {"max_depth", 1}}), tr);
    const auto f_stump = score(confusion(stump->predict(te.features), te.labels)).f_measure;
    const auto f_boost = score(confusion(boosted->predict(te.features), te.labels)).f_measure;
    CHECK(f_boost >= f_stump - 1e-12);
}

TEST_CASE("all models score within [0,1] and survive their training data") {
    SyntheticSpec gen{100, 0.8, 4, 2.0, 14};
    const Dataset ds = generate_synthetic(gen);
    for (ClassifierKind kind :
         {ClassifierKind::knn, ClassifierKind::gnb, ClassifierKind::tree,
          ClassifierKind::bagging, ClassifierKind::random_forest,
          ClassifierKind::adaboost}) {
        ClassifierSpec s = spec_of(kind, {}, 2);
        if (kind == ClassifierKind::bagging || kind == ClassifierKind::adaboost)
            s.params["n_estimators"] = 20;
        if (kind == ClassifierKind::random_forest) s.params["n_trees"] = 20;
        const auto model = train(s, ds);
        const auto labels = model->predict(ds.features);
        const auto scores = model->score_positive(ds.features);
        REQUIRE(labels.size() == ds.size());
        for (std::size_t r = 0; r < ds.size(); ++r) {
            CHECK((labels[r] == Label::positive || labels[r] == Label::negative));
            CHECK(scores[r] >= 0.0);
            CHECK(scores[r] <= 1.0);
        }
    }
}

TEST_CASE("training errors are reported") {
    Dataset single;
    single.features = Matrix(3, 1);
    single.labels.assign(3, Label::negative);
    CHECK_THROWS_AS(train(spec_of(ClassifierKind::tree), single), DataError);

    SyntheticSpec gen{30, 0.7, 2, 2.0, 4};
    const Dataset ds = generate_synthetic(gen);
    CHECK_THROWS_AS(train(spec_of(ClassifierKind::knn, {{"bogus", 1}}), ds), DataError);
    CHECK_THROWS_AS(train(spec_of(ClassifierKind::knn, {{"k", 0}}), ds), DataError);
    CHECK_THROWS_AS(train(spec_of(ClassifierKind::gnb, {{"var_floor", -1.0}}), ds),
                    DataError);
    CHECK_THROWS_AS(train(spec_of(ClassifierKind::tree, {{"max_depth", 2.5}}), ds),
                    DataError);

    const auto model = train(spec_of(ClassifierKind::knn), ds);
    Matrix wrong(1, 5);
    CHECK_THROWS_AS(model->predict(wrong), DataError);
}

TEST_CASE("classifier kind names round-trip") {
    for (const char* name :
         {"knn", "gnb", "tree", "bagging", "random_forest", "adaboost"})
        CHECK(to_string(classifier_kind_from(name)) == name);
    CHECK_THROWS_AS(classifier_kind_from("svm"), DataError);
}
