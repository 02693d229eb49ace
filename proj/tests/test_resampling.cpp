#include <doctest.h>

#include <algorithm>
#include <set>

#include "imbl/resampling.hpp"

using namespace imbl;

namespace {

Dataset make(std::size_t n_neg, std::size_t n_pos, std::uint64_t seed = 1,
             double separation = 2.0) {
    SyntheticSpec spec;
    spec.n_total = n_neg + n_pos;
    spec.majority_fraction = double(n_neg) / double(n_neg + n_pos);
    spec.d = 3;
    spec.class_separation = separation;
    spec.seed = seed;
    return generate_synthetic(spec);
}

Dataset balanced(std::size_t per_class) {
    Dataset ds;
    ds.features = Matrix(2 * per_class, 2);
    for (std::size_t r = 0; r < 2 * per_class; ++r) {
        ds.features.at(r, 0) = double(r);
        ds.features.at(r, 1) = r < per_class ? -1.0 : 1.0;
        ds.labels.push_back(r < per_class ? Label::negative : Label::positive);
    }
    return ds;
}

bool row_equals(const Matrix& a, std::size_t ra, const Matrix& b, std::size_t rb) {
    for (std::size_t c = 0; c < a.cols(); ++c)
        if (a.at(ra, c) != b.at(rb, c)) return false;
    return true;
}

}  // namespace

TEST_CASE("random undersampling keeps the minority and balances") {
    const Dataset ds = make(60, 40);
    const ResampleOutcome out = random_undersample(ds, 5);
    CHECK(out.dataset.count(Label::positive) == 40);
    CHECK(out.dataset.count(Label::negative) == 40);
    for (const RowOrigin& o : out.origins) CHECK(o.kind == Provenance::original);
    // every kept row is an input row, verbatim
    for (std::size_t r = 0; r < out.dataset.size(); ++r)
        CHECK(row_equals(out.dataset.features, r, ds.features, out.origins[r].source));

    const ResampleOutcome again = random_undersample(ds, 5);
    CHECK(again.dataset.features == out.dataset.features);
    const ResampleOutcome other = random_undersample(ds, 6);
    CHECK(other.dataset.features != out.dataset.features);
}

TEST_CASE("balanced input passes through undersampling whole") {
    const Dataset ds = balanced(30);
    const ResampleOutcome out = random_undersample(ds, 0);
    CHECK(out.dataset.size() == 60);
    CHECK(out.dataset.features == ds.features);
}

TEST_CASE("random oversampling replicates to balance") {
    const Dataset ds = make(1800, 200);
    const ResampleOutcome out = random_oversample(ds, 9);
    CHECK(out.dataset.count(Label::positive) == 1800);
    CHECK(out.dataset.count(Label::negative) == 1800);
    std::size_t replicated = 0;
    for (std::size_t r = 0; r < out.dataset.size(); ++r) {
        const RowOrigin& o = out.origins[r];
        if (o.kind != Provenance::replicated) continue;
        ++replicated;
        CHECK(ds.labels[o.source] == Label::positive);
        CHECK(row_equals(out.dataset.features, r, ds.features, o.source));
    }
    CHECK(replicated == 1600);

    CHECK(random_oversample(balanced(25), 0).dataset.size() == 50);
}

TEST_CASE("smote on a two-point minority fills the segment") {
    Dataset ds;
    ds.features = Matrix(5, 2);
    ds.labels.assign(5, Label::negative);
    // minority rows 3,4 at (0,0) and (1,1)
    ds.features.at(4, 0) = 1.0;
    ds.features.at(4, 1) = 1.0;
    ds.labels[3] = Label::positive;
    ds.labels[4] = Label::positive;
    for (int r = 0; r < 3; ++r) ds.features.at(r, 0) = 10.0 + r;

    const ResampleOutcome out = smote(ds, 100, 1, 3);
    REQUIRE(out.dataset.size() == 7);
    for (std::size_t r = 5; r < 7; ++r) {
        const double x = out.dataset.features.at(r, 0);
        const double y = out.dataset.features.at(r, 1);
        CHECK(x == y);  // on the segment (g, g)
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        CHECK(out.dataset.labels[r] == Label::positive);
        CHECK(out.origins[r].kind == Provenance::synthetic);
    }
}

TEST_CASE("identical minority rows collapse smote to that point") {
    Dataset ds;
    ds.features = Matrix(6, 2);
    ds.labels.assign(6, Label::negative);
    for (int r = 3; r < 6; ++r) {
        ds.features.at(r, 0) = 2.5;
        ds.features.at(r, 1) = -1.0;
        ds.labels[r] = Label::positive;
    }
    const ResampleOutcome out = smote(ds, 200, 2, 0);
    REQUIRE(out.dataset.size() == 12);
    for (std::size_t r = 6; r < 12; ++r) {
        CHECK(out.dataset.features.at(r, 0) == 2.5);
        CHECK(out.dataset.features.at(r, 1) == -1.0);
    }
}

TEST_CASE("smote count semantics: 10 minority at 200% gives 20 synthetic") {
    const Dataset ds = make(40, 10);
    const ResampleOutcome out = smote(ds, 200, 5, 4);
    CHECK(out.dataset.size() == 70);
    CHECK(out.dataset.count(Label::positive) == 30);
    std::size_t synthetic = 0;
    for (const RowOrigin& o : out.origins)
        if (o.kind == Provenance::synthetic) ++synthetic;
    CHECK(synthetic == 20);
}

TEST_CASE("smote rows interpolate their recorded parents inside the bbox") {
    const Dataset ds = make(80, 20, 7);
    const auto minority = ds.indices_of(Label::positive);
    std::vector<double> lo(ds.dim(), 1e300), hi(ds.dim(), -1e300);
    for (std::size_t r : minority)
        for (std::size_t c = 0; c < ds.dim(); ++c) {
            lo[c] = std::min(lo[c], ds.features.at(r, c));
            hi[c] = std::max(hi[c], ds.features.at(r, c));
        }

    const ResampleOutcome out = smote(ds, 300, 5, 11);
    // originals untouched, in order
    for (std::size_t r = 0; r < ds.size(); ++r)
        CHECK(row_equals(out.dataset.features, r, ds.features, r));

    for (std::size_t r = ds.size(); r < out.dataset.size(); ++r) {
        const RowOrigin& o = out.origins[r];
        REQUIRE(o.kind == Provenance::synthetic);
        CHECK(o.gap >= 0.0);
        CHECK(o.gap <= 1.0);
        CHECK(ds.labels[o.source] == Label::positive);
        CHECK(ds.labels[o.parent] == Label::positive);
        CHECK(o.source != o.parent);  // self excluded from the neighbour list
        for (std::size_t c = 0; c < ds.dim(); ++c) {
            const double x = ds.features.at(o.source, c);
            const double y = ds.features.at(o.parent, c);
            CHECK(out.dataset.features.at(r, c) ==
                  doctest::Approx(x + o.gap * (y - x)).epsilon(1e-12));
            CHECK(out.dataset.features.at(r, c) >= lo[c] - 1e-12);
            CHECK(out.dataset.features.at(r, c) <= hi[c] + 1e-12);
        }
    }

    const ResampleOutcome again = smote(ds, 300, 5, 11);
    CHECK(again.dataset.features == out.dataset.features);
}

TEST_CASE("smote input contracts") {
    const Dataset ds = make(40, 4);
    CHECK_THROWS_AS(smote(ds, 100, 5, 0), DataError);  // k+1 > minority
    CHECK_THROWS_AS(smote(ds, 150, 3, 0), DataError);  // not a multiple of 100
    CHECK_THROWS_AS(smote(ds, 0, 3, 0), DataError);
}

TEST_CASE("smote_to_target spreads the remainder over low-index rows") {
    const Dataset ds = make(50, 7);
    const ResampleOutcome out = smote_to_target(ds, 17, 3, 2);
    CHECK(out.dataset.count(Label::positive) == 17);
    CHECK(out.dataset.count(Label::negative) == 50);
    // 10 synthetic over 7 rows: quota 1 each, remainder 3 to the lowest-indexed
    const auto minority = ds.indices_of(Label::positive);
    std::vector<std::size_t> per_row(ds.size(), 0);
    for (const RowOrigin& o : out.origins)
        if (o.kind == Provenance::synthetic) ++per_row[o.source];
    for (std::size_t i = 0; i < minority.size(); ++i)
        CHECK(per_row[minority[i]] == (i < 3 ? 2u : 1u));
}

TEST_CASE("identity returns the input unchanged") {
    const Dataset ds = make(30, 10);
    const ResampleOutcome out = identity(ds);
    CHECK(out.dataset.features == ds.features);
    CHECK(out.dataset.labels == ds.labels);
    for (const RowOrigin& o : out.origins) CHECK(o.kind == Provenance::original);
    const ResampleOutcome twice = identity(out.dataset);
    CHECK(twice.dataset.features == ds.features);
}
