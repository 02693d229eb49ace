#include <doctest.h>

#include <algorithm>

#include "imbl/neighbors.hpp"
#include "imbl/rng.hpp"

using namespace imbl;

TEST_CASE("distances are symmetric and zero on the diagonal") {
    const double a[] = {1.0, 2.0, -3.0};
    const double b[] = {-4.0, 0.5, 2.0};
    CHECK(squared_distance(a, b, 3) == squared_distance(b, a, 3));
    CHECK(squared_distance(a, a, 3) == 0.0);
    CHECK(euclidean_distance(a, b, 3) ==
          doctest::Approx(std::sqrt(squared_distance(a, b, 3))));
}

TEST_CASE("knn_indices honours exclusion") {
    Matrix pool(3, 2);
    pool.at(1, 0) = 1.0;
    pool.at(2, 0) = 3.0;
    const double q[] = {0.0, 0.0};
    const auto got = knn_indices(q, pool, 1, std::size_t{0});
    REQUIRE(got.size() == 1);
    CHECK(got[0] == 1);
}

TEST_CASE("a coincident pool row ranks first with distance zero") {
    Matrix pool(3, 2);
    pool.at(0, 0) = 5.0;
    pool.at(1, 0) = 2.0;
    pool.at(1, 1) = 2.0;
    const double q[] = {2.0, 2.0};
    const auto got = knn_indices(q, pool, 3);
    CHECK(got[0] == 1);
}

TEST_CASE("knn matches an exhaustive distance sort") {
    Rng rng(123);
    Matrix pool(5, 3);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 3; ++c) pool.at(r, c) = rng.uniform(-1, 1);
    const double q[] = {0.1, -0.2, 0.3};

    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t r = 0; r < 5; ++r)
        order.emplace_back(squared_distance(q, pool.row(r), 3), r);
    std::sort(order.begin(), order.end());

    const auto got = knn_indices(q, pool, 3);
    REQUIRE(got.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == order[i].second);

    // output is a prefix of the full exhaustive ordering
    const auto all = knn_indices(q, pool, 5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(all[i] == got[i]);
}

TEST_CASE("nn1_label follows the nearest row and breaks ties low") {
    Dataset train;
    train.features = Matrix(3, 1);
    train.features.at(0, 0) = -1.0;
    train.features.at(1, 0) = 1.0;
    train.features.at(2, 0) = 4.0;
    train.labels = {Label::negative, Label::positive, Label::negative};

    const double on_row[] = {4.0};
    CHECK(nn1_label(train, on_row) == Label::negative);

    const double midpoint[] = {0.0};  // equidistant from rows 0 and 1
    CHECK(nn1_label(train, midpoint) == Label::negative);
}

TEST_CASE("nn1_label agrees with a linear scan on a 20-point instance") {
    Rng rng(7);
    Dataset train;
    train.features = Matrix(20, 2);
    for (std::size_t r = 0; r < 20; ++r) {
        train.features.at(r, 0) = rng.uniform(-2, 2);
        train.features.at(r, 1) = rng.uniform(-2, 2);
        train.labels.push_back(r % 3 == 0 ? Label::positive : Label::negative);
    }
    for (int t = 0; t < 50; ++t) {
        const double q[] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        double best = 1e300;
        Label expect = Label::negative;
        for (std::size_t r = 0; r < 20; ++r) {
            const double d = squared_distance(q, train.features.row(r), 2);
            if (d < best) {
                best = d;
                expect = train.labels[r];
            }
        }
        CHECK(nn1_label(train, q) == expect);
    }
}
