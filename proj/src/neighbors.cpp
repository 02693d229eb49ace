#include "imbl/neighbors.hpp"

#include <algorithm>
#include <cmath>

namespace imbl {

double squared_distance(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

double euclidean_distance(const double* a, const double* b, std::size_t d) {
    return std::sqrt(squared_distance(a, b, d));
}

std::vector<std::size_t> knn_indices(const double* query, const Matrix& pool,
                                     std::size_t k,
                                     std::optional<std::size_t> exclude) {
    const std::size_t m = pool.rows();
    const std::size_t available = m - (exclude && *exclude < m ? 1 : 0);
    if (k > available)
        throw DataError("knn: k=" + std::to_string(k) + " exceeds pool of " +
                        std::to_string(available));

    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(m);
    for (std::size_t r = 0; r < m; ++r) {
        if (exclude && *exclude == r) continue;
        dist.emplace_back(squared_distance(query, pool.row(r), pool.cols()), r);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                      dist.end());  // pair ordering gives the row-index tie-break
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
}

Label nn1_label(const Dataset& train, const double* point) {
    if (train.size() == 0) throw DataError("nn1: empty training set");
    std::size_t best = 0;
    double best_d = squared_distance(point, train.features.row(0), train.dim());
    for (std::size_t r = 1; r < train.size(); ++r) {
        const double d = squared_distance(point, train.features.row(r), train.dim());
        if (d < best_d) {
            best_d = d;
            best = r;
        }
    }
    return train.labels[best];
}

}  // namespace imbl
