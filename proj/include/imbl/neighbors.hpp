#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "imbl/dataset.hpp"

namespace imbl {

double squared_distance(const double* a, const double* b, std::size_t d);
double euclidean_distance(const double* a, const double* b, std::size_t d);

// Indices of the k nearest pool rows, ascending distance, ties broken by
// ascending row index. `exclude` (if set) is never returned.
std::vector<std::size_t> knn_indices(const double* query, const Matrix& pool,
                                     std::size_t k,
                                     std::optional<std::size_t> exclude = {});

// Label of the single nearest training row (distance tie -> lowest row index).
Label nn1_label(const Dataset& train, const double* point);

}  // namespace imbl
