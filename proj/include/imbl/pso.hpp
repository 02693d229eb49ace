#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "imbl/dataset.hpp"
#include "imbl/rng.hpp"

namespace imbl {

using Bitmask = std::vector<std::uint8_t>;  // one byte per majority row

struct PsoConfig {
    std::size_t swarm_size = 40;
    std::size_t max_iterations = 2000;
    double c1 = 2.0;  // cognitive
    double c2 = 2.0;  // social
    double inertia = 1.0;
    double v_max = 4.0;
    std::size_t target_ones = 0;
    std::size_t fitness_folds = 5;
    std::uint64_t seed = 0;
    std::size_t patience = 200;  // stop after this many non-improving iterations
    std::size_t threads = 1;
};

struct PsoTrace {
    std::vector<double> best_fitness;  // per iteration, entry 0 = initial swarm
    Bitmask best_position;
    double best_value = 0.0;
    std::size_t evaluations = 0;
};

// Precomputed state shared by every fitness evaluation of one run: the
// candidate pools, a fixed stratified fold assignment per pool row, and the
// pairwise distance matrix. Working-set row order is minority first, then
// selected majority, so distance ties resolve to the lowest minority index.
class FitnessContext {
public:
    FitnessContext(const Dataset& minority_pool, const Dataset& majority_pool,
                   std::size_t folds, std::uint64_t seed);

    // Mean per-fold F-measure of a 1-NN classifier on the working set
    // (all minority rows + majority rows where mask is 1), in [0, 1].
    double evaluate(const Bitmask& mask) const;

    std::size_t minority_size() const { return n_min_; }
    std::size_t majority_size() const { return n_maj_; }
    std::size_t folds() const { return folds_; }

private:
    std::size_t n_min_, n_maj_, folds_;
    std::vector<std::size_t> fold_of_;   // pool row (minority first) -> fold
    std::vector<double> dist_;           // squared distances, (n_min+n_maj)^2
};

// Standalone fitness per the module contract; builds a context and evaluates.
double fitness(const Bitmask& mask, const Dataset& ds, std::size_t folds,
               std::uint64_t seed);

// Flip uniformly chosen bits until popcount(mask) == target_ones.
Bitmask repair(Bitmask mask, std::size_t target_ones, Rng& rng);

struct PsoResult {
    std::vector<std::size_t> selected;  // indices into the majority pool
    PsoTrace trace;
};

// Binary PSO over fixed-size majority subsets, maximizing 1-NN F-measure.
PsoResult pso_undersample(const Dataset& minority_pool,
                          const Dataset& majority_pool, const PsoConfig& cfg);

// Convenience wrapper splitting `ds` by class; returned indices are rows of `ds`.
PsoResult pso_undersample(const Dataset& ds, const PsoConfig& cfg);

}  // namespace imbl
