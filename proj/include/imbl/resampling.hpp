#pragma once

#include <cstdint>
#include <vector>

#include "imbl/dataset.hpp"

namespace imbl {

enum class Provenance : std::uint8_t { original, replicated, synthetic };

struct RowOrigin {
    Provenance kind = Provenance::original;
    std::size_t source = 0;    // input row index (original/replicated); parent x (synthetic)
    std::size_t parent = 0;    // parent y (synthetic only)
    double gap = 0.0;          // interpolation factor (synthetic only)
};

struct ResampleOutcome {
    Dataset dataset;
    std::vector<RowOrigin> origins;  // one per output row
};

// Keeps all minority rows plus a uniform random majority subset of equal size.
ResampleOutcome random_undersample(const Dataset& ds, std::uint64_t seed);

// Appends uniform-with-replacement minority copies until class counts match.
ResampleOutcome random_oversample(const Dataset& ds, std::uint64_t seed);

// Synthetic minority over-sampling: each synthetic row is x + g*(y - x) for a
// minority row x, one of its k minority nearest neighbours y (self excluded),
// and a single scalar g in [0,1].
//
// amount_pct must be a positive multiple of 100; amount_pct/100 synthetic rows
// are generated per minority row.
ResampleOutcome smote(const Dataset& ds, int amount_pct, std::size_t k,
                      std::uint64_t seed);

// SMOTE growing the minority to exactly `target_minority` rows; the synthetic
// quota is spread over minority rows by floor division, with the remainder
// going to the lowest-indexed rows.
ResampleOutcome smote_to_target(const Dataset& ds, std::size_t target_minority,
                                std::size_t k, std::uint64_t seed);

// The no-resampling baseline.
ResampleOutcome identity(const Dataset& ds);

}  // namespace imbl
