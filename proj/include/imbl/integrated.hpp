#pragma once

#include "imbl/pso.hpp"
#include "imbl/resampling.hpp"

namespace imbl {

struct IntegratedConfig {
    int smote_amount_pct = 100;     // whole multiples of 100
    double smote_fraction = 0.0;    // > 0: grow minority to fraction * n_major instead
    std::size_t smote_k = 5;
    PsoConfig pso;                  // target_ones is derived, see integrated_resample
};

struct IntegratedOutcome {
    ResampleOutcome resampled;  // enlarged minority + selected majority, balanced
    PsoTrace trace;
};

// SMOTE the minority, then PSO-select an equal-sized majority subset. The PSO
// fitness is measured against the enlarged (post-SMOTE) minority.
IntegratedOutcome integrated_resample(const Dataset& ds,
                                      const IntegratedConfig& cfg,
                                      std::uint64_t seed);

}  // namespace imbl
