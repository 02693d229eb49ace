#include "imbl/integrated.hpp"

#include <algorithm>
#include <cmath>

namespace imbl {

IntegratedOutcome integrated_resample(const Dataset& ds,
                                      const IntegratedConfig& cfg,
                                      std::uint64_t seed) {
    ds.require_trainable();
    const auto min_rows = ds.indices_of(Label::positive);
    const auto maj_rows = ds.indices_of(Label::negative);
    const std::size_t n_minor = min_rows.size();
    const std::size_t n_major = maj_rows.size();

    std::size_t target;  // enlarged minority size m'
    if (cfg.smote_fraction > 0.0) {
        target = static_cast<std::size_t>(
            std::llround(cfg.smote_fraction * static_cast<double>(n_major)));
        target = std::max(target, n_minor);
    } else {
        target = n_minor * (1 + static_cast<std::size_t>(cfg.smote_amount_pct) / 100);
    }
    if (target > n_major) {
        const std::size_t max_pct = (n_major - n_minor) / n_minor * 100;
        std::string hint =
            max_pct >= 100
                ? "largest feasible whole multiple is " + std::to_string(max_pct) + "%"
                : "no whole multiple of 100% is feasible; use the fractional "
                  "minority-growth mode";
        throw DataError("integrated: enlarged minority (" + std::to_string(target) +
                        ") would exceed majority (" + std::to_string(n_major) +
                        "); " + hint);
    }

    const std::uint64_t smote_seed = derive_seed(seed, hash_str("smote"));
    ResampleOutcome grown =
        cfg.smote_fraction > 0.0
            ? smote_to_target(ds, target, cfg.smote_k, smote_seed)
            : smote(ds, cfg.smote_amount_pct, cfg.smote_k, smote_seed);

    // Enlarged minority pool: original minority rows then the synthetic rows.
    std::vector<std::size_t> grown_minority = min_rows;
    for (std::size_t r = ds.size(); r < grown.dataset.size(); ++r)
        grown_minority.push_back(r);

    PsoConfig pso_cfg = cfg.pso;
    pso_cfg.target_ones = target;
    pso_cfg.seed = derive_seed(seed, hash_str("pso"));
    PsoResult pso = pso_undersample(grown.dataset.subset(grown_minority),
                                    ds.subset(maj_rows), pso_cfg);

    std::vector<std::uint8_t> keep_major(ds.size(), 0);
    for (std::size_t j : pso.selected) keep_major[maj_rows[j]] = 1;

    IntegratedOutcome out;
    out.trace = std::move(pso.trace);
    out.resampled.dataset.feature_names = ds.feature_names;
    out.resampled.dataset.features = Matrix(0, ds.dim());
    for (std::size_t r = 0; r < ds.size(); ++r) {
        if (ds.labels[r] != Label::positive && !keep_major[r]) continue;
        out.resampled.dataset.features.append_row(ds.features.row(r));
        out.resampled.dataset.labels.push_back(ds.labels[r]);
        out.resampled.origins.push_back({Provenance::original, r, 0, 0.0});
    }
    for (std::size_t r = ds.size(); r < grown.dataset.size(); ++r) {
        out.resampled.dataset.features.append_row(grown.dataset.features.row(r));
        out.resampled.dataset.labels.push_back(Label::positive);
        out.resampled.origins.push_back(grown.origins[r]);
    }
    return out;
}

}  // namespace imbl
