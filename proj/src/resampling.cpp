#include "imbl/resampling.hpp"

#include <algorithm>

#include "imbl/neighbors.hpp"
#include "imbl/rng.hpp"

namespace imbl {

namespace {

void require_classes(const Dataset& ds) {
    if (ds.count(Label::positive) == 0) throw DataError("resample: minority class is empty");
    if (ds.count(Label::negative) == 0) throw DataError("resample: majority class is empty");
}

ResampleOutcome keep_rows(const Dataset& ds, std::vector<std::size_t> rows) {
    std::sort(rows.begin(), rows.end());  // preserve input order
    ResampleOutcome out;
    out.dataset = ds.subset(rows);
    out.origins.reserve(rows.size());
    for (std::size_t r : rows) out.origins.push_back({Provenance::original, r, 0, 0.0});
    return out;
}

}  // namespace

ResampleOutcome random_undersample(const Dataset& ds, std::uint64_t seed) {
    require_classes(ds);
    const auto minority = ds.indices_of(Label::positive);
    auto majority = ds.indices_of(Label::negative);
    if (majority.size() < minority.size())
        throw DataError("random_undersample: majority class smaller than minority");

    Rng rng(seed);
    for (std::size_t i = 0; i < minority.size(); ++i)  // partial Fisher-Yates
        std::swap(majority[i], majority[i + rng.index(majority.size() - i)]);
    majority.resize(minority.size());

    std::vector<std::size_t> keep = minority;
    keep.insert(keep.end(), majority.begin(), majority.end());
    return keep_rows(ds, std::move(keep));
}

ResampleOutcome random_oversample(const Dataset& ds, std::uint64_t seed) {
    require_classes(ds);
    const auto minority = ds.indices_of(Label::positive);
    const std::size_t n_major = ds.count(Label::negative);
    if (n_major < minority.size())
        throw DataError("random_oversample: majority class smaller than minority");

    ResampleOutcome out = identity(ds);
    Rng rng(seed);
    for (std::size_t i = minority.size(); i < n_major; ++i) {
        const std::size_t src = minority[rng.index(minority.size())];
        out.dataset.features.append_row(ds.features.row(src));
        out.dataset.labels.push_back(Label::positive);
        if (!out.dataset.row_ids.empty()) out.dataset.row_ids.push_back(ds.row_ids[src]);
        out.origins.push_back({Provenance::replicated, src, 0, 0.0});
    }
    return out;
}

namespace {

ResampleOutcome smote_with_quota(const Dataset& ds,
                                 const std::vector<std::size_t>& quota,
                                 std::size_t k, std::uint64_t seed) {
    const auto minority = ds.indices_of(Label::positive);
    if (minority.size() < k + 1)
        throw DataError("smote: need at least k+1 = " + std::to_string(k + 1) +
                        " minority rows, have " + std::to_string(minority.size()));

    const std::size_t d = ds.dim();
    Matrix pool(minority.size(), d);
    for (std::size_t i = 0; i < minority.size(); ++i)
        std::copy_n(ds.features.row(minority[i]), d, pool.row(i));

    ResampleOutcome out = identity(ds);
    std::vector<double> synth(d);
    for (std::size_t i = 0; i < minority.size(); ++i) {
        if (quota[i] == 0) continue;
        const double* x = pool.row(i);
        const auto neighbours = knn_indices(x, pool, k, i);
        Rng rng(derive_seed(seed, minority[i]));  // per-row stream
        for (std::size_t q = 0; q < quota[i]; ++q) {
            const std::size_t pick = neighbours[rng.index(k)];
            const double* y = pool.row(pick);
            const double gap = rng.uniform();
            for (std::size_t c = 0; c < d; ++c) synth[c] = x[c] + gap * (y[c] - x[c]);
            out.dataset.features.append_row(synth.data());
            out.dataset.labels.push_back(Label::positive);
            if (!out.dataset.row_ids.empty()) out.dataset.row_ids.emplace_back("synthetic");
            out.origins.push_back({Provenance::synthetic, minority[i], minority[pick], gap});
        }
    }
    return out;
}

}  // namespace

ResampleOutcome smote(const Dataset& ds, int amount_pct, std::size_t k,
                      std::uint64_t seed) {
    require_classes(ds);
    if (amount_pct <= 0 || amount_pct % 100 != 0)
        throw DataError("smote: amount must be a positive multiple of 100");
    const std::size_t per_row = static_cast<std::size_t>(amount_pct) / 100;
    std::vector<std::size_t> quota(ds.count(Label::positive), per_row);
    return smote_with_quota(ds, quota, k, seed);
}

ResampleOutcome smote_to_target(const Dataset& ds, std::size_t target_minority,
                                std::size_t k, std::uint64_t seed) {
    require_classes(ds);
    const std::size_t n_minor = ds.count(Label::positive);
    if (target_minority < n_minor)
        throw DataError("smote_to_target: target below current minority size");
    const std::size_t total = target_minority - n_minor;
    std::vector<std::size_t> quota(n_minor, total / n_minor);
    for (std::size_t i = 0; i < total % n_minor; ++i) ++quota[i];
    return smote_with_quota(ds, quota, k, seed);
}

ResampleOutcome identity(const Dataset& ds) {
    ResampleOutcome out;
    out.dataset = ds;
    out.origins.reserve(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r)
        out.origins.push_back({Provenance::original, r, 0, 0.0});
    return out;
}

}  // namespace imbl
