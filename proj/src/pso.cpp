#include "imbl/pso.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace imbl {

namespace {

std::uint64_t stream_salt(std::size_t particle, std::size_t iteration) {
    return (static_cast<std::uint64_t>(particle) << 32) ^ iteration;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::string cache_key(const Bitmask& mask) {
    return std::string(reinterpret_cast<const char*>(mask.data()), mask.size());
}

}  // namespace

FitnessContext::FitnessContext(const Dataset& minority_pool,
                               const Dataset& majority_pool, std::size_t folds,
                               std::uint64_t seed)
    : n_min_(minority_pool.size()), n_maj_(majority_pool.size()), folds_(folds) {
    if (folds < 2) throw DataError("fitness: fold count must be at least 2");
    if (n_min_ < folds)
        throw DataError("fitness: minority class smaller than fold count");
    if (minority_pool.dim() != majority_pool.dim())
        throw DataError("fitness: dimension mismatch between pools");

    // Stratified fold assignment fixed for the whole run: shuffle each pool,
    // deal round-robin, the deal counter carrying over between pools.
    fold_of_.assign(n_min_ + n_maj_, 0);
    Rng rng(derive_seed(seed, hash_str("fitness-folds")));
    std::size_t deal = 0;
    for (int pool = 0; pool < 2; ++pool) {
        const std::size_t base = pool == 0 ? 0 : n_min_;
        const std::size_t n = pool == 0 ? n_min_ : n_maj_;
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = n; i > 1; --i)
            std::swap(idx[i - 1], idx[rng.index(i)]);
        for (std::size_t i : idx) fold_of_[base + i] = deal++ % folds;
    }

    const std::size_t total = n_min_ + n_maj_;
    const std::size_t d = minority_pool.dim();
    dist_.assign(total * total, 0.0);
    auto row_ptr = [&](std::size_t g) {
        return g < n_min_ ? minority_pool.features.row(g)
                          : majority_pool.features.row(g - n_min_);
    };
    for (std::size_t a = 0; a < total; ++a) {
        const double* pa = row_ptr(a);
        for (std::size_t b = a + 1; b < total; ++b) {
            double s = 0.0;
            const double* pb = row_ptr(b);
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = pa[c] - pb[c];
                s += diff * diff;
            }
            dist_[a * total + b] = s;
            dist_[b * total + a] = s;
        }
    }
}

double FitnessContext::evaluate(const Bitmask& mask) const {
    const std::size_t total = n_min_ + n_maj_;
    std::vector<std::uint32_t> working;
    working.reserve(total);
    for (std::size_t i = 0; i < n_min_; ++i) working.push_back(static_cast<std::uint32_t>(i));
    std::size_t selected = 0;
    for (std::size_t j = 0; j < n_maj_; ++j)
        if (mask[j]) {
            working.push_back(static_cast<std::uint32_t>(n_min_ + j));
            ++selected;
        }
    if (selected < folds_)
        throw DataError("fitness: mask selects fewer majority rows than folds");

    double f_sum = 0.0;
    for (std::size_t f = 0; f < folds_; ++f) {
        std::size_t tp = 0, fn = 0, fp = 0;
        for (std::uint32_t gi : working) {
            if (fold_of_[gi] != f) continue;
            const double* drow = &dist_[static_cast<std::size_t>(gi) * total];
            std::uint32_t best = 0;
            double best_d = -1.0;
            for (std::uint32_t gj : working) {
                if (fold_of_[gj] == f) continue;
                const double d = drow[gj];
                if (best_d < 0.0 || d < best_d) {  // ties keep the earliest row
                    best_d = d;
                    best = gj;
                }
            }
            const bool actual_pos = gi < n_min_;
            const bool pred_pos = best < n_min_;
            if (actual_pos && pred_pos) ++tp;
            else if (actual_pos) ++fn;
            else if (pred_pos) ++fp;
        }
        const std::size_t denom = 2 * tp + fp + fn;
        f_sum += denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom)
                           : 0.0;
    }
    return f_sum / static_cast<double>(folds_);
}

double fitness(const Bitmask& mask, const Dataset& ds, std::size_t folds,
               std::uint64_t seed) {
    const auto min_rows = ds.indices_of(Label::positive);
    const auto maj_rows = ds.indices_of(Label::negative);
    if (mask.size() != maj_rows.size())
        throw DataError("fitness: mask length does not match majority count");
    FitnessContext ctx(ds.subset(min_rows), ds.subset(maj_rows), folds, seed);
    return ctx.evaluate(mask);
}

Bitmask repair(Bitmask mask, std::size_t target_ones, Rng& rng) {
    if (target_ones > mask.size())
        throw DataError("repair: target exceeds mask length");
    std::vector<std::size_t> ones, zeros;
    for (std::size_t i = 0; i < mask.size(); ++i)
        (mask[i] ? ones : zeros).push_back(i);

    if (ones.size() > target_ones) {
        const std::size_t excess = ones.size() - target_ones;
        for (std::size_t i = 0; i < excess; ++i) {
            std::swap(ones[i], ones[i + rng.index(ones.size() - i)]);
            mask[ones[i]] = 0;
        }
    } else if (ones.size() < target_ones) {
        const std::size_t deficit = target_ones - ones.size();
        for (std::size_t i = 0; i < deficit; ++i) {
            std::swap(zeros[i], zeros[i + rng.index(zeros.size() - i)]);
            mask[zeros[i]] = 1;
        }
    }
    return mask;
}

namespace {

struct Swarm {
    std::vector<Bitmask> position;
    std::vector<std::vector<double>> velocity;
    std::vector<Bitmask> pbest;
    std::vector<double> pbest_fit;
};

class CachedEvaluator {
public:
    CachedEvaluator(const FitnessContext& ctx, std::size_t threads)
        : ctx_(ctx), threads_(std::max<std::size_t>(1, threads)) {}

    // Fitness for every mask; cache misses are evaluated (possibly in
    // parallel) and the miss count accumulated into `evaluations`.
    std::vector<double> operator()(const std::vector<Bitmask>& masks,
                                   std::size_t& evaluations) {
        std::vector<double> out(masks.size());
        std::vector<std::size_t> misses;
        for (std::size_t i = 0; i < masks.size(); ++i) {
            auto it = cache_.find(cache_key(masks[i]));
            if (it != cache_.end()) out[i] = it->second;
            else misses.push_back(i);
        }
        if (!misses.empty()) {
            std::vector<double> values(misses.size());
            auto worker = [&](std::size_t begin, std::size_t end) {
                for (std::size_t m = begin; m < end; ++m)
                    values[m] = ctx_.evaluate(masks[misses[m]]);
            };
            if (threads_ == 1 || misses.size() == 1) {
                worker(0, misses.size());
            } else {
                std::vector<std::thread> pool;
                const std::size_t chunk =
                    (misses.size() + threads_ - 1) / threads_;
                for (std::size_t t = 0; t < threads_; ++t) {
                    const std::size_t b = t * chunk;
                    if (b >= misses.size()) break;
                    pool.emplace_back(worker, b, std::min(b + chunk, misses.size()));
                }
                for (auto& th : pool) th.join();
            }
            for (std::size_t m = 0; m < misses.size(); ++m) {
                out[misses[m]] = values[m];
                cache_.emplace(cache_key(masks[misses[m]]), values[m]);
            }
            evaluations += misses.size();
        }
        return out;
    }

private:
    const FitnessContext& ctx_;
    std::size_t threads_;
    std::unordered_map<std::string, double> cache_;
};

}  // namespace

PsoResult pso_undersample(const Dataset& minority_pool,
                          const Dataset& majority_pool, const PsoConfig& cfg) {
    const std::size_t n = majority_pool.size();
    if (cfg.swarm_size < 2) throw DataError("pso: swarm size must be at least 2");
    if (cfg.target_ones == 0 || cfg.target_ones > n)
        throw DataError("pso: target subset size " + std::to_string(cfg.target_ones) +
                        " infeasible for " + std::to_string(n) + " majority rows");

    FitnessContext ctx(minority_pool, majority_pool, cfg.fitness_folds, cfg.seed);
    CachedEvaluator evaluate(ctx, cfg.threads);

    Swarm s;
    s.position.resize(cfg.swarm_size);
    s.velocity.resize(cfg.swarm_size);
    for (std::size_t p = 0; p < cfg.swarm_size; ++p) {
        Rng rng(derive_seed(cfg.seed, stream_salt(p, 0xffffffffu)));
        s.position[p] = repair(Bitmask(n, 0), cfg.target_ones, rng);
        s.velocity[p].resize(n);
        for (std::size_t j = 0; j < n; ++j)
            s.velocity[p][j] = rng.uniform(-cfg.v_max, cfg.v_max);
    }

    PsoResult result;
    std::size_t& evals = result.trace.evaluations;
    std::vector<double> fit = evaluate(s.position, evals);
    s.pbest = s.position;
    s.pbest_fit = fit;

    std::size_t gbest_idx = 0;
    for (std::size_t p = 1; p < cfg.swarm_size; ++p)
        if (fit[p] > fit[gbest_idx]) gbest_idx = p;
    Bitmask gbest = s.position[gbest_idx];
    double gbest_fit = fit[gbest_idx];
    result.trace.best_fitness.push_back(gbest_fit);

    std::size_t stale = 0;
    for (std::size_t it = 1; it <= cfg.max_iterations && stale < cfg.patience; ++it) {
        for (std::size_t p = 0; p < cfg.swarm_size; ++p) {
            Rng rng(derive_seed(cfg.seed, stream_salt(p, it)));
            auto& x = s.position[p];
            auto& v = s.velocity[p];
            for (std::size_t j = 0; j < n; ++j) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                double vj = cfg.inertia * v[j] +
                            cfg.c1 * r1 * (static_cast<double>(s.pbest[p][j]) - x[j]) +
                            cfg.c2 * r2 * (static_cast<double>(gbest[j]) - x[j]);
                vj = std::clamp(vj, -cfg.v_max, cfg.v_max);
                v[j] = vj;
                x[j] = rng.uniform() < sigmoid(vj) ? 1 : 0;
            }
            x = repair(std::move(x), cfg.target_ones, rng);
        }
        fit = evaluate(s.position, evals);

        bool improved = false;
        for (std::size_t p = 0; p < cfg.swarm_size; ++p) {
            if (fit[p] > s.pbest_fit[p]) {
                s.pbest_fit[p] = fit[p];
                s.pbest[p] = s.position[p];
            }
            if (fit[p] > gbest_fit) {
                gbest_fit = fit[p];
                gbest = s.position[p];
                improved = true;
            }
        }
        result.trace.best_fitness.push_back(gbest_fit);
        stale = improved ? 0 : stale + 1;
    }

    result.trace.best_position = gbest;
    result.trace.best_value = gbest_fit;
    for (std::size_t j = 0; j < n; ++j)
        if (gbest[j]) result.selected.push_back(j);
    return result;
}

PsoResult pso_undersample(const Dataset& ds, const PsoConfig& cfg) {
    const auto min_rows = ds.indices_of(Label::positive);
    const auto maj_rows = ds.indices_of(Label::negative);
    PsoResult r = pso_undersample(ds.subset(min_rows), ds.subset(maj_rows), cfg);
    for (auto& idx : r.selected) idx = maj_rows[idx];
    return r;
}

}  // namespace imbl
