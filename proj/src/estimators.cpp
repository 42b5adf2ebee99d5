#include "estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace perclab {

namespace {

constexpr uint64_t kChunk = 1024;

void check_p(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
}

void check_trials(uint64_t trials) {
    if (trials == 0) throw DomainError("trials must be >= 1");
}

struct Moments {
    double sum = 0.0;
    double sumsq = 0.0;
};

double stderr_of(double sum, double sumsq, uint64_t n) {
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
}

// Shared trial plumbing: trial i derives its own sub-seed, samples a uniform
// root from it, and scores value(explorer, sample, root). Chunks are scored
// into per-chunk slots and reduced in chunk order, so the result is identical
// at any thread count.
template <class ValueFn>
EstimatorResult run_trials(const char* observable, const GraphSpec& spec, double p,
                           uint64_t trials, uint64_t seed, ValueFn&& value) {
    check_p(p);
    check_trials(trials);
    const uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<Moments> slots(chunks);
    par::for_chunks(trials, kChunk, [&](uint64_t ci, uint64_t begin, uint64_t end) {
        ClusterExplorer explorer(spec);
        Moments m;
        for (uint64_t i = begin; i < end; ++i) {
            const uint64_t trial_seed = rng::keyed_hash(seed, rng::kTrialStream, i);
            const uint64_t root = rng::uniform_index(trial_seed, rng::kRootStream, spec.vertex_count);
            const PercolationSample sample{spec, p, trial_seed};
            const double x = value(explorer, sample, root);
            m.sum += x;
            m.sumsq += x * x;
        }
        slots[ci] = m;
    });
    double sum = 0.0;
    double sumsq = 0.0;
    for (const Moments& m : slots) {
        sum += m.sum;
        sumsq += m.sumsq;
    }
    EstimatorResult out;
    out.observable = observable;
    out.p = p;
    out.mean = sum / static_cast<double>(trials);
    out.std_error = stderr_of(sum, sumsq, trials);
    out.trials = trials;
    out.seed = seed;
    return out;
}

}  // namespace

EstimatorResult estimate_susceptibility(const GraphSpec& spec, double p, uint64_t trials,
                                        uint64_t seed) {
    return run_trials("susceptibility", spec, p, trials, seed,
                      [](ClusterExplorer& explorer, const PercolationSample& sample, uint64_t root) {
                          const ClusterReport rep = explorer.explore(sample, root, {});
                          return static_cast<double>(rep.size);
                      });
}

EstimatorResult estimate_onearm(const GraphSpec& spec, double p, uint64_t r, uint64_t trials,
                                uint64_t seed, const AvoidSet* avoid) {
    ExploreOptions opts;
    opts.r_max = r;
    opts.avoid = avoid;
    return run_trials("onearm", spec, p, trials, seed,
                      [&](ClusterExplorer& explorer, const PercolationSample& sample, uint64_t root) {
                          const ClusterReport rep = explorer.explore(sample, root, opts);
                          // Reached distance >= r iff the sphere at r is nonempty.
                          return rep.layers.size() == r + 1 ? 1.0 : 0.0;
                      });
}

EstimatorResult estimate_boundary_volume(const GraphSpec& spec, double p, uint64_t r,
                                         uint64_t trials, uint64_t seed) {
    ExploreOptions opts;
    opts.r_max = r;
    return run_trials("boundary_volume", spec, p, trials, seed,
                      [&](ClusterExplorer& explorer, const PercolationSample& sample, uint64_t root) {
                          const ClusterReport rep = explorer.explore(sample, root, opts);
                          return rep.layers.size() == r + 1 ? static_cast<double>(rep.layers[r])
                                                            : 0.0;
                      });
}

EstimatorResult estimate_cluster_tail(const GraphSpec& spec, double p, uint64_t k, uint64_t trials,
                                      uint64_t seed) {
    if (k == 0) throw DomainError("tail threshold k must be >= 1");
    ExploreOptions opts;
    opts.size_cap = k;
    return run_trials("cluster_tail", spec, p, trials, seed,
                      [&](ClusterExplorer& explorer, const PercolationSample& sample, uint64_t root) {
                          const ClusterReport rep = explorer.explore(sample, root, opts);
                          return rep.size >= k ? 1.0 : 0.0;
                      });
}

OnearmCurve estimate_onearm_curve(const GraphSpec& spec, double p, uint64_t r_max, uint64_t trials,
                                  uint64_t seed) {
    check_p(p);
    check_trials(trials);
    ExploreOptions opts;
    opts.r_max = r_max;
    const uint64_t chunks = (trials + kChunk - 1) / kChunk;
    // reached[ci][d] counts trials in chunk ci whose deepest layer is exactly d.
    std::vector<std::vector<uint64_t>> reached(chunks);
    par::for_chunks(trials, kChunk, [&](uint64_t ci, uint64_t begin, uint64_t end) {
        ClusterExplorer explorer(spec);
        std::vector<uint64_t> depth_count(r_max + 1, 0);
        for (uint64_t i = begin; i < end; ++i) {
            const uint64_t trial_seed = rng::keyed_hash(seed, rng::kTrialStream, i);
            const uint64_t root = rng::uniform_index(trial_seed, rng::kRootStream, spec.vertex_count);
            const PercolationSample sample{spec, p, trial_seed};
            const ClusterReport rep = explorer.explore(sample, root, opts);
            ++depth_count[rep.layers.size() - 1];
        }
        reached[ci] = std::move(depth_count);
    });
    std::vector<uint64_t> depth_total(r_max + 1, 0);
    for (const auto& d : reached) {
        for (uint64_t r = 0; r <= r_max; ++r) depth_total[r] += d[r];
    }
    OnearmCurve out;
    out.spec = spec;
    out.p = p;
    out.r_max = r_max;
    out.trials = trials;
    out.seed = seed;
    out.hits.assign(r_max + 1, 0);
    uint64_t suffix = 0;
    for (uint64_t r = r_max + 1; r-- > 0;) {
        suffix += depth_total[r];
        out.hits[r] = suffix;
    }
    return out;
}

BoundaryCurve estimate_boundary_curve(const GraphSpec& spec, double p, uint64_t r_max,
                                      uint64_t trials, uint64_t seed) {
    check_p(p);
    check_trials(trials);
    ExploreOptions opts;
    opts.r_max = r_max;
    const uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> sums(chunks), sq_sums(chunks);
    par::for_chunks(trials, kChunk, [&](uint64_t ci, uint64_t begin, uint64_t end) {
        ClusterExplorer explorer(spec);
        std::vector<double> sum(r_max + 1, 0.0), sq(r_max + 1, 0.0);
        for (uint64_t i = begin; i < end; ++i) {
            const uint64_t trial_seed = rng::keyed_hash(seed, rng::kTrialStream, i);
            const uint64_t root = rng::uniform_index(trial_seed, rng::kRootStream, spec.vertex_count);
            const PercolationSample sample{spec, p, trial_seed};
            const ClusterReport rep = explorer.explore(sample, root, opts);
            for (uint64_t r = 0; r < rep.layers.size(); ++r) {
                const double v = static_cast<double>(rep.layers[r]);
                sum[r] += v;
                sq[r] += v * v;
            }
        }
        sums[ci] = std::move(sum);
        sq_sums[ci] = std::move(sq);
    });
    BoundaryCurve out;
    out.spec = spec;
    out.p = p;
    out.r_max = r_max;
    out.trials = trials;
    out.seed = seed;
    out.mean.assign(r_max + 1, 0.0);
    out.std_error.assign(r_max + 1, 0.0);
    const double n = static_cast<double>(trials);
    for (uint64_t r = 0; r <= r_max; ++r) {
        double sum = 0.0, sq = 0.0;
        for (uint64_t ci = 0; ci < chunks; ++ci) {
            sum += sums[ci][r];
            sq += sq_sums[ci][r];
        }
        const double mean = sum / n;
        out.mean[r] = mean;
        if (trials > 1) {
            const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
            out.std_error[r] = std::sqrt(var / n);
        }
    }
    return out;
}

double anchor_pc(const GraphSpec& spec) {
    if (spec.degree < 2) throw DomainError("anchor p_c needs degree >= 2");
    return 1.0 / static_cast<double>(spec.degree - 1);
}

PcEstimate find_pc(const GraphSpec& spec, const PcOptions& opts, uint64_t seed) {
    if (!(opts.lambda > 0.0)) throw DomainError("lambda must be positive");
    if (!(opts.tol > 0.0)) throw DomainError("tol must be positive");
    if (opts.trial_cap == 0) throw DomainError("trial_cap must be >= 1");
    const double target = opts.lambda * std::cbrt(static_cast<double>(spec.vertex_count));
    // chi ranges over [1, V]: chi(0) = 1 and chi(1) = V, so the target must
    // sit strictly between them for a crossing to exist.
    if (!(target > 1.0 && target < static_cast<double>(spec.vertex_count))) {
        throw DomainError("target susceptibility must lie strictly inside (1, V)");
    }

    PcEstimate est;
    est.lambda = opts.lambda;
    est.target = target;
    est.seed = seed;
    double lo = 0.0;
    double hi = 1.0;

    ClusterExplorer explorer(spec);
    while (hi - lo > opts.tol) {
        const double mid = 0.5 * (lo + hi);
        ++est.probes;
        double sum = 0.0;
        double sumsq = 0.0;
        uint64_t n = 0;
        bool decided = false;
        while (n < opts.trial_cap) {
            const uint64_t batch_end = std::min(n + kChunk, opts.trial_cap);
            for (; n < batch_end; ++n) {
                // Probe estimates reuse trial seeds, so they are coupled
                // monotonically in p and the bracket never inverts.
                const uint64_t trial_seed = rng::keyed_hash(seed, rng::kTrialStream, n);
                const uint64_t root =
                    rng::uniform_index(trial_seed, rng::kRootStream, spec.vertex_count);
                const PercolationSample sample{spec, mid, trial_seed};
                const double x = static_cast<double>(explorer.explore(sample, root, {}).size);
                sum += x;
                sumsq += x * x;
            }
            const double mean = sum / static_cast<double>(n);
            const double se = stderr_of(sum, sumsq, n);
            if (std::abs(mean - target) > 2.0 * se) {
                if (mean > target) {
                    hi = mid;
                } else {
                    lo = mid;
                }
                decided = true;
                break;
            }
        }
        est.trials_used += n;
        if (!decided) {
            throw PrecisionError(
                "susceptibility noise floor reached before tol; bracket [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]",
                lo, hi);
        }
    }

    est.bracket_lo = lo;
    est.bracket_hi = hi;
    est.p_hat = 0.5 * (lo + hi);
    est.converged = true;
    est.chi_at_p_hat = estimate_susceptibility(
        spec, est.p_hat, std::max<uint64_t>(opts.chi_trials, 1), seed);
    return est;
}

}  // namespace perclab
