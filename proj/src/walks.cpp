#include "walks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <unordered_map>

#include "errors.hpp"
#include "oracle.hpp"
#include "rng.hpp"

namespace perclab {

namespace {

constexpr size_t kLazyDenseBudget = 4000;            // vertices, all-starts dense iteration
constexpr uint64_t kNbEdgeBudget = 1ull << 22;       // directed edges, generic kernel
constexpr uint64_t kConvolutionBudget = 1ull << 14;  // vertices, generic group convolution

// Exact binomial coefficient (fits in 64 bits for every m <= 40 spec).
uint64_t binom_u64(uint32_t m, uint32_t k) {
    if (k > m) return 0;
    k = std::min(k, m - k);
    uint64_t c = 1;
    for (uint32_t i = 1; i <= k; ++i) c = c * (m - k + i) / i;
    return c;
}

// Pascal triangle rows 0..m, exact in doubles at this scale.
std::vector<std::vector<double>> pascal_rows(uint32_t m) {
    std::vector<std::vector<double>> rows(m + 1);
    rows[0] = {1.0};
    for (uint32_t u = 1; u <= m; ++u) {
        rows[u].assign(u + 1, 1.0);
        for (uint32_t k = 1; k < u; ++k) rows[u][k] = rows[u - 1][k - 1] + rows[u - 1][k];
    }
    return rows;
}

// Convolution over Z_2^m of two weight-symmetric functions, both given as
// per-vertex values indexed by Hamming weight:
//   c(u) = sum_w a(w) sum_k C(u,k) C(m-u, w-k) b(u+w-2k)
// where k counts the overlap between the summed vertex and the target.
std::vector<double> weight_convolve(uint32_t m, const std::vector<double>& a,
                                    const std::vector<double>& b,
                                    const std::vector<std::vector<double>>& pascal) {
    std::vector<double> c(m + 1, 0.0);
    for (uint32_t u = 0; u <= m; ++u) {
        double acc = 0.0;
        for (uint32_t w = 0; w <= m; ++w) {
            if (a[w] == 0.0) continue;
            const uint32_t k_lo = u + w > m ? u + w - m : 0;
            const uint32_t k_hi = std::min(u, w);
            double inner = 0.0;
            for (uint32_t k = k_lo; k <= k_hi; ++k) {
                inner += pascal[u][k] * pascal[m - u][w - k] * b[u + w - 2 * k];
            }
            acc += a[w] * inner;
        }
        c[u] = acc;
    }
    return c;
}

// Convolution over the abelian translation group of the spec.
std::vector<double> group_convolve(const GraphSpec& spec, const std::vector<double>& a,
                                   const std::vector<double>& b) {
    const uint64_t V = spec.vertex_count;
    std::vector<double> c(V, 0.0);
    for (uint64_t u = 0; u < V; ++u) {
        if (a[u] == 0.0) continue;
        const double au = a[u];
        for (uint64_t y = 0; y < V; ++y) c[y] += au * b[group_diff(spec, y, u)];
    }
    return c;
}

// Distribution of the non-backtracking walk over directed edges; mass[e] is
// the probability that step t traversed e = (tail u, dir d).
struct EdgeWalkState {
    GraphSpec spec;
    uint64_t t = 0;
    std::vector<double> mass;
    std::vector<uint32_t> rev;  // rev[key of u->w] = key of w->u
};

EdgeWalkState edge_walk_init(const GraphSpec& spec) {
    const uint64_t edges = spec.vertex_count * spec.degree;
    if (edges > kNbEdgeBudget) {
        throw ResourceError("directed-edge kernel needs V*degree <= " +
                            std::to_string(kNbEdgeBudget) + ", spec has " + std::to_string(edges));
    }
    EdgeWalkState s;
    s.spec = spec;
    s.t = 1;
    s.mass.assign(edges, 0.0);
    for (uint32_t d = 0; d < spec.degree; ++d) {
        s.mass[d] = 1.0 / static_cast<double>(spec.degree);  // step one, uniform out of 0
    }
    s.rev.assign(edges, 0);
    for (uint64_t u = 0; u < spec.vertex_count; ++u) {
        for (uint32_t d = 0; d < spec.degree; ++d) {
            const uint64_t w = neighbor(spec, u, d);
            s.rev[u * spec.degree + d] =
                static_cast<uint32_t>(w * spec.degree + reverse_direction(spec, u, d, w));
        }
    }
    return s;
}

// P^t(0, w) = total mass entering w, read through the reverse index.
std::vector<double> edge_walk_marginal(const EdgeWalkState& s) {
    const uint64_t V = s.spec.vertex_count;
    const uint32_t deg = s.spec.degree;
    std::vector<double> in(V, 0.0);
    for (uint64_t w = 0; w < V; ++w) {
        double acc = 0.0;
        for (uint32_t d = 0; d < deg; ++d) acc += s.mass[s.rev[w * deg + d]];
        in[w] = acc;
    }
    return in;
}

void edge_walk_advance(EdgeWalkState& s) {
    const uint32_t deg = s.spec.degree;
    if (deg < 2) throw DomainError("non-backtracking step needs degree >= 2");
    const std::vector<double> in = edge_walk_marginal(s);
    const double inv = 1.0 / static_cast<double>(deg - 1);
    std::vector<double> nxt(s.mass.size(), 0.0);
    for (uint64_t w = 0; w < s.spec.vertex_count; ++w) {
        const double in_w = in[w];
        for (uint32_t d = 0; d < deg; ++d) {
            const uint64_t e = w * deg + d;
            // all mass entering w except along the edge we would backtrack on
            nxt[e] = std::max(0.0, (in_w - s.mass[s.rev[e]]) * inv);
        }
    }
    s.mass = std::move(nxt);
    ++s.t;
}

// Yields P^1(0,.), P^2(0,.), ... as per-vertex values: indexed by Hamming
// weight on hypercubes, by vertex elsewhere. The max entry and convolution
// algebra downstream are representation-agnostic.
std::function<std::vector<double>()> marginal_stream(const GraphSpec& spec) {
    if (spec.kind == GraphKind::Hypercube) {
        auto state = std::make_shared<HypercubeClassState>();
        const uint32_t m = spec.n;
        return [state, m]() {
            *state = state->t == 0 ? nb_hypercube_classes(m, 1) : nb_hypercube_advance(*state);
            std::vector<double> f(m + 1);
            for (uint32_t w = 0; w <= m; ++w) f[w] = state->vertex_prob(w);
            return f;
        };
    }
    auto state = std::make_shared<EdgeWalkState>();
    return [state, spec]() {
        if (state->t == 0) {
            *state = edge_walk_init(spec);
        } else {
            edge_walk_advance(*state);
        }
        return edge_walk_marginal(*state);
    };
}

}  // namespace

ClusterGraph extract_cluster_graph(const PercolationSample& sample,
                                   const std::vector<uint64_t>& vertices) {
    if (vertices.empty()) throw DomainError("cluster graph needs at least one vertex");
    ClusterGraph g;
    g.vertices = vertices;
    std::unordered_map<uint64_t, uint32_t> local;
    local.reserve(vertices.size() * 2);
    for (size_t i = 0; i < vertices.size(); ++i) {
        check_vertex(sample.spec, vertices[i]);
        if (!local.emplace(vertices[i], static_cast<uint32_t>(i)).second) {
            throw DomainError("duplicate vertex in cluster set");
        }
    }
    std::vector<std::vector<uint32_t>> tmp(vertices.size());
    for (size_t i = 0; i < vertices.size(); ++i) {
        const uint64_t u = vertices[i];
        for (uint32_t dir = 0; dir < sample.spec.degree; ++dir) {
            const uint64_t w = neighbor(sample.spec, u, dir);
            const auto it = local.find(w);
            if (it == local.end()) continue;
            if (sample.open_key(edge_key_from(sample.spec, u, dir, w))) tmp[i].push_back(it->second);
        }
    }
    g.offsets.assign(vertices.size() + 1, 0);
    for (size_t i = 0; i < tmp.size(); ++i) {
        g.offsets[i + 1] = g.offsets[i] + static_cast<uint32_t>(tmp[i].size());
    }
    g.adj.reserve(g.offsets.back());
    for (const auto& row : tmp) g.adj.insert(g.adj.end(), row.begin(), row.end());
    g.edge_count = g.adj.size() / 2;

    std::vector<bool> seen(g.size(), false);
    std::vector<uint32_t> queue{0};
    seen[0] = true;
    for (size_t head = 0; head < queue.size(); ++head) {
        const uint32_t u = queue[head];
        for (uint32_t j = g.offsets[u]; j < g.offsets[u + 1]; ++j) {
            if (!seen[g.adj[j]]) {
                seen[g.adj[j]] = true;
                queue.push_back(g.adj[j]);
            }
        }
    }
    if (queue.size() != g.size()) {
        throw DomainError("vertex set is not a single connected open cluster");
    }
    return g;
}

int64_t cluster_graph_diameter(const ClusterGraph& g) {
    const size_t n = g.size();
    int64_t best = 0;
    std::vector<int32_t> dist(n);
    std::vector<uint32_t> queue;
    queue.reserve(n);
    for (uint32_t src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        queue.clear();
        queue.push_back(src);
        dist[src] = 0;
        for (size_t head = 0; head < queue.size(); ++head) {
            const uint32_t u = queue[head];
            for (uint32_t j = g.offsets[u]; j < g.offsets[u + 1]; ++j) {
                const uint32_t w = g.adj[j];
                if (dist[w] >= 0) continue;
                dist[w] = dist[u] + 1;
                best = std::max<int64_t>(best, dist[w]);
                queue.push_back(w);
            }
        }
    }
    return best;
}

uint64_t lazy_tmix_exact(const ClusterGraph& g, std::vector<double>* tv_trace) {
    if (tv_trace) tv_trace->clear();
    const size_t n = g.size();
    if (n == 1) {
        if (tv_trace) tv_trace->push_back(0.0);
        return 0;
    }
    if (n > kLazyDenseBudget) {
        throw ResourceError("cluster has " + std::to_string(n) +
                            " vertices, over the dense mixing budget of " +
                            std::to_string(kLazyDenseBudget) + "; use lazy_tmix_bound");
    }

    const double inv_total = 1.0 / (2.0 * static_cast<double>(g.edge_count));
    std::vector<double> pi(n), inv2deg(n);
    for (size_t w = 0; w < n; ++w) {
        pi[w] = static_cast<double>(g.degree(static_cast<uint32_t>(w))) * inv_total;
        inv2deg[w] = 0.5 / static_cast<double>(g.degree(static_cast<uint32_t>(w)));
    }

    // cur[w*n + i] = P(S_t = w | S_0 = i): one row per position, columns are
    // starts, so a step is contiguous row axpys.
    std::vector<double> cur(n * n, 0.0), nxt(n * n, 0.0), acc(n);
    for (size_t i = 0; i < n; ++i) cur[i * n + i] = 1.0;

    const uint64_t safety = 16 * lazy_tmix_bound(g) + 16;
    for (uint64_t t = 0;; ++t) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (size_t w = 0; w < n; ++w) {
            const double pw = pi[w];
            const double* row = &cur[w * n];
            for (size_t i = 0; i < n; ++i) acc[i] += std::abs(row[i] - pw);
        }
        const double worst = 0.5 * *std::max_element(acc.begin(), acc.end());
        if (tv_trace) tv_trace->push_back(worst);
        if (worst <= 0.25) return t;
        if (t >= safety) {
            throw DivergenceError("lazy walk failed to mix within the diameter-bound safety cap",
                                  static_cast<int64_t>(t));
        }
        for (size_t w = 0; w < n; ++w) {
            double* out = &nxt[w * n];
            const double* self = &cur[w * n];
            for (size_t i = 0; i < n; ++i) out[i] = 0.5 * self[i];
            for (uint32_t j = g.offsets[w]; j < g.offsets[w + 1]; ++j) {
                const uint32_t u = g.adj[j];
                const double c = inv2deg[u];
                const double* row = &cur[static_cast<size_t>(u) * n];
                for (size_t i = 0; i < n; ++i) out[i] += c * row[i];
            }
        }
        std::swap(cur, nxt);
    }
}

uint64_t lazy_tmix_bound(const ClusterGraph& g) {
    return 8ull * g.edge_count * static_cast<uint64_t>(cluster_graph_diameter(g));
}

double NBKernel::at_vertex(uint64_t y) const {
    return by_class ? prob[static_cast<size_t>(std::popcount(y))] : prob[y];
}

double NBKernel::max_entry() const {
    return *std::max_element(prob.begin(), prob.end());
}

double NBKernel::mass() const {
    if (!by_class) {
        double sum = 0.0;
        for (double v : prob) sum += v;
        return sum;
    }
    double sum = 0.0;
    for (uint32_t w = 0; w < prob.size(); ++w) {
        sum += static_cast<double>(binom_u64(spec.n, w)) * prob[w];
    }
    return sum;
}

double HypercubeClassState::total_mass() const {
    double sum = 0.0;
    for (double v : set_mass) sum += v;
    for (double v : unset_mass) sum += v;
    return sum;
}

double HypercubeClassState::vertex_prob(uint32_t w) const {
    return (set_mass[w] + unset_mass[w]) / static_cast<double>(binom_u64(m, w));
}

HypercubeClassState nb_hypercube_advance(const HypercubeClassState& state) {
    const uint32_t m = state.m;
    if (m < 2) throw DomainError("non-backtracking step needs degree >= 2");
    HypercubeClassState out;
    out.m = m;
    out.t = state.t + 1;
    out.set_mass.assign(m + 1, 0.0);
    out.unset_mass.assign(m + 1, 0.0);
    const double inv = 1.0 / static_cast<double>(m - 1);
    for (uint32_t w = 0; w <= m; ++w) {
        const double sm = state.set_mass[w];
        const double um = state.unset_mass[w];
        if (w < m) {
            // flip an unset bit; from (w, unset) the just-cleared bit is off limits
            out.set_mass[w + 1] += (sm * static_cast<double>(m - w) +
                                    um * static_cast<double>(m - w - 1)) * inv;
        }
        if (w >= 1) {
            // clear a set bit; from (w, set) the just-set bit is off limits
            out.unset_mass[w - 1] += (sm * static_cast<double>(w - 1) +
                                      um * static_cast<double>(w)) * inv;
        }
    }
    return out;
}

HypercubeClassState nb_hypercube_classes(uint32_t m, uint64_t t) {
    if (m == 0) throw DomainError("hypercube dimension must be >= 1");
    if (t == 0) throw DomainError("kernel steps must be >= 1");
    HypercubeClassState s;
    s.m = m;
    s.t = 1;
    s.set_mass.assign(m + 1, 0.0);
    s.unset_mass.assign(m + 1, 0.0);
    s.set_mass[1] = 1.0;  // step one is uniform over the m unit vectors
    while (s.t < t) s = nb_hypercube_advance(s);
    return s;
}

NBKernel nb_kernel(const GraphSpec& spec, uint64_t t) {
    if (t == 0) throw DomainError("kernel steps must be >= 1");
    NBKernel k;
    k.spec = spec;
    k.t = t;
    if (spec.kind == GraphKind::Hypercube) {
        const HypercubeClassState s = nb_hypercube_classes(spec.n, t);
        k.by_class = true;
        k.prob.resize(spec.n + 1);
        for (uint32_t w = 0; w <= spec.n; ++w) k.prob[w] = s.vertex_prob(w);
        return k;
    }
    if (t >= 2 && spec.degree < 2) throw DomainError("non-backtracking step needs degree >= 2");
    EdgeWalkState s = edge_walk_init(spec);
    while (s.t < t) edge_walk_advance(s);
    k.prob = edge_walk_marginal(s);
    return k;
}

uint64_t nb_tmix(const GraphSpec& spec, double alpha, uint64_t step_cap) {
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (step_cap == 0) throw DomainError("step cap must be >= 1");
    if (spec.degree < 2) throw DomainError("nb mixing needs degree >= 2");
    const double threshold = (1.0 + alpha) / static_cast<double>(spec.vertex_count);

    auto stream = marginal_stream(spec);
    std::vector<double> ft = stream();   // t = 1
    std::vector<double> ft1 = stream();  // t = 2
    double best = std::numeric_limits<double>::infinity();
    uint64_t best_t = 1;
    for (uint64_t t = 1; t <= step_cap; ++t) {
        double worst = 0.0;
        for (size_t i = 0; i < ft.size(); ++i) worst = std::max(worst, 0.5 * (ft[i] + ft1[i]));
        if (worst <= threshold) return t;
        if (worst < best) {
            best = worst;
            best_t = t;
        }
        ft = std::move(ft1);
        ft1 = stream();
    }
    throw DivergenceError("nb mixing stayed above the threshold for " + std::to_string(step_cap) +
                              " steps",
                          static_cast<int64_t>(best_t));
}

TriangleValue triangle_sum(const GraphSpec& spec, double p, TriangleMode mode, uint64_t trials,
                           uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
    TriangleValue out;
    out.spec = spec;
    out.p = p;
    out.mode = mode;
    out.seed = seed;
    const uint64_t V = spec.vertex_count;

    if (mode == TriangleMode::Exact) {
        const ExactLaw law = enumerate_exact(spec, p);
        std::vector<long double> s1(V, 0.0L);
        for (uint64_t v = 0; v < V; ++v) {
            long double acc = 0.0L;
            for (uint64_t u = 0; u < V; ++u) acc += law.tau_at(0, u) * law.tau_at(u, v);
            s1[v] = acc;
        }
        long double diag = 0.0L, off = 0.0L;
        for (uint64_t y = 0; y < V; ++y) {
            long double t = 0.0L;
            for (uint64_t v = 0; v < V; ++v) t += s1[v] * law.tau_at(v, y);
            if (y == 0) {
                diag = t;
            } else {
                off = std::max(off, t);
            }
        }
        out.diagonal = static_cast<double>(diag);
        out.offdiag = static_cast<double>(off);
        return out;
    }

    if (V > kLazyDenseBudget) {
        throw ResourceError("mc triangle needs V <= " + std::to_string(kLazyDenseBudget) +
                            ", spec has " + std::to_string(V));
    }
    if (trials == 0) throw DomainError("trials must be >= 1");
    out.trials = trials;
    std::vector<uint64_t> counts(V, 0);
    ClusterExplorer explorer(spec);
    for (uint64_t i = 0; i < trials; ++i) {
        const uint64_t trial_seed = rng::keyed_hash(seed, rng::kTrialStream, i);
        const PercolationSample sample{spec, p, trial_seed};
        const ClusterReport rep = explorer.explore(sample, 0, {});
        for (uint64_t v : rep.vertices) ++counts[v];
    }
    std::vector<double> row(V);
    for (uint64_t v = 0; v < V; ++v) {
        row[v] = static_cast<double>(counts[v]) / static_cast<double>(trials);
    }
    const std::vector<double> rr = group_convolve(spec, row, row);
    const std::vector<double> rrr = group_convolve(spec, rr, row);
    out.diagonal = rrr[0];
    out.offdiag = 0.0;
    for (uint64_t y = 1; y < V; ++y) out.offdiag = std::max(out.offdiag, rrr[y]);
    return out;
}

AssumptionReport assumption_sums_at(const GraphSpec& spec, uint64_t tmix, double p_hat) {
    if (tmix == 0) throw DomainError("tmix must be >= 1");
    if (tmix >= 2 && spec.degree < 2) throw DomainError("non-backtracking step needs degree >= 2");
    const bool hyper = spec.kind == GraphKind::Hypercube;
    if (!hyper && spec.vertex_count > kConvolutionBudget) {
        throw ResourceError("assumption sums on non-hypercube specs need V <= " +
                            std::to_string(kConvolutionBudget) + ", spec has " +
                            std::to_string(spec.vertex_count));
    }

    const size_t entries = hyper ? spec.n + 1 : spec.vertex_count;
    std::vector<double> mult(entries, 1.0);
    std::vector<std::vector<double>> pascal;
    if (hyper) {
        pascal = pascal_rows(spec.n);
        for (size_t w = 0; w < entries; ++w) {
            mult[w] = static_cast<double>(binom_u64(spec.n, static_cast<uint32_t>(w)));
        }
    }
    auto convolve = [&](const std::vector<double>& a, const std::vector<double>& b) {
        return hyper ? weight_convolve(spec.n, a, b, pascal) : group_convolve(spec, a, b);
    };

    std::vector<double> s(entries, 0.0);
    s[0] = 1.0;  // t = 0 term, the identity kernel
    std::vector<double> heat_acc(entries, 0.0);
    std::vector<double> f1, f2;
    double heat = 0.0;
    auto stream = marginal_stream(spec);
    for (uint64_t t = 1; t <= tmix; ++t) {
        const std::vector<double> ft = stream();
        for (size_t i = 0; i < entries; ++i) {
            s[i] += ft[i];
            heat_acc[i] += static_cast<double>(t) * ft[i];
        }
        if (t >= 2) {
            double dot = 0.0;
            for (size_t i = 0; i < entries; ++i) dot += mult[i] * heat_acc[i] * ft[i];
            heat += dot;
        }
        if (t == 1) f1 = ft;
        if (t == 2) f2 = ft;
    }

    // a2 = max_y [ (s*s*s)(y) - (terms with t1+t2+t3 <= 2) ]; with P^0 the
    // identity those terms collapse to delta + 3 P^1 + 3 P^2 + 3 P^1*P^1.
    const std::vector<double> sss = convolve(convolve(s, s), s);
    std::vector<double> low = convolve(f1, f1);
    for (size_t i = 0; i < entries; ++i) low[i] *= 3.0;
    low[0] += 1.0;
    for (size_t i = 0; i < entries; ++i) low[i] += 3.0 * f1[i];
    if (tmix >= 2) {
        for (size_t i = 0; i < entries; ++i) low[i] += 3.0 * f2[i];
    }
    double a2 = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < entries; ++i) a2 = std::max(a2, sss[i] - low[i]);

    AssumptionReport r;
    r.spec = spec;
    r.tmix = tmix;
    r.p_hat = p_hat;
    r.a1 = std::abs(std::pow(p_hat * static_cast<double>(spec.degree - 1),
                             static_cast<double>(tmix)) -
                    1.0);
    r.a2 = a2;
    r.heat = heat;
    return r;
}

AssumptionReport assumption_sums(const GraphSpec& spec, double alpha, const PcOptions& pc_opts,
                                 uint64_t seed) {
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    const uint64_t tmix = nb_tmix(spec, alpha);
    const PcEstimate pc = find_pc(spec, pc_opts, seed);
    AssumptionReport r = assumption_sums_at(spec, tmix, pc.p_hat);
    r.alpha = alpha;
    r.pc_converged = pc.converged;
    r.seed = seed;
    return r;
}

}  // namespace perclab
