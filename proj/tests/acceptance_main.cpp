// Acceptance harness: one line per criterion, exit code = number of failures.
// An optional argv[1] runs a single criterion by number.
#include "census.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "experiments.hpp"
#include "oracle.hpp"
#include "percolation.hpp"
#include "walks.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace perclab;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

// --- criterion 1: oracle equivalence over the full small-spec grid ----------

Verdict criterion1() {
    const std::vector<std::string> specs = {"Q2", "Q3", "T3^2", "K4"};
    const std::vector<double> ps = {0.1, 0.3, 0.5};
    const uint64_t trials = 100000;
    uint64_t hits = 0, total = 0;
    uint64_t seed = 1000;
    for (const std::string& name : specs) {
        const GraphSpec spec = parse_spec(name);
        for (double p : ps) {
            const ExactLaw law = enumerate_exact(spec, p);
            std::vector<std::pair<EstimatorResult, double>> grid;
            grid.emplace_back(estimate_susceptibility(spec, p, trials, ++seed),
                              static_cast<double>(law.susceptibility));
            for (uint64_t k : {2ull, 4ull, 6ull}) {
                grid.emplace_back(estimate_cluster_tail(spec, p, k, trials, ++seed),
                                  static_cast<double>(law.tail_at(k)));
            }
            for (uint64_t r : {1ull, 2ull, 3ull}) {
                grid.emplace_back(estimate_onearm(spec, p, r, trials, ++seed),
                                  static_cast<double>(law.onearm[r]));
                grid.emplace_back(
                    estimate_boundary_volume(spec, p, r, trials, ++seed),
                    static_cast<double>(law.boundary[r]));
            }
            for (const auto& [est, truth] : grid) {
                ++total;
                if (std::abs(est.mean - truth) <= 3.0 * est.std_error + 1e-12) ++hits;
            }
        }
    }
    Verdict v;
    v.pass = total == 120 && hits * 100 >= total * 95;
    v.detail = std::to_string(hits) + "/" + std::to_string(total) +
               " grid points within 3 standard errors (need >= 114)";
    return v;
}

// --- criterion 2: p_c anchor band and drift ---------------------------------

Verdict criterion2() {
    PcOptions opts;
    opts.lambda = 1.0;
    opts.tol = 1e-4;
    std::vector<double> ratios;
    std::string notes;
    for (uint32_t m : {10u, 12u, 14u}) {
        const GraphSpec spec = GraphSpec::hypercube(m);
        double p_hat = 0.0;
        try {
            p_hat = find_pc(spec, opts, 7).p_hat;
        } catch (const PrecisionError& e) {
            p_hat = 0.5 * (e.bracket_lo + e.bracket_hi);
            notes += " [m=" + std::to_string(m) + " stalled, midpoint used]";
        }
        ratios.push_back(p_hat * (m - 1));
    }
    bool band = true, drift = true;
    for (double r : ratios) band = band && r >= 0.85 && r <= 1.15;
    for (size_t i = 1; i < ratios.size(); ++i) {
        if (std::abs(ratios[i] - 1.0) > std::abs(ratios[i - 1] - 1.0) + 1e-12)
            drift = false;
    }
    Verdict v;
    v.pass = band && drift;
    v.detail = "p_hat(m-1) = {" + fmt(ratios[0]) + ", " + fmt(ratios[1]) + ", " +
               fmt(ratios[2]) + "}, band [0.85, 1.15] " +
               (band ? "held" : "violated") + ", |ratio-1| " +
               (drift ? "non-increasing" : "increased") + notes;
    return v;
}

// --- criteria 3 and 4 share one 50-seed sweep on Q20 -------------------------

const std::vector<SweepRow>& q20_sweep() {
    static const std::vector<SweepRow> rows = [] {
        SweepPlan plan;
        for (double eps : {0.18, 0.25, 0.35}) {  // ascending eps^3 V
            plan.cells.push_back({GraphSpec::hypercube(20), eps, 0.0});
        }
        plan.p_source = PSource::Anchor;
        plan.seeds_per_cell = 50;
        plan.master_seed = 2020;
        plan.diameters = true;
        plan.mixing = false;
        return run_sweep(plan);
    }();
    return rows;
}

Verdict criterion3() {
    const std::vector<SweepRow>& rows = q20_sweep();
    uint64_t in_band = 0, total = 0;
    std::vector<double> medians;
    for (const SweepRow& row : rows) {
        std::vector<double> ratios;
        for (double c1 : row.c1_values) {
            const double r = c1 / row.c1_scale();
            ratios.push_back(r);
            ++total;
            if (r >= 0.5 && r <= 4.0) ++in_band;
        }
        medians.push_back(median(ratios));
    }
    const double med_span = *std::max_element(medians.begin(), medians.end()) /
                            *std::min_element(medians.begin(), medians.end());
    Verdict v;
    v.pass = in_band * 100 >= total * 90 && med_span < 2.0;
    v.detail = std::to_string(in_band) + "/" + std::to_string(total) +
               " seed ratios in [0.5, 4.0], median span factor " + fmt(med_span) +
               " (need < 2); medians {" + fmt(medians[0]) + ", " + fmt(medians[1]) +
               ", " + fmt(medians[2]) + "} vs conjectured constant 2 (reported)";
    return v;
}

Verdict criterion4() {
    const std::vector<SweepRow>& rows = q20_sweep();
    uint64_t in_band = 0, total = 0;
    std::vector<double> dist;  // |median - 1| per cell, eps^3 V ascending
    for (const SweepRow& row : rows) {
        std::vector<double> ratios;
        for (double delta : row.delta_values) {
            const double r = delta / row.delta_scale();
            ratios.push_back(r);
            ++total;
            if (r >= 0.6 && r <= 1.4) ++in_band;
        }
        dist.push_back(std::abs(median(ratios) - 1.0));
    }
    bool drift = true;
    for (size_t i = 1; i < dist.size(); ++i) {
        if (dist[i] > dist[i - 1] + 1e-12) drift = false;
    }
    Verdict v;
    v.pass = in_band * 100 >= total * 90 && drift;
    v.detail = std::to_string(in_band) + "/" + std::to_string(total) +
               " seed ratios in [0.6, 1.4]; |median-1| = {" + fmt(dist[0]) + ", " +
               fmt(dist[1]) + ", " + fmt(dist[2]) + "} over ascending eps^3 V, " +
               (drift ? "non-increasing" : "increased");
    return v;
}

// --- criterion 5: exact mixing times on Q16 ----------------------------------

Verdict criterion5() {
    const GraphSpec spec = GraphSpec::hypercube(16);
    const uint64_t seeds = 5;
    const uint32_t top = 10;
    uint64_t exact_count = 0, bound_count = 0, bound_ok = 0;
    std::vector<double> cell_ratios;
    for (double eps : {0.18, 0.25, 0.35}) {
        const double p = (1.0 - eps) / (spec.degree - 1);
        const double scale = std::pow(eps, -3.0) *
                             std::pow(std::log(eps * eps * eps * spec.vertex_count), 2.0);
        std::vector<double> per_seed;
        for (uint64_t s = 0; s < seeds; ++s) {
            const uint64_t seed = 5000 + s + static_cast<uint64_t>(eps * 1000);
            const PercolationSample sample{spec, p, seed};
            CensusOptions copts;
            copts.top_representatives = top;
            const CensusSummary sum = census(sample, copts);
            double worst = 0.0;
            for (uint64_t root : sum.top_roots) {
                const ClusterReport rep = explore_cluster(sample, root, {});
                const ClusterGraph g = extract_cluster_graph(sample, rep.vertices);
                const uint64_t bound = lazy_tmix_bound(g);
                uint64_t t = 0;
                try {
                    t = lazy_tmix_exact(g);
                    ++exact_count;
                    if (bound >= t) ++bound_ok;
                } catch (const ResourceError&) {
                    t = bound;
                    ++bound_count;
                }
                worst = std::max(worst, static_cast<double>(t));
            }
            per_seed.push_back(worst / scale);
        }
        cell_ratios.push_back(median(per_seed));
    }
    const double span = *std::max_element(cell_ratios.begin(), cell_ratios.end()) /
                        *std::min_element(cell_ratios.begin(), cell_ratios.end());
    Verdict v;
    v.pass = span < 8.0 && bound_ok == exact_count && exact_count > 0;
    v.detail = "cell ratio span factor " + fmt(span) + " (need < 8); bound >= exact on " +
               std::to_string(bound_ok) + "/" + std::to_string(exact_count) +
               " exactly-mixed clusters" +
               (bound_count > 0
                    ? ", " + std::to_string(bound_count) + " over the dense budget used the bound"
                    : "");
    return v;
}

// --- criterion 6: one-arm profile on Q18 -------------------------------------

Verdict criterion6() {
    const GraphSpec spec = GraphSpec::hypercube(18);
    const double eps = 0.25;
    const double p = (1.0 - eps) / (spec.degree - 1);
    const double e3v = eps * eps * eps * spec.vertex_count;
    const uint64_t r_hi = static_cast<uint64_t>(3.0 / eps * std::log(e3v));
    const uint64_t trials = 4000000;

    SweepRow row;
    row.spec = spec;
    row.epsilon = eps;
    row.p = p;
    row.onearm = estimate_onearm_curve(spec, p, r_hi, trials, 6001);

    uint64_t usable = 0;
    for (uint64_t r = 2; r < row.onearm.hits.size(); ++r) {
        if (row.onearm.hits[r] >= 10) ++usable;
    }
    Verdict v;
    try {
        const FitReport rep = fit_ratios({row}, FitLaw::OnearmProfile);
        const double residual = rep.rows[0].ratio;
        const double slope = rep.rows[0].tail_slope;
        const double ref = rep.rows[0].tail_slope_ref;
        const bool slope_ok = std::abs(slope - ref) <= 0.15 * std::abs(ref);
        v.pass = residual < 0.7 && slope_ok;
        v.detail = "sup residual " + fmt(residual) + " (need < 0.7), tail slope " +
                   fmt(slope) + " vs log(1-eps) = " + fmt(ref) + " (" +
                   fmt(100.0 * std::abs(slope - ref) / std::abs(ref), 3) +
                   "% off, need <= 15%); " + std::to_string(usable) + "/" +
                   std::to_string(r_hi - 1) + " grid points above the censoring floor";
    } catch (const DomainError& e) {
        v.pass = false;
        v.detail = std::string("fit unusable: ") + e.what();
    }
    return v;
}

// --- criterion 7: non-backtracking mixing growth ------------------------------

Verdict criterion7() {
    const std::vector<uint32_t> ms = {8, 10, 12, 14, 16};
    std::vector<double> normalized;
    std::string values;
    for (uint32_t m : ms) {
        const uint64_t t = nb_tmix(GraphSpec::hypercube(m), 1.0 / m);
        normalized.push_back(static_cast<double>(t) / (m * std::log(m)));
        values += (values.empty() ? "" : ", ") + std::to_string(t);
    }
    const double c = normalized.front();  // fit at m = 8
    bool linear = true;
    for (double r : normalized) linear = linear && r <= c + 1e-12;
    const double span = *std::max_element(normalized.begin(), normalized.end()) /
                        *std::min_element(normalized.begin(), normalized.end());
    Verdict v;
    v.pass = linear && span < 2.0;
    v.detail = "t_mix = {" + values + "}, t/(m ln m) span factor " + fmt(span) +
               " (need < 2), C fit at m=8 " + (linear ? "dominates" : "violated");
    return v;
}

// --- criterion 8: kernel equivalence ------------------------------------------

Verdict criterion8() {
    double worst = 0.0, worst_mass = 0.0;
    for (uint32_t m = 2; m <= 6; ++m) {
        const GraphSpec spec = GraphSpec::hypercube(m);
        // generic directed-edge kernel, built independently of the library
        const uint64_t V = spec.vertex_count;
        std::vector<double> edge_mass(V * m, 0.0);  // index v * m + dir
        for (uint32_t dir = 0; dir < m; ++dir) edge_mass[0 * m + dir] = 1.0 / m;
        for (uint64_t t = 1; t <= 12; ++t) {
            // compare the class DP at horizon t
            const NBKernel kernel = nb_kernel(spec, t);
            std::vector<double> vertex_mass(V, 0.0);
            for (uint64_t v = 0; v < V; ++v) {
                for (uint32_t dir = 0; dir < m; ++dir) {
                    vertex_mass[neighbor(spec, v, dir)] += edge_mass[v * m + dir];
                }
            }
            double mass = 0.0;
            for (uint64_t y = 0; y < V; ++y) {
                worst = std::max(worst, std::abs(kernel.at_vertex(y) - vertex_mass[y]));
                mass += vertex_mass[y];
            }
            worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
            worst_mass = std::max(worst_mass, std::abs(kernel.mass() - 1.0));
            // advance the directed-edge states one step
            std::vector<double> next(V * m, 0.0);
            for (uint64_t v = 0; v < V; ++v) {
                for (uint32_t dir = 0; dir < m; ++dir) {
                    const double in = edge_mass[v * m + dir];
                    if (in == 0.0) continue;
                    const uint64_t w = neighbor(spec, v, dir);
                    for (uint32_t d2 = 0; d2 < m; ++d2) {
                        if (neighbor(spec, w, d2) == v) continue;
                        next[w * m + d2] += in / (m - 1);
                    }
                }
            }
            edge_mass = std::move(next);
        }
    }
    Verdict v;
    v.pass = worst <= 1e-12 && worst_mass <= 1e-12;
    v.detail = "max entry deviation " + fmt(worst, 3) + ", max mass deviation " +
               fmt(worst_mass, 3) + " (both need <= 1e-12)";
    return v;
}

// --- criterion 9: coupling and monotonicity properties -------------------------

Verdict criterion9() {
    const GraphSpec spec = GraphSpec::hypercube(7);
    uint64_t violations = 0;
    const uint64_t cases = 1000;

    // (a) cluster containment across p
    for (uint64_t i = 0; i < cases; ++i) {
        const uint64_t root = i % spec.vertex_count;
        const ClusterReport lo = explore_cluster({spec, 0.10, i}, root, {});
        const ClusterReport hi = explore_cluster({spec, 0.22, i}, root, {});
        std::vector<uint64_t> a = lo.vertices, b = hi.vertices;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) ++violations;
    }

    // (b) one-arm indicator monotone in r, truncation consistent with depth
    for (uint64_t i = 0; i < cases; ++i) {
        const PercolationSample sample{spec, 0.18, 70000 + i};
        const uint64_t root = (i * 31) % spec.vertex_count;
        const ClusterReport full = explore_cluster(sample, root, {});
        const uint64_t depth = full.layers.size() - 1;
        int prev = 1;
        for (uint64_t r = 0; r <= 8; ++r) {
            ExploreOptions opts;
            opts.r_max = r;
            const ClusterReport cut = explore_cluster(sample, root, opts);
            const int reach = cut.layers.size() == r + 1 ? 1 : 0;
            if ((depth >= r) != (reach == 1)) ++violations;
            if (reach > prev) ++violations;
            prev = reach;
        }
    }

    // (c) per-trial cluster size monotone in p under a shared seed
    for (uint64_t i = 0; i < cases; ++i) {
        const uint64_t root = (i * 17) % spec.vertex_count;
        uint64_t prev = 0;
        for (double p : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
            const uint64_t size = explore_cluster({spec, p, 90000 + i}, root, {}).size;
            if (size < prev) ++violations;
            prev = size;
        }
    }

    // (d) layer sums equal the visited count under any cap
    for (uint64_t i = 0; i < cases; ++i) {
        const PercolationSample sample{spec, 0.05 + 0.3 * ((i * 7) % 10) / 10.0,
                                       110000 + i};
        ExploreOptions opts;
        if (i % 3 == 1) opts.r_max = i % 5;
        if (i % 3 == 2) opts.size_cap = 1 + i % 40;
        const ClusterReport rep =
            explore_cluster(sample, (i * 13) % spec.vertex_count, opts);
        const uint64_t sum =
            std::accumulate(rep.layers.begin(), rep.layers.end(), uint64_t{0});
        if (sum != rep.size) ++violations;
    }

    Verdict v;
    v.pass = violations == 0;
    v.detail = std::to_string(violations) + " violations across 4x" +
               std::to_string(cases) + " randomized cases (need 0)";
    return v;
}

// --- criterion 10: CLI determinism across thread counts ------------------------

std::string run_capture(const std::string& cmd, int* exit_code) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        *exit_code = -1;
        return out;
    }
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    *exit_code = pclose(pipe);
    return out;
}

Verdict criterion10() {
    Verdict v;
    const char* bin = std::getenv("PERC_LAB_BIN");
    if (bin == nullptr || *bin == '\0') {
        v.pass = false;
        v.detail = "PERC_LAB_BIN not set; cannot exercise the CLI";
        return v;
    }
    const std::string base = std::string("\"") + bin + "\"";
    int rc = 0;

    // JSON op: harvest the echoed seed, then replay at two thread counts
    const std::string first = run_capture(base + " census --spec Q6 --p 0.2", &rc);
    if (rc != 0) {
        v.pass = false;
        v.detail = "census invocation failed with exit " + std::to_string(rc);
        return v;
    }
    uint64_t seed = 0;
    try {
        seed = nlohmann::json::parse(first).at("seed").get<uint64_t>();
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail = std::string("no seed echoed in census output: ") + e.what();
        return v;
    }
    const std::string replay = " census --spec Q6 --p 0.2 --seed " +
                               std::to_string(seed);
    int rc1 = 0, rc2 = 0;
    const std::string one = run_capture(base + replay + " --threads 1", &rc1);
    const std::string four = run_capture(base + replay + " --threads 4", &rc2);
    const bool json_ok = rc1 == 0 && rc2 == 0 && !one.empty() && one == four;

    // CSV op: same deal through the sweep table
    const std::string sweep_args =
        " sweep --spec Q5 --epsilon 0.3 --seeds 2 --regime-floor 0 --format csv";
    const std::string csv_first = run_capture(base + sweep_args, &rc);
    uint64_t csv_seed = 0;
    bool csv_ok = rc == 0;
    if (csv_ok) {
        const std::string marker = "# seed = ";
        const size_t at = csv_first.find(marker);
        csv_ok = at != std::string::npos;
        if (csv_ok) csv_seed = std::strtoull(csv_first.c_str() + at + marker.size(), nullptr, 10);
    }
    if (csv_ok) {
        const std::string csv_replay = sweep_args + " --seed " + std::to_string(csv_seed);
        const std::string a = run_capture(base + csv_replay + " --threads 1", &rc1);
        const std::string b = run_capture(base + csv_replay + " --threads 3", &rc2);
        csv_ok = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
    }

    v.pass = json_ok && csv_ok;
    v.detail = std::string("json replay ") + (json_ok ? "byte-identical" : "diverged") +
               ", csv replay " + (csv_ok ? "byte-identical" : "diverged") +
               " across thread counts";
    return v;
}

}  // namespace

// Usage: acceptance [N] [--xfail LIST]
//   N            run only criterion N
//   --xfail LIST comma-separated criteria documented as failing at desk
//                scale; their FAIL lines still print, but the exit code
//                flags them only when they unexpectedly pass (strict xfail)
int main(int argc, char** argv) {
    int only = 0;
    std::vector<int> xfail;
    for (int a = 1; a < argc; ++a) {
        const std::string arg = argv[a];
        if (arg == "--xfail" && a + 1 < argc) {
            std::stringstream list(argv[++a]);
            std::string tok;
            while (std::getline(list, tok, ',')) xfail.push_back(std::atoi(tok.c_str()));
        } else {
            only = std::atoi(arg.c_str());
        }
    }
    const std::array<Verdict (*)(), 10> criteria = {
        criterion1, criterion2, criterion3, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9, criterion10};
    int unexpected = 0, expected_failures = 0;
    for (int i = 1; i <= 10; ++i) {
        if (only != 0 && only != i) continue;
        Timer timer;
        Verdict v;
        try {
            v = criteria[i - 1]();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("unexpected exception: ") + e.what();
        }
        const bool expect_fail =
            std::find(xfail.begin(), xfail.end(), i) != xfail.end();
        if (v.pass == expect_fail) ++unexpected;
        if (!v.pass && expect_fail) ++expected_failures;
        std::cout << "criterion " << i << (v.pass ? " PASS: " : " FAIL: ") << v.detail
                  << " [" << fmt(timer.seconds(), 3) << "s]" << std::endl;
    }
    if (expected_failures > 0) {
        std::cout << "(" << expected_failures
                  << " failure(s) above are documented desk-scale limits; the exit"
                     " code reflects unexpected outcomes only)"
                  << std::endl;
    }
    return unexpected;
}
