#include "perclab/perclab.h"

#include <exception>
#include <string>
#include <vector>

#include "census.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "experiments.hpp"
#include "graph.hpp"
#include "json.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "percolation.hpp"
#include "walks.hpp"

using nlohmann::json;

struct perclab_graph {
    perclab::GraphSpec spec;
};

struct perclab_result {
    std::string text;
};

namespace {

thread_local std::string t_last_error = "no error";

void set_error(const std::string& msg) { t_last_error = msg; }

perclab_status map_failure() noexcept {
    try {
        throw;
    } catch (const perclab::PrecisionError& e) {
        set_error(e.what());
        return PERCLAB_EPRECISION;
    } catch (const perclab::DivergenceError& e) {
        set_error(e.what());
        return PERCLAB_EPRECISION;
    } catch (const perclab::ResourceError& e) {
        set_error(e.what());
        return PERCLAB_ERESOURCE;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return PERCLAB_EINVAL;
    } catch (const json::exception& e) {
        set_error(e.what());
        return PERCLAB_EINVAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return PERCLAB_EINTERNAL;
    } catch (...) {
        set_error("unknown failure");
        return PERCLAB_EINTERNAL;
    }
}

template <class Fn>
perclab_status guarded(perclab_result** out, Fn&& fn) noexcept {
    if (out == nullptr) {
        set_error("null result pointer");
        return PERCLAB_EINVAL;
    }
    *out = nullptr;
    try {
        std::string text = fn();
        *out = new perclab_result{std::move(text)};
        return PERCLAB_OK;
    } catch (...) {
        return map_failure();
    }
}

perclab_status need_graph(const perclab_graph* g) {
    if (g == nullptr) {
        set_error("null graph handle");
        return PERCLAB_EINVAL;
    }
    return PERCLAB_OK;
}

void put_spec(json& j, const perclab::GraphSpec& spec) {
    j["spec"] = perclab::spec_to_string(spec);
    j["vertices"] = spec.vertex_count;
    j["degree"] = spec.degree;
}

json report_json(const perclab::GraphSpec& spec, double p, uint64_t seed,
                 const perclab::ClusterReport& rep) {
    json j;
    put_spec(j, spec);
    j["p"] = p;
    j["seed"] = seed;
    j["root"] = rep.root;
    j["size"] = rep.size;
    j["edge_count"] = rep.edge_count;
    j["layers"] = rep.layers;
    j["vertices_in_order"] = rep.vertices;
    if (rep.diameter >= 0) {
        j["diameter"] = rep.diameter;
    } else {
        j["diameter"] = nullptr;
    }
    j["truncated"] = rep.truncated;
    return j;
}

json estimator_json(const perclab::GraphSpec& spec,
                    const perclab::EstimatorResult& est) {
    json j;
    put_spec(j, spec);
    j["observable"] = est.observable;
    j["p"] = est.p;
    j["mean"] = est.mean;
    j["std_error"] = est.std_error;
    j["trials"] = est.trials;
    j["seed"] = est.seed;
    return j;
}

json pc_json_of(const perclab::GraphSpec& spec, const perclab::PcOptions& opts,
                const perclab::PcEstimate& est) {
    json j;
    put_spec(j, spec);
    j["lambda"] = est.lambda;
    j["target"] = est.target;
    j["tol"] = opts.tol;
    j["p_hat"] = est.p_hat;
    j["bracket"] = {est.bracket_lo, est.bracket_hi};
    j["chi_at_p_hat"] = {{"mean", est.chi_at_p_hat.mean},
                         {"std_error", est.chi_at_p_hat.std_error},
                         {"trials", est.chi_at_p_hat.trials}};
    j["converged"] = est.converged;
    j["probes"] = est.probes;
    j["trials_used"] = est.trials_used;
    j["seed"] = est.seed;
    return j;
}

std::vector<std::pair<uint64_t, uint64_t>> histogram_of(
    const std::vector<uint64_t>& sorted_desc) {
    std::vector<std::pair<uint64_t, uint64_t>> hist;
    for (uint64_t s : sorted_desc) {
        if (hist.empty() || hist.back().first != s) {
            hist.emplace_back(s, 1);
        } else {
            ++hist.back().second;
        }
    }
    return hist;
}

perclab::PcOptions pc_options_from(const char* pc_json) {
    perclab::PcOptions opts;
    if (pc_json == nullptr || *pc_json == '\0') return opts;
    json j = json::parse(pc_json, nullptr, false);
    if (j.is_discarded()) throw perclab::DomainError("malformed pc options JSON");
    opts.lambda = j.value("lambda", opts.lambda);
    opts.tol = j.value("tol", opts.tol);
    opts.trial_cap = j.value("trial_cap", opts.trial_cap);
    opts.chi_trials = j.value("chi_trials", opts.chi_trials);
    return opts;
}

std::string dump(const json& j) { return j.dump(2); }

}  // namespace

extern "C" {

const char* perclab_version(void) { return "0.1.0"; }

const char* perclab_last_error(void) { return t_last_error.c_str(); }

void perclab_set_threads(uint32_t n) { perclab::par::set_threads(n); }

uint32_t perclab_threads(void) { return perclab::par::threads(); }

perclab_status perclab_graph_parse(const char* spec, perclab_graph** out) {
    if (out == nullptr) {
        set_error("null graph output pointer");
        return PERCLAB_EINVAL;
    }
    *out = nullptr;
    if (spec == nullptr) {
        set_error("null spec string");
        return PERCLAB_EINVAL;
    }
    try {
        perclab::GraphSpec parsed = perclab::parse_spec(spec);
        *out = new perclab_graph{parsed};
        return PERCLAB_OK;
    } catch (...) {
        return map_failure();
    }
}

void perclab_graph_free(perclab_graph* g) { delete g; }

uint64_t perclab_graph_vertices(const perclab_graph* g) {
    return g == nullptr ? 0 : g->spec.vertex_count;
}

uint32_t perclab_graph_degree(const perclab_graph* g) {
    return g == nullptr ? 0 : g->spec.degree;
}

perclab_status perclab_anchor_pc(const perclab_graph* g, double* out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    if (out == nullptr) {
        set_error("null output pointer");
        return PERCLAB_EINVAL;
    }
    try {
        *out = perclab::anchor_pc(g->spec);
        return PERCLAB_OK;
    } catch (...) {
        return map_failure();
    }
}

const char* perclab_result_text(const perclab_result* r) {
    return r == nullptr ? "" : r->text.c_str();
}

void perclab_result_free(perclab_result* r) { delete r; }

perclab_status perclab_explore(const perclab_graph* g, double p, uint64_t seed,
                               uint64_t root, uint64_t r_max, uint64_t size_cap,
                               int with_diameter, perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        perclab::PercolationSample sample{g->spec, p, seed};
        perclab::ExploreOptions opts;
        opts.r_max = r_max;
        opts.size_cap = size_cap;
        opts.with_diameter = with_diameter != 0;
        perclab::ClusterReport rep = perclab::explore_cluster(sample, root, opts);
        return dump(report_json(g->spec, p, seed, rep));
    });
}

perclab_status perclab_census(const perclab_graph* g, double p, uint64_t seed,
                              const char* options_json, perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        perclab::CensusOptions opts;
        if (options_json != nullptr && *options_json != '\0') {
            json jo = json::parse(options_json, nullptr, false);
            if (jo.is_discarded()) {
                throw perclab::DomainError("malformed census options JSON");
            }
            opts.diameters = jo.value("diameters", opts.diameters);
            if (jo.contains("z_thresholds")) {
                opts.z_thresholds = jo["z_thresholds"].get<std::vector<uint64_t>>();
            }
            if (jo.contains("d_radii")) {
                opts.d_radii = jo["d_radii"].get<std::vector<uint64_t>>();
            }
            opts.d_size_threshold = jo.value("d_size_threshold", opts.d_size_threshold);
            opts.top_representatives =
                jo.value("top_representatives", opts.top_representatives);
        }
        perclab::PercolationSample sample{g->spec, p, seed};
        perclab::CensusSummary cs = perclab::census(sample, opts);
        json j;
        put_spec(j, g->spec);
        j["p"] = p;
        j["seed"] = seed;
        j["cluster_count"] = cs.cluster_count;
        j["largest"] = cs.sizes.empty() ? 0 : cs.sizes.front();
        j["size_histogram"] = histogram_of(cs.sizes);
        if (cs.delta_max >= 0) {
            j["delta_max"] = cs.delta_max;
        } else {
            j["delta_max"] = nullptr;
        }
        j["z_geq"] = cs.z_geq;
        j["d_r"] = cs.d_r;
        j["max_edge_count"] = cs.max_edge_count;
        j["top_roots"] = cs.top_roots;
        return dump(j);
    });
}

perclab_status perclab_estimate(const perclab_graph* g, const char* observable,
                                double p, uint64_t arg, uint64_t trials,
                                uint64_t seed, perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        if (observable == nullptr) throw perclab::DomainError("null observable name");
        const std::string name(observable);
        perclab::EstimatorResult est;
        json extra = json::object();
        if (name == "chi") {
            est = perclab::estimate_susceptibility(g->spec, p, trials, seed);
        } else if (name == "onearm") {
            est = perclab::estimate_onearm(g->spec, p, arg, trials, seed);
            extra["r"] = arg;
        } else if (name == "boundary") {
            est = perclab::estimate_boundary_volume(g->spec, p, arg, trials, seed);
            extra["r"] = arg;
        } else if (name == "tail") {
            est = perclab::estimate_cluster_tail(g->spec, p, arg, trials, seed);
            extra["k"] = arg;
        } else {
            throw perclab::DomainError("unknown observable: " + name);
        }
        json j = estimator_json(g->spec, est);
        j.update(extra);
        return dump(j);
    });
}

perclab_status perclab_onearm_curve(const perclab_graph* g, double p,
                                    uint64_t r_max, uint64_t trials,
                                    uint64_t seed, perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        perclab::OnearmCurve curve =
            perclab::estimate_onearm_curve(g->spec, p, r_max, trials, seed);
        json j;
        put_spec(j, g->spec);
        j["p"] = curve.p;
        j["r_max"] = curve.r_max;
        j["trials"] = curve.trials;
        j["seed"] = curve.seed;
        j["hits"] = curve.hits;
        return dump(j);
    });
}

perclab_status perclab_boundary_curve(const perclab_graph* g, double p,
                                      uint64_t r_max, uint64_t trials,
                                      uint64_t seed, perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        perclab::BoundaryCurve curve =
            perclab::estimate_boundary_curve(g->spec, p, r_max, trials, seed);
        json j;
        put_spec(j, g->spec);
        j["p"] = curve.p;
        j["r_max"] = curve.r_max;
        j["trials"] = curve.trials;
        j["seed"] = curve.seed;
        j["mean"] = curve.mean;
        j["std_error"] = curve.std_error;
        return dump(j);
    });
}

perclab_status perclab_find_pc(const perclab_graph* g, double lambda,
                               double tol, uint64_t trial_cap,
                               uint64_t chi_trials, uint64_t seed,
                               perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    if (out == nullptr) {
        set_error("null result pointer");
        return PERCLAB_EINVAL;
    }
    *out = nullptr;
    perclab::PcOptions opts;
    opts.lambda = lambda;
    opts.tol = tol;
    if (trial_cap > 0) opts.trial_cap = trial_cap;
    if (chi_trials > 0) opts.chi_trials = chi_trials;
    try {
        perclab::PcEstimate est = perclab::find_pc(g->spec, opts, seed);
        *out = new perclab_result{dump(pc_json_of(g->spec, opts, est))};
        return PERCLAB_OK;
    } catch (const perclab::PrecisionError& e) {
        // Ambiguous at the Monte Carlo resolution; emit the surviving bracket
        // so the caller still has the best available estimate.
        json j;
        put_spec(j, g->spec);
        j["lambda"] = lambda;
        j["tol"] = tol;
        j["p_hat"] = 0.5 * (e.bracket_lo + e.bracket_hi);
        j["bracket"] = {e.bracket_lo, e.bracket_hi};
        j["converged"] = false;
        j["seed"] = seed;
        *out = new perclab_result{dump(j)};
        set_error(e.what());
        return PERCLAB_EPRECISION;
    } catch (...) {
        return map_failure();
    }
}

perclab_status perclab_tmix_lazy(const perclab_graph* g, double p,
                                 uint64_t seed, uint64_t root,
                                 perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        perclab::PercolationSample sample{g->spec, p, seed};
        perclab::ClusterReport rep = perclab::explore_cluster(sample, root);
        perclab::ClusterGraph cg = perclab::extract_cluster_graph(sample, rep.vertices);
        const int64_t diam = perclab::cluster_graph_diameter(cg);
        const uint64_t bound = perclab::lazy_tmix_bound(cg);
        uint64_t tmix = 0;
        bool exact = true;
        try {
            tmix = perclab::lazy_tmix_exact(cg);
        } catch (const perclab::ResourceError&) {
            tmix = bound;
            exact = false;
        }
        json j;
        put_spec(j, g->spec);
        j["p"] = p;
        j["seed"] = seed;
        j["root"] = root;
        j["cluster"] = {{"size", cg.size()},
                        {"edges", cg.edge_count},
                        {"diameter", diam}};
        j["tmix"] = tmix;
        j["exact"] = exact;
        j["bound"] = bound;
        return dump(j);
    });
}

perclab_status perclab_tmix_nb(const perclab_graph* g, double alpha,
                               uint64_t step_cap, perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    if (out == nullptr) {
        set_error("null result pointer");
        return PERCLAB_EINVAL;
    }
    *out = nullptr;
    json j;
    put_spec(j, g->spec);
    j["alpha"] = alpha;
    try {
        const uint64_t cap = step_cap > 0 ? step_cap : (1ull << 18);
        const uint64_t t = perclab::nb_tmix(g->spec, alpha, cap);
        j["tmix"] = t;
        j["converged"] = true;
        *out = new perclab_result{dump(j)};
        return PERCLAB_OK;
    } catch (const perclab::DivergenceError& e) {
        j["tmix"] = nullptr;
        j["converged"] = false;
        j["best_t"] = e.best_iterate;
        *out = new perclab_result{dump(j)};
        set_error(e.what());
        return PERCLAB_EPRECISION;
    } catch (...) {
        return map_failure();
    }
}

perclab_status perclab_triangle(const perclab_graph* g, double p, int exact,
                                uint64_t trials, uint64_t seed,
                                perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        const perclab::TriangleMode mode =
            exact != 0 ? perclab::TriangleMode::Exact : perclab::TriangleMode::Mc;
        perclab::TriangleValue tv =
            perclab::triangle_sum(g->spec, p, mode, trials, seed);
        json j;
        put_spec(j, g->spec);
        j["p"] = tv.p;
        j["mode"] = tv.mode == perclab::TriangleMode::Exact ? "exact" : "mc";
        j["diagonal"] = tv.diagonal;
        j["offdiag"] = tv.offdiag;
        j["trials"] = tv.trials;
        j["seed"] = tv.seed;
        return dump(j);
    });
}

perclab_status perclab_assumptions(const perclab_graph* g, double alpha,
                                   const char* pc_json, uint64_t seed,
                                   perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        const perclab::PcOptions opts = pc_options_from(pc_json);
        perclab::AssumptionReport rep =
            perclab::assumption_sums(g->spec, alpha, opts, seed);
        json j;
        put_spec(j, g->spec);
        j["alpha"] = rep.alpha;
        j["tmix"] = rep.tmix;
        j["p_hat"] = rep.p_hat;
        j["pc_converged"] = rep.pc_converged;
        j["a1"] = rep.a1;
        j["a2"] = rep.a2;
        j["heat"] = rep.heat;
        j["seed"] = rep.seed;
        return dump(j);
    });
}

perclab_status perclab_oracle(const perclab_graph* g, double p, uint64_t root,
                              uint64_t r_max, int as_fixtures,
                              perclab_result** out) {
    if (perclab_status st = need_graph(g); st != PERCLAB_OK) return st;
    return guarded(out, [&] {
        perclab::ExactLaw law = perclab::enumerate_exact(g->spec, p, root, r_max);
        if (as_fixtures != 0) return perclab::fixture_text(law);
        json j;
        put_spec(j, g->spec);
        j["p"] = law.p;
        j["root"] = law.root;
        j["susceptibility"] = static_cast<double>(law.susceptibility);
        j["largest"] = static_cast<double>(law.largest);
        j["triangle"] = static_cast<double>(law.triangle);
        auto narrow = [](const std::vector<long double>& v) {
            return std::vector<double>(v.begin(), v.end());
        };
        j["size_dist"] = narrow(law.size_dist);
        j["onearm"] = narrow(law.onearm);
        j["boundary"] = narrow(law.boundary);
        j["tau"] = narrow(law.tau);
        return dump(j);
    });
}

perclab_status perclab_sweep(const char* plan_json, const char* format,
                             perclab_result** out) {
    return guarded(out, [&] {
        if (plan_json == nullptr) throw perclab::DomainError("null sweep plan");
        const std::string fmt = format == nullptr ? "json" : format;
        if (fmt != "json" && fmt != "csv") {
            throw perclab::DomainError("unknown format: " + fmt);
        }
        perclab::SweepPlan plan = perclab::plan_from_json(plan_json);
        std::vector<perclab::SweepRow> rows = perclab::run_sweep(plan);
        return fmt == "csv" ? perclab::sweep_csv(rows)
                            : perclab::sweep_json(plan, rows);
    });
}

perclab_status perclab_fit(const char* sweep_json, const char* law,
                           uint64_t min_hits, const char* format,
                           perclab_result** out) {
    return guarded(out, [&] {
        if (sweep_json == nullptr) throw perclab::DomainError("null sweep document");
        if (law == nullptr) throw perclab::DomainError("null law name");
        const std::string fmt = format == nullptr ? "json" : format;
        if (fmt != "json" && fmt != "csv") {
            throw perclab::DomainError("unknown format: " + fmt);
        }
        const std::string name(law);
        perclab::FitLaw which;
        if (name == "c1_volume") {
            which = perclab::FitLaw::C1Volume;
        } else if (name == "delta_max") {
            which = perclab::FitLaw::DeltaMax;
        } else if (name == "tmix") {
            which = perclab::FitLaw::Tmix;
        } else if (name == "onearm_profile") {
            which = perclab::FitLaw::OnearmProfile;
        } else {
            throw perclab::DomainError("unknown law: " + name);
        }
        std::vector<perclab::SweepRow> rows =
            perclab::sweep_rows_from_json(sweep_json);
        perclab::FitOptions opts;
        if (min_hits > 0) opts.min_hits = min_hits;
        perclab::FitReport rep = perclab::fit_ratios(rows, which, opts);
        return fmt == "csv" ? perclab::fit_csv(rep) : perclab::fit_json(rep);
    });
}

}  // extern "C"
