#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "perclab/perclab.h"

// Thin front end over the C API: every subcommand builds one call, prints the
// returned document, and maps the status to the exit code. The effective
// master seed always appears on stdout (inside the JSON, or as a leading
// comment line for CSV).

namespace {

struct GraphHandle {
    perclab_graph* g = nullptr;
    ~GraphHandle() { perclab_graph_free(g); }
};

struct ResultHandle {
    perclab_result* r = nullptr;
    ~ResultHandle() { perclab_result_free(r); }
    std::string text() const { return perclab_result_text(r); }
};

uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

int fail(perclab_status st) {
    std::cerr << "error: " << perclab_last_error() << "\n";
    return static_cast<int>(st);
}

std::string ensure_seed_json(const std::string& text, uint64_t seed) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("seed")) j["seed"] = seed;
    return j.dump(2);
}

// Emits the finished document. JSON gets the seed injected when the
// operation itself had none; CSV gets a comment line.
int emit(const std::string& text, bool is_json, uint64_t seed,
         const std::string& out_path) {
    std::string doc;
    if (is_json) {
        doc = ensure_seed_json(text, seed);
    } else {
        std::ostringstream s;
        s << "# seed = " << seed << "\n" << text;
        doc = s.str();
    }
    if (!doc.empty() && doc.back() != '\n') doc += '\n';
    if (out_path.empty()) {
        std::cout << doc;
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    f << doc;
    f.flush();
    if (!f) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 1;
    }
    nlohmann::json status;
    status["out"] = out_path;
    status["bytes"] = doc.size();
    status["seed"] = seed;
    std::cout << status.dump(2) << "\n";
    return 0;
}

int parse_graph(const std::string& spec, GraphHandle& gh) {
    const perclab_status st = perclab_graph_parse(spec.c_str(), &gh.g);
    return st == PERCLAB_OK ? 0 : fail(st);
}

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream s;
        s << std::cin.rdbuf();
        return s.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CLI::ValidationError("--in", "cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"percolation laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<uint32_t> threads;
    app.add_option("--threads", threads, "worker threads (0 = hardware default)")
        ->envname("PERC_LAB_THREADS");
    std::string format = "json";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    std::string out_path;
    app.add_option("--out", out_path, "write the document to FILE instead of stdout");

    std::string spec;
    std::optional<uint64_t> seed_opt;
    double p = 0.0;
    uint64_t trials = 10000;
    uint64_t r = 1;
    uint64_t k = 2;
    uint64_t root = 0;
    double lambda = 1.0;
    double alpha = 0.25;
    double tol = 1e-4;

    auto add_spec = [&spec](CLI::App* cmd) {
        cmd->add_option("--spec", spec, "graph family, e.g. Q10, T5^2, K4, K3^4")
            ->required();
    };
    auto add_seed = [&seed_opt](CLI::App* cmd) {
        cmd->add_option("--seed", seed_opt, "master seed (generated when absent)");
    };
    auto add_p = [&p](CLI::App* cmd) {
        cmd->add_option("--p", p, "bond retention probability")->required();
    };

    // census
    CLI::App* c_census = app.add_subcommand("census", "whole-configuration cluster census");
    add_spec(c_census);
    add_p(c_census);
    add_seed(c_census);
    bool diameters = false;
    c_census->add_flag("--diameters", diameters, "also compute every cluster diameter");
    std::vector<uint64_t> z_thresholds, d_radii;
    c_census->add_option("--z", z_thresholds, "thresholds k for Z_{>=k}");
    c_census->add_option("--d-radii", d_radii, "radii r for the D_r count");
    uint64_t d_size_threshold = PERCLAB_UNLIMITED;
    c_census->add_option("--d-size-threshold", d_size_threshold,
                         "cluster-size filter for D_r");
    uint64_t top = 0;
    c_census->add_option("--top", top, "roots of the largest clusters to report");
    std::optional<uint64_t> rank_j;
    c_census->add_option("--j", rank_j, "also report the j-th largest cluster size");

    // explore
    CLI::App* c_explore = app.add_subcommand("explore", "BFS one cluster from a root");
    add_spec(c_explore);
    add_p(c_explore);
    add_seed(c_explore);
    c_explore->add_option("--root", root, "start vertex");
    uint64_t r_max = PERCLAB_UNLIMITED;
    c_explore->add_option("--r", r_max, "deepest layer to materialize");
    uint64_t size_cap = PERCLAB_UNLIMITED;
    c_explore->add_option("--size-cap", size_cap, "stop after this many vertices");
    bool with_diameter = false;
    c_explore->add_flag("--diameter", with_diameter, "also compute the cluster diameter");

    // estimators
    CLI::App* c_onearm = app.add_subcommand("onearm", "P(cluster reaches radius r)");
    add_spec(c_onearm);
    add_p(c_onearm);
    add_seed(c_onearm);
    c_onearm->add_option("--r", r, "radius");
    c_onearm->add_option("--trials", trials, "Monte Carlo trials");
    bool curve = false;
    c_onearm->add_flag("--curve", curve, "emit the whole survival curve up to --r");

    CLI::App* c_boundary = app.add_subcommand("boundary", "E|∂B(r)| at radius r");
    add_spec(c_boundary);
    add_p(c_boundary);
    add_seed(c_boundary);
    c_boundary->add_option("--r", r, "radius");
    c_boundary->add_option("--trials", trials, "Monte Carlo trials");
    c_boundary->add_flag("--curve", curve, "emit the whole E|∂B(r)| curve up to --r");

    CLI::App* c_tail = app.add_subcommand("tail", "P(|C| >= k)");
    add_spec(c_tail);
    add_p(c_tail);
    add_seed(c_tail);
    c_tail->add_option("--k", k, "size threshold");
    c_tail->add_option("--trials", trials, "Monte Carlo trials");

    CLI::App* c_chi = app.add_subcommand("chi", "susceptibility E|C|");
    add_spec(c_chi);
    add_p(c_chi);
    add_seed(c_chi);
    c_chi->add_option("--trials", trials, "Monte Carlo trials");

    CLI::App* c_pc = app.add_subcommand("pc", "critical p where chi = lambda V^(1/3)");
    add_spec(c_pc);
    add_seed(c_pc);
    c_pc->add_option("--lambda", lambda, "susceptibility target multiplier");
    c_pc->add_option("--tol", tol, "bracket width to stop at");
    uint64_t trial_cap = 0, chi_trials = 0;
    c_pc->add_option("--trials", trial_cap, "per-probe trial budget (0 = default)");
    c_pc->add_option("--chi-trials", chi_trials,
                     "trials for the final chi(p_hat) sample (0 = default)");

    // walks
    CLI::App* c_lazy = app.add_subcommand("tmix-lazy", "lazy-walk T_mix of one cluster");
    add_spec(c_lazy);
    add_p(c_lazy);
    add_seed(c_lazy);
    c_lazy->add_option("--root", root, "start vertex");

    CLI::App* c_nb = app.add_subcommand("tmix-nb", "non-backtracking walk t_mix");
    add_spec(c_nb);
    c_nb->add_option("--alpha", alpha, "uniformity slack");
    uint64_t step_cap = 0;
    c_nb->add_option("--step-cap", step_cap, "iteration budget (0 = default)");

    CLI::App* c_tri = app.add_subcommand("triangle", "triangle diagram at the root");
    add_spec(c_tri);
    add_p(c_tri);
    add_seed(c_tri);
    bool mc = false;
    c_tri->add_flag("--mc", mc, "Monte Carlo two-point row instead of exact enumeration");
    c_tri->add_option("--trials", trials, "Monte Carlo trials (with --mc)");

    CLI::App* c_assume = app.add_subcommand("assumptions",
                                            "finite mean-field assumption scalars");
    add_spec(c_assume);
    add_seed(c_assume);
    c_assume->add_option("--alpha", alpha, "uniformity slack for the nb horizon");
    c_assume->add_option("--lambda", lambda, "susceptibility target multiplier");
    c_assume->add_option("--tol", tol, "critical-point bracket width");
    c_assume->add_option("--trials", trial_cap, "per-probe trial budget (0 = default)");

    // oracle
    CLI::App* c_oracle = app.add_subcommand("oracle", "exact enumeration (|E| <= 20)");
    add_spec(c_oracle);
    add_p(c_oracle);
    c_oracle->add_option("--root", root, "distinguished vertex");
    uint64_t oracle_rmax = PERCLAB_UNLIMITED;
    c_oracle->add_option("--r", oracle_rmax, "deepest reported radius");
    std::string fixtures_path;
    c_oracle->add_option("--emit-fixtures", fixtures_path,
                         "write key = value fixture lines to FILE");

    // sweep
    CLI::App* c_sweep = app.add_subcommand("sweep", "grid of census cells");
    std::vector<std::string> sweep_specs;
    c_sweep->add_option("--spec", sweep_specs, "graph families (repeatable)");
    std::vector<double> sweep_eps;
    c_sweep->add_option("--epsilon", sweep_eps, "subcritical distances (repeatable)");
    std::vector<double> sweep_ps;
    c_sweep->add_option("--p", sweep_ps, "explicit p values (repeatable)");
    std::string p_source = "anchor";
    c_sweep->add_option("--p-source", p_source, "how cells derive p")
        ->check(CLI::IsMember({"anchor", "explicit", "find_pc"}));
    add_seed(c_sweep);
    uint64_t seeds_per_cell = 1;
    c_sweep->add_option("--seeds", seeds_per_cell, "census replicas per cell");
    bool no_diameters = false, no_mixing = false;
    c_sweep->add_flag("--no-diameters", no_diameters, "skip cluster diameters");
    c_sweep->add_flag("--no-mixing", no_mixing, "skip per-cluster T_mix");
    uint64_t top_clusters = 10;
    c_sweep->add_option("--top", top_clusters, "clusters examined for T_mix");
    std::vector<uint64_t> ranks{1, 2};
    c_sweep->add_option("--ranks", ranks, "cluster ranks recorded per seed");
    uint64_t onearm_rmax = 0, onearm_trials = 0;
    c_sweep->add_option("--onearm-rmax", onearm_rmax, "one-arm curve depth (0 = skip)");
    c_sweep->add_option("--onearm-trials", onearm_trials, "one-arm curve trials");
    double epsilon_max = 0.5, regime_floor = 20.0;
    c_sweep->add_option("--epsilon-max", epsilon_max, "regime guard on epsilon");
    c_sweep->add_option("--regime-floor", regime_floor, "regime guard on eps^3 V");
    c_sweep->add_option("--lambda", lambda, "find_pc target multiplier");
    c_sweep->add_option("--tol", tol, "find_pc bracket width");
    std::string plan_path;
    c_sweep->add_option("--plan", plan_path, "read the full plan JSON from FILE instead");

    // fit
    CLI::App* c_fit = app.add_subcommand("fit", "scaling-law ratios from a sweep");
    std::string fit_in;
    c_fit->add_option("--in", fit_in, "sweep JSON file ('-' for stdin)")->required();
    std::string law;
    c_fit->add_option("--law", law, "scaling law")
        ->check(CLI::IsMember({"c1_volume", "delta_max", "tmix", "onearm_profile"}))
        ->required();
    uint64_t min_hits = 0;
    c_fit->add_option("--min-hits", min_hits,
                      "censor one-arm grid points below this hit count (0 = default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (threads.has_value()) perclab_set_threads(*threads);
    const uint64_t seed = seed_opt.has_value() ? *seed_opt : fresh_seed();
    const bool json_out = format == "json";

    try {
        if (app.got_subcommand(c_census)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            nlohmann::json jo;
            jo["diameters"] = diameters;
            jo["z_thresholds"] = z_thresholds;
            jo["d_radii"] = d_radii;
            jo["d_size_threshold"] = d_size_threshold;
            jo["top_representatives"] = top;
            ResultHandle res;
            const perclab_status st =
                perclab_census(gh.g, p, seed, jo.dump().c_str(), &res.r);
            if (st != PERCLAB_OK) return fail(st);
            std::string text = res.text();
            if (rank_j.has_value()) {
                nlohmann::json j = nlohmann::json::parse(text);
                uint64_t size = 0, seen = 0;
                for (const auto& bucket : j["size_histogram"]) {
                    seen += bucket[1].get<uint64_t>();
                    if (seen >= *rank_j) {
                        size = bucket[0].get<uint64_t>();
                        break;
                    }
                }
                j["jth"] = {{"j", *rank_j}, {"size", size}};
                text = j.dump(2);
            }
            return emit(text, json_out, seed, out_path);
        }

        if (app.got_subcommand(c_explore)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            ResultHandle res;
            const perclab_status st =
                perclab_explore(gh.g, p, seed, root, r_max, size_cap,
                                with_diameter ? 1 : 0, &res.r);
            if (st != PERCLAB_OK) return fail(st);
            return emit(res.text(), json_out, seed, out_path);
        }

        if (app.got_subcommand(c_onearm) || app.got_subcommand(c_boundary) ||
            app.got_subcommand(c_tail) || app.got_subcommand(c_chi)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            ResultHandle res;
            perclab_status st = PERCLAB_OK;
            if (app.got_subcommand(c_onearm) && curve) {
                st = perclab_onearm_curve(gh.g, p, r, trials, seed, &res.r);
            } else if (app.got_subcommand(c_onearm)) {
                st = perclab_estimate(gh.g, "onearm", p, r, trials, seed, &res.r);
            } else if (app.got_subcommand(c_boundary) && curve) {
                st = perclab_boundary_curve(gh.g, p, r, trials, seed, &res.r);
            } else if (app.got_subcommand(c_boundary)) {
                st = perclab_estimate(gh.g, "boundary", p, r, trials, seed, &res.r);
            } else if (app.got_subcommand(c_tail)) {
                st = perclab_estimate(gh.g, "tail", p, k, trials, seed, &res.r);
            } else {
                st = perclab_estimate(gh.g, "chi", p, 0, trials, seed, &res.r);
            }
            if (st != PERCLAB_OK) return fail(st);
            return emit(res.text(), json_out, seed, out_path);
        }

        if (app.got_subcommand(c_pc)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            ResultHandle res;
            const perclab_status st =
                perclab_find_pc(gh.g, lambda, tol, trial_cap, chi_trials, seed, &res.r);
            if (st != PERCLAB_OK && res.r == nullptr) return fail(st);
            const int rc = emit(res.text(), json_out, seed, out_path);
            if (rc != 0) return rc;
            if (st != PERCLAB_OK) {
                std::cerr << "warning: " << perclab_last_error() << "\n";
                return static_cast<int>(st);
            }
            return 0;
        }

        if (app.got_subcommand(c_lazy)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            ResultHandle res;
            const perclab_status st = perclab_tmix_lazy(gh.g, p, seed, root, &res.r);
            if (st != PERCLAB_OK) return fail(st);
            return emit(res.text(), json_out, seed, out_path);
        }

        if (app.got_subcommand(c_nb)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            ResultHandle res;
            const perclab_status st = perclab_tmix_nb(gh.g, alpha, step_cap, &res.r);
            if (st != PERCLAB_OK && res.r == nullptr) return fail(st);
            const int rc = emit(res.text(), json_out, seed, out_path);
            if (rc != 0) return rc;
            if (st != PERCLAB_OK) {
                std::cerr << "warning: " << perclab_last_error() << "\n";
                return static_cast<int>(st);
            }
            return 0;
        }

        if (app.got_subcommand(c_tri)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            ResultHandle res;
            const perclab_status st =
                perclab_triangle(gh.g, p, mc ? 0 : 1, trials, seed, &res.r);
            if (st != PERCLAB_OK) return fail(st);
            return emit(res.text(), json_out, seed, out_path);
        }

        if (app.got_subcommand(c_assume)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            nlohmann::json jpc;
            jpc["lambda"] = lambda;
            jpc["tol"] = tol;
            if (trial_cap > 0) jpc["trial_cap"] = trial_cap;
            ResultHandle res;
            const perclab_status st =
                perclab_assumptions(gh.g, alpha, jpc.dump().c_str(), seed, &res.r);
            if (st != PERCLAB_OK) return fail(st);
            return emit(res.text(), json_out, seed, out_path);
        }

        if (app.got_subcommand(c_oracle)) {
            GraphHandle gh;
            if (int rc = parse_graph(spec, gh); rc != 0) return rc;
            if (!fixtures_path.empty()) {
                ResultHandle res;
                const perclab_status st =
                    perclab_oracle(gh.g, p, root, oracle_rmax, 1, &res.r);
                if (st != PERCLAB_OK) return fail(st);
                std::ofstream f(fixtures_path, std::ios::binary);
                f << res.text();
                f.flush();
                if (!f) {
                    std::cerr << "error: cannot write " << fixtures_path << "\n";
                    return 1;
                }
                nlohmann::json status;
                status["fixtures"] = fixtures_path;
                status["bytes"] = res.text().size();
                status["seed"] = seed;
                std::cout << status.dump(2) << "\n";
                return 0;
            }
            ResultHandle res;
            const perclab_status st =
                perclab_oracle(gh.g, p, root, oracle_rmax, 0, &res.r);
            if (st != PERCLAB_OK) return fail(st);
            return emit(res.text(), json_out, seed, out_path);
        }

        if (app.got_subcommand(c_sweep)) {
            std::string plan_text;
            if (!plan_path.empty()) {
                plan_text = read_file(plan_path);
            } else {
                nlohmann::json jp;
                jp["p_source"] = p_source;
                jp["seeds_per_cell"] = seeds_per_cell;
                jp["master_seed"] = seed;
                jp["diameters"] = !no_diameters;
                jp["mixing"] = !no_mixing;
                jp["top_clusters"] = top_clusters;
                jp["ranks"] = ranks;
                jp["onearm_rmax"] = onearm_rmax;
                jp["onearm_trials"] = onearm_trials;
                jp["epsilon_max"] = epsilon_max;
                jp["regime_floor"] = regime_floor;
                jp["pc"] = {{"lambda", lambda}, {"tol", tol}};
                nlohmann::json cells = nlohmann::json::array();
                if (sweep_specs.empty()) {
                    std::cerr << "error: sweep needs --spec (or --plan FILE)\n";
                    return 2;
                }
                if (p_source == "explicit") {
                    if (sweep_ps.empty()) {
                        std::cerr << "error: explicit sweep needs --p values\n";
                        return 2;
                    }
                    for (const std::string& s : sweep_specs) {
                        for (double pv : sweep_ps) {
                            cells.push_back({{"spec", s}, {"p", pv}});
                        }
                    }
                } else {
                    if (sweep_eps.empty()) {
                        std::cerr << "error: sweep needs --epsilon values\n";
                        return 2;
                    }
                    for (const std::string& s : sweep_specs) {
                        for (double e : sweep_eps) {
                            cells.push_back({{"spec", s}, {"epsilon", e}});
                        }
                    }
                }
                jp["cells"] = cells;
                plan_text = jp.dump();
            }
            ResultHandle res;
            const perclab_status st =
                perclab_sweep(plan_text.c_str(), format.c_str(), &res.r);
            if (st != PERCLAB_OK) return fail(st);
            return emit(res.text(), json_out, seed, out_path);
        }

        if (app.got_subcommand(c_fit)) {
            const std::string doc = read_file(fit_in);
            ResultHandle res;
            const perclab_status st =
                perclab_fit(doc.c_str(), law.c_str(), min_hits, format.c_str(), &res.r);
            if (st != PERCLAB_OK) return fail(st);
            return emit(res.text(), json_out, seed, out_path);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    std::cerr << "error: no subcommand\n";
    return 2;
}
