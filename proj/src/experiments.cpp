#include "experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"
#include "rng.hpp"
#include "walks.hpp"

namespace perclab {
namespace {

constexpr uint64_t kPcSeedSlot = 0xFFFFFFFFull;
constexpr uint64_t kOnearmSeedSlot = 0xFFFFFFFEull;
constexpr uint64_t kFallbackChiTrials = 1ull << 16;

uint64_t cell_seed(uint64_t master, uint64_t cell_index, uint64_t slot) {
    return rng::keyed_hash(master, rng::kCellStream, (cell_index << 32) | slot);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(std::max(0.0, ss / (n - 1.0)) / n);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxx == 0.0 ? 0.0 : sxy / sxx;
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

const char* source_name(PSource s) {
    switch (s) {
        case PSource::Explicit: return "explicit";
        case PSource::Anchor: return "anchor";
        case PSource::FindPc: return "find_pc";
    }
    return "unknown";
}

const char* law_name(FitLaw law) {
    switch (law) {
        case FitLaw::C1Volume: return "c1_volume";
        case FitLaw::DeltaMax: return "delta_max";
        case FitLaw::Tmix: return "tmix";
        case FitLaw::OnearmProfile: return "onearm_profile";
    }
    return "unknown";
}

nlohmann::json stats_json(const std::vector<double>& v) {
    nlohmann::json j;
    j["values"] = v;
    if (!v.empty()) {
        j["mean"] = mean_of(v);
        j["std_error"] = stderr_of(v);
        j["median"] = median_of(v);
    }
    return j;
}

}  // namespace

double SweepRow::eps3v() const {
    return epsilon * epsilon * epsilon * static_cast<double>(spec.vertex_count);
}

double SweepRow::c1_scale() const { return std::log(eps3v()) / (epsilon * epsilon); }

double SweepRow::delta_scale() const { return std::log(eps3v()) / epsilon; }

double SweepRow::tmix_scale() const {
    const double l = std::log(eps3v());
    return l * l / (epsilon * epsilon * epsilon);
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan) {
    if (plan.cells.empty()) throw DomainError("sweep plan has no cells");
    if (plan.seeds_per_cell == 0) throw DomainError("sweep needs at least one seed per cell");

    std::vector<SweepRow> rows;
    rows.reserve(plan.cells.size());
    for (size_t ci = 0; ci < plan.cells.size(); ++ci) {
        const SweepCell& cell = plan.cells[ci];
        SweepRow row;
        row.spec = cell.spec;
        row.epsilon = cell.epsilon;
        row.seeds = plan.seeds_per_cell;
        row.p_source = source_name(plan.p_source);

        if (plan.p_source == PSource::Explicit) {
            row.p = cell.p;
        } else {
            if (!(cell.epsilon >= 0.0 && cell.epsilon <= 1.0)) {
                throw DomainError("sweep cell needs epsilon in [0, 1] to derive p");
            }
            double base = 0.0;
            if (plan.p_source == PSource::Anchor) {
                base = anchor_pc(cell.spec);
            } else {
                try {
                    base = find_pc(cell.spec, plan.pc,
                                   cell_seed(plan.master_seed, ci, kPcSeedSlot))
                               .p_hat;
                } catch (const PrecisionError& e) {
                    base = 0.5 * (e.bracket_lo + e.bracket_hi);
                    row.note = "critical point search stalled; bracket midpoint used";
                }
            }
            row.p = (1.0 - cell.epsilon) * base;
        }
        if (!(row.p >= 0.0 && row.p <= 1.0)) {
            throw DomainError("sweep cell resolved to p outside [0, 1]");
        }

        row.out_of_regime =
            !(cell.epsilon <= plan.epsilon_max && row.eps3v() >= plan.regime_floor);

        CensusOptions copts;
        copts.diameters = plan.diameters;
        copts.top_representatives =
            plan.mixing ? static_cast<uint32_t>(plan.top_clusters) : 0;
        const bool census_fits = cell.spec.vertex_count <= copts.memory_budget_vertices;

        row.rank_values.assign(plan.ranks.size(), {});
        ClusterExplorer explorer(cell.spec);
        for (uint64_t si = 0; si < plan.seeds_per_cell; ++si) {
            const uint64_t seed = cell_seed(plan.master_seed, ci, si);
            if (!census_fits) {
                if (si == 0) {
                    if (!row.note.empty()) row.note += "; ";
                    row.note += "vertex count over census budget, susceptibility fallback";
                    const EstimatorResult chi = estimate_susceptibility(
                        cell.spec, row.p, kFallbackChiTrials, seed);
                    row.chi_fallback = {chi.mean, chi.std_error};
                }
                continue;
            }
            const PercolationSample sample{cell.spec, row.p, seed};
            const CensusSummary cs = census(sample, copts);
            row.c1_values.push_back(
                cs.sizes.empty() ? 0.0 : static_cast<double>(cs.sizes[0]));
            for (size_t ri = 0; ri < plan.ranks.size(); ++ri) {
                row.rank_values[ri].push_back(
                    static_cast<double>(jth_largest(cs, plan.ranks[ri])));
            }
            if (plan.diameters) {
                row.delta_values.push_back(static_cast<double>(cs.delta_max));
            }
            if (plan.mixing) {
                double best = 0.0;
                uint64_t best_rank = 0;
                bool all_exact = true;
                for (size_t j = 0; j < cs.top_roots.size(); ++j) {
                    const ClusterReport rep =
                        explorer.explore(sample, cs.top_roots[j], {});
                    const ClusterGraph g = extract_cluster_graph(sample, rep.vertices);
                    uint64_t t = 0;
                    try {
                        t = lazy_tmix_exact(g);
                    } catch (const ResourceError&) {
                        t = lazy_tmix_bound(g);
                        all_exact = false;
                    }
                    if (best_rank == 0 || static_cast<double>(t) > best) {
                        best = static_cast<double>(t);
                        best_rank = j + 1;
                    }
                }
                if (best_rank > 0) {
                    row.tmix_values.push_back(best);
                    row.tmix_rank.push_back(best_rank);
                    row.tmix_exact.push_back(all_exact);
                }
            }
        }

        if (plan.onearm_rmax > 0 && plan.onearm_trials > 0) {
            const uint64_t curve_seed = cell_seed(plan.master_seed, ci, kOnearmSeedSlot);
            row.onearm = estimate_onearm_curve(cell.spec, row.p, plan.onearm_rmax,
                                               plan.onearm_trials, curve_seed);
            row.boundary = estimate_boundary_curve(cell.spec, row.p, plan.onearm_rmax,
                                                   plan.onearm_trials, curve_seed);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

FitReport fit_ratios(const std::vector<SweepRow>& rows, FitLaw law,
                     const FitOptions& opts) {
    FitReport rep;
    rep.law = law;

    if (law == FitLaw::OnearmProfile) {
        for (size_t i = 0; i < rows.size(); ++i) {
            const SweepRow& row = rows[i];
            if (row.out_of_regime || row.onearm.trials == 0) continue;
            const double eps = row.epsilon;
            if (!(eps > 0.0 && eps < 1.0)) continue;
            const double cut = 1.0 / eps;
            const double tail_ref = std::log1p(-eps);
            std::vector<double> hr, hy, tr, ty;
            for (uint64_t r = 2; r < row.onearm.hits.size(); ++r) {
                if (row.onearm.hits[r] < opts.min_hits) continue;
                const double y = std::log(static_cast<double>(row.onearm.hits[r]) /
                                          static_cast<double>(row.onearm.trials));
                if (static_cast<double>(r) <= cut) {
                    hr.push_back(static_cast<double>(r));
                    hy.push_back(y);
                } else {
                    tr.push_back(static_cast<double>(r));
                    ty.push_back(y);
                }
            }
            if (hr.empty() || tr.size() < 2) continue;
            double head_level = 0.0;
            for (size_t k = 0; k < hr.size(); ++k) head_level += hy[k] + std::log(hr[k]);
            head_level /= static_cast<double>(hr.size());
            double tail_level = 0.0;
            for (size_t k = 0; k < tr.size(); ++k) tail_level += ty[k] - tr[k] * tail_ref;
            tail_level /= static_cast<double>(tr.size());
            double sup = 0.0;
            for (size_t k = 0; k < hr.size(); ++k) {
                sup = std::max(sup, std::abs(hy[k] - (head_level - std::log(hr[k]))));
            }
            for (size_t k = 0; k < tr.size(); ++k) {
                sup = std::max(sup, std::abs(ty[k] - (tail_level + tr[k] * tail_ref)));
            }
            FitRowResult fr;
            fr.row = i;
            fr.ratio = sup;
            fr.tail_slope = ls_slope(tr, ty);
            fr.tail_slope_ref = tail_ref;
            rep.rows.push_back(fr);
        }
        if (rep.rows.empty()) {
            throw DomainError(
                "one-arm profile fit needs an in-regime row with enough curve points");
        }
        rep.trend_slope = 0.0;
        rep.dispersion = 0.0;
        return rep;
    }

    std::vector<double> xs, ratios;
    for (size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& row = rows[i];
        if (row.out_of_regime) continue;
        const std::vector<double>* vals = nullptr;
        double scale = 0.0;
        switch (law) {
            case FitLaw::C1Volume:
                vals = &row.c1_values;
                scale = row.c1_scale();
                break;
            case FitLaw::DeltaMax:
                vals = &row.delta_values;
                scale = row.delta_scale();
                break;
            case FitLaw::Tmix:
                vals = &row.tmix_values;
                scale = row.tmix_scale();
                break;
            case FitLaw::OnearmProfile:
                break;
        }
        if (vals == nullptr || vals->empty()) continue;
        if (!(scale > 0.0) || !std::isfinite(scale)) continue;
        FitRowResult fr;
        fr.row = i;
        fr.ratio = median_of(*vals) / scale;
        rep.rows.push_back(fr);
        xs.push_back(std::log(row.eps3v()));
        ratios.push_back(fr.ratio);
    }
    if (rep.rows.size() < 3) {
        throw DomainError("ratio trend fit needs at least 3 in-regime rows");
    }
    rep.trend_slope = ls_slope(xs, ratios);
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    rep.dispersion = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return rep;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "# sweep_csv v1\n";
    out << "spec,vertices,epsilon,p,p_source,out_of_regime,seeds,eps3v"
        << ",c1_mean,c1_stderr,c1_median,c1_ratio"
        << ",delta_mean,delta_median,delta_ratio"
        << ",tmix_mean,tmix_median,tmix_ratio,tmix_exact_share"
        << ",chi_fallback_mean,chi_fallback_stderr,note\n";
    for (const SweepRow& row : rows) {
        out << spec_to_string(row.spec) << ',' << row.spec.vertex_count << ','
            << fmt(row.epsilon) << ',' << fmt(row.p) << ',' << row.p_source << ','
            << (row.out_of_regime ? 1 : 0) << ',' << row.seeds << ','
            << fmt(row.eps3v());
        auto put_stats = [&out](const std::vector<double>& v, double scale,
                                bool with_stderr) {
            if (v.empty()) {
                out << ',' << (with_stderr ? ",," : ",");
                return;
            }
            out << ',' << fmt(mean_of(v));
            if (with_stderr) out << ',' << fmt(stderr_of(v));
            out << ',' << fmt(median_of(v));
            out << ',';
            if (scale > 0.0 && std::isfinite(scale)) out << fmt(median_of(v) / scale);
        };
        put_stats(row.c1_values, row.c1_scale(), true);
        put_stats(row.delta_values, row.delta_scale(), false);
        put_stats(row.tmix_values, row.tmix_scale(), false);
        out << ',';
        if (!row.tmix_exact.empty()) {
            uint64_t ex = 0;
            for (bool b : row.tmix_exact) ex += b ? 1 : 0;
            out << fmt(static_cast<double>(ex) /
                       static_cast<double>(row.tmix_exact.size()));
        }
        out << ',';
        if (row.chi_fallback.size() == 2) out << fmt(row.chi_fallback[0]);
        out << ',';
        if (row.chi_fallback.size() == 2) out << fmt(row.chi_fallback[1]);
        out << ',' << csv_quote(row.note) << '\n';
    }
    return out.str();
}

std::string sweep_json(const SweepPlan& plan, const std::vector<SweepRow>& rows) {
    nlohmann::json j;
    j["format"] = "sweep_v1";
    nlohmann::json jp;
    jp["p_source"] = source_name(plan.p_source);
    jp["seeds_per_cell"] = plan.seeds_per_cell;
    jp["master_seed"] = plan.master_seed;
    jp["diameters"] = plan.diameters;
    jp["mixing"] = plan.mixing;
    jp["top_clusters"] = plan.top_clusters;
    jp["ranks"] = plan.ranks;
    jp["onearm_rmax"] = plan.onearm_rmax;
    jp["onearm_trials"] = plan.onearm_trials;
    jp["epsilon_max"] = plan.epsilon_max;
    jp["regime_floor"] = plan.regime_floor;
    nlohmann::json jcells = nlohmann::json::array();
    for (const SweepCell& c : plan.cells) {
        nlohmann::json jc;
        jc["spec"] = spec_to_string(c.spec);
        jc["epsilon"] = c.epsilon;
        jc["p"] = c.p;
        jcells.push_back(jc);
    }
    jp["cells"] = jcells;
    j["plan"] = jp;

    nlohmann::json jrows = nlohmann::json::array();
    for (const SweepRow& row : rows) {
        nlohmann::json jr;
        jr["spec"] = spec_to_string(row.spec);
        jr["vertices"] = row.spec.vertex_count;
        jr["epsilon"] = row.epsilon;
        jr["p"] = row.p;
        jr["p_source"] = row.p_source;
        jr["out_of_regime"] = row.out_of_regime;
        jr["note"] = row.note;
        jr["seeds"] = row.seeds;
        jr["eps3v"] = row.eps3v();
        jr["c1"] = stats_json(row.c1_values);
        nlohmann::json jranks = nlohmann::json::array();
        for (const std::vector<double>& rv : row.rank_values) {
            jranks.push_back(stats_json(rv));
        }
        jr["ranks"] = jranks;
        jr["delta"] = stats_json(row.delta_values);
        nlohmann::json jt = stats_json(row.tmix_values);
        jt["rank_at_max"] = row.tmix_rank;
        jt["exact"] = row.tmix_exact;
        jr["tmix"] = jt;
        if (row.chi_fallback.size() == 2) {
            jr["chi_fallback"] = {{"mean", row.chi_fallback[0]},
                                  {"std_error", row.chi_fallback[1]}};
        }
        if (row.onearm.trials > 0) {
            jr["onearm"] = {{"r_max", row.onearm.r_max},
                            {"trials", row.onearm.trials},
                            {"hits", row.onearm.hits}};
        }
        if (row.boundary.trials > 0) {
            jr["boundary"] = {{"r_max", row.boundary.r_max},
                              {"trials", row.boundary.trials},
                              {"mean", row.boundary.mean},
                              {"std_error", row.boundary.std_error}};
        }
        jrows.push_back(jr);
    }
    j["rows"] = jrows;
    return j.dump(2);
}

namespace {

PSource source_from_name(const std::string& s) {
    if (s == "explicit") return PSource::Explicit;
    if (s == "anchor") return PSource::Anchor;
    if (s == "find_pc") return PSource::FindPc;
    throw DomainError("unknown p source: " + s);
}

nlohmann::json parse_or_throw(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DomainError("malformed JSON document");
    return j;
}

SweepPlan plan_from(const nlohmann::json& jp) {
    SweepPlan plan;
    if (jp.contains("p_source")) {
        plan.p_source = source_from_name(jp["p_source"].get<std::string>());
    }
    plan.seeds_per_cell = jp.value("seeds_per_cell", plan.seeds_per_cell);
    plan.master_seed = jp.value("master_seed", plan.master_seed);
    plan.diameters = jp.value("diameters", plan.diameters);
    plan.mixing = jp.value("mixing", plan.mixing);
    plan.top_clusters = jp.value("top_clusters", plan.top_clusters);
    if (jp.contains("ranks")) plan.ranks = jp["ranks"].get<std::vector<uint64_t>>();
    plan.onearm_rmax = jp.value("onearm_rmax", plan.onearm_rmax);
    plan.onearm_trials = jp.value("onearm_trials", plan.onearm_trials);
    plan.epsilon_max = jp.value("epsilon_max", plan.epsilon_max);
    plan.regime_floor = jp.value("regime_floor", plan.regime_floor);
    if (jp.contains("pc")) {
        const nlohmann::json& jc = jp["pc"];
        plan.pc.lambda = jc.value("lambda", plan.pc.lambda);
        plan.pc.tol = jc.value("tol", plan.pc.tol);
        plan.pc.trial_cap = jc.value("trial_cap", plan.pc.trial_cap);
        plan.pc.chi_trials = jc.value("chi_trials", plan.pc.chi_trials);
    }
    if (jp.contains("cells")) {
        for (const nlohmann::json& jc : jp["cells"]) {
            SweepCell cell;
            cell.spec = parse_spec(jc["spec"].get<std::string>());
            cell.epsilon = jc.value("epsilon",
                                    std::numeric_limits<double>::quiet_NaN());
            if (jc.contains("epsilon") && jc["epsilon"].is_null()) {
                cell.epsilon = std::numeric_limits<double>::quiet_NaN();
            }
            cell.p = jc.value("p", 0.0);
            plan.cells.push_back(cell);
        }
    }
    return plan;
}

}  // namespace

SweepPlan plan_from_json(const std::string& text) {
    nlohmann::json j = parse_or_throw(text);
    if (j.contains("plan")) return plan_from(j["plan"]);
    return plan_from(j);
}

std::vector<SweepRow> sweep_rows_from_json(const std::string& text) {
    nlohmann::json j = parse_or_throw(text);
    if (!j.contains("rows")) throw DomainError("sweep document has no rows");
    std::vector<SweepRow> rows;
    for (const nlohmann::json& jr : j["rows"]) {
        SweepRow row;
        row.spec = parse_spec(jr["spec"].get<std::string>());
        row.epsilon = jr["epsilon"].is_null()
                          ? std::numeric_limits<double>::quiet_NaN()
                          : jr["epsilon"].get<double>();
        row.p = jr.value("p", 0.0);
        row.p_source = jr.value("p_source", std::string());
        row.out_of_regime = jr.value("out_of_regime", false);
        row.note = jr.value("note", std::string());
        row.seeds = jr.value("seeds", uint64_t{0});
        auto values_of = [](const nlohmann::json& node) {
            return node.contains("values")
                       ? node["values"].get<std::vector<double>>()
                       : std::vector<double>{};
        };
        if (jr.contains("c1")) row.c1_values = values_of(jr["c1"]);
        if (jr.contains("ranks")) {
            for (const nlohmann::json& rv : jr["ranks"]) {
                row.rank_values.push_back(values_of(rv));
            }
        }
        if (jr.contains("delta")) row.delta_values = values_of(jr["delta"]);
        if (jr.contains("tmix")) {
            row.tmix_values = values_of(jr["tmix"]);
            row.tmix_rank =
                jr["tmix"].value("rank_at_max", std::vector<uint64_t>{});
            row.tmix_exact = jr["tmix"].value("exact", std::vector<bool>{});
        }
        if (jr.contains("chi_fallback")) {
            row.chi_fallback = {jr["chi_fallback"].value("mean", 0.0),
                                jr["chi_fallback"].value("std_error", 0.0)};
        }
        if (jr.contains("onearm")) {
            row.onearm.spec = row.spec;
            row.onearm.p = row.p;
            row.onearm.r_max = jr["onearm"].value("r_max", uint64_t{0});
            row.onearm.trials = jr["onearm"].value("trials", uint64_t{0});
            row.onearm.hits =
                jr["onearm"].value("hits", std::vector<uint64_t>{});
        }
        if (jr.contains("boundary")) {
            row.boundary.spec = row.spec;
            row.boundary.p = row.p;
            row.boundary.r_max = jr["boundary"].value("r_max", uint64_t{0});
            row.boundary.trials = jr["boundary"].value("trials", uint64_t{0});
            row.boundary.mean = jr["boundary"].value("mean", std::vector<double>{});
            row.boundary.std_error =
                jr["boundary"].value("std_error", std::vector<double>{});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string fit_csv(const FitReport& rep) {
    std::ostringstream out;
    out << "# fit_csv v1\n";
    out << "law,row,ratio,tail_slope,tail_slope_ref\n";
    for (const FitRowResult& r : rep.rows) {
        out << law_name(rep.law) << ',' << r.row << ',' << fmt(r.ratio) << ','
            << fmt(r.tail_slope) << ',' << fmt(r.tail_slope_ref) << '\n';
    }
    out << "# trend_slope," << fmt(rep.trend_slope) << '\n';
    out << "# dispersion," << fmt(rep.dispersion) << '\n';
    return out.str();
}

std::string fit_json(const FitReport& rep) {
    nlohmann::json j;
    j["format"] = "fit_v1";
    j["law"] = law_name(rep.law);
    nlohmann::json jrows = nlohmann::json::array();
    for (const FitRowResult& r : rep.rows) {
        nlohmann::json jr;
        jr["row"] = r.row;
        jr["ratio"] = r.ratio;
        if (rep.law == FitLaw::OnearmProfile) {
            jr["tail_slope"] = r.tail_slope;
            jr["tail_slope_ref"] = r.tail_slope_ref;
        }
        jrows.push_back(jr);
    }
    j["rows"] = jrows;
    j["trend_slope"] = rep.trend_slope;
    j["dispersion"] = rep.dispersion;
    return j.dump(2);
}

}  // namespace perclab
