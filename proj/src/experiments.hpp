#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "census.hpp"
#include "estimators.hpp"
#include "graph.hpp"

namespace perclab {

// Where a cell's p comes from: given directly, derived from the closed-form
// anchor p = (1-eps)/(degree-1), or derived from a find_pc run per cell.
enum class PSource { Explicit, Anchor, FindPc };

struct SweepCell {
    GraphSpec spec;
    double epsilon = 0.0;  // may be NaN for explicit-p cells
    double p = 0.0;        // consumed only when the plan source is Explicit
};

struct SweepPlan {
    std::vector<SweepCell> cells;
    PSource p_source = PSource::Anchor;
    uint64_t seeds_per_cell = 1;  // census replicas per cell
    uint64_t master_seed = 0;

    bool diameters = true;
    bool mixing = true;
    uint64_t top_clusters = 10;        // lazy T_mix examined on this many largest
    std::vector<uint64_t> ranks{1, 2}; // |C_j| sizes recorded per seed
    uint64_t onearm_rmax = 0;          // 0 skips the one-arm curve
    uint64_t onearm_trials = 0;

    double epsilon_max = 0.5;   // regime guards; violations flag the row
    double regime_floor = 20.0; // minimum eps^3 V

    PcOptions pc;  // used when p_source is FindPc
};

// One cell's results. Per-seed vectors keep the raw values so callers can
// apply their own band or quantile policies.
struct SweepRow {
    GraphSpec spec;
    double epsilon = 0.0;
    double p = 0.0;
    std::string p_source;
    bool out_of_regime = false;
    std::string note;  // per-cell resource fallbacks, recorded not fatal
    uint64_t seeds = 0;

    std::vector<double> c1_values;                 // |C_1| per seed
    std::vector<std::vector<double>> rank_values;  // [rank index][seed] = |C_j|
    std::vector<double> delta_values;              // Δ_max per seed
    std::vector<double> tmix_values;               // T_mix^max per seed
    std::vector<uint64_t> tmix_rank;               // 1-based rank achieving it
    std::vector<bool> tmix_exact;                  // exact vs 8|E|diam bound
    std::vector<double> chi_fallback;              // mean, stderr when census was skipped

    OnearmCurve onearm;      // trials == 0 when not requested
    BoundaryCurve boundary;  // same sample set as onearm, trials == 0 when not requested

    double eps3v() const;
    double c1_scale() const;     // eps^-2 log(eps^3 V)
    double delta_scale() const;  // eps^-1 log(eps^3 V)
    double tmix_scale() const;   // eps^-3 log(eps^3 V)^2
};

// Runs every cell in order; each (cell, seed) pair derives an independent
// sub-seed from the master seed, so results are reproducible per cell
// regardless of which cells run.
std::vector<SweepRow> run_sweep(const SweepPlan& plan);

enum class FitLaw { C1Volume, DeltaMax, Tmix, OnearmProfile };

struct FitOptions {
    uint64_t min_hits = 10;  // one-arm grid points below this are censored
};

struct FitRowResult {
    size_t row = 0;
    double ratio = 0.0;          // law ratio of the row median; one-arm: residual sup-norm
    double tail_slope = 0.0;     // one-arm only: fitted decay slope for r > 1/eps
    double tail_slope_ref = 0.0; // one-arm only: log(1 - eps)
};

struct FitReport {
    FitLaw law = FitLaw::C1Volume;
    std::vector<FitRowResult> rows;
    double trend_slope = 0.0;  // ratio against log(eps^3 V), ratio laws only
    double dispersion = 0.0;   // max ratio / min ratio, ratio laws only
};

// Ratio laws need >= 3 in-regime rows for the trend; the one-arm profile law
// fits each curve-bearing in-regime row separately (>= 1 required). Rows
// flagged out-of-regime are never included.
FitReport fit_ratios(const std::vector<SweepRow>& rows, FitLaw law, const FitOptions& opts = {});

// Versioned one-line-per-row table; the full plan is embedded in the JSON
// form for provenance.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const SweepPlan& plan, const std::vector<SweepRow>& rows);

// Inverse of sweep_json, so fits can run on a saved sweep. Unknown keys are
// ignored; missing blocks leave defaults.
SweepPlan plan_from_json(const std::string& text);
std::vector<SweepRow> sweep_rows_from_json(const std::string& text);

std::string fit_csv(const FitReport& report);
std::string fit_json(const FitReport& report);

}  // namespace perclab
