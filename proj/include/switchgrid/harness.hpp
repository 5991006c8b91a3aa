#pragma once

#include <functional>
#include <string>
#include <vector>

#include "switchgrid/grid.hpp"
#include "switchgrid/model.hpp"
#include "switchgrid/oracle.hpp"
#include "switchgrid/solver.hpp"

// Post-hoc verification passes: each one re-derives a property of a solved
// field with its own loops instead of trusting the solver's bookkeeping.
namespace switchgrid::harness {

// Reference value for a point, or "no reference" (inadmissible / no oracle).
using OracleFn = std::function<oracle::OracleValue(double t, const Point& x, int regime)>;

// Marks samples to exclude from the filtered gap, e.g. a band around a known
// discontinuity where no pointwise rate is expected.
using SampleFilter = std::function<bool(double t, const Point& x)>;

struct LadderRung {
    int penalty = 0;
    double max_increase = 0.0;        // max of v_this - v_prev over grid nodes in the domain
    double sup_diff = 0.0;            // sup |v_this - v_prev| over the same nodes
    double oracle_gap = -1.0;         // sup |v - oracle| on the domain, -1 without an oracle
    double oracle_gap_filtered = -1.0; // same with filtered samples excluded
};

struct ConvergenceReport {
    std::vector<LadderRung> rungs; // rungs[0] is the baseline level, diffs are 0
    double tol = 0.0;
    bool monotone = true;   // every rung past the first has max_increase <= tol
    bool aborted = false;   // a solve failed; rungs holds the completed levels
    bool config_abort = false;
    std::string error;
    std::string summary() const;
};

// Solves the model once per penalty level (ascending; equal neighbors allowed
// and must produce an identical field) and compares consecutive fields on the
// grid nodes inside the constraint domain. The grid is built once with
// min_penalty = levels.front(), the widest ramp in the ladder.
ConvergenceReport penalty_ladder(const ModelSpec& spec, GridSpec gspec,
                                 const std::vector<int>& levels, const SchemeParams& params,
                                 double tol = 1e-10, const OracleFn& oracle_fn = nullptr,
                                 const SampleFilter& near_front = nullptr);

struct DppSample {
    int level = 0;
    int regime = 0;
    long long node = 0;
};

struct DppReport {
    double max_residual = 0.0;
    long long samples = 0;
    DppSample worst;
    std::string summary() const;
};

// Dynamic-programming residual: at each sample (level k, regime i, node),
// compare the stored value against max(keep, switch), where keep re-runs the
// scheme's unprojected one-step update `lookahead` times from the stored
// level k+lookahead and switch reads the level-k envelope. This checks field
// consistency with the scheme's own operator, not accuracy. Empty `samples`
// enumerates every in-domain node at every level with k+lookahead <= M.
DppReport dpp_residual(const ValueField& field, const ModelSpec& spec,
                       const std::vector<DppSample>& samples, int lookahead,
                       const SchemeParams& params = {});

struct GrowthRegions {
    std::vector<long long> fit_nodes;
    std::vector<long long> test_nodes; // disjoint from fit_nodes
};

// fit: |x| <= r_fit, test: r_fit < |x| <= r_test, both restricted to nodes in
// the constraint domain (the penalized field is driven to -n outside, which no
// linear-growth bound describes).
GrowthRegions radial_regions(const Grid& grid, double r_fit, double r_test);

struct GrowthReport {
    double upper_c = 0.0;      // smallest C with v <= C(1+|x|) on the fit nodes
    double lower_c = 0.0;      // smallest C with v >= -C(1+|x|^eta) on the fit nodes
    double eta = 1.0;
    double upper_excess = 0.0; // max over test nodes of v - C(1+|x|), <= 0 when the bound holds
    double lower_excess = 0.0; // max over test nodes of -v - C(1+|x|^eta)
    long long upper_worst_node = -1;
    long long lower_worst_node = -1;
    std::string summary() const;
};

// Fits the growth constants on fit_nodes (all fields, all levels and regimes)
// and measures the worst excess on test_nodes.
GrowthReport growth_check(const std::vector<const ValueField*>& fields,
                          const GrowthRegions& regions, double eta = 1.0);

struct ObstacleReport {
    double min_slack = 0.0; // min over every (level, regime, node) of v - Hv
    int level = -1;
    int regime = -1;
    long long node = -1;
    std::string summary() const;
};

// Re-derives the obstacle inequality with plain loops, independent of the
// solver's projection bookkeeping.
ObstacleReport obstacle_check(const ValueField& field, const ModelSpec& spec);

// Min and max of a field over the grid nodes inside the constraint domain,
// across all levels and regimes.
struct FieldRange {
    double min = 0.0, max = 0.0;
};
FieldRange field_range_on_domain(const ValueField& field);

} // namespace switchgrid::harness
