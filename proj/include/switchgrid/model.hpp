#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "switchgrid/domain.hpp"
#include "switchgrid/vecmath.hpp"

namespace switchgrid {

// Coefficient functions of the controlled diffusion and the reward data.
// All of them must be pure, reentrant and finite on the sampling box.
// Regime indices are 0-based internally; user-facing output is 1-based.
struct CoefficientFields {
    std::function<Point(const Point&, int)> drift;                 // mu(x, i), size d
    std::function<std::vector<double>(const Point&, int)> vol;     // sigma(x, i), d x d row-major
    std::function<double(const Point&, int)> running;              // f(x, i)
    std::function<double(const Point&, int)> terminal;             // g(x, i)
    std::function<double(const Point&, int, int)> cost;            // c(x, i, j), i != j
};

struct ModelSpec {
    int dim = 0;
    int regimes = 0;           // m >= 2
    double horizon = 0.0;      // T > 0
    CoefficientFields coeffs;
    ConstraintDomain domain;
    double lipschitz = 0.0;    // declared joint Lipschitz constant L
    double min_cost = 0.0;     // declared uniform cost floor c_bar > 0
    Point sample_lo, sample_hi; // box used for sampling-based checks

    std::string name;          // stable identifier written to artifacts
    Point default_start;       // suggested x0 for simulation configs
    int default_regime = 0;    // suggested starting regime (0-based)

    // Structural checks on the declared sizes; throws ConfigError.
    void check_shape() const;
};

// Degenerate two-regime model on R x R+ with a known closed-form value:
// regime 1 drifts the constrained coordinate down at unit speed, regime 2
// freezes it; both earn at unit rate, switches cost `cost`.
ModelSpec builtin_counterexample(double horizon, double cost);

struct PumpedStorageParams {
    double l_max = 1.0;        // reservoir capacity
    double kappa = 2.0;        // price mean-reversion speed
    double theta = 5.0;        // price long-run level
    double xi = 1.5;           // price volatility
    double switch_cost = 0.25; // constant cost for every regime change
    double l0 = 0.5;           // suggested initial level
    double p0 = 5.0;           // suggested initial price
    double horizon = 1.0;
};

// Three-regime storage model: state (level, price); pump/store/generate move
// the level at +1/0/-1, the price is an Ornstein-Uhlenbeck diffusion, and the
// running reward is -price * level_drift. Level is constrained to [0, l_max].
ModelSpec builtin_pumped_storage(const PumpedStorageParams& p);

struct FieldCheck {
    std::string field;     // "drift", "vol", "running", "terminal", "cost"
    double max_ratio = 0.0;
    Point worst_x, worst_y;
    int worst_regime = 0;
};

struct ValidationReport {
    bool pass = false;
    std::uint64_t seed = 0;
    int sample_count = 0;
    std::vector<FieldCheck> lipschitz;  // sampled difference quotients per field
    double declared_lipschitz = 0.0;
    double min_sampled_cost = 0.0;
    Point min_cost_at;
    double declared_min_cost = 0.0;
    bool cost_floor_ok = false;
    bool lipschitz_ok = false;
    std::vector<std::string> failures;  // non-finite evaluations etc.

    std::string summary() const;
};

// Samples difference quotients of every coefficient field against the declared
// L and the pairwise costs against the declared floor. Deterministic per seed.
ValidationReport validate_model(const ModelSpec& spec, int sample_count, std::uint64_t seed);

struct H3Report {
    // (a) every sampled boundary point has a regime with mu = 0 and sigma = 0.
    bool absorbing_boundary = false;
    int absorbing_witness = -1;        // single regime covering all points, else -1
    // (b) some regime keeps the dynamics inside the domain: along every active
    // outward normal the volatility vanishes and the drift is inward or zero.
    bool invariant_regime = false;
    int invariant_witness = -1;
    // (c) convex domain plus one regime whose drift satisfies n . mu <= 0 at
    // every sampled boundary point (first-order inward test).
    bool convex_inward_drift = false;
    int convex_witness = -1;
    bool domain_convex = true;

    int boundary_samples = 0;
    std::uint64_t seed = 0;
    std::string first_failure;         // diagnostic for the first condition that broke

    bool any() const { return absorbing_boundary || invariant_regime || convex_inward_drift; }
    std::string summary() const;
};

// Report-only screening of the structural conditions that guarantee the value
// stays bounded below on the constraint set. Never throws on "false".
H3Report check_h3_sufficient(const ModelSpec& spec, int boundary_samples, std::uint64_t seed);

} // namespace switchgrid
