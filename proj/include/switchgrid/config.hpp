#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "switchgrid/grid.hpp"
#include "switchgrid/model.hpp"
#include "switchgrid/solver.hpp"

namespace switchgrid::config {

// Model file schema (strict, unknown keys rejected):
//   {
//     "dim": d, "regimes": m, "horizon": T,
//     "coefficients": {"builtin": name, "params": {...}}
//                   | {"constant": {"drift": [[..]], "vol": [[[..]]],
//                                   "running": [..], "terminal": [..],
//                                   "cost": [[..]]}},
//     "domain": {"kind": ..., ...},        optional for builtins
//     "constants": {"L": .., "c_bar": ..}  optional for builtins
//   }
// Builtins: "counterexample" (params: cost, default 0.5) and "pumped_storage"
// (params: l_max, kappa, theta, xi, switch_cost, start_level, start_price).
// dim/regimes/horizon must agree with what the builtin produces.
ModelSpec load_model(const std::filesystem::path& file);

struct SimulateConfig {
    long long paths = 1000;
    double dt = 0.0;      // 0: solver time step
    std::uint64_t seed = 0;
    Point start;          // empty: model default
    int start_regime = -1; // 0-based; -1: model default
    int dump_paths = 0;   // trajectories written to paths.csv
};

struct VerifyConfig {
    double eps_obs = 1e-9;
    int dpp_lookahead = 1;
    double ladder_tol = 1e-10;
    double growth_eta = 1.0;
    double growth_r_fit = 0.0;  // 0: half the largest node radius in the domain
    double growth_r_test = 0.0; // 0: the largest node radius
    double growth_tol = 1e-9;
    std::string field_override; // value CSV to verify instead of solving
};

// Run config schema (strict):
//   {
//     "model": "file.json",                      relative to the config file
//     "grid": {"lo": [..], "hi": [..], "nodes": [..], "time_steps": M},
//     "penalty": {"levels": [..]},               ascending, >= 1
//     "scheme": {"dt": .., "obstacle_tol": .., "max_sweeps": ..},   optional
//     "simulate": {"paths": N, "dt": .., "seed": .., "start": [..],
//                  "start_regime": r (1-based), "dump_paths": k},   optional
//     "verify": {...},                                              optional
//     "output": {"dir": "out"}                                      optional
//   }
struct RunConfig {
    std::filesystem::path config_dir;
    std::string model_file;
    ModelSpec model;
    GridSpec grid;
    std::vector<int> penalty_levels; // solve/simulate use the last (largest)
    SchemeParams scheme;
    SimulateConfig simulate;
    VerifyConfig verify;
    std::string output_dir = "out";
};

RunConfig load_run_config(const std::filesystem::path& file);

// Grid spanning the model's sample box with uniform resolution, time steps
// chosen from the CFL bound. Used when a command is given only a model file.
GridSpec default_grid(const ModelSpec& spec, int nodes_per_axis, int min_penalty);

} // namespace switchgrid::config
