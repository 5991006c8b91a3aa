#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "switchgrid/grid.hpp"
#include "switchgrid/kernels.hpp"
#include "switchgrid/model.hpp"

namespace switchgrid {

struct SchemeParams {
    // Time step. 0 derives horizon / time_steps from the grid; a positive
    // value must match it. Either way the CFL bound is enforced.
    double dt = 0.0;
    // Gauss-Seidel stop threshold for the obstacle projection; 0 = exact.
    double obstacle_tol = 0.0;
    // Sweep cap; 0 = regimes - 1 (enough because every improving switch chain
    // is strictly costly and therefore visits each regime at most once).
    int max_sweeps = 0;
    kernels::Launch launch;
};

// Envelope of switching to any other regime: max_{j != i} values[j] - cost(i, j).
// Ties resolve to the lowest regime index.
struct Envelope {
    double value = 0.0;
    int argmax = -1;
};
Envelope switching_envelope(const std::vector<double>& values,
                            const std::function<double(int, int)>& cost, int regime);

// Terminal condition of the penalized system: the smallest fixed point above
// g_n of v <- max(g_n, H v), reached by Gauss-Seidel sweeps over regimes.
// Returns one node array per regime.
std::vector<std::vector<double>> terminal_condition(const ModelSpec& spec, const Grid& grid,
                                                    int penalty, const SchemeParams& params);

// Discrete generator applied to one regime's node array (no penalty, no time
// step): upwind/central/7-point stencil, exact on affine functions for the
// drift part and on quadratics for the diffusion part away from faces.
std::vector<double> generator_apply(const ModelSpec& spec, const Grid& grid, int regime,
                                    const std::vector<double>& values);

// One backward step: explicit update of every regime from the level-(k+1)
// arrays, then the obstacle projection. vnext and vout have one node array
// per regime; vnext is read-only.
void backward_step(const kernels::CoefficientTable& tab, const SchemeParams& params, double dt,
                   const std::vector<const double*>& vnext, const std::vector<double*>& vout);

// Full backward solve of the penalized system on the grid at penalty level n.
ValueField solve(const ModelSpec& spec, GridPtr grid, int penalty, const SchemeParams& params);

// Feedback switching rule read off a solved field: at each (level, node,
// regime), switch to the envelope argmax when v <= Hv + eps_obs, else keep.
struct SwitchingPolicy {
    GridPtr grid;
    int regimes = 0;
    int levels = 0;
    double dt = 0.0;
    double horizon = 0.0;
    std::vector<std::int8_t> action; // -1 keep, else 0-based target regime

    std::int8_t at(int level, int regime, long long node) const {
        return action[(static_cast<std::size_t>(level) * regimes + regime) * grid->nnodes + node];
    }
};

SwitchingPolicy extract_policy(const ValueField& field, const ModelSpec& spec, double eps_obs);

} // namespace switchgrid
