#pragma once

#include <cstdint>
#include <vector>

#include "switchgrid/grid.hpp"
#include "switchgrid/model.hpp"

namespace switchgrid::kernels {

// Execution backend for the node-parallel kernels. `parallel` runs the OpenMP
// version, `serial` the reference loops kept for testing; both call the same
// per-node update, so results are bit-identical and independent of the thread
// count (every node is written by exactly one iteration).
enum class Exec { parallel, serial };

struct Launch {
    Exec exec = Exec::parallel;
    int threads = 0; // 0: OpenMP default
};

// Per-node, per-regime coefficients frozen on a grid: drift, diffusion matrix
// split into diagonal and off-diagonal parts, penalized rewards and pairwise
// switch costs. Time-independent coefficients make this a one-time cost.
struct CoefficientTable {
    const Grid* grid = nullptr;
    int dim = 0;
    int regimes = 0;
    int penalty = 0;                 // 0 means unpenalized
    std::vector<double> drift;       // [i][node][k]
    std::vector<double> diag;        // [i][node][k], (sigma sigma^T)_kk
    std::vector<double> cross;       // [i][node][q], pairs (k<l) in lexicographic order
    std::vector<double> fpen;        // [i][node], f - n theta_n
    std::vector<double> gpen;        // [i][node], g - n theta_n
    std::vector<double> cost;        // [i][j][node], i != j
    bool any_cross = false;
    double max_cfl_sum = 0.0;        // max over (node, regime) of the stability sum

    std::size_t nk(int i, long long p) const {
        return (static_cast<std::size_t>(i) * grid->nnodes + p) * dim;
    }
    std::size_t np(int i, long long p) const {
        return static_cast<std::size_t>(i) * grid->nnodes + p;
    }
    std::size_t cost_at(int i, int j, long long p) const {
        return (static_cast<std::size_t>(i) * regimes + j) * grid->nnodes + p;
    }
};

CoefficientTable build_coefficient_table(const ModelSpec& spec, const Grid& grid, int penalty);

// Generator at one node: upwind first differences, central second differences,
// 7-point cross stencil; missing neighbors at truncation faces fall back to
// the node value (constant extrapolation), which keeps every weight >= 0.
double generator_at(const CoefficientTable& tab, int regime, const double* v, long long p);

// out[p] = v[p] + dt * (generator + f_n) for one regime.
void explicit_update(const Launch& launch, const CoefficientTable& tab, int regime,
                     const double* vnext, double* out, double dt);

// One Gauss-Seidel obstacle pass for one regime: v_i <- max(v_i, H v_i) with
// H from the other regimes' current arrays. Returns true if any node moved by
// more than tol. Nodes are independent, so the pass parallelizes.
bool obstacle_sweep(const Launch& launch, const CoefficientTable& tab, int regime,
                    const std::vector<double*>& v, double tol);

// Switching envelope for one regime across all nodes; argmax breaks ties by
// the lowest regime index. argmax may be null.
void envelope(const Launch& launch, const CoefficientTable& tab, int regime,
              const std::vector<const double*>& v, double* out, std::int8_t* argmax);

// Index of the first non-finite entry, or -1.
long long first_nonfinite(const double* data, long long n);

} // namespace switchgrid::kernels
