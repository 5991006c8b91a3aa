#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "switchgrid/model.hpp"

namespace switchgrid {

// Rectilinear truncation grid for the penalized problem. The box must cover
// the domain's bounded sides with margin at least 1/min_penalty so the penalty
// ramp of the smallest level is resolved; unbounded sides may be cut anywhere.
struct GridSpec {
    Point lo, hi;            // truncation box, finite, lo < hi
    std::vector<int> nodes;  // per-axis node counts, each >= 3
    int time_steps = 1;      // M >= 1; the field stores M + 1 levels
    int min_penalty = 1;     // smallest penalty level this grid will be used with
};

enum class NodeClass : std::uint8_t { inside = 0, ramp = 1, outside = 2 };

struct Grid {
    GridSpec spec;
    int dim = 0;
    long long nnodes = 0;
    Point dx;                                // per-axis spacing
    std::vector<std::vector<double>> axes;   // node coordinates per axis
    std::vector<long long> stride;           // row-major strides
    std::vector<double> dist;                // distance to the domain per node
    std::vector<NodeClass> cls;              // classification per node

    int axis_index(long long node, int axis) const {
        return static_cast<int>((node / stride[axis]) % spec.nodes[axis]);
    }
    Point coords(long long node) const {
        Point x(dim);
        for (int k = 0; k < dim; ++k) x[k] = axes[k][axis_index(node, k)];
        return x;
    }
    // Neighbor along one axis, or -1 when it would leave the grid.
    long long neighbor(long long node, int axis, int step) const {
        const int i = axis_index(node, axis) + step;
        if (i < 0 || i >= spec.nodes[axis]) return -1;
        return node + static_cast<long long>(step) * stride[axis];
    }
    bool inside_domain(long long node) const { return cls[node] == NodeClass::inside; }
};

using GridPtr = std::shared_ptr<const Grid>;

// Validates the spec against the model (dimension, margins, domain coverage)
// and precomputes per-node distances and classification.
GridPtr build_grid(const ModelSpec& spec, const GridSpec& gspec);

// Largest stable explicit time step: min(T / M, 1 / max_node,regime S) with
// S = sum_k |mu_k| / dx_k + sum_k (sigma sigma^T)_kk / dx_k^2.
double cfl_timestep(const ModelSpec& spec, const Grid& grid);

// Value surface on a grid: levels 0..M (level M holds the terminal
// condition), all regimes, every entry finite.
struct ValueField {
    GridPtr grid;
    int regimes = 0;
    int levels = 0;        // M + 1
    double dt = 0.0;
    double horizon = 0.0;
    int penalty = 0;       // penalty level n the field was solved at
    std::string model_name;
    std::vector<double> v; // [level][regime][node]

    double& at(int level, int regime, long long node) {
        return v[(static_cast<std::size_t>(level) * regimes + regime) * grid->nnodes + node];
    }
    double at(int level, int regime, long long node) const {
        return v[(static_cast<std::size_t>(level) * regimes + regime) * grid->nnodes + node];
    }
    const double* level_data(int level, int regime) const {
        return v.data() + (static_cast<std::size_t>(level) * regimes + regime) * grid->nnodes;
    }
    double* level_data(int level, int regime) {
        return v.data() + (static_cast<std::size_t>(level) * regimes + regime) * grid->nnodes;
    }
    double time(int level) const { return level * dt; }
};

// Multilinear interpolation in space at the nearest time level. The front can
// be discontinuous in t, so time is never blended. Out-of-hull queries throw
// NumericError instead of clamping.
double interp(const ValueField& field, double t, const Point& x, int regime);

} // namespace switchgrid
