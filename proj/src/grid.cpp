#include "switchgrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "switchgrid/errors.hpp"
#include "switchgrid/log.hpp"

namespace switchgrid {

GridPtr build_grid(const ModelSpec& spec, const GridSpec& gspec) {
    spec.check_shape();
    const int d = spec.dim;
    if (static_cast<int>(gspec.lo.size()) != d || static_cast<int>(gspec.hi.size()) != d ||
        static_cast<int>(gspec.nodes.size()) != d)
        throw ConfigError("grid: lo/hi/nodes must all have the model dimension");
    if (gspec.time_steps < 1) throw ConfigError("grid: time_steps must be >= 1");
    if (gspec.min_penalty < 1) throw ConfigError("grid: min_penalty must be >= 1");

    auto g = std::make_shared<Grid>();
    g->spec = gspec;
    g->dim = d;
    g->nnodes = 1;
    g->dx.resize(d);
    g->axes.resize(d);
    g->stride.assign(d, 1);

    for (int k = 0; k < d; ++k) {
        if (!std::isfinite(gspec.lo[k]) || !std::isfinite(gspec.hi[k]) ||
            !(gspec.lo[k] < gspec.hi[k]))
            throw ConfigError("grid: truncation box must be finite with lo < hi");
        if (gspec.nodes[k] < 3)
            throw ConfigError("grid: at least 3 nodes per axis (axis " + std::to_string(k + 1) +
                              " has " + std::to_string(gspec.nodes[k]) + ")");
        g->dx[k] = (gspec.hi[k] - gspec.lo[k]) / (gspec.nodes[k] - 1);
        if (!(g->dx[k] > 0.0)) throw ConfigError("grid: zero spacing on axis " + std::to_string(k + 1));
        g->axes[k].resize(gspec.nodes[k]);
        for (int i = 0; i < gspec.nodes[k]; ++i) g->axes[k][i] = gspec.lo[k] + i * g->dx[k];
        g->axes[k].back() = gspec.hi[k];
        g->nnodes *= gspec.nodes[k];
    }
    for (int k = d - 2; k >= 0; --k) g->stride[k] = g->stride[k + 1] * gspec.nodes[k + 1];

    if (g->nnodes > 50'000'000) throw ConfigError("grid: node count over the 5e7 cap");

    const double ramp = 1.0 / gspec.min_penalty;
    g->dist.resize(g->nnodes);
    g->cls.resize(g->nnodes);
    bool any_inside = false;
    for (long long p = 0; p < g->nnodes; ++p) {
        const double dist = spec.domain.distance(g->coords(p));
        g->dist[p] = dist;
        if (dist == 0.0) {
            g->cls[p] = NodeClass::inside;
            any_inside = true;
        } else if (dist <= ramp) {
            g->cls[p] = NodeClass::ramp;
        } else {
            g->cls[p] = NodeClass::outside;
        }
    }
    if (!any_inside)
        throw ConfigError("grid: no node lies in the constraint domain; widen the box");

    // Margin rule: when a truncation face lies entirely outside the domain the
    // constraint is bounded on that side, and the face must sit at least one
    // full penalty ramp (1/min_penalty) away so theta saturates on-grid.
    for (int k = 0; k < d; ++k) {
        for (int side = 0; side < 2; ++side) {
            double face_min = std::numeric_limits<double>::infinity();
            bool face_touches = false;
            const int face_idx = side == 0 ? 0 : gspec.nodes[k] - 1;
            for (long long p = 0; p < g->nnodes; ++p) {
                if (g->axis_index(p, k) != face_idx) continue;
                if (g->dist[p] == 0.0) {
                    face_touches = true;
                    break;
                }
                face_min = std::min(face_min, g->dist[p]);
            }
            if (face_touches) continue;
            if (face_min < ramp * (1.0 - 1e-12)) {
                std::ostringstream os;
                os << "grid: " << (side == 0 ? "lower" : "upper") << " face of axis " << k + 1
                   << " is " << face_min << " from the domain, but min_penalty "
                   << gspec.min_penalty << " needs a margin of " << ramp;
                throw ConfigError(os.str());
            }
        }
    }

    log::debug("grid built: " + std::to_string(g->nnodes) + " nodes");
    return g;
}

double cfl_timestep(const ModelSpec& spec, const Grid& grid) {
    const int d = grid.dim;
    const double requested = spec.horizon / grid.spec.time_steps;
    double max_sum = 0.0;
    for (long long p = 0; p < grid.nnodes; ++p) {
        const Point x = grid.coords(p);
        for (int i = 0; i < spec.regimes; ++i) {
            const Point mu = spec.coeffs.drift(x, i);
            const auto sg = spec.coeffs.vol(x, i);
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                s += std::fabs(mu[k]) / grid.dx[k];
                double akk = 0.0;
                for (int c = 0; c < d; ++c) akk += sg[k * d + c] * sg[k * d + c];
                s += akk / (grid.dx[k] * grid.dx[k]);
            }
            max_sum = std::max(max_sum, s);
        }
    }
    if (max_sum <= 0.0) return requested;
    return std::min(requested, 1.0 / max_sum);
}

double interp(const ValueField& field, double t, const Point& x, int regime) {
    const Grid& g = *field.grid;
    const int d = g.dim;
    if (static_cast<int>(x.size()) != d)
        throw ConfigError("interp: point dimension mismatch");
    if (regime < 0 || regime >= field.regimes)
        throw ConfigError("interp: regime out of range");

    const double ttol = 1e-9 * (1.0 + field.horizon);
    if (t < -ttol || t > field.horizon + ttol)
        throw NumericError("interp: time " + std::to_string(t) + " outside [0, horizon]");
    int level = static_cast<int>(std::lround(t / field.dt));
    level = std::clamp(level, 0, field.levels - 1);

    // Cell index and weights per axis; queries outside the hull are an error.
    int cell[3] = {0, 0, 0};
    double w[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) {
        const double lo = g.spec.lo[k], hi = g.spec.hi[k];
        const double tol = 1e-12 * (std::fabs(lo) + std::fabs(hi) + 1.0);
        if (x[k] < lo - tol || x[k] > hi + tol) {
            std::ostringstream os;
            os << "interp: coordinate " << k + 1 << " = " << x[k] << " outside grid hull ["
               << lo << ", " << hi << "]";
            throw NumericError(os.str());
        }
        const double clamped = std::clamp(x[k], lo, hi);
        int j = static_cast<int>((clamped - lo) / g.dx[k]);
        j = std::clamp(j, 0, g.spec.nodes[k] - 2);
        cell[k] = j;
        w[k] = std::clamp((clamped - g.axes[k][j]) / g.dx[k], 0.0, 1.0);
    }

    const double* data = field.level_data(level, regime);
    double acc = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
        double weight = 1.0;
        long long node = 0;
        for (int k = 0; k < d; ++k) {
            const int up = (corner >> k) & 1;
            weight *= up ? w[k] : 1.0 - w[k];
            node += static_cast<long long>(cell[k] + up) * g.stride[k];
        }
        if (weight != 0.0) acc += weight * data[node];
    }
    return acc;
}

} // namespace switchgrid
