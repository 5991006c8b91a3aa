#include "switchgrid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "switchgrid/errors.hpp"
#include "switchgrid/log.hpp"

namespace switchgrid {

namespace {

std::string node_label(const Grid& grid, long long p) {
    std::ostringstream os;
    os << "(";
    for (int k = 0; k < grid.dim; ++k) os << (k ? "," : "") << grid.axis_index(p, k);
    os << ")";
    return os.str();
}

// Gauss-Seidel projection v <- max(v, Hv) until stationary. Cost positivity
// bounds improving chains by m-1 regimes, so more sweeps than that mean the
// cost floor is broken; report it as a numeric failure.
void project_obstacle(const kernels::CoefficientTable& tab, const SchemeParams& params,
                      const std::vector<double*>& v) {
    const int cap = params.max_sweeps > 0 ? params.max_sweeps : tab.regimes - 1;
    for (int sweep = 0;; ++sweep) {
        bool changed = false;
        for (int i = 0; i < tab.regimes; ++i)
            changed = kernels::obstacle_sweep(params.launch, tab, i, v, params.obstacle_tol) ||
                      changed;
        if (!changed) return;
        if (sweep + 1 >= cap + 1) {
            std::ostringstream os;
            os << "obstacle projection still improving after " << cap + 1
               << " sweeps; switch costs are not uniformly positive";
            throw NumericError(os.str());
        }
    }
}

void check_finite(const Grid& grid, int regimes, int level,
                  const std::vector<double*>& v) {
    for (int i = 0; i < regimes; ++i) {
        const long long bad = kernels::first_nonfinite(v[i], grid.nnodes);
        if (bad >= 0) {
            std::ostringstream os;
            os << "scheme diverged: non-finite value at level " << level << ", node "
               << node_label(grid, bad) << ", regime " << i + 1;
            throw NumericError(os.str());
        }
    }
}

double resolve_dt(const ModelSpec& spec, const Grid& grid, const SchemeParams& params,
                  const kernels::CoefficientTable& tab) {
    const double dt_grid = spec.horizon / grid.spec.time_steps;
    if (params.dt > 0.0 && std::fabs(params.dt - dt_grid) > 1e-9 * dt_grid) {
        std::ostringstream os;
        os << "scheme dt " << params.dt << " does not match horizon/time_steps = " << dt_grid;
        throw ConfigError(os.str());
    }
    if (tab.max_cfl_sum > 0.0) {
        const double bound = 1.0 / tab.max_cfl_sum;
        if (dt_grid > bound * (1.0 + 1e-9)) {
            std::ostringstream os;
            os << "dt " << dt_grid << " violates the CFL bound " << bound
               << "; increase time_steps to at least "
               << static_cast<long long>(std::ceil(spec.horizon / bound));
            throw NumericError(os.str());
        }
    }
    return dt_grid;
}

} // namespace

Envelope switching_envelope(const std::vector<double>& values,
                            const std::function<double(int, int)>& cost, int regime) {
    const int m = static_cast<int>(values.size());
    if (m < 2) throw ConfigError("switching_envelope: need at least 2 regimes");
    if (regime < 0 || regime >= m) throw ConfigError("switching_envelope: regime out of range");
    Envelope env;
    env.value = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        if (j == regime) continue;
        const double cand = values[j] - cost(regime, j);
        if (cand > env.value) {
            env.value = cand;
            env.argmax = j;
        }
    }
    return env;
}

std::vector<std::vector<double>> terminal_condition(const ModelSpec& spec, const Grid& grid,
                                                    int penalty, const SchemeParams& params) {
    const auto tab = kernels::build_coefficient_table(spec, grid, penalty);
    std::vector<std::vector<double>> out(spec.regimes,
                                         std::vector<double>(grid.nnodes));
    std::vector<double*> ptrs(spec.regimes);
    for (int i = 0; i < spec.regimes; ++i) {
        std::copy_n(&tab.gpen[tab.np(i, 0)], grid.nnodes, out[i].begin());
        ptrs[i] = out[i].data();
    }
    project_obstacle(tab, params, ptrs);
    return out;
}

std::vector<double> generator_apply(const ModelSpec& spec, const Grid& grid, int regime,
                                    const std::vector<double>& values) {
    if (static_cast<long long>(values.size()) != grid.nnodes)
        throw ConfigError("generator_apply: values size does not match the grid");
    if (regime < 0 || regime >= spec.regimes)
        throw ConfigError("generator_apply: regime out of range");
    const auto tab = kernels::build_coefficient_table(spec, grid, 0);
    std::vector<double> out(grid.nnodes);
    for (long long p = 0; p < grid.nnodes; ++p)
        out[p] = kernels::generator_at(tab, regime, values.data(), p);
    return out;
}

void backward_step(const kernels::CoefficientTable& tab, const SchemeParams& params, double dt,
                   const std::vector<const double*>& vnext, const std::vector<double*>& vout) {
    if (tab.max_cfl_sum > 0.0 && dt > (1.0 + 1e-9) / tab.max_cfl_sum) {
        std::ostringstream os;
        os << "dt " << dt << " violates the CFL bound " << 1.0 / tab.max_cfl_sum;
        throw NumericError(os.str());
    }
    for (int i = 0; i < tab.regimes; ++i)
        kernels::explicit_update(params.launch, tab, i, vnext[i], vout[i], dt);
    project_obstacle(tab, params, vout);
}

ValueField solve(const ModelSpec& spec, GridPtr grid, int penalty, const SchemeParams& params) {
    spec.check_shape();
    if (penalty < 1) throw ConfigError("solve: penalty level must be >= 1");
    const Grid& g = *grid;

    const auto tab = kernels::build_coefficient_table(spec, g, penalty);
    const double dt = resolve_dt(spec, g, params, tab);
    const int M = g.spec.time_steps;

    ValueField field;
    field.grid = grid;
    field.regimes = spec.regimes;
    field.levels = M + 1;
    field.dt = dt;
    field.horizon = spec.horizon;
    field.penalty = penalty;
    field.model_name = spec.name;
    field.v.resize(static_cast<std::size_t>(M + 1) * spec.regimes * g.nnodes);

    std::vector<double*> cur(spec.regimes);
    std::vector<const double*> next(spec.regimes);

    // Terminal level: penalized terminal reward, then the switch envelope.
    for (int i = 0; i < spec.regimes; ++i) {
        cur[i] = field.level_data(M, i);
        std::copy_n(&tab.gpen[tab.np(i, 0)], g.nnodes, cur[i]);
    }
    project_obstacle(tab, params, cur);
    check_finite(g, spec.regimes, M, cur);

    for (int level = M - 1; level >= 0; --level) {
        for (int i = 0; i < spec.regimes; ++i) {
            next[i] = field.level_data(level + 1, i);
            cur[i] = field.level_data(level, i);
        }
        backward_step(tab, params, dt, next, cur);
        check_finite(g, spec.regimes, level, cur);
    }

    log::info("solved " + spec.name + " at n=" + std::to_string(penalty) + ": " +
              std::to_string(M + 1) + " levels x " + std::to_string(g.nnodes) + " nodes x " +
              std::to_string(spec.regimes) + " regimes");
    return field;
}

SwitchingPolicy extract_policy(const ValueField& field, const ModelSpec& spec, double eps_obs) {
    if (eps_obs < 0.0) throw ConfigError("extract_policy: eps_obs must be >= 0");
    const Grid& g = *field.grid;
    if (spec.regimes != field.regimes)
        throw ConfigError("extract_policy: model regime count does not match the field");

    SwitchingPolicy pol;
    pol.grid = field.grid;
    pol.regimes = field.regimes;
    pol.levels = field.levels;
    pol.dt = field.dt;
    pol.horizon = field.horizon;
    pol.action.assign(field.v.size(), -1);

    const auto tab = kernels::build_coefficient_table(spec, g, 0);
    std::vector<double> env(g.nnodes);
    std::vector<std::int8_t> arg(g.nnodes);
    std::vector<const double*> v(field.regimes);
    kernels::Launch launch; // default parallel

    for (int level = 0; level < field.levels; ++level) {
        for (int i = 0; i < field.regimes; ++i) v[i] = field.level_data(level, i);
        for (int i = 0; i < field.regimes; ++i) {
            kernels::envelope(launch, tab, i, v, env.data(), arg.data());
            std::int8_t* out =
                &pol.action[(static_cast<std::size_t>(level) * field.regimes + i) * g.nnodes];
            for (long long p = 0; p < g.nnodes; ++p)
                if (v[i][p] <= env[p] + eps_obs) out[p] = arg[p];
        }
    }
    return pol;
}

} // namespace switchgrid
