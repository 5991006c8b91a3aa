#include "switchgrid/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "switchgrid/errors.hpp"
#include "switchgrid/rng.hpp"

namespace switchgrid {

namespace {

// Nearest grid node to x, clamping to the box. Sets escaped when x is outside
// the box by more than a relative epsilon (the policy is extrapolated there).
long long nearest_node(const Grid& grid, const Point& x, bool& escaped) {
    long long node = 0;
    for (int k = 0; k < grid.dim; ++k) {
        const double lo = grid.spec.lo[k], hi = grid.spec.hi[k];
        const double tol = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
        if (x[k] < lo - tol || x[k] > hi + tol)
            escaped = true;
        double pos = (x[k] - lo) / grid.dx[k];
        long long i = std::llround(pos);
        i = std::clamp(i, 0LL, static_cast<long long>(grid.spec.nodes[k]) - 1);
        node += i * grid.stride[k];
    }
    return node;
}

int nearest_level(const SwitchingPolicy& policy, double t) {
    long long k = std::llround(t / policy.dt);
    return static_cast<int>(std::clamp(k, 0LL, static_cast<long long>(policy.levels) - 1));
}

// Chained switch decision at one sample time. Each regime is visited at most
// once; the policy's argmax is strictly improving, so a revisit would mean a
// cycle and the chain stops instead.
void decide(const ModelSpec& spec, const SwitchingPolicy& policy, double t, const Point& x,
            int& regime, PathRecord& rec, std::vector<char>& visited,
            std::vector<TraceRow>* trace) {
    std::fill(visited.begin(), visited.end(), 0);
    visited[regime] = 1;
    bool escaped = false;
    const long long node = nearest_node(*policy.grid, x, escaped);
    if (escaped)
        rec.escaped = true;
    const int level = nearest_level(policy, t);
    for (int hop = 0; hop + 1 < spec.regimes; ++hop) {
        const int target = policy.at(level, regime, node);
        if (target < 0 || target == regime || visited[target])
            break;
        rec.switch_cost += spec.coeffs.cost(x, regime, target);
        rec.switches += 1;
        regime = target;
        visited[target] = 1;
        if (trace)
            trace->push_back({t, x, regime, "switch"});
    }
}

void check_state(const Point& x, double t) {
    if (!all_finite(x))
        throw NumericError("simulate: state became non-finite at t = " + std::to_string(t));
}

} // namespace

PathRecord simulate_path(const ModelSpec& spec, const SwitchingPolicy& policy, double t0,
                         const Point& start, int start_regime, double dt, std::uint64_t seed,
                         long long path_index, std::vector<TraceRow>* trace) {
    if (static_cast<int>(start.size()) != spec.dim)
        throw ConfigError("simulate: start point has wrong dimension");
    if (start_regime < 0 || start_regime >= spec.regimes)
        throw ConfigError("simulate: start regime out of range");
    if (!all_finite(start))
        throw ConfigError("simulate: start point must be finite");
    if (!policy.grid || policy.grid->dim != spec.dim || policy.regimes != spec.regimes)
        throw ConfigError("simulate: policy does not match the model");
    if (!(t0 >= 0.0) || t0 > spec.horizon)
        throw ConfigError("simulate: start time must be in [0, horizon]");
    if (dt <= 0.0)
        dt = policy.dt;
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("simulate: time step must be positive");

    const int d = spec.dim;
    const double T = spec.horizon;
    CounterRng rng = CounterRng::for_path(seed, static_cast<std::uint64_t>(path_index));

    PathRecord rec;
    Point x = start;
    int regime = start_regime;
    std::vector<char> visited(spec.regimes, 0);
    Point mu(d), xi(d);
    std::vector<double> sig(static_cast<std::size_t>(d) * d);

    auto track_excursion = [&]() {
        const double dist = spec.domain.distance(x);
        if (dist > 0.0) {
            rec.violated = true;
            rec.max_excursion = std::max(rec.max_excursion, dist);
        }
    };
    track_excursion();
    if (trace)
        trace->push_back({t0, x, regime, "start"});

    const long long nsteps =
        t0 < T ? static_cast<long long>(std::ceil((T - t0) / dt - 1e-9)) : 0;
    for (long long k = 0; k < nsteps; ++k) {
        const double t = t0 + k * dt;
        const double h = std::min(dt, T - t); // last step may be short
        decide(spec, policy, t, x, regime, rec, visited, trace);
        rec.running_part += h * spec.coeffs.running(x, regime);

        mu = spec.coeffs.drift(x, regime);
        sig = spec.coeffs.vol(x, regime);
        // Always draw dim normals so the stream layout does not depend on the
        // volatility structure.
        for (int l = 0; l < d; ++l)
            xi[l] = rng.next_normal();
        const double sqh = std::sqrt(h);
        for (int kk = 0; kk < d; ++kk) {
            double dx = mu[kk] * h;
            for (int l = 0; l < d; ++l)
                dx += sig[static_cast<std::size_t>(kk) * d + l] * sqh * xi[l];
            x[kk] += dx;
        }
        check_state(x, t + h);
        track_excursion();
        if (trace)
            trace->push_back({std::min(T, t0 + (k + 1) * dt), x, regime, "step"});
    }

    decide(spec, policy, T, x, regime, rec, visited, trace);
    rec.terminal_part = spec.coeffs.terminal(x, regime);
    if (trace)
        trace->push_back({T, x, regime, "terminal"});
    rec.payoff = rec.running_part + rec.terminal_part - rec.switch_cost;
    rec.final_state = x;
    rec.final_regime = regime;
    return rec;
}

PayoffEstimate estimate_payoff(const ModelSpec& spec, const SwitchingPolicy& policy,
                               const Point& start, int start_regime, const SimParams& params) {
    if (params.paths < 1)
        throw ConfigError("simulate: need at least one path");

    const long long n = params.paths;
    std::vector<PathRecord> recs(static_cast<std::size_t>(n));

    int nt = 1;
#ifdef _OPENMP
    if (params.launch.exec == kernels::Exec::parallel)
        nt = params.launch.threads > 0 ? params.launch.threads : omp_get_max_threads();
#endif
    bool failed = false;
    bool config_error = false;
    std::string first_error;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long p = 0; p < n; ++p) {
        try {
            recs[static_cast<std::size_t>(p)] = simulate_path(spec, policy, params.t0, start,
                                                              start_regime, params.dt,
                                                              params.seed, p);
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical(switchgrid_sim_error)
#endif
            {
                if (!failed) {
                    failed = true;
                    config_error = dynamic_cast<const ConfigError*>(&e) != nullptr;
                    first_error = e.what();
                }
            }
        }
    }
    (void)nt;
    if (failed) {
        if (config_error)
            throw ConfigError(first_error);
        throw NumericError(first_error);
    }

    // Fixed-order reduction: the estimate must not depend on scheduling.
    PayoffEstimate est;
    est.paths = n;
    est.seed = params.seed;
    double sum = 0.0;
    for (const auto& r : recs)
        sum += r.payoff;
    est.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (const auto& r : recs) {
            const double dev = r.payoff - est.mean;
            ss += dev * dev;
        }
        est.stderr_mean = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
    }
    long long violated = 0, escaped = 0, switches = 0;
    for (const auto& r : recs) {
        violated += r.violated ? 1 : 0;
        escaped += r.escaped ? 1 : 0;
        switches += r.switches;
        est.max_excursion = std::max(est.max_excursion, r.max_excursion);
    }
    est.violation_rate = static_cast<double>(violated) / static_cast<double>(n);
    est.escape_rate = static_cast<double>(escaped) / static_cast<double>(n);
    est.mean_switches = static_cast<double>(switches) / static_cast<double>(n);
    return est;
}

ViolationStats constraint_violation_rate(const std::vector<PathRecord>& records) {
    if (records.empty())
        throw ConfigError("simulate: no path records to aggregate");
    ViolationStats stats;
    long long violated = 0;
    for (const auto& r : records) {
        violated += r.violated ? 1 : 0;
        stats.max_excursion = std::max(stats.max_excursion, r.max_excursion);
    }
    stats.rate = static_cast<double>(violated) / static_cast<double>(records.size());
    return stats;
}

} // namespace switchgrid
