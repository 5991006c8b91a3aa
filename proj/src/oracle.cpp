#include "switchgrid/oracle.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "switchgrid/errors.hpp"

namespace switchgrid::oracle {

OracleValue counterexample_value(double t, const Point& x, int regime, double horizon,
                                 double cost) {
    if (x.size() != 2)
        throw ConfigError("counterexample_value: state must be 2-dimensional");
    if (regime < 0 || regime > 1)
        throw ConfigError("counterexample_value: regime index out of range");
    if (!(horizon > 0.0) || !(cost > 0.0))
        throw ConfigError("counterexample_value: horizon and cost must be positive");
    if (!(t >= 0.0) || !(t <= horizon))
        throw ConfigError("counterexample_value: time outside [0, horizon]");

    if (x[1] < 0.0)
        return OracleValue::minus_inf(); // already outside the admissible set

    double remain = horizon - t;
    if (regime == 1)
        return OracleValue::of(remain); // static regime accrues until the horizon
    // Moving regime: reaches the boundary after x2 units of time. If that is
    // before the horizon it must switch once, paying the cost.
    if (x[1] >= remain)
        return OracleValue::of(remain);
    return OracleValue::of(remain - cost);
}

namespace {

struct Sym {
    bool finite;
    double v;
};

// max with ties resolved towards the incumbent (strict improvement only)
bool improves(const Sym& incumbent, const Sym& candidate) {
    if (!candidate.finite)
        return false;
    if (!incumbent.finite)
        return true;
    return candidate.v > incumbent.v;
}

} // namespace

void LatticeDP::validate() const {
    if (nodes < 2)
        throw ConfigError("lattice: need at least 2 nodes");
    if (regimes < 1)
        throw ConfigError("lattice: need at least 1 regime");
    if (steps < 1)
        throw ConfigError("lattice: need at least 1 time step");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("lattice: dt must be positive and finite");

    std::size_t n = static_cast<std::size_t>(nodes);
    std::size_t m = static_cast<std::size_t>(regimes);
    std::size_t table = (static_cast<std::size_t>(steps) + 1) * m * n;
    if (table > 1000000)
        throw ConfigError("lattice: value table would hold " + std::to_string(table) +
                          " entries, limit is 1000000");

    if (p_dn.size() != m * n || p_self.size() != m * n || p_up.size() != m * n)
        throw ConfigError("lattice: stencil arrays must have regimes*nodes entries");
    if (running.size() != m * n || terminal.size() != m * n)
        throw ConfigError("lattice: running/terminal arrays must have regimes*nodes entries");
    if (cost.size() != m * m * n)
        throw ConfigError("lattice: cost array must have regimes*regimes*nodes entries");
    if (masked.size() != n)
        throw ConfigError("lattice: mask must have one flag per node");

    const double tol = 1e-12;
    for (int i = 0; i < regimes; ++i) {
        for (long long p = 0; p < nodes; ++p) {
            double dn = p_dn[rn(i, p)], sf = p_self[rn(i, p)], up = p_up[rn(i, p)];
            if (dn < 0.0 || sf < 0.0 || up < 0.0)
                throw ConfigError("lattice: negative transition probability at node " +
                                  std::to_string(p));
            if (std::abs(dn + sf + up - 1.0) > tol)
                throw ConfigError("lattice: transition row does not sum to 1 at node " +
                                  std::to_string(p));
            if (p == 0 && dn != 0.0)
                throw ConfigError("lattice: downward probability must be 0 at the first node");
            if (p == nodes - 1 && up != 0.0)
                throw ConfigError("lattice: upward probability must be 0 at the last node");
        }
    }
}

LatticeResult lattice_dp(const LatticeDP& problem) {
    problem.validate();
    const int n = problem.nodes;
    const int m = problem.regimes;
    const int steps = problem.steps;

    LatticeResult out;
    out.nodes = n;
    out.regimes = m;
    out.steps = steps;
    out.value.assign(static_cast<std::size_t>(steps + 1) * m * n, 0.0);
    out.finite.assign(out.value.size(), 0);
    out.action.assign(out.value.size(), -1);

    auto get = [&](int k, int i, long long p) -> Sym {
        std::size_t q = out.idx(k, i, p);
        return {out.finite[q] != 0, out.value[q]};
    };
    auto put = [&](int k, int i, long long p, const Sym& s) {
        std::size_t q = out.idx(k, i, p);
        out.finite[q] = s.finite ? 1 : 0;
        out.value[q] = s.finite ? s.v : 0.0;
    };

    // Keep-branch values at the level being swept, for action extraction.
    std::vector<Sym> keepv(static_cast<std::size_t>(m) * n);

    // Switch sweeps at level k: Gauss-Seidel over regimes until quiet. With
    // strictly positive costs any improving chain visits each regime at most
    // once, so more than regimes-1 improving sweeps means the costs are bad.
    // Actions come from a final pass against the stored keep branch: the
    // recorded target is the one-hop argmax at the converged values.
    auto sweep_switches = [&](int k) {
        for (int i = 0; i < m; ++i)
            for (long long p = 0; p < n; ++p)
                keepv[static_cast<std::size_t>(i) * n + p] = get(k, i, p);
        if (m == 1)
            return;
        int sweeps = 0;
        for (;;) {
            bool changed = false;
            for (int i = 0; i < m; ++i) {
                for (long long p = 0; p < n; ++p) {
                    Sym cur = get(k, i, p);
                    for (int j = 0; j < m; ++j) {
                        if (j == i)
                            continue;
                        Sym other = get(k, j, p);
                        if (!other.finite)
                            continue;
                        Sym cand{true, other.v - problem.cost[problem.cn(i, j, p)]};
                        if (improves(cur, cand)) {
                            cur = cand;
                            changed = true;
                        }
                    }
                    put(k, i, p, cur);
                }
            }
            if (!changed)
                break;
            if (++sweeps > m - 1)
                throw NumericError("lattice: switch sweep still improving after " +
                                   std::to_string(m - 1) +
                                   " passes; switch costs are not uniformly positive");
        }
        for (int i = 0; i < m; ++i) {
            for (long long p = 0; p < n; ++p) {
                Sym keep = keepv[static_cast<std::size_t>(i) * n + p];
                Sym best{false, 0.0};
                int bestj = -1;
                for (int j = 0; j < m; ++j) {
                    if (j == i)
                        continue;
                    Sym other = get(k, j, p);
                    if (!other.finite)
                        continue;
                    Sym cand{true, other.v - problem.cost[problem.cn(i, j, p)]};
                    if (improves(best, cand)) {
                        best = cand;
                        bestj = j;
                    }
                }
                if (improves(keep, best))
                    out.action[out.idx(k, i, p)] = static_cast<std::int8_t>(bestj);
            }
        }
    };

    for (int i = 0; i < m; ++i)
        for (long long p = 0; p < n; ++p)
            put(steps, i, p,
                problem.masked[p] ? Sym{false, 0.0} : Sym{true, problem.terminal[problem.rn(i, p)]});
    sweep_switches(steps);

    for (int k = steps - 1; k >= 0; --k) {
        for (int i = 0; i < m; ++i) {
            for (long long p = 0; p < n; ++p) {
                if (problem.masked[p]) {
                    put(k, i, p, Sym{false, 0.0});
                    continue;
                }
                // E[v(k+1)] under the stencil; any reachable minus-infinity
                // state poisons the expectation.
                double acc = 0.0;
                bool fin = true;
                auto take = [&](double prob, long long q) {
                    if (prob == 0.0)
                        return;
                    Sym s = get(k + 1, i, q);
                    if (!s.finite)
                        fin = false;
                    else
                        acc += prob * s.v;
                };
                take(problem.p_dn[problem.rn(i, p)], p - 1);
                take(problem.p_self[problem.rn(i, p)], p);
                take(problem.p_up[problem.rn(i, p)], p + 1);
                if (fin)
                    put(k, i, p, Sym{true, acc + problem.dt * problem.running[problem.rn(i, p)]});
                else
                    put(k, i, p, Sym{false, 0.0});
            }
        }
        sweep_switches(k);
    }
    return out;
}

} // namespace switchgrid::oracle
