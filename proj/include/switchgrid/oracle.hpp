#pragma once

#include <cstdint>
#include <vector>

#include "switchgrid/vecmath.hpp"

namespace switchgrid::oracle {

// Value that may be "minus infinity" (no admissible strategy). The marker is
// symbolic: no floating-point infinity ever enters arithmetic.
struct OracleValue {
    bool admissible = false;
    double value = 0.0;

    static OracleValue minus_inf() { return {false, 0.0}; }
    static OracleValue of(double v) { return {true, v}; }
};

// Closed-form value of the two-regime constrained problem solved by
// builtin_counterexample: regime 1 (index 0) drifts x2 down at unit speed and
// must pay one switch when it cannot reach the horizon inside {x2 >= 0};
// regime 2 (index 1) is static and earns T - t. Starting outside the
// constraint set is inadmissible.
OracleValue counterexample_value(double t, const Point& x, int regime, double horizon,
                                 double cost);

// Exact backward induction on a 1-D lattice with a tri-diagonal transition
// stencil per regime. This is the solver's independent cross-check: same
// switching semantics, written as plain dynamic programming over explicit
// probabilities, single-threaded on purpose.
struct LatticeDP {
    int nodes = 0;
    int regimes = 0;
    int steps = 0;
    double dt = 0.0;
    std::vector<double> p_dn, p_self, p_up; // [regime][node], each row a distribution
    std::vector<double> running;            // [regime][node] accrual rate
    std::vector<double> terminal;           // [regime][node]
    std::vector<double> cost;               // [from][to][node], diagonal ignored
    std::vector<std::uint8_t> masked;       // [node], 1 = forbidden state

    std::size_t rn(int i, long long p) const {
        return static_cast<std::size_t>(i) * nodes + p;
    }
    std::size_t cn(int i, int j, long long p) const {
        return (static_cast<std::size_t>(i) * regimes + j) * nodes + p;
    }
    void validate() const;
};

struct LatticeResult {
    int nodes = 0;
    int regimes = 0;
    int steps = 0;
    std::vector<double> value;         // [step][regime][node], finite part
    std::vector<std::uint8_t> finite;  // 0 marks minus infinity
    std::vector<std::int8_t> action;   // [step][regime][node], -1 keep, else target regime

    std::size_t idx(int step, int regime, long long p) const {
        return (static_cast<std::size_t>(step) * regimes + regime) * nodes + p;
    }
    bool is_finite(int step, int regime, long long p) const { return finite[idx(step, regime, p)]; }
    double at(int step, int regime, long long p) const { return value[idx(step, regime, p)]; }
    int action_at(int step, int regime, long long p) const { return action[idx(step, regime, p)]; }
};

LatticeResult lattice_dp(const LatticeDP& problem);

} // namespace switchgrid::oracle
