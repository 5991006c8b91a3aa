#pragma once

#include <cstdint>
#include <vector>

#include "switchgrid/kernels.hpp"
#include "switchgrid/model.hpp"
#include "switchgrid/solver.hpp"

namespace switchgrid {

// One controlled Euler-Maruyama path driven by a feedback policy. The policy
// is read at the nearest grid node and nearest time level; switch decisions
// happen at every sample time (chains allowed, each regime at most once) and
// once more at the horizon before the terminal reward.
struct PathRecord {
    double payoff = 0.0;        // running + terminal - switch_cost, by construction
    double running_part = 0.0;  // integral of f along the path (left endpoint rule)
    double terminal_part = 0.0; // g at the final state and regime
    double switch_cost = 0.0;   // sum of costs paid
    int switches = 0;
    bool violated = false;      // left the constraint domain at some sample time
    double max_excursion = 0.0; // largest distance to the domain seen
    bool escaped = false;       // left the grid box; policy lookups clamp there
    Point final_state;
    int final_regime = 0;
};

// One sampled event along a path; event is "start", "switch", "step" or
// "terminal". The regime is the one in force after the event.
struct TraceRow {
    double t = 0.0;
    Point x;
    int regime = 0;
    const char* event = "step";
};

// Runs from (t0, start) to the horizon. dt <= 0 uses the policy's own time
// step. The driving noise is a counter stream keyed by (seed, path_index):
// exactly dim normals per step, so the path is reproducible bit for bit
// regardless of how many paths run or in which order. trace, when given,
// collects every event on the path.
PathRecord simulate_path(const ModelSpec& spec, const SwitchingPolicy& policy, double t0,
                         const Point& start, int start_regime, double dt, std::uint64_t seed,
                         long long path_index, std::vector<TraceRow>* trace = nullptr);

struct SimParams {
    double t0 = 0.0;      // start time, in [0, horizon]
    double dt = 0.0;      // 0: policy time step
    long long paths = 1;  // >= 1
    std::uint64_t seed = 0;
    kernels::Launch launch;
};

struct PayoffEstimate {
    long long paths = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;  // 0 when paths == 1
    double violation_rate = 0.0;
    double escape_rate = 0.0;
    double max_excursion = 0.0;
    double mean_switches = 0.0;
    std::uint64_t seed = 0;
};

// Runs paths 0..N-1 (parallel over paths, per-path streams) and reduces the
// records in path order, serially, so the estimate is deterministic.
PayoffEstimate estimate_payoff(const ModelSpec& spec, const SwitchingPolicy& policy,
                               const Point& start, int start_regime, const SimParams& params);

struct ViolationStats {
    double rate = 0.0;          // fraction of paths that left the domain
    double max_excursion = 0.0; // worst distance to the domain over all paths
};

ViolationStats constraint_violation_rate(const std::vector<PathRecord>& records);

} // namespace switchgrid
