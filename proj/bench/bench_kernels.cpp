// Timing comparison between the OpenMP kernels and the serial reference
// loops. Both must produce bit-identical results; the benchmark verifies that
// on the fly while measuring.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "switchgrid/model.hpp"
#include "switchgrid/simulate.hpp"
#include "switchgrid/solver.hpp"

using namespace switchgrid;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

SchemeParams launch_params(kernels::Exec exec) {
    SchemeParams params;
    params.launch.exec = exec;
    return params;
}

void report(const char* name, double serial_s, double parallel_s, double max_diff) {
    std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  max|diff| %g\n", name,
                serial_s, parallel_s, serial_s / parallel_s, max_diff);
}

} // namespace

int main(int argc, char** argv) {
    const int scale = argc > 1 ? std::stoi(argv[1]) : 1;

    {
        const ModelSpec spec = builtin_counterexample(1.0, 0.5);
        GridSpec gspec;
        gspec.lo = {-1.0, -0.5};
        gspec.hi = {1.0, 2.0};
        gspec.nodes = {101 * scale, 151 * scale};
        gspec.time_steps = 60 * scale;
        gspec.min_penalty = 64;
        GridPtr grid = build_grid(spec, gspec);

        auto t0 = clock_type::now();
        const ValueField serial = solve(spec, grid, 64, launch_params(kernels::Exec::serial));
        const double serial_s = seconds_since(t0);

        t0 = clock_type::now();
        const ValueField parallel = solve(spec, grid, 64, launch_params(kernels::Exec::parallel));
        const double parallel_s = seconds_since(t0);

        double max_diff = 0.0;
        for (std::size_t q = 0; q < serial.v.size(); ++q)
            max_diff = std::max(max_diff, std::abs(serial.v[q] - parallel.v[q]));
        report("backward solve", serial_s, parallel_s, max_diff);
        if (max_diff != 0.0)
            return 1;

        const SwitchingPolicy policy = extract_policy(parallel, spec, 1e-9);
        SimParams sp;
        sp.paths = 20000 * scale;
        sp.seed = 7;
        sp.launch.exec = kernels::Exec::serial;
        t0 = clock_type::now();
        const PayoffEstimate est_serial =
            estimate_payoff(spec, policy, {0.0, 1.5}, 0, sp);
        const double mc_serial_s = seconds_since(t0);

        sp.launch.exec = kernels::Exec::parallel;
        t0 = clock_type::now();
        const PayoffEstimate est_parallel =
            estimate_payoff(spec, policy, {0.0, 1.5}, 0, sp);
        const double mc_parallel_s = seconds_since(t0);
        report("monte carlo paths", mc_serial_s, mc_parallel_s,
               std::abs(est_serial.mean - est_parallel.mean));
        if (est_serial.mean != est_parallel.mean)
            return 1;
    }
    return 0;
}
