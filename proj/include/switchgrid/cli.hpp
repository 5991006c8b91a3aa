#pragma once

#include <cstdint>
#include <string>

namespace switchgrid::cli {

// Exit-code contract shared by every command.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;   // bad config, schema violation, missing file
inline constexpr int exit_numeric = 3;  // CFL violation, divergence, non-finite state
inline constexpr int exit_verify = 4;   // an invariant check failed

struct Options {
    std::string config;     // run config file; exclusive with model
    std::string model;      // model file, runs with derived defaults
    std::string out;        // output directory override
    int threads = 0;        // 0: library default
    bool serial = false;    // force the serial reference kernels
    std::uint64_t seed = 0;
    bool seed_set = false;
    int penalty = 0;        // 0: config levels; else solve at this single level
};

// Each command returns the process exit code and writes its artifacts under
// the output directory. They throw nothing: errors are mapped to the contract
// above and a message on stderr.
int cmd_solve(const Options& opt);
int cmd_converge(const Options& opt);
int cmd_simulate(const Options& opt);
int cmd_verify(const Options& opt);
int cmd_oracle(const Options& opt);

// Full front end: parses argv, dispatches, maps every error to an exit code.
int run(int argc, const char* const* argv);

} // namespace switchgrid::cli
