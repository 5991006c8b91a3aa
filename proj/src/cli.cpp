#include "switchgrid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "switchgrid/config.hpp"
#include "switchgrid/errors.hpp"
#include "switchgrid/harness.hpp"
#include "switchgrid/io.hpp"
#include "switchgrid/oracle.hpp"
#include "switchgrid/simulate.hpp"
#include "switchgrid/solver.hpp"

namespace switchgrid::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using config::RunConfig;

int guard(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return exit_verify;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

RunConfig resolve(const Options& opt, std::vector<int> default_levels) {
    if (!opt.config.empty() && !opt.model.empty())
        throw ConfigError("give either --config or --model, not both");
    RunConfig rc;
    if (!opt.config.empty()) {
        rc = config::load_run_config(opt.config);
    } else if (!opt.model.empty()) {
        const fs::path model_path(opt.model);
        rc.config_dir = model_path.has_parent_path() ? model_path.parent_path() : fs::path(".");
        rc.model_file = model_path.filename().string();
        rc.model = config::load_model(model_path);
        rc.penalty_levels = std::move(default_levels);
        const int floor = opt.penalty > 0 ? opt.penalty : rc.penalty_levels.front();
        rc.grid = config::default_grid(rc.model, 51, floor);
    } else {
        throw ConfigError("missing --config or --model");
    }
    if (opt.penalty > 0) {
        rc.penalty_levels = {opt.penalty};
        rc.grid.min_penalty = opt.penalty;
    }
    if (!opt.out.empty())
        rc.output_dir = opt.out;
    if (opt.seed_set)
        rc.simulate.seed = opt.seed;
    rc.scheme.launch.exec = opt.serial ? kernels::Exec::serial : kernels::Exec::parallel;
    rc.scheme.launch.threads = opt.threads;
    return rc;
}

bool is_counterexample(const ModelSpec& spec) {
    return spec.name.rfind("counterexample", 0) == 0;
}

// Closed-form reference, available for the built-in counterexample only. Its
// uniform switch cost doubles as the declared cost floor.
harness::OracleFn make_oracle(const ModelSpec& spec) {
    if (!is_counterexample(spec))
        return nullptr;
    const double horizon = spec.horizon;
    const double cost = spec.min_cost;
    return [horizon, cost](double t, const Point& x, int regime) {
        return oracle::counterexample_value(t, x, regime, horizon, cost);
    };
}

// Band around the moving discontinuity x2 = T - t where no pointwise
// comparison is meaningful.
harness::SampleFilter make_front_band(const ModelSpec& spec, double band) {
    if (!is_counterexample(spec))
        return nullptr;
    const double horizon = spec.horizon;
    return [horizon, band](double t, const Point& x) {
        return std::abs(x[1] - (horizon - t)) < band;
    };
}

double front_band_width(const GridSpec& gspec) {
    if (gspec.nodes.size() < 2)
        return 0.0;
    return 3.0 * (gspec.hi[1] - gspec.lo[1]) / (gspec.nodes[1] - 1);
}

json rung_json(const harness::LadderRung& rung, bool first) {
    json j;
    j["penalty"] = rung.penalty;
    if (!first) {
        j["max_increase"] = rung.max_increase;
        j["sup_diff"] = rung.sup_diff;
    }
    if (rung.oracle_gap >= 0.0) {
        j["oracle_gap"] = rung.oracle_gap;
        if (rung.oracle_gap_filtered >= 0.0)
            j["oracle_gap_off_front"] = rung.oracle_gap_filtered;
    }
    return j;
}

// Sup gap to the closed form over in-domain nodes, all levels and regimes;
// the filtered variant skips the front band.
json oracle_gap_json(const ValueField& field, const harness::OracleFn& oracle_fn,
                     const harness::SampleFilter& near_front) {
    const Grid& grid = *field.grid;
    double gap = 0.0, gap_off = 0.0;
    for (int k = 0; k < field.levels; ++k) {
        const double t = field.time(k);
        for (long long p = 0; p < grid.nnodes; ++p) {
            if (grid.dist[p] != 0.0)
                continue;
            const Point x = grid.coords(p);
            for (int i = 0; i < field.regimes; ++i) {
                const auto ref = oracle_fn(t, x, i);
                if (!ref.admissible)
                    continue;
                const double g = std::abs(field.at(k, i, p) - ref.value);
                gap = std::max(gap, g);
                if (near_front && !near_front(t, x))
                    gap_off = std::max(gap_off, g);
            }
        }
    }
    json j;
    j["sup"] = gap;
    j["sup_off_front"] = gap_off;
    return j;
}

json h3_json(const H3Report& h3) {
    json j;
    j["absorbing_boundary"] = h3.absorbing_boundary;
    j["invariant_regime"] = h3.invariant_regime;
    j["convex_inward_drift"] = h3.convex_inward_drift;
    j["domain_convex"] = h3.domain_convex;
    if (h3.absorbing_witness >= 0)
        j["absorbing_witness"] = h3.absorbing_witness + 1;
    if (h3.invariant_witness >= 0)
        j["invariant_witness"] = h3.invariant_witness + 1;
    if (h3.convex_witness >= 0)
        j["convex_witness"] = h3.convex_witness + 1;
    j["boundary_samples"] = h3.boundary_samples;
    return j;
}

// Largest node radius among in-domain nodes; 0 when the domain misses the grid.
double max_domain_radius(const Grid& grid) {
    double r = 0.0;
    for (long long p = 0; p < grid.nnodes; ++p)
        if (grid.dist[p] == 0.0)
            r = std::max(r, norm2(grid.coords(p)));
    return r;
}

} // namespace

int cmd_solve(const Options& opt) {
    return guard([&] {
        RunConfig rc = resolve(opt, {1, 4, 16, 64});
        GridPtr grid = build_grid(rc.model, rc.grid);
        const int n = rc.penalty_levels.back();
        const ValueField field = solve(rc.model, grid, n, rc.scheme);
        const fs::path csv = fs::path(rc.output_dir) / "field.csv";
        io::write_field(csv, field);
        std::cout << "wrote " << csv.string() << " (model " << rc.model.name << ", penalty " << n
                  << ", " << grid->nnodes << " nodes, " << (field.levels - 1) << " time steps)\n";
        return exit_ok;
    });
}

int cmd_converge(const Options& opt) {
    return guard([&] {
        RunConfig rc = resolve(opt, {1, 4, 16, 64});
        const auto report = harness::penalty_ladder(
            rc.model, rc.grid, rc.penalty_levels, rc.scheme, rc.verify.ladder_tol,
            make_oracle(rc.model), make_front_band(rc.model, front_band_width(rc.grid)));

        json doc;
        doc["model"] = rc.model.name;
        doc["tol"] = report.tol;
        doc["monotone"] = report.monotone;
        doc["rungs"] = json::array();
        for (std::size_t r = 0; r < report.rungs.size(); ++r)
            doc["rungs"].push_back(rung_json(report.rungs[r], r == 0));
        if (report.aborted)
            doc["aborted"] = report.error;
        const fs::path out = fs::path(rc.output_dir) / "convergence.json";
        io::write_json(out, doc);
        std::cout << report.summary() << "\nwrote " << out.string() << "\n";

        if (report.aborted) {
            std::cerr << (report.config_abort ? "config error: " : "numerical failure: ")
                      << report.error << "\n";
            return report.config_abort ? exit_config : exit_numeric;
        }
        if (!report.monotone) {
            std::cerr << "verification failed: penalty ladder is not monotone within "
                      << report.tol << "\n";
            return exit_verify;
        }
        return exit_ok;
    });
}

int cmd_simulate(const Options& opt) {
    return guard([&] {
        RunConfig rc = resolve(opt, {1, 4, 16, 64});
        GridPtr grid = build_grid(rc.model, rc.grid);
        const int n = rc.penalty_levels.back();
        const ValueField field = solve(rc.model, grid, n, rc.scheme);
        const SwitchingPolicy policy = extract_policy(field, rc.model, rc.verify.eps_obs);

        const Point start = rc.simulate.start.empty() ? rc.model.default_start : rc.simulate.start;
        const int regime =
            rc.simulate.start_regime >= 0 ? rc.simulate.start_regime : rc.model.default_regime;
        if (static_cast<int>(start.size()) != rc.model.dim)
            throw ConfigError("simulate: start point has wrong dimension");
        for (int k = 0; k < rc.model.dim; ++k)
            if (start[k] < grid->spec.lo[k] || start[k] > grid->spec.hi[k])
                throw ConfigError("simulate: start point is outside the grid box");

        SimParams sp;
        sp.dt = rc.simulate.dt;
        sp.paths = rc.simulate.paths;
        sp.seed = rc.simulate.seed;
        sp.launch = rc.scheme.launch;
        const PayoffEstimate est = estimate_payoff(rc.model, policy, start, regime, sp);
        const double value_ref = interp(field, 0.0, start, regime);

        json doc;
        doc["model"] = rc.model.name;
        doc["penalty"] = n;
        doc["paths"] = est.paths;
        doc["seed"] = est.seed;
        doc["dt"] = sp.dt > 0.0 ? sp.dt : policy.dt;
        doc["start"] = start;
        doc["start_regime"] = regime + 1;
        doc["mean"] = est.mean;
        doc["stderr"] = est.stderr_mean;
        doc["violation_rate"] = est.violation_rate;
        doc["escape_rate"] = est.escape_rate;
        doc["max_excursion"] = est.max_excursion;
        doc["mean_switches"] = est.mean_switches;
        doc["value_interpolated"] = value_ref;
        const fs::path out_dir(rc.output_dir);
        io::write_json(out_dir / "summary.json", doc);

        if (rc.simulate.dump_paths > 0) {
            const long long dumps = std::min<long long>(rc.simulate.dump_paths, sp.paths);
            std::vector<std::vector<TraceRow>> traces(static_cast<std::size_t>(dumps));
            for (long long p = 0; p < dumps; ++p)
                simulate_path(rc.model, policy, sp.t0, start, regime, sp.dt, sp.seed, p,
                              &traces[static_cast<std::size_t>(p)]);
            io::write_text_atomic(out_dir / "paths.csv", io::paths_csv(traces, rc.model.dim));
        }

        std::cout << "mean payoff " << est.mean << " (stderr " << est.stderr_mean << ", "
                  << est.paths << " paths), field value " << value_ref << "\nwrote "
                  << (out_dir / "summary.json").string() << "\n";
        return exit_ok;
    });
}

int cmd_verify(const Options& opt) {
    return guard([&] {
        RunConfig rc = resolve(opt, {1, 4, 16, 64});
        json doc;
        doc["model"] = rc.model.name;
        bool pass = true;
        std::vector<std::string> failures;

        ValueField field;
        if (!rc.verify.field_override.empty()) {
            field = io::read_field(rc.config_dir / rc.verify.field_override, rc.model);
            doc["ladder"] = "skipped (field override)";
        } else {
            const auto ladder = harness::penalty_ladder(
                rc.model, rc.grid, rc.penalty_levels, rc.scheme, rc.verify.ladder_tol,
                make_oracle(rc.model), make_front_band(rc.model, front_band_width(rc.grid)));
            json lj;
            lj["tol"] = ladder.tol;
            lj["monotone"] = ladder.monotone;
            lj["rungs"] = json::array();
            for (std::size_t r = 0; r < ladder.rungs.size(); ++r)
                lj["rungs"].push_back(rung_json(ladder.rungs[r], r == 0));
            doc["ladder"] = lj;
            if (ladder.aborted) {
                std::cerr << (ladder.config_abort ? "config error: " : "numerical failure: ")
                          << ladder.error << "\n";
                return ladder.config_abort ? exit_config : exit_numeric;
            }
            if (!ladder.monotone) {
                pass = false;
                failures.push_back("penalty ladder not monotone");
            }
            GridPtr grid = build_grid(rc.model, rc.grid);
            field = solve(rc.model, grid, rc.penalty_levels.back(), rc.scheme);
        }

        const auto obstacle = harness::obstacle_check(field, rc.model);
        doc["obstacle"]["min_slack"] = obstacle.min_slack;
        doc["obstacle"]["level"] = obstacle.level;
        doc["obstacle"]["regime"] = obstacle.regime + 1;
        doc["obstacle"]["node"] = obstacle.node;
        doc["obstacle"]["eps"] = rc.verify.eps_obs;
        if (!(obstacle.min_slack >= -rc.verify.eps_obs)) {
            pass = false;
            failures.push_back("obstacle slack " + std::to_string(obstacle.min_slack) +
                               " below -eps_obs");
        }

        const int lookahead = std::max(1, std::min(rc.verify.dpp_lookahead, field.levels - 1));
        const auto dpp = harness::dpp_residual(field, rc.model, {}, lookahead, rc.scheme);
        doc["dpp"]["lookahead"] = lookahead;
        doc["dpp"]["max_residual"] = dpp.max_residual;
        doc["dpp"]["samples"] = dpp.samples;

        double r_test = rc.verify.growth_r_test;
        if (r_test <= 0.0)
            r_test = max_domain_radius(*field.grid);
        double r_fit = rc.verify.growth_r_fit;
        if (r_fit <= 0.0)
            r_fit = 0.5 * r_test;
        if (r_test > r_fit) {
            const auto regions = harness::radial_regions(*field.grid, r_fit, r_test);
            const auto growth = harness::growth_check({&field}, regions, rc.verify.growth_eta);
            doc["growth"]["r_fit"] = r_fit;
            doc["growth"]["r_test"] = r_test;
            doc["growth"]["upper_c"] = growth.upper_c;
            doc["growth"]["lower_c"] = growth.lower_c;
            doc["growth"]["eta"] = growth.eta;
            doc["growth"]["upper_excess"] = growth.upper_excess;
            doc["growth"]["lower_excess"] = growth.lower_excess;
            if (growth.upper_excess > rc.verify.growth_tol ||
                growth.lower_excess > rc.verify.growth_tol) {
                pass = false;
                failures.push_back("growth bound violated on the test region");
            }
        } else {
            doc["growth"] = "skipped (degenerate radii)";
        }

        const auto oracle_fn = make_oracle(rc.model);
        if (oracle_fn)
            doc["oracle"] = oracle_gap_json(
                field, oracle_fn,
                make_front_band(rc.model, front_band_width(field.grid->spec)));
        else
            doc["oracle"] = "skipped (no closed form for this model)";

        doc["h3"] = h3_json(check_h3_sufficient(rc.model, 64, rc.simulate.seed));
        doc["pass"] = pass;

        const fs::path out = fs::path(rc.output_dir) / "verify.json";
        io::write_json(out, doc);
        std::cout << obstacle.summary() << "\n"
                  << dpp.summary() << "\nwrote " << out.string() << "\n";
        if (!pass) {
            std::cerr << "verification failed:";
            for (const auto& f : failures)
                std::cerr << " " << f << ";";
            std::cerr << "\n";
            return exit_verify;
        }
        return exit_ok;
    });
}

int cmd_oracle(const Options& opt) {
    return guard([&] {
        RunConfig rc = resolve(opt, {64});
        if (!is_counterexample(rc.model))
            throw ConfigError("model \"" + rc.model.name + "\" has no closed-form reference");
        GridPtr grid = build_grid(rc.model, rc.grid);
        const double dt = rc.model.horizon / rc.grid.time_steps;

        std::string csv = "t";
        for (int k = 0; k < grid->dim; ++k)
            csv += ",x_" + std::to_string(k + 1);
        csv += ",regime,value\n";
        for (int lev = 0; lev <= rc.grid.time_steps; ++lev) {
            const double t = std::min(rc.model.horizon, lev * dt);
            for (int i = 0; i < rc.model.regimes; ++i) {
                for (long long p = 0; p < grid->nnodes; ++p) {
                    const Point x = grid->coords(p);
                    csv += io::format_double(t);
                    for (int k = 0; k < grid->dim; ++k)
                        csv += "," + io::format_double(x[k]);
                    csv += "," + std::to_string(i + 1) + ",";
                    const auto ref = oracle::counterexample_value(t, x, i, rc.model.horizon,
                                                                  rc.model.min_cost);
                    csv += ref.admissible ? io::format_double(ref.value) : "-inf";
                    csv += "\n";
                }
            }
        }
        const fs::path out = fs::path(rc.output_dir) / "oracle.csv";
        io::write_text_atomic(out, csv);
        std::cout << "wrote " << out.string() << "\n";
        return exit_ok;
    });
}

int run(int argc, const char* const* argv) {
    CLI::App app{"finite-horizon optimal switching under state constraints"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config, "run configuration file (JSON)");
        cmd->add_option("--model", opt.model, "model file; grid and ladder use defaults");
        cmd->add_option("--out", opt.out, "output directory (default from config, else ./out)");
        cmd->add_option("--threads", opt.threads, "cap on worker threads (0 = library default)");
        cmd->add_flag("--serial", opt.serial, "run the serial reference kernels");
        cmd->add_option("--seed", opt.seed, "simulation seed")
            ->each([&](const std::string&) { opt.seed_set = true; });
        cmd->add_option("--n", opt.penalty, "solve at this single penalty level");
    };

    CLI::App* solve_cmd =
        app.add_subcommand("solve", "solve the penalized system, write the value field");
    CLI::App* converge_cmd =
        app.add_subcommand("converge", "run a penalty ladder and report convergence");
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo payoff of the extracted policy");
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the invariant suite on a solve or a stored field");
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "write the closed-form reference field");
    for (CLI::App* cmd : {solve_cmd, converge_cmd, simulate_cmd, verify_cmd, oracle_cmd})
        add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    if (solve_cmd->parsed())
        return cmd_solve(opt);
    if (converge_cmd->parsed())
        return cmd_converge(opt);
    if (simulate_cmd->parsed())
        return cmd_simulate(opt);
    if (verify_cmd->parsed())
        return cmd_verify(opt);
    if (oracle_cmd->parsed())
        return cmd_oracle(opt);
    return exit_config;
}

} // namespace switchgrid::cli
