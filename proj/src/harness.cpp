#include "switchgrid/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_set>
#include <utility>

#include "switchgrid/errors.hpp"
#include "switchgrid/kernels.hpp"
#include "switchgrid/log.hpp"

namespace switchgrid::harness {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string ConvergenceReport::summary() const {
    std::string s = "penalty ladder (" + std::to_string(rungs.size()) + " levels): ";
    s += monotone ? "monotone" : "NOT monotone";
    s += " at tol " + fmt(tol);
    for (std::size_t r = 0; r < rungs.size(); ++r) {
        const auto& g = rungs[r];
        s += "\n  n=" + std::to_string(g.penalty);
        if (r > 0)
            s += " max_increase=" + fmt(g.max_increase) + " sup_diff=" + fmt(g.sup_diff);
        if (g.oracle_gap >= 0.0) {
            s += " oracle_gap=" + fmt(g.oracle_gap);
            if (g.oracle_gap_filtered >= 0.0)
                s += " off_front=" + fmt(g.oracle_gap_filtered);
        }
    }
    if (aborted)
        s += "\n  aborted: " + error;
    return s;
}

ConvergenceReport penalty_ladder(const ModelSpec& spec, GridSpec gspec,
                                 const std::vector<int>& levels, const SchemeParams& params,
                                 double tol, const OracleFn& oracle_fn,
                                 const SampleFilter& near_front) {
    if (levels.empty())
        throw ConfigError("penalty ladder: need at least one level");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1)
            throw ConfigError("penalty ladder: levels must be >= 1");
        if (i > 0 && levels[i] < levels[i - 1])
            throw ConfigError("penalty ladder: levels must be ascending");
    }

    gspec.min_penalty = levels.front();
    GridPtr grid = build_grid(spec, gspec);

    ConvergenceReport report;
    report.tol = tol;

    std::vector<double> prev;
    for (std::size_t r = 0; r < levels.size(); ++r) {
        ValueField field;
        try {
            field = solve(spec, grid, levels[r], params);
        } catch (const std::exception& e) {
            report.aborted = true;
            report.config_abort = dynamic_cast<const ConfigError*>(&e) != nullptr;
            report.error = e.what();
            log::error(std::string("penalty ladder aborted at n=") + std::to_string(levels[r]) +
                       ": " + e.what());
            return report;
        }

        LadderRung rung;
        rung.penalty = levels[r];
        const long long nn = grid->nnodes;
        if (r > 0) {
            for (int k = 0; k < field.levels; ++k) {
                for (int i = 0; i < field.regimes; ++i) {
                    const double* cur = field.level_data(k, i);
                    const double* was =
                        prev.data() + (static_cast<std::size_t>(k) * field.regimes + i) * nn;
                    for (long long p = 0; p < nn; ++p) {
                        if (grid->dist[p] != 0.0)
                            continue;
                        const double d = cur[p] - was[p];
                        rung.max_increase = std::max(rung.max_increase, d);
                        rung.sup_diff = std::max(rung.sup_diff, std::abs(d));
                    }
                }
            }
            if (rung.max_increase > tol)
                report.monotone = false;
        }
        if (oracle_fn) {
            rung.oracle_gap = 0.0;
            rung.oracle_gap_filtered = near_front ? 0.0 : -1.0;
            for (int k = 0; k < field.levels; ++k) {
                const double t = field.time(k);
                for (long long p = 0; p < nn; ++p) {
                    if (grid->dist[p] != 0.0)
                        continue;
                    const Point x = grid->coords(p);
                    for (int i = 0; i < field.regimes; ++i) {
                        const auto ref = oracle_fn(t, x, i);
                        if (!ref.admissible)
                            continue;
                        const double gap = std::abs(field.at(k, i, p) - ref.value);
                        rung.oracle_gap = std::max(rung.oracle_gap, gap);
                        if (near_front && !near_front(t, x))
                            rung.oracle_gap_filtered = std::max(rung.oracle_gap_filtered, gap);
                    }
                }
            }
        }
        report.rungs.push_back(rung);
        prev = std::move(field.v);
    }
    return report;
}

std::string DppReport::summary() const {
    std::string s = "dpp residual: max " + fmt(max_residual) + " over " +
                    std::to_string(samples) + " samples";
    if (samples > 0)
        s += " (worst at level " + std::to_string(worst.level) + ", regime " +
             std::to_string(worst.regime + 1) + ", node " + std::to_string(worst.node) + ")";
    return s;
}

DppReport dpp_residual(const ValueField& field, const ModelSpec& spec,
                       const std::vector<DppSample>& samples, int lookahead,
                       const SchemeParams& params) {
    if (lookahead < 1)
        throw ConfigError("dpp residual: lookahead must be >= 1");
    const Grid& grid = *field.grid;
    const int M = field.levels - 1;
    if (lookahead > M)
        throw ConfigError("dpp residual: lookahead exceeds the number of time steps");
    if (field.regimes != spec.regimes || grid.dim != spec.dim)
        throw ConfigError("dpp residual: field does not match the model");

    // Group sample nodes by (level, regime) so the keep branch is rebuilt once
    // per group.
    std::map<std::pair<int, int>, std::vector<long long>> groups;
    if (samples.empty()) {
        for (int k = 0; k + lookahead <= M; ++k)
            for (int i = 0; i < field.regimes; ++i) {
                auto& nodes = groups[{k, i}];
                for (long long p = 0; p < grid.nnodes; ++p)
                    if (grid.dist[p] == 0.0)
                        nodes.push_back(p);
            }
    } else {
        for (const auto& s : samples) {
            if (s.level < 0 || s.level + lookahead > M)
                throw ConfigError("dpp residual: sample level out of range for this lookahead");
            if (s.regime < 0 || s.regime >= field.regimes)
                throw ConfigError("dpp residual: sample regime out of range");
            if (s.node < 0 || s.node >= grid.nnodes)
                throw ConfigError("dpp residual: sample node out of range");
            groups[{s.level, s.regime}].push_back(s.node);
        }
    }

    const auto tab = kernels::build_coefficient_table(spec, grid, field.penalty);
    DppReport report;
    std::vector<double> keep(grid.nnodes), scratch(grid.nnodes);

    for (const auto& [key, nodes] : groups) {
        const auto [k, i] = key;
        // keep branch: lookahead unprojected backward steps from level k+lookahead
        std::copy_n(field.level_data(k + lookahead, i), grid.nnodes, keep.data());
        for (int s = 0; s < lookahead; ++s) {
            kernels::explicit_update(params.launch, tab, i, keep.data(), scratch.data(), field.dt);
            keep.swap(scratch);
        }
        for (long long p : nodes) {
            double rhs = keep[p];
            for (int j = 0; j < field.regimes; ++j) {
                if (j == i)
                    continue;
                const double sw = field.at(k, j, p) - tab.cost[tab.cost_at(i, j, p)];
                rhs = std::max(rhs, sw);
            }
            const double res = std::abs(field.at(k, i, p) - rhs);
            report.samples += 1;
            if (res > report.max_residual) {
                report.max_residual = res;
                report.worst = {k, i, p};
            }
        }
    }
    return report;
}

GrowthRegions radial_regions(const Grid& grid, double r_fit, double r_test) {
    if (!(r_fit > 0.0) || !(r_test > r_fit))
        throw ConfigError("growth regions: need 0 < r_fit < r_test");
    GrowthRegions regions;
    for (long long p = 0; p < grid.nnodes; ++p) {
        if (grid.dist[p] != 0.0)
            continue;
        const double r = norm2(grid.coords(p));
        if (r <= r_fit)
            regions.fit_nodes.push_back(p);
        else if (r <= r_test)
            regions.test_nodes.push_back(p);
    }
    return regions;
}

std::string GrowthReport::summary() const {
    return "growth: upper C=" + fmt(upper_c) + " excess=" + fmt(upper_excess) +
           ", lower C=" + fmt(lower_c) + " (eta=" + fmt(eta) + ") excess=" + fmt(lower_excess);
}

GrowthReport growth_check(const std::vector<const ValueField*>& fields,
                          const GrowthRegions& regions, double eta) {
    if (fields.empty())
        throw ConfigError("growth check: need at least one field");
    if (!(eta > 0.0))
        throw ConfigError("growth check: eta must be positive");
    {
        std::unordered_set<long long> fit(regions.fit_nodes.begin(), regions.fit_nodes.end());
        for (long long q : regions.test_nodes)
            if (fit.count(q))
                throw ConfigError("growth check: fit and test regions overlap at node " +
                                  std::to_string(q));
    }

    GrowthReport report;
    report.eta = eta;
    report.upper_excess = -std::numeric_limits<double>::infinity();
    report.lower_excess = -std::numeric_limits<double>::infinity();

    auto scan = [&](const std::vector<long long>& nodes, bool fit) {
        for (const ValueField* f : fields) {
            const Grid& grid = *f->grid;
            for (long long p : nodes) {
                const double r = norm2(grid.coords(p));
                const double up_w = 1.0 + r;
                const double lo_w = 1.0 + std::pow(r, eta);
                for (int k = 0; k < f->levels; ++k) {
                    for (int i = 0; i < f->regimes; ++i) {
                        const double v = f->at(k, i, p);
                        if (fit) {
                            report.upper_c = std::max(report.upper_c, v / up_w);
                            report.lower_c = std::max(report.lower_c, -v / lo_w);
                        } else {
                            const double ue = v - report.upper_c * up_w;
                            const double le = -v - report.lower_c * lo_w;
                            if (ue > report.upper_excess) {
                                report.upper_excess = ue;
                                report.upper_worst_node = p;
                            }
                            if (le > report.lower_excess) {
                                report.lower_excess = le;
                                report.lower_worst_node = p;
                            }
                        }
                    }
                }
            }
        }
    };
    scan(regions.fit_nodes, true);
    scan(regions.test_nodes, false);
    if (regions.test_nodes.empty()) {
        report.upper_excess = 0.0;
        report.lower_excess = 0.0;
    }
    return report;
}

std::string ObstacleReport::summary() const {
    return "obstacle slack: min " + fmt(min_slack) + " at level " + std::to_string(level) +
           ", regime " + std::to_string(regime + 1) + ", node " + std::to_string(node);
}

ObstacleReport obstacle_check(const ValueField& field, const ModelSpec& spec) {
    const Grid& grid = *field.grid;
    if (field.regimes != spec.regimes || grid.dim != spec.dim)
        throw ConfigError("obstacle check: field does not match the model");

    ObstacleReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k < field.levels; ++k) {
        for (long long p = 0; p < grid.nnodes; ++p) {
            const Point x = grid.coords(p);
            for (int i = 0; i < field.regimes; ++i) {
                double env = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < field.regimes; ++j) {
                    if (j == i)
                        continue;
                    env = std::max(env, field.at(k, j, p) - spec.coeffs.cost(x, i, j));
                }
                const double slack = field.at(k, i, p) - env;
                if (slack < report.min_slack) {
                    report.min_slack = slack;
                    report.level = k;
                    report.regime = i;
                    report.node = p;
                }
            }
        }
    }
    return report;
}

FieldRange field_range_on_domain(const ValueField& field) {
    const Grid& grid = *field.grid;
    FieldRange range{std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
    for (int k = 0; k < field.levels; ++k)
        for (int i = 0; i < field.regimes; ++i) {
            const double* v = field.level_data(k, i);
            for (long long p = 0; p < grid.nnodes; ++p) {
                if (grid.dist[p] != 0.0)
                    continue;
                range.min = std::min(range.min, v[p]);
                range.max = std::max(range.max, v[p]);
            }
        }
    return range;
}

} // namespace switchgrid::harness
