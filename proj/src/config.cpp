#include "switchgrid/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <string>

#include "json.hpp"

#include "switchgrid/errors.hpp"

namespace switchgrid::config {

namespace {

using nlohmann::json;

json load_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open " + file.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
    if (!obj.is_object())
        throw ConfigError(ctx + ": expected an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError(ctx + ": unknown key \"" + item.key() + "\"");
}

double get_number(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key))
        throw ConfigError(ctx + ": missing \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(ctx + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback,
                     const std::string& ctx) {
    return obj.contains(key) ? get_number(obj, key, ctx) : fallback;
}

long long get_int(const json& obj, const std::string& key, const std::string& ctx) {
    if (!obj.contains(key))
        throw ConfigError(ctx + ": missing \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(ctx + ": \"" + key + "\" must be an integer");
    return v.get<long long>();
}

long long get_int_or(const json& obj, const std::string& key, long long fallback,
                     const std::string& ctx) {
    return obj.contains(key) ? get_int(obj, key, ctx) : fallback;
}

// Coordinate that may be "inf" / "-inf" (JSON itself has no infinity literal).
double get_coord(const json& v, const std::string& ctx) {
    if (v.is_number())
        return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
    }
    throw ConfigError(ctx + ": expected a number or \"inf\"/\"-inf\"");
}

Point get_point(const json& obj, const std::string& key, const std::string& ctx,
                bool allow_inf = false) {
    if (!obj.contains(key))
        throw ConfigError(ctx + ": missing \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_array())
        throw ConfigError(ctx + ": \"" + key + "\" must be an array");
    Point out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (allow_inf)
            out.push_back(get_coord(e, ctx + "." + key));
        else if (e.is_number())
            out.push_back(e.get<double>());
        else
            throw ConfigError(ctx + ": \"" + key + "\" must hold numbers");
    }
    return out;
}

ConstraintDomain parse_domain(const json& obj, const std::string& ctx) {
    if (!obj.is_object() || !obj.contains("kind"))
        throw ConfigError(ctx + ": domain needs a \"kind\"");
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "box") {
        check_keys(obj, {"kind", "lo", "hi"}, ctx);
        return ConstraintDomain::box(get_point(obj, "lo", ctx, true),
                                     get_point(obj, "hi", ctx, true));
    }
    if (kind == "half_space") {
        check_keys(obj, {"kind", "normal", "offset"}, ctx);
        return ConstraintDomain::half_space(get_point(obj, "normal", ctx),
                                            get_number(obj, "offset", ctx));
    }
    if (kind == "ball") {
        check_keys(obj, {"kind", "center", "radius"}, ctx);
        return ConstraintDomain::ball(get_point(obj, "center", ctx),
                                      get_number(obj, "radius", ctx));
    }
    if (kind == "half_space_intersection") {
        check_keys(obj, {"kind", "normals", "offsets"}, ctx);
        if (!obj.at("normals").is_array() || !obj.at("offsets").is_array())
            throw ConfigError(ctx + ": \"normals\" and \"offsets\" must be arrays");
        std::vector<Point> normals;
        for (const auto& row : obj.at("normals")) {
            Point n;
            for (const auto& e : row)
                n.push_back(e.get<double>());
            normals.push_back(std::move(n));
        }
        std::vector<double> offsets = obj.at("offsets").get<std::vector<double>>();
        return ConstraintDomain::half_space_intersection(std::move(normals), std::move(offsets));
    }
    throw ConfigError(ctx + ": unknown domain kind \"" + kind + "\"");
}

// Per-regime constant coefficients given literally in the file.
ModelSpec build_constant_model(const json& root, const json& cc, const std::string& ctx) {
    check_keys(cc, {"drift", "vol", "running", "terminal", "cost"}, ctx);
    const int dim = static_cast<int>(get_int(root, "dim", ctx));
    const int m = static_cast<int>(get_int(root, "regimes", ctx));
    if (dim < 1 || dim > 3 || m < 2)
        throw ConfigError(ctx + ": need 1 <= dim <= 3 and regimes >= 2");

    auto matrix = [&](const std::string& key, std::size_t rows, std::size_t cols) {
        if (!cc.contains(key) || !cc.at(key).is_array() || cc.at(key).size() != rows)
            throw ConfigError(ctx + ": \"" + key + "\" must be an array of " +
                              std::to_string(rows) + " rows");
        std::vector<double> out;
        for (const auto& row : cc.at(key)) {
            if (!row.is_array() || row.size() != cols)
                throw ConfigError(ctx + ": \"" + key + "\" rows must have " +
                                  std::to_string(cols) + " entries");
            for (const auto& e : row)
                out.push_back(e.get<double>());
        }
        return out;
    };

    auto drift = matrix("drift", m, dim); // [i][k]
    std::vector<double> vol;              // [i][k][l]
    {
        const std::string key = "vol";
        if (!cc.contains(key) || !cc.at(key).is_array() || cc.at(key).size() != (std::size_t)m)
            throw ConfigError(ctx + ": \"vol\" must hold one d x d matrix per regime");
        for (const auto& mat : cc.at(key)) {
            if (!mat.is_array() || mat.size() != (std::size_t)dim)
                throw ConfigError(ctx + ": \"vol\" matrices must be d x d");
            for (const auto& row : mat) {
                if (!row.is_array() || row.size() != (std::size_t)dim)
                    throw ConfigError(ctx + ": \"vol\" matrices must be d x d");
                for (const auto& e : row)
                    vol.push_back(e.get<double>());
            }
        }
    }
    std::vector<double> running = cc.at("running").get<std::vector<double>>();
    std::vector<double> terminal = cc.at("terminal").get<std::vector<double>>();
    if (running.size() != (std::size_t)m || terminal.size() != (std::size_t)m)
        throw ConfigError(ctx + ": \"running\" and \"terminal\" need one value per regime");
    auto cost = matrix("cost", m, m); // [i][j]
    double floor = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j)
                continue;
            if (!(cost[static_cast<std::size_t>(i) * m + j] > 0.0))
                throw ConfigError(ctx + ": switch costs must be positive");
            floor = std::min(floor, cost[static_cast<std::size_t>(i) * m + j]);
        }

    ModelSpec spec;
    spec.dim = dim;
    spec.regimes = m;
    spec.horizon = get_number(root, "horizon", ctx);
    spec.coeffs.drift = [drift, dim](const Point&, int i) {
        return Point(drift.begin() + static_cast<std::ptrdiff_t>(i) * dim,
                     drift.begin() + static_cast<std::ptrdiff_t>(i + 1) * dim);
    };
    spec.coeffs.vol = [vol, dim](const Point&, int i) {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(dim) * dim;
        return std::vector<double>(vol.begin() + i * n, vol.begin() + (i + 1) * n);
    };
    spec.coeffs.running = [running](const Point&, int i) { return running[i]; };
    spec.coeffs.terminal = [terminal](const Point&, int i) { return terminal[i]; };
    spec.coeffs.cost = [cost, m](const Point&, int i, int j) {
        return cost[static_cast<std::size_t>(i) * m + j];
    };
    spec.lipschitz = 0.0; // constants
    spec.min_cost = floor;
    spec.name = "constant";
    return spec;
}

} // namespace

ModelSpec load_model(const std::filesystem::path& file) {
    const json root = load_json_file(file);
    const std::string ctx = file.filename().string();
    check_keys(root, {"dim", "regimes", "horizon", "coefficients", "domain", "constants"}, ctx);
    if (!root.contains("coefficients"))
        throw ConfigError(ctx + ": missing \"coefficients\"");
    const json& co = root.at("coefficients");
    if (!co.is_object())
        throw ConfigError(ctx + ": \"coefficients\" must be an object");

    ModelSpec spec;
    if (co.contains("builtin")) {
        check_keys(co, {"builtin", "params"}, ctx);
        const std::string name = co.at("builtin").get<std::string>();
        const json params = co.contains("params") ? co.at("params") : json::object();
        const double horizon = get_number(root, "horizon", ctx);
        if (name == "counterexample") {
            check_keys(params, {"cost"}, ctx + ".params");
            spec = builtin_counterexample(horizon, get_number_or(params, "cost", 0.5, ctx));
        } else if (name == "pumped_storage") {
            check_keys(params,
                       {"l_max", "kappa", "theta", "xi", "switch_cost", "start_level",
                        "start_price"},
                       ctx + ".params");
            PumpedStorageParams p;
            p.horizon = horizon;
            p.l_max = get_number_or(params, "l_max", p.l_max, ctx);
            p.kappa = get_number_or(params, "kappa", p.kappa, ctx);
            p.theta = get_number_or(params, "theta", p.theta, ctx);
            p.xi = get_number_or(params, "xi", p.xi, ctx);
            p.switch_cost = get_number_or(params, "switch_cost", p.switch_cost, ctx);
            p.l0 = get_number_or(params, "start_level", p.l0, ctx);
            p.p0 = get_number_or(params, "start_price", p.p0, ctx);
            spec = builtin_pumped_storage(p);
        } else {
            throw ConfigError(ctx + ": unknown builtin \"" + name + "\"");
        }
        if (root.contains("dim") && get_int(root, "dim", ctx) != spec.dim)
            throw ConfigError(ctx + ": \"dim\" does not match the builtin");
        if (root.contains("regimes") && get_int(root, "regimes", ctx) != spec.regimes)
            throw ConfigError(ctx + ": \"regimes\" does not match the builtin");
    } else if (co.contains("constant")) {
        check_keys(co, {"constant"}, ctx);
        spec = build_constant_model(root, co.at("constant"), ctx);
        if (!root.contains("domain"))
            throw ConfigError(ctx + ": constant-coefficient models need a \"domain\"");
        // Sampling box defaults to the unit box around the origin; overridden
        // below if the domain has finite bounds.
        spec.sample_lo.assign(spec.dim, -1.0);
        spec.sample_hi.assign(spec.dim, 1.0);
        spec.default_start.assign(spec.dim, 0.0);
    } else {
        throw ConfigError(ctx + ": \"coefficients\" needs \"builtin\" or \"constant\"");
    }

    if (root.contains("domain")) {
        spec.domain = parse_domain(root.at("domain"), ctx);
        Point lo, hi;
        spec.domain.axis_bounds(lo, hi);
        if (static_cast<int>(lo.size()) != spec.dim)
            throw ConfigError(ctx + ": domain dimension does not match the model");
        for (int k = 0; k < spec.dim; ++k) {
            if (std::isfinite(lo[k]) && std::isfinite(hi[k])) {
                const double pad = 0.25 * (hi[k] - lo[k]);
                spec.sample_lo[k] = lo[k] - pad;
                spec.sample_hi[k] = hi[k] + pad;
                spec.default_start[k] = 0.5 * (lo[k] + hi[k]);
            }
        }
    }
    if (root.contains("constants")) {
        const json& cn = root.at("constants");
        check_keys(cn, {"L", "c_bar"}, ctx + ".constants");
        spec.lipschitz = get_number_or(cn, "L", spec.lipschitz, ctx);
        spec.min_cost = get_number_or(cn, "c_bar", spec.min_cost, ctx);
    }
    spec.check_shape();
    return spec;
}

GridSpec default_grid(const ModelSpec& spec, int nodes_per_axis, int min_penalty) {
    GridSpec gspec;
    gspec.lo = spec.sample_lo;
    gspec.hi = spec.sample_hi;
    // Where the constraint is bounded, the box must clear the penalty ramp
    // (width 1/min_penalty) so the smallest ladder rung still saturates
    // on-grid. 5% slack keeps the margin rule away from rounding.
    const double clear = 1.05 / std::max(1, min_penalty);
    Point dlo(spec.dim), dhi(spec.dim);
    spec.domain.axis_bounds(dlo, dhi);
    for (int k = 0; k < spec.dim; ++k) {
        if (std::isfinite(dlo[k]))
            gspec.lo[k] = std::min(gspec.lo[k], dlo[k] - clear);
        if (std::isfinite(dhi[k]))
            gspec.hi[k] = std::max(gspec.hi[k], dhi[k] + clear);
    }
    gspec.nodes.assign(spec.dim, nodes_per_axis);
    gspec.time_steps = 1;
    gspec.min_penalty = min_penalty;
    GridPtr probe = build_grid(spec, gspec);
    const double dt = cfl_timestep(spec, *probe);
    gspec.time_steps = std::max(1, static_cast<int>(std::ceil(spec.horizon / dt - 1e-9)));
    return gspec;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    const json root = load_json_file(file);
    const std::string ctx = file.filename().string();
    check_keys(root, {"model", "grid", "penalty", "scheme", "simulate", "verify", "output"}, ctx);

    RunConfig rc;
    rc.config_dir = file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");

    if (!root.contains("model") || !root.at("model").is_string())
        throw ConfigError(ctx + ": missing \"model\" file path");
    rc.model_file = root.at("model").get<std::string>();
    rc.model = load_model(rc.config_dir / rc.model_file);

    if (!root.contains("penalty"))
        throw ConfigError(ctx + ": missing \"penalty\"");
    check_keys(root.at("penalty"), {"levels"}, ctx + ".penalty");
    if (!root.at("penalty").contains("levels") || !root.at("penalty").at("levels").is_array())
        throw ConfigError(ctx + ": \"penalty.levels\" must be an array");
    for (const auto& e : root.at("penalty").at("levels")) {
        if (!e.is_number_integer())
            throw ConfigError(ctx + ": penalty levels must be integers");
        rc.penalty_levels.push_back(e.get<int>());
    }
    if (rc.penalty_levels.empty())
        throw ConfigError(ctx + ": \"penalty.levels\" must not be empty");
    for (std::size_t i = 0; i < rc.penalty_levels.size(); ++i) {
        if (rc.penalty_levels[i] < 1)
            throw ConfigError(ctx + ": penalty levels must be >= 1");
        if (i > 0 && rc.penalty_levels[i] < rc.penalty_levels[i - 1])
            throw ConfigError(ctx + ": penalty levels must be ascending");
    }

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        check_keys(g, {"lo", "hi", "nodes", "time_steps"}, ctx + ".grid");
        rc.grid.lo = get_point(g, "lo", ctx + ".grid");
        rc.grid.hi = get_point(g, "hi", ctx + ".grid");
        if (!g.contains("nodes") || !g.at("nodes").is_array())
            throw ConfigError(ctx + ": \"grid.nodes\" must be an array");
        for (const auto& e : g.at("nodes"))
            rc.grid.nodes.push_back(static_cast<int>(e.get<long long>()));
        rc.grid.time_steps = static_cast<int>(get_int(g, "time_steps", ctx + ".grid"));
        rc.grid.min_penalty = rc.penalty_levels.front();
    } else {
        rc.grid = default_grid(rc.model, 51, rc.penalty_levels.front());
    }

    if (root.contains("scheme")) {
        const json& s = root.at("scheme");
        check_keys(s, {"dt", "obstacle_tol", "max_sweeps"}, ctx + ".scheme");
        rc.scheme.dt = get_number_or(s, "dt", 0.0, ctx + ".scheme");
        rc.scheme.obstacle_tol = get_number_or(s, "obstacle_tol", 0.0, ctx + ".scheme");
        rc.scheme.max_sweeps =
            static_cast<int>(get_int_or(s, "max_sweeps", 0, ctx + ".scheme"));
    }

    if (root.contains("simulate")) {
        const json& s = root.at("simulate");
        check_keys(s, {"paths", "dt", "seed", "start", "start_regime", "dump_paths"},
                   ctx + ".simulate");
        rc.simulate.paths = get_int_or(s, "paths", rc.simulate.paths, ctx + ".simulate");
        rc.simulate.dt = get_number_or(s, "dt", 0.0, ctx + ".simulate");
        if (s.contains("seed")) {
            if (!s.at("seed").is_number_unsigned() && !s.at("seed").is_number_integer())
                throw ConfigError(ctx + ": \"simulate.seed\" must be an integer");
            rc.simulate.seed = s.at("seed").get<std::uint64_t>();
        }
        if (s.contains("start"))
            rc.simulate.start = get_point(s, "start", ctx + ".simulate");
        if (s.contains("start_regime")) {
            const long long r = get_int(s, "start_regime", ctx + ".simulate");
            if (r < 1 || r > rc.model.regimes)
                throw ConfigError(ctx + ": \"simulate.start_regime\" is 1-based and must be in [1, " +
                                  std::to_string(rc.model.regimes) + "]");
            rc.simulate.start_regime = static_cast<int>(r - 1);
        }
        rc.simulate.dump_paths =
            static_cast<int>(get_int_or(s, "dump_paths", 0, ctx + ".simulate"));
        if (rc.simulate.dump_paths < 0)
            throw ConfigError(ctx + ": \"simulate.dump_paths\" must be >= 0");
    }

    if (root.contains("verify")) {
        const json& v = root.at("verify");
        check_keys(v,
                   {"eps_obs", "dpp_lookahead", "ladder_tol", "growth_eta", "growth_r_fit",
                    "growth_r_test", "growth_tol", "field_override"},
                   ctx + ".verify");
        rc.verify.eps_obs = get_number_or(v, "eps_obs", rc.verify.eps_obs, ctx + ".verify");
        rc.verify.dpp_lookahead =
            static_cast<int>(get_int_or(v, "dpp_lookahead", rc.verify.dpp_lookahead, ctx));
        rc.verify.ladder_tol = get_number_or(v, "ladder_tol", rc.verify.ladder_tol, ctx);
        rc.verify.growth_eta = get_number_or(v, "growth_eta", rc.verify.growth_eta, ctx);
        rc.verify.growth_r_fit = get_number_or(v, "growth_r_fit", 0.0, ctx);
        rc.verify.growth_r_test = get_number_or(v, "growth_r_test", 0.0, ctx);
        rc.verify.growth_tol = get_number_or(v, "growth_tol", rc.verify.growth_tol, ctx);
        if (v.contains("field_override"))
            rc.verify.field_override = v.at("field_override").get<std::string>();
    }

    if (root.contains("output")) {
        check_keys(root.at("output"), {"dir"}, ctx + ".output");
        if (root.at("output").contains("dir"))
            rc.output_dir = root.at("output").at("dir").get<std::string>();
    }
    return rc;
}

} // namespace switchgrid::config
