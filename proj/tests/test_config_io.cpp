#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "switchgrid/config.hpp"
#include "switchgrid/errors.hpp"
#include "switchgrid/io.hpp"
#include "switchgrid/solver.hpp"
#include "test_util.hpp"

using namespace switchgrid;
namespace fs = std::filesystem;

namespace {

fs::path fixture(const std::string& name) { return fs::path(FIXTURES_DIR) / name; }

ValueField small_ce_field(const ModelSpec& model) {
    GridSpec gs;
    gs.lo = {-1.0, -0.5};
    gs.hi = {1.0, 2.0};
    gs.nodes = {11, 16};
    gs.time_steps = 6;
    gs.min_penalty = 2;
    return solve(model, build_grid(model, gs), 2, {});
}

} // namespace

TEST_SUITE("config_io") {

TEST_CASE("builtin model files load with their defaults") {
    const auto ce = config::load_model(fixture("counterexample.json"));
    CHECK(ce.name == "counterexample(horizon=1,cost=0.5)");
    CHECK(ce.dim == 2);
    CHECK(ce.regimes == 2);
    CHECK(ce.horizon == 1.0);
    CHECK(ce.coeffs.cost({0.0, 0.0}, 0, 1) == 0.5);

    const auto ps = config::load_model(fixture("pumped_storage.json"));
    CHECK(ps.regimes == 3);
    CHECK(ps.dim == 2);
    CHECK(ps.name.substr(0, 15) == "pumped_storage(");
}

TEST_CASE("constant-coefficient model files") {
    const auto m = config::load_model(fixture("constant_model.json"));
    CHECK(m.name == "constant");
    CHECK(m.dim == 1);
    CHECK(m.regimes == 2);
    CHECK(m.lipschitz == 0.0);
    CHECK(m.min_cost == 0.5);
    CHECK(m.coeffs.running({0.3}, 0) == 1.0);
    CHECK(m.coeffs.running({0.3}, 1) == 0.0);
    CHECK(m.coeffs.cost({0.3}, 1, 0) == 0.5);
    CHECK(m.domain.distance({-0.5}) == 0.5);
    // Sampling box: the domain box padded by a quarter width per side.
    CHECK(m.sample_lo[0] == -0.25);
    CHECK(m.sample_hi[0] == 1.25);
    CHECK(m.default_start[0] == 0.5);
}

TEST_CASE("model file validation") {
    testutil::TempDir dir;
    auto reject = [&](const std::string& name, const std::string& body) {
        const auto p = dir.file(name);
        testutil::spit(p, body);
        CHECK_THROWS_AS(config::load_model(p), ConfigError);
    };

    CHECK_THROWS_AS(config::load_model(dir.file("missing.json")), ConfigError);
    reject("malformed.json", "{ nope");
    reject("unknown_key.json",
           R"({"horizon": 1, "coefficients": {"builtin": "counterexample"}, "extra": 1})");
    reject("no_horizon.json", R"({"coefficients": {"builtin": "counterexample"}})");
    reject("bad_dim.json",
           R"({"dim": 3, "horizon": 1, "coefficients": {"builtin": "counterexample"}})");
    reject("bad_builtin.json",
           R"({"horizon": 1, "coefficients": {"builtin": "mystery"}})");
    reject("no_domain.json", R"({
        "dim": 1, "regimes": 2, "horizon": 1,
        "coefficients": {"constant": {
            "drift": [[0],[0]], "vol": [[[0]],[[0]]],
            "running": [0,0], "terminal": [0,0], "cost": [[0,1],[1,0]]}}})");
    reject("bad_cost.json", R"({
        "dim": 1, "regimes": 2, "horizon": 1,
        "coefficients": {"constant": {
            "drift": [[0],[0]], "vol": [[[0]],[[0]]],
            "running": [0,0], "terminal": [0,0], "cost": [[0,-1],[1,0]]}},
        "domain": {"kind": "box", "lo": [0], "hi": [1]}})");
    reject("bad_vol.json", R"({
        "dim": 1, "regimes": 2, "horizon": 1,
        "coefficients": {"constant": {
            "drift": [[0],[0]], "vol": [[[0,0]],[[0]]],
            "running": [0,0], "terminal": [0,0], "cost": [[0,1],[1,0]]}},
        "domain": {"kind": "box", "lo": [0], "hi": [1]}})");
}

TEST_CASE("domain blocks parse every kind") {
    testutil::TempDir dir;
    auto with_domain = [&](const std::string& name, const std::string& domain) {
        const auto p = dir.file(name);
        testutil::spit(p, std::string(R"({
            "dim": 1, "regimes": 2, "horizon": 1,
            "coefficients": {"constant": {
                "drift": [[0],[0]], "vol": [[[0]],[[0]]],
                "running": [0,0], "terminal": [0,0], "cost": [[0,1],[1,0]]}},
            "domain": )") + domain + "}");
        return config::load_model(p);
    };

    const auto half = with_domain("half.json",
                                  R"({"kind": "half_space", "normal": [1], "offset": 0})");
    CHECK(half.domain.distance({2.0}) == 2.0);
    CHECK(half.domain.contains({-2.0}));

    const auto ball = with_domain("ball.json",
                                  R"({"kind": "ball", "center": [1], "radius": 2})");
    CHECK(ball.domain.distance({5.0}) == 2.0);
    CHECK(ball.sample_lo[0] == -2.0); // finite bounds override the sampling box
    CHECK(ball.sample_hi[0] == 4.0);

    const auto wedge = with_domain("wedge.json",
                                   R"({"kind": "half_space_intersection",
                                       "normals": [[-1], [1]], "offsets": [0, 2]})");
    CHECK(wedge.domain.contains({1.0}));
    CHECK_FALSE(wedge.domain.contains({3.0}));

    const auto open_box = with_domain("openbox.json",
                                      R"({"kind": "box", "lo": [0], "hi": ["inf"]})");
    CHECK(open_box.domain.contains({100.0}));
    CHECK(open_box.domain.distance({-0.5}) == 0.5);
    CHECK(open_box.sample_lo[0] == -1.0); // half-open: defaults kept

    const auto neg_box = with_domain("negbox.json",
                                     R"({"kind": "box", "lo": ["-inf"], "hi": [0]})");
    CHECK(neg_box.domain.contains({-100.0}));
    CHECK(neg_box.domain.distance({1.0}) == 1.0);

    CHECK_THROWS_AS(with_domain("badkind.json", R"({"kind": "torus"})"), ConfigError);
    CHECK_THROWS_AS(with_domain("nokind.json", R"({"lo": [0], "hi": [1]})"), ConfigError);
}

TEST_CASE("model constants can be overridden") {
    testutil::TempDir dir;
    const auto p = dir.file("tuned.json");
    testutil::spit(p, R"({
        "horizon": 1,
        "coefficients": {"builtin": "counterexample"},
        "constants": {"L": 7, "c_bar": 0.25}})");
    const auto m = config::load_model(p);
    CHECK(m.lipschitz == 7.0);
    CHECK(m.min_cost == 0.25);
}

TEST_CASE("run config fixture") {
    const auto rc = config::load_run_config(fixture("run_c8.json"));
    CHECK(rc.model.name == "counterexample(horizon=1,cost=0.5)");
    CHECK(rc.grid.nodes == std::vector<int>{21, 31});
    CHECK(rc.grid.time_steps == 12);
    CHECK(rc.grid.min_penalty == 4); // first ladder level
    CHECK(rc.penalty_levels == std::vector<int>{4, 16});
    CHECK(rc.simulate.paths == 200);
    CHECK(rc.simulate.seed == 42);
    CHECK(rc.simulate.start == Point{0.0, 0.2});
    CHECK(rc.simulate.start_regime == 0); // stored 0-based
    CHECK(rc.simulate.dump_paths == 3);
    CHECK(rc.verify.dpp_lookahead == 1);
    CHECK(rc.verify.eps_obs == 1e-9);
    CHECK(rc.output_dir == "out");

    // The grid must actually build and satisfy the stability bound.
    const auto grid = build_grid(rc.model, rc.grid);
    const double dt = rc.model.horizon / rc.grid.time_steps;
    CHECK(dt <= cfl_timestep(rc.model, *grid) * (1.0 + 1e-9));
}

TEST_CASE("run config validation") {
    testutil::TempDir dir;
    // A model file next to the config, referenced relatively.
    testutil::spit(dir.file("m.json"),
                   R"({"horizon": 1, "coefficients": {"builtin": "counterexample"}})");
    auto reject = [&](const std::string& name, const std::string& body) {
        const auto p = dir.file(name);
        testutil::spit(p, body);
        CHECK_THROWS_AS(config::load_run_config(p), ConfigError);
    };

    reject("no_model.json", R"({"penalty": {"levels": [1]}})");
    reject("no_penalty.json", R"({"model": "m.json"})");
    reject("empty_levels.json", R"({"model": "m.json", "penalty": {"levels": []}})");
    reject("zero_level.json", R"({"model": "m.json", "penalty": {"levels": [0, 4]}})");
    reject("descending.json", R"({"model": "m.json", "penalty": {"levels": [4, 1]}})");
    reject("float_level.json", R"({"model": "m.json", "penalty": {"levels": [1.5]}})");
    reject("bad_scheme.json",
           R"({"model": "m.json", "penalty": {"levels": [1]}, "scheme": {"cfl": 0.5}})");
    reject("regime_zero.json", R"({"model": "m.json", "penalty": {"levels": [1]},
                                   "simulate": {"start_regime": 0}})");
    reject("regime_high.json", R"({"model": "m.json", "penalty": {"levels": [1]},
                                   "simulate": {"start_regime": 3}})");
    reject("neg_dump.json", R"({"model": "m.json", "penalty": {"levels": [1]},
                                "simulate": {"dump_paths": -1}})");
}

TEST_CASE("default grid clears the penalty ramp") {
    const auto ce = config::load_model(fixture("counterexample.json"));
    const auto gs = config::default_grid(ce, 51, 1);
    CHECK(gs.lo[1] == -1.05);
    CHECK(gs.nodes == std::vector<int>{51, 51});
    CHECK(gs.min_penalty == 1);
    const auto grid = build_grid(ce, gs);
    CHECK(ce.horizon / gs.time_steps <= cfl_timestep(ce, *grid) * (1.0 + 1e-9));

    const auto ps = config::load_model(fixture("pumped_storage.json"));
    const auto pgs = config::default_grid(ps, 31, 1);
    CHECK(pgs.lo[0] == -1.05);
    CHECK(pgs.hi[0] == 2.05);
    CHECK(build_grid(ps, pgs)->nnodes == 31LL * 31LL);
}

TEST_CASE("field artifacts round-trip bit for bit") {
    const auto model = config::load_model(fixture("counterexample.json"));
    const auto field = small_ce_field(model);

    testutil::TempDir dir;
    const auto csv = dir.file("field.csv");
    io::write_field(csv, field);
    CHECK(fs::exists(csv));
    CHECK(fs::exists(dir.file("field.csv.meta.json")));
    CHECK_FALSE(fs::exists(dir.file("field.csv.tmp")));

    const auto back = io::read_field(csv, model);
    CHECK(back.levels == field.levels);
    CHECK(back.regimes == field.regimes);
    CHECK(back.penalty == field.penalty);
    CHECK(back.dt == field.dt);
    CHECK(back.horizon == field.horizon);
    CHECK(back.model_name == field.model_name);
    REQUIRE(back.v.size() == field.v.size());
    bool identical = true;
    for (std::size_t i = 0; i < field.v.size(); ++i)
        identical = identical && back.v[i] == field.v[i];
    CHECK(identical);
}

TEST_CASE("field artifacts are deterministic") {
    const auto model = config::load_model(fixture("counterexample.json"));
    const auto a = small_ce_field(model);
    const auto b = small_ce_field(model);
    CHECK(io::field_csv(a) == io::field_csv(b));
    CHECK(io::field_meta(a).dump(2) == io::field_meta(b).dump(2));
}

TEST_CASE("field reader rejects damage") {
    const auto model = config::load_model(fixture("counterexample.json"));
    const auto field = small_ce_field(model);
    testutil::TempDir dir;
    const auto csv = dir.file("field.csv");
    io::write_field(csv, field);

    // Extra row beyond the grid.
    testutil::spit(csv, testutil::slurp(csv) + "0,0,0,1,0\n");
    CHECK_THROWS_AS(io::read_field(csv, model), ConfigError);

    // Truncated by one row.
    io::write_field(csv, field);
    auto text = testutil::slurp(csv);
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    testutil::spit(csv, text);
    CHECK_THROWS_AS(io::read_field(csv, model), ConfigError);

    // Unparseable cell.
    io::write_field(csv, field);
    testutil::spit(csv, "t,x_1,x_2,regime,value\na,b,c,d,e\n");
    CHECK_THROWS_AS(io::read_field(csv, model), ConfigError);

    // Wrong model for the artifact.
    io::write_field(csv, field);
    const auto ps = config::load_model(fixture("pumped_storage.json"));
    CHECK_THROWS_AS(io::read_field(csv, ps), ConfigError);

    // Missing sidecar.
    fs::remove(dir.file("field.csv.meta.json"));
    CHECK_THROWS_AS(io::read_field(csv, model), ConfigError);
}

TEST_CASE("double formatting round-trips exactly") {
    const double values[] = {0.0,   -0.0,   1.0,      -1.0,          0.1,
                             1.0 / 3.0,     1e300,    4.9406564584124654e-324,
                             -2.5e-12,      123456.75, 1.0 / 12.0};
    for (const double v : values) {
        const std::string s = io::format_double(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
        CHECK(std::signbit(back) == std::signbit(v));
    }
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(-0.0) == "-0");
}

TEST_CASE("json artifacts are stable and sorted") {
    testutil::TempDir dir;
    nlohmann::json j;
    j["beta"] = 2;
    j["alpha"] = 1;
    const auto p = dir.file("doc.json");
    io::write_json(p, j);
    CHECK(testutil::slurp(p) == "{\n  \"alpha\": 1,\n  \"beta\": 2\n}\n");
    CHECK_FALSE(fs::exists(dir.file("doc.json.tmp")));
}

TEST_CASE("trace table format") {
    std::vector<std::vector<TraceRow>> traces(1);
    traces[0].push_back({0.0, {0.5}, 0, "start"});
    traces[0].push_back({1.0, {0.75}, 1, "terminal"});
    CHECK(io::paths_csv(traces, 1) ==
          "path_id,t,x_1,regime,event\n"
          "0,0,0.5,1,start\n"
          "0,1,0.75,2,terminal\n");
}

} // TEST_SUITE
