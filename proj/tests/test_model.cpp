#include "doctest.h"

#include <cmath>
#include <limits>

#include "switchgrid/errors.hpp"
#include "switchgrid/model.hpp"
#include "test_util.hpp"

using namespace switchgrid;

namespace {

ModelSpec two_regime_base() {
    testutil::ConstModel c;
    c.drift = {{0.0}, {0.0}};
    c.vol = {{0.0}, {0.0}};
    c.running = {0.0, 0.0};
    c.terminal = {0.0, 0.0};
    c.cost = {{0.0, 1.0}, {1.0, 0.0}};
    return testutil::make_const_model(1, 1.0, c, testutil::unbounded(1));
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("two-regime builtin coefficients") {
    const auto spec = builtin_counterexample(1.0, 0.5);
    CHECK(spec.dim == 2);
    CHECK(spec.regimes == 2);
    CHECK(spec.horizon == 1.0);
    CHECK(spec.name == "counterexample(horizon=1,cost=0.5)");
    CHECK(spec.lipschitz == 1.0);
    CHECK(spec.min_cost == 0.5);
    CHECK(spec.default_regime == 0);
    REQUIRE(spec.default_start.size() == 2);
    CHECK(spec.default_start[0] == 0.0);
    CHECK(spec.default_start[1] == doctest::Approx(0.2).epsilon(1e-15));

    const Point x{0.7, 0.3};
    const auto mu0 = spec.coeffs.drift(x, 0);
    CHECK(mu0[0] == 0.0);
    CHECK(mu0[1] == -1.0);
    const auto mu1 = spec.coeffs.drift(x, 1);
    CHECK(mu1[0] == 0.0);
    CHECK(mu1[1] == 0.0);
    for (double s : spec.coeffs.vol(x, 0)) CHECK(s == 0.0);
    CHECK(spec.coeffs.running(x, 0) == 1.0);
    CHECK(spec.coeffs.running(x, 1) == 1.0);
    CHECK(spec.coeffs.terminal(x, 0) == 0.0);
    CHECK(spec.coeffs.cost(x, 0, 1) == 0.5);
    CHECK(spec.coeffs.cost(x, 1, 0) == 0.5);

    // Constraint set is the closed upper half-plane in the second coordinate.
    CHECK(spec.domain.contains({3.0, 0.0}));
    CHECK(spec.domain.distance({3.0, -0.25}) == 0.25);
    CHECK(spec.domain.distance({-100.0, 42.0}) == 0.0);

    CHECK(spec.sample_lo[0] == -2.0);
    CHECK(spec.sample_lo[1] == -1.0);
    CHECK(spec.sample_hi[0] == 2.0);
    CHECK(spec.sample_hi[1] == 2.0);
    CHECK_NOTHROW(spec.check_shape());
}

TEST_CASE("two-regime builtin validates parameters") {
    CHECK_THROWS_AS(builtin_counterexample(0.0, 0.5), ConfigError);
    CHECK_THROWS_AS(builtin_counterexample(-1.0, 0.5), ConfigError);
    CHECK_THROWS_AS(builtin_counterexample(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(builtin_counterexample(1.0, -0.5), ConfigError);
}

TEST_CASE("storage builtin coefficients") {
    const auto spec = builtin_pumped_storage({});
    CHECK(spec.dim == 2);
    CHECK(spec.regimes == 3);
    CHECK(spec.horizon == 1.0);
    CHECK(spec.lipschitz == 2.0);
    CHECK(spec.min_cost == 0.25);
    CHECK(spec.default_regime == 1);
    CHECK(spec.default_start[0] == 0.5);
    CHECK(spec.default_start[1] == 5.0);

    const Point x{0.3, 4.0};
    const auto pump = spec.coeffs.drift(x, 0);
    CHECK(pump[0] == 1.0);
    CHECK(pump[1] == doctest::Approx(2.0).epsilon(1e-15)); // kappa (theta - price)
    CHECK(spec.coeffs.drift(x, 1)[0] == 0.0);
    CHECK(spec.coeffs.drift(x, 2)[0] == -1.0);
    const auto sg = spec.coeffs.vol(x, 2);
    CHECK(sg[0] == 0.0);
    CHECK(sg[1] == 0.0);
    CHECK(sg[2] == 0.0);
    CHECK(sg[3] == 1.5);
    CHECK(spec.coeffs.running(x, 0) == -4.0);
    CHECK(spec.coeffs.running(x, 1) == 0.0);
    CHECK(spec.coeffs.running(x, 2) == 4.0);
    CHECK(spec.coeffs.terminal(x, 0) == 0.0);
    CHECK(spec.coeffs.cost(x, 2, 0) == 0.25);

    // Level axis is clamped to [0, l_max], price is free.
    CHECK(spec.domain.contains({0.5, -30.0}));
    CHECK(spec.domain.distance({-0.5, 100.0}) == 0.5);
    CHECK(spec.domain.distance({1.2, 0.0}) == doctest::Approx(0.2).epsilon(1e-14));

    // Sampling box: half a level outside the reservoir, five stationary
    // standard deviations around the price mean.
    CHECK(spec.sample_lo[0] == -0.5);
    CHECK(spec.sample_hi[0] == 1.5);
    CHECK(spec.sample_lo[1] == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(spec.sample_hi[1] == doctest::Approx(8.75).epsilon(1e-15));
}

TEST_CASE("storage builtin validates parameters") {
    PumpedStorageParams p;
    p.l_max = 0.0;
    CHECK_THROWS_AS(builtin_pumped_storage(p), ConfigError);
    p = {};
    p.xi = -0.1;
    CHECK_THROWS_AS(builtin_pumped_storage(p), ConfigError);
    p = {};
    p.switch_cost = 0.0;
    CHECK_THROWS_AS(builtin_pumped_storage(p), ConfigError);
    p = {};
    p.horizon = -2.0;
    CHECK_THROWS_AS(builtin_pumped_storage(p), ConfigError);
    p = {};
    p.kappa = -1.0;
    CHECK_THROWS_AS(builtin_pumped_storage(p), ConfigError);
}

TEST_CASE("storage price band degenerates gracefully") {
    PumpedStorageParams p;
    p.kappa = 0.0;
    const auto spec = builtin_pumped_storage(p);
    // No mean reversion: band falls back to max(1, 5 xi).
    CHECK(spec.sample_hi[1] == doctest::Approx(5.0 + 7.5).epsilon(1e-15));
    CHECK(spec.lipschitz == 1.0);
}

TEST_CASE("shape check rejects inconsistent specs") {
    auto spec = two_regime_base();
    CHECK_NOTHROW(spec.check_shape());

    spec.dim = 0;
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
    spec.dim = 4;
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
    spec = two_regime_base();
    spec.regimes = 1;
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
    spec = two_regime_base();
    spec.horizon = 0.0;
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
    spec = two_regime_base();
    spec.domain = testutil::unbounded(2);
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
    spec = two_regime_base();
    spec.coeffs.terminal = nullptr;
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
    spec = two_regime_base();
    spec.lipschitz = -1.0;
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
    spec = two_regime_base();
    spec.sample_lo = {0.0};
    spec.sample_hi = {0.0};
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
    spec = two_regime_base();
    spec.sample_hi = {std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(spec.check_shape(), ConfigError);
}

TEST_CASE("declared constants verify against sampled quotients") {
    const auto spec = builtin_counterexample(1.0, 0.5);
    const auto rep = validate_model(spec, 200, 11);
    CHECK(rep.pass);
    CHECK(rep.lipschitz_ok);
    CHECK(rep.cost_floor_ok);
    CHECK(rep.min_sampled_cost == 0.5);
    CHECK(rep.failures.empty());
    REQUIRE(rep.lipschitz.size() == 5);
    for (const auto& chk : rep.lipschitz) CHECK(chk.max_ratio == 0.0); // all fields constant

    const auto storage = validate_model(builtin_pumped_storage({}), 200, 11);
    CHECK(storage.pass);
    CHECK(storage.min_sampled_cost == 0.25);
}

TEST_CASE("validation is deterministic per seed") {
    const auto spec = builtin_pumped_storage({});
    const auto a = validate_model(spec, 150, 99);
    const auto b = validate_model(spec, 150, 99);
    CHECK(a.summary() == b.summary());
    for (std::size_t k = 0; k < a.lipschitz.size(); ++k)
        CHECK(a.lipschitz[k].max_ratio == b.lipschitz[k].max_ratio);
    CHECK(a.min_sampled_cost == b.min_sampled_cost);
}

TEST_CASE("validation flags an understated Lipschitz constant") {
    auto spec = two_regime_base();
    spec.coeffs.running = [](const Point& x, int) { return 5.0 * x[0]; };
    spec.lipschitz = 1.0; // true slope is 5
    const auto rep = validate_model(spec, 100, 3);
    CHECK_FALSE(rep.lipschitz_ok);
    CHECK_FALSE(rep.pass);
    double running_ratio = 0.0;
    for (const auto& chk : rep.lipschitz)
        if (chk.field == "running") running_ratio = chk.max_ratio;
    CHECK(running_ratio == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("validation flags an overstated cost floor") {
    auto spec = two_regime_base();
    spec.coeffs.cost = [](const Point&, int, int) { return 0.1; };
    spec.min_cost = 0.2;
    const auto rep = validate_model(spec, 50, 3);
    CHECK_FALSE(rep.cost_floor_ok);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_sampled_cost == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("validation records non-finite evaluations") {
    auto spec = two_regime_base();
    spec.coeffs.terminal = [](const Point&, int) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    const auto rep = validate_model(spec, 20, 3);
    CHECK_FALSE(rep.pass);
    CHECK(!rep.failures.empty());
    CHECK_THROWS_AS(validate_model(spec, 1, 3), ConfigError);
}

TEST_CASE("boundedness screening on the two-regime builtin") {
    const auto spec = builtin_counterexample(1.0, 0.5);
    const auto rep = check_h3_sufficient(spec, 200, 17);
    // The freeze regime has zero drift and volatility, so it both absorbs at
    // the boundary and keeps paths inside.
    CHECK(rep.absorbing_boundary);
    CHECK(rep.absorbing_witness == 1);
    CHECK(rep.invariant_regime);
    CHECK(rep.invariant_witness == 1);
    CHECK(rep.convex_inward_drift);
    CHECK(rep.domain_convex);
    CHECK(rep.any());
    CHECK(rep.boundary_samples > 0);
}

TEST_CASE("boundedness screening on the storage builtin") {
    const auto spec = builtin_pumped_storage({});
    const auto rep = check_h3_sufficient(spec, 200, 17);
    // Price volatility never vanishes, so no regime absorbs; holding the
    // level still keeps the state inside the reservoir bounds.
    CHECK_FALSE(rep.absorbing_boundary);
    CHECK(rep.invariant_regime);
    CHECK(rep.invariant_witness == 1);
    CHECK(rep.convex_inward_drift);
    CHECK(rep.convex_witness == 1);
    CHECK(rep.any());
}

TEST_CASE("boundedness screening is deterministic and can fail") {
    const auto spec = builtin_pumped_storage({});
    const auto a = check_h3_sufficient(spec, 100, 5);
    const auto b = check_h3_sufficient(spec, 100, 5);
    CHECK(a.summary() == b.summary());

    // Make every regime push outward at the lower level face.
    auto bad = spec;
    bad.coeffs.drift = [](const Point&, int) { return Point{-1.0, 0.0}; };
    bad.coeffs.vol = [](const Point&, int) { return std::vector<double>{0.0, 0.0, 0.0, 0.0}; };
    const auto rep = check_h3_sufficient(bad, 100, 5);
    CHECK_FALSE(rep.absorbing_boundary);
    CHECK_FALSE(rep.invariant_regime);
    CHECK_FALSE(rep.convex_inward_drift);
    CHECK_FALSE(rep.any());
    CHECK(!rep.first_failure.empty());
}

TEST_CASE("unconstrained domain passes screening vacuously") {
    auto spec = two_regime_base();
    const auto rep = check_h3_sufficient(spec, 100, 5);
    CHECK(rep.absorbing_boundary);
    CHECK(rep.invariant_regime);
    CHECK(rep.boundary_samples == 0);
}

} // TEST_SUITE
