#include "switchgrid/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "switchgrid/errors.hpp"

namespace switchgrid {

void ModelSpec::check_shape() const {
    if (dim < 1 || dim > 3)
        throw ConfigError("model: dim must be 1, 2 or 3");
    if (regimes < 2)
        throw ConfigError("model: at least 2 regimes required");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ConfigError("model: horizon must be positive and finite");
    if (domain.dim() != dim)
        throw ConfigError("model: domain dimension does not match dim");
    if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz))
        throw ConfigError("model: declared Lipschitz constant must be finite and >= 0");
    if (!coeffs.drift || !coeffs.vol || !coeffs.running || !coeffs.terminal || !coeffs.cost)
        throw ConfigError("model: all five coefficient fields must be set");
    if (static_cast<int>(sample_lo.size()) != dim || static_cast<int>(sample_hi.size()) != dim)
        throw ConfigError("model: sampling box dimension mismatch");
    for (int k = 0; k < dim; ++k)
        if (!(sample_lo[k] < sample_hi[k]) || !std::isfinite(sample_lo[k]) ||
            !std::isfinite(sample_hi[k]))
            throw ConfigError("model: sampling box must be finite with lo < hi");
}

ModelSpec builtin_counterexample(double horizon, double cost) {
    if (!(horizon > 0.0)) throw ConfigError("counterexample: horizon must be positive");
    if (!(cost > 0.0)) throw ConfigError("counterexample: switch cost must be positive");

    ModelSpec spec;
    spec.dim = 2;
    spec.regimes = 2;
    spec.horizon = horizon;
    spec.coeffs.drift = [](const Point&, int i) {
        return i == 0 ? Point{0.0, -1.0} : Point{0.0, 0.0};
    };
    spec.coeffs.vol = [](const Point&, int) { return std::vector<double>{0.0, 0.0, 0.0, 0.0}; };
    spec.coeffs.running = [](const Point&, int) { return 1.0; };
    spec.coeffs.terminal = [](const Point&, int) { return 0.0; };
    spec.coeffs.cost = [cost](const Point&, int, int) { return cost; };
    const double inf = std::numeric_limits<double>::infinity();
    spec.domain = ConstraintDomain::box({-inf, 0.0}, {inf, inf});
    spec.lipschitz = 1.0;
    spec.min_cost = cost;
    spec.sample_lo = {-2.0, -1.0};
    spec.sample_hi = {2.0, horizon + 1.0};
    std::ostringstream name;
    name << "counterexample(horizon=" << horizon << ",cost=" << cost << ")";
    spec.name = name.str();
    spec.default_start = {0.0, 0.2 * horizon};
    spec.default_regime = 0;
    spec.check_shape();
    return spec;
}

ModelSpec builtin_pumped_storage(const PumpedStorageParams& p) {
    if (!(p.l_max > 0.0)) throw ConfigError("pumped_storage: l_max must be positive");
    if (!(p.kappa >= 0.0)) throw ConfigError("pumped_storage: kappa must be >= 0");
    if (!(p.xi >= 0.0)) throw ConfigError("pumped_storage: xi must be >= 0");
    if (!(p.switch_cost > 0.0)) throw ConfigError("pumped_storage: switch_cost must be positive");
    if (!(p.horizon > 0.0)) throw ConfigError("pumped_storage: horizon must be positive");

    // State is (level, price). Level moves at +1 while pumping (regime 1),
    // 0 while storing (regime 2), -1 while generating (regime 3); the price
    // is an OU diffusion. Pumping buys energy at the spot price, generating
    // sells it, so the running reward is -price * level_drift.
    ModelSpec spec;
    spec.dim = 2;
    spec.regimes = 3;
    spec.horizon = p.horizon;
    const double kappa = p.kappa, theta = p.theta, xi = p.xi;
    spec.coeffs.drift = [kappa, theta](const Point& x, int i) {
        static const double level_drift[3] = {1.0, 0.0, -1.0};
        return Point{level_drift[i], kappa * (theta - x[1])};
    };
    spec.coeffs.vol = [xi](const Point&, int) {
        return std::vector<double>{0.0, 0.0, 0.0, xi};
    };
    spec.coeffs.running = [](const Point& x, int i) {
        static const double level_drift[3] = {1.0, 0.0, -1.0};
        return -x[1] * level_drift[i];
    };
    spec.coeffs.terminal = [](const Point&, int) { return 0.0; };
    const double cost = p.switch_cost;
    spec.coeffs.cost = [cost](const Point&, int, int) { return cost; };
    const double inf = std::numeric_limits<double>::infinity();
    spec.domain = ConstraintDomain::box({0.0, -inf}, {p.l_max, inf});
    spec.lipschitz = std::max(1.0, kappa);
    spec.min_cost = cost;
    const double price_band = (kappa > 0.0 && xi > 0.0) ? 5.0 * xi / std::sqrt(2.0 * kappa)
                                                        : std::max(1.0, 5.0 * xi);
    spec.sample_lo = {-0.5, theta - price_band};
    spec.sample_hi = {p.l_max + 0.5, theta + price_band};
    std::ostringstream name;
    name << "pumped_storage(l_max=" << p.l_max << ",kappa=" << kappa << ",theta=" << theta
         << ",xi=" << xi << ",cost=" << cost << ")";
    spec.name = name.str();
    spec.default_start = {p.l0, p.p0};
    spec.default_regime = 1;
    spec.check_shape();
    return spec;
}

namespace {

struct Sampler {
    const ModelSpec& spec;
    ValidationReport& rep;

    bool finite_point(const Point& x, const char* field, int regime, double value) {
        if (std::isfinite(value)) return true;
        std::ostringstream os;
        os << field << " is non-finite at x=(";
        for (std::size_t k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
        os << "), regime " << regime + 1;
        rep.failures.push_back(os.str());
        return false;
    }

    void ratio(FieldCheck& chk, const Point& x, const Point& y, int regime, double num) {
        const double den = dist2(x, y);
        if (den <= 0.0) return;
        const double r = num / den;
        if (r > chk.max_ratio) {
            chk.max_ratio = r;
            chk.worst_x = x;
            chk.worst_y = y;
            chk.worst_regime = regime;
        }
    }

    void visit_pair(std::vector<FieldCheck>& chks, const Point& x, const Point& y) {
        const int m = spec.regimes;
        const int d = spec.dim;
        for (int i = 0; i < m; ++i) {
            const Point mux = spec.coeffs.drift(x, i), muy = spec.coeffs.drift(y, i);
            bool ok = true;
            for (int k = 0; k < d; ++k)
                ok = finite_point(x, "drift", i, mux[k]) && finite_point(y, "drift", i, muy[k]) && ok;
            if (ok) ratio(chks[0], x, y, i, dist2(mux, muy));

            const auto sx = spec.coeffs.vol(x, i), sy = spec.coeffs.vol(y, i);
            double fro = 0.0;
            ok = true;
            for (int k = 0; k < d * d; ++k) {
                ok = finite_point(x, "vol", i, sx[k]) && finite_point(y, "vol", i, sy[k]) && ok;
                const double dv = sx[k] - sy[k];
                fro += dv * dv;
            }
            if (ok) ratio(chks[1], x, y, i, std::sqrt(fro));

            const double fx = spec.coeffs.running(x, i), fy = spec.coeffs.running(y, i);
            if (finite_point(x, "running", i, fx) && finite_point(y, "running", i, fy))
                ratio(chks[2], x, y, i, std::fabs(fx - fy));

            const double gx = spec.coeffs.terminal(x, i), gy = spec.coeffs.terminal(y, i);
            if (finite_point(x, "terminal", i, gx) && finite_point(y, "terminal", i, gy))
                ratio(chks[3], x, y, i, std::fabs(gx - gy));

            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                const double cx = spec.coeffs.cost(x, i, j), cy = spec.coeffs.cost(y, i, j);
                if (finite_point(x, "cost", i, cx) && finite_point(y, "cost", i, cy))
                    ratio(chks[4], x, y, i, std::fabs(cx - cy));
                visit_cost(x, i, j, cx);
                visit_cost(y, i, j, cy);
            }
        }
    }

    void visit_cost(const Point& x, int i, int j, double c) {
        (void)i;
        (void)j;
        if (!std::isfinite(c)) return;
        if (c < rep.min_sampled_cost) {
            rep.min_sampled_cost = c;
            rep.min_cost_at = x;
        }
    }
};

} // namespace

ValidationReport validate_model(const ModelSpec& spec, int sample_count, std::uint64_t seed) {
    spec.check_shape();
    if (sample_count < 2) throw ConfigError("validate_model: sample_count must be >= 2");

    ValidationReport rep;
    rep.seed = seed;
    rep.sample_count = sample_count;
    rep.declared_lipschitz = spec.lipschitz;
    rep.declared_min_cost = spec.min_cost;
    rep.min_sampled_cost = std::numeric_limits<double>::infinity();
    rep.lipschitz = {{"drift", 0.0, {}, {}, 0},
                     {"vol", 0.0, {}, {}, 0},
                     {"running", 0.0, {}, {}, 0},
                     {"terminal", 0.0, {}, {}, 0},
                     {"cost", 0.0, {}, {}, 0}};

    Sampler sampler{spec, rep};
    const int d = spec.dim;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Point mid(d), diam(d);
    for (int k = 0; k < d; ++k) {
        mid[k] = 0.5 * (spec.sample_lo[k] + spec.sample_hi[k]);
        diam[k] = spec.sample_hi[k] - spec.sample_lo[k];
    }

    // Axis sweeps: difference quotients between consecutive points of an even
    // subdivision, one axis at a time, the rest held at the box midpoint.
    for (int axis = 0; axis < d; ++axis) {
        Point prev;
        for (int s = 0; s < sample_count; ++s) {
            Point x = mid;
            x[axis] = spec.sample_lo[axis] + diam[axis] * s / (sample_count - 1);
            if (s > 0) sampler.visit_pair(rep.lipschitz, prev, x);
            prev = x;
        }
    }

    auto draw = [&] {
        Point x(d);
        for (int k = 0; k < d; ++k) x[k] = spec.sample_lo[k] + diam[k] * unit(rng);
        return x;
    };

    // Random far pairs (secant slopes) and random near pairs (local slopes).
    for (int s = 0; s < sample_count; ++s) sampler.visit_pair(rep.lipschitz, draw(), draw());
    const double h = 1e-4;
    for (int s = 0; s < sample_count; ++s) {
        Point x = draw(), y = x;
        for (int k = 0; k < d; ++k) y[k] += h * diam[k] * (unit(rng) - 0.5);
        sampler.visit_pair(rep.lipschitz, x, y);
    }

    double worst = 0.0;
    for (const auto& chk : rep.lipschitz) worst = std::max(worst, chk.max_ratio);
    rep.lipschitz_ok = worst <= spec.lipschitz * (1.0 + 1e-9) + 1e-12;
    rep.cost_floor_ok = spec.min_cost > 0.0 &&
                        rep.min_sampled_cost >= spec.min_cost - 1e-12 * (1.0 + spec.min_cost);
    rep.pass = rep.lipschitz_ok && rep.cost_floor_ok && rep.failures.empty();
    return rep;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << (pass ? "PASS" : "FAIL") << " (seed=" << seed << ", samples=" << sample_count << ")\n";
    for (const auto& chk : lipschitz)
        os << "  " << chk.field << ": max ratio " << chk.max_ratio << " vs L=" << declared_lipschitz
           << "\n";
    os << "  min cost " << min_sampled_cost << " vs floor " << declared_min_cost << "\n";
    for (const auto& f : failures) os << "  failure: " << f << "\n";
    return os.str();
}

namespace {

bool near_zero(double v, double tol) { return std::fabs(v) <= tol; }

bool matrix_near_zero(const std::vector<double>& m, double tol) {
    for (double v : m)
        if (!near_zero(v, tol)) return false;
    return true;
}

// sigma^T n for row-major sigma.
Point vol_along(const std::vector<double>& sigma, const Point& n) {
    const int d = static_cast<int>(n.size());
    Point out(d, 0.0);
    for (int col = 0; col < d; ++col)
        for (int row = 0; row < d; ++row) out[col] += sigma[row * d + col] * n[row];
    return out;
}

} // namespace

H3Report check_h3_sufficient(const ModelSpec& spec, int boundary_samples, std::uint64_t seed) {
    spec.check_shape();
    H3Report rep;
    rep.seed = seed;
    // All supported domain kinds are convex.
    rep.domain_convex = true;

    std::mt19937_64 rng(seed);
    const auto pts = spec.domain.sample_boundary(boundary_samples, rng, spec.sample_lo,
                                                 spec.sample_hi);
    rep.boundary_samples = static_cast<int>(pts.size());
    if (pts.empty()) {
        // No finite boundary inside the sampling box: the constraint never
        // binds there, every condition holds vacuously.
        rep.absorbing_boundary = rep.invariant_regime = rep.convex_inward_drift = true;
        return rep;
    }

    const int m = spec.regimes;
    const double tol = 1e-10;

    // (a) absorbing regime at each boundary point.
    {
        std::vector<bool> covers(m, true);
        bool all = true;
        for (const auto& x : pts) {
            bool found = false;
            for (int i = 0; i < m; ++i) {
                const Point mu = spec.coeffs.drift(x, i);
                const auto sg = spec.coeffs.vol(x, i);
                const bool zero = norm2(mu) <= tol && matrix_near_zero(sg, tol);
                if (!zero) covers[i] = false;
                found = found || zero;
            }
            if (!found && all) {
                all = false;
                std::ostringstream os;
                os << "no absorbing regime at boundary point (";
                for (int k = 0; k < spec.dim; ++k) os << (k ? "," : "") << x[k];
                os << ")";
                if (rep.first_failure.empty()) rep.first_failure = os.str();
            }
        }
        rep.absorbing_boundary = all;
        if (all)
            for (int i = 0; i < m; ++i)
                if (covers[i] && rep.absorbing_witness < 0) rep.absorbing_witness = i;
    }

    // (b) one regime whose dynamics never leave the domain: zero volatility
    // along every active outward normal and inward (or zero) drift there.
    // (c) first-order inward drift only, volatility unrestricted.
    {
        std::vector<bool> invariant(m, true), inward(m, true);
        for (const auto& x : pts) {
            const auto normals = spec.domain.active_normals(x, 1e-7);
            for (int i = 0; i < m; ++i) {
                const Point mu = spec.coeffs.drift(x, i);
                const auto sg = spec.coeffs.vol(x, i);
                for (const auto& n : normals) {
                    const double drift_out = dot(mu, n);
                    if (drift_out > tol) {
                        invariant[i] = false;
                        inward[i] = false;
                    }
                    if (norm2(vol_along(sg, n)) > tol) invariant[i] = false;
                }
            }
        }
        for (int i = 0; i < m; ++i) {
            if (invariant[i] && rep.invariant_witness < 0) rep.invariant_witness = i;
            if (inward[i] && rep.convex_witness < 0) rep.convex_witness = i;
        }
        rep.invariant_regime = rep.invariant_witness >= 0;
        rep.convex_inward_drift = rep.domain_convex && rep.convex_witness >= 0;
    }

    return rep;
}

std::string H3Report::summary() const {
    std::ostringstream os;
    auto regime = [](int i) { return i < 0 ? std::string("-") : std::to_string(i + 1); };
    os << "(a) absorbing boundary regime: " << (absorbing_boundary ? "yes" : "no")
       << " (regime " << regime(absorbing_witness) << ")\n"
       << "(b) domain-invariant regime:   " << (invariant_regime ? "yes" : "no")
       << " (regime " << regime(invariant_witness) << ")\n"
       << "(c) convex + inward drift:     " << (convex_inward_drift ? "yes" : "no")
       << " (regime " << regime(convex_witness) << ")\n"
       << "boundary samples: " << boundary_samples << ", seed " << seed << "\n";
    if (!first_failure.empty()) os << "note: " << first_failure << "\n";
    return os.str();
}

} // namespace switchgrid
