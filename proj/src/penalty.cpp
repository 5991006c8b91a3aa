#include "switchgrid/penalty.hpp"

#include <algorithm>

#include "switchgrid/errors.hpp"

namespace switchgrid {

PenaltyLevel::PenaltyLevel(int level) : n(level) {
    if (level < 1) throw ConfigError("penalty level must be >= 1");
}

double dist_to_domain(const ConstraintDomain& domain, const Point& x) {
    return domain.distance(x);
}

double theta(PenaltyLevel n, double dist) {
    return std::min(static_cast<double>(n.n) * dist, 1.0);
}

double theta(const ConstraintDomain& domain, PenaltyLevel n, const Point& x) {
    return theta(n, domain.distance(x));
}

double penalized_running(const ModelSpec& spec, PenaltyLevel n, const Point& x, int regime) {
    return spec.coeffs.running(x, regime) - static_cast<double>(n.n) * theta(spec.domain, n, x);
}

double penalized_terminal(const ModelSpec& spec, PenaltyLevel n, const Point& x, int regime) {
    return spec.coeffs.terminal(x, regime) - static_cast<double>(n.n) * theta(spec.domain, n, x);
}

} // namespace switchgrid
