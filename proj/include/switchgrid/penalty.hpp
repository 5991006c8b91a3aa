#pragma once

#include "switchgrid/model.hpp"

namespace switchgrid {

// Penalty level n >= 1. The ramp n * dist(x) is capped at 1, so the running
// and terminal rewards are lowered by at most n outside the domain and left
// untouched on it.
struct PenaltyLevel {
    int n = 1;
    explicit PenaltyLevel(int level);
};

double dist_to_domain(const ConstraintDomain& domain, const Point& x);

// theta_n(x) = min(n * dist(x, D), 1), in [0, 1], zero exactly on D.
double theta(const ConstraintDomain& domain, PenaltyLevel n, const Point& x);
// Same, with the distance already known (grids precompute it per node).
double theta(PenaltyLevel n, double dist);

// f_n = f - n * theta_n and g_n = g - n * theta_n. Both are nonincreasing in n
// pointwise, which transfers to the solved fields.
double penalized_running(const ModelSpec& spec, PenaltyLevel n, const Point& x, int regime);
double penalized_terminal(const ModelSpec& spec, PenaltyLevel n, const Point& x, int regime);

} // namespace switchgrid
