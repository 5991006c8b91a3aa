#include "switchgrid/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "switchgrid/errors.hpp"
#include "switchgrid/penalty.hpp"

namespace switchgrid::kernels {

namespace {

int resolve_threads(const Launch& launch) {
#ifdef _OPENMP
    if (launch.exec == Exec::serial) return 1;
    return launch.threads > 0 ? launch.threads : omp_get_max_threads();
#else
    (void)launch;
    return 1;
#endif
}

} // namespace

CoefficientTable build_coefficient_table(const ModelSpec& spec, const Grid& grid, int penalty) {
    if (penalty < 0) throw ConfigError("coefficient table: penalty must be >= 0");
    CoefficientTable tab;
    tab.grid = &grid;
    tab.dim = grid.dim;
    tab.regimes = spec.regimes;
    tab.penalty = penalty;

    const int d = grid.dim;
    const int m = spec.regimes;
    const long long n = grid.nnodes;
    const int npairs = d * (d - 1) / 2;
    tab.drift.resize(static_cast<std::size_t>(m) * n * d);
    tab.diag.resize(static_cast<std::size_t>(m) * n * d);
    tab.cross.assign(npairs > 0 ? static_cast<std::size_t>(m) * n * npairs : 0, 0.0);
    tab.fpen.resize(static_cast<std::size_t>(m) * n);
    tab.gpen.resize(static_cast<std::size_t>(m) * n);
    tab.cost.resize(static_cast<std::size_t>(m) * m * n);

    double max_sum = 0.0;
    for (long long p = 0; p < n; ++p) {
        const Point x = grid.coords(p);
        const double ramp =
            penalty > 0 ? static_cast<double>(penalty) * theta(PenaltyLevel(penalty), grid.dist[p])
                        : 0.0;
        for (int i = 0; i < m; ++i) {
            const Point mu = spec.coeffs.drift(x, i);
            const auto sg = spec.coeffs.vol(x, i);
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                tab.drift[tab.nk(i, p) + k] = mu[k];
                double akk = 0.0;
                for (int c = 0; c < d; ++c) akk += sg[k * d + c] * sg[k * d + c];
                tab.diag[tab.nk(i, p) + k] = akk;
                s += std::fabs(mu[k]) / grid.dx[k] + akk / (grid.dx[k] * grid.dx[k]);
            }
            int q = 0;
            for (int k = 0; k < d; ++k) {
                for (int l = k + 1; l < d; ++l, ++q) {
                    double akl = 0.0;
                    for (int c = 0; c < d; ++c) akl += sg[k * d + c] * sg[l * d + c];
                    if (akl != 0.0) {
                        tab.cross[(static_cast<std::size_t>(i) * n + p) * npairs + q] = akl;
                        tab.any_cross = true;
                    }
                }
            }
            tab.fpen[tab.np(i, p)] = spec.coeffs.running(x, i) - ramp;
            tab.gpen[tab.np(i, p)] = spec.coeffs.terminal(x, i) - ramp;
            for (int j = 0; j < m; ++j)
                tab.cost[tab.cost_at(i, j, p)] = j == i ? 0.0 : spec.coeffs.cost(x, i, j);
            max_sum = std::max(max_sum, s);
        }
    }
    tab.max_cfl_sum = max_sum;
    return tab;
}

double generator_at(const CoefficientTable& tab, int regime, const double* v, long long p) {
    const Grid& g = *tab.grid;
    const int d = tab.dim;
    const double vp = v[p];
    const double* mu = &tab.drift[tab.nk(regime, p)];
    const double* a = &tab.diag[tab.nk(regime, p)];

    double acc = 0.0;
    for (int k = 0; k < d; ++k) {
        const double m = mu[k];
        if (m > 0.0) {
            const long long up = g.neighbor(p, k, +1);
            if (up >= 0) acc += m * (v[up] - vp) / g.dx[k];
            // missing upwind neighbor: constant extrapolation, derivative 0
        } else if (m < 0.0) {
            const long long dn = g.neighbor(p, k, -1);
            if (dn >= 0) acc += m * (vp - v[dn]) / g.dx[k];
        }
        const double akk = a[k];
        if (akk != 0.0) {
            const long long up = g.neighbor(p, k, +1);
            const long long dn = g.neighbor(p, k, -1);
            const double vup = up >= 0 ? v[up] : vp;
            const double vdn = dn >= 0 ? v[dn] : vp;
            acc += 0.5 * akk * (vup - 2.0 * vp + vdn) / (g.dx[k] * g.dx[k]);
        }
    }

    if (tab.any_cross) {
        const int npairs = d * (d - 1) / 2;
        const double* c = &tab.cross[(static_cast<std::size_t>(regime) * g.nnodes + p) * npairs];
        int q = 0;
        for (int k = 0; k < d; ++k) {
            for (int l = k + 1; l < d; ++l, ++q) {
                const double akl = c[q];
                if (akl == 0.0) continue;
                const long long up_k = g.neighbor(p, k, +1), dn_k = g.neighbor(p, k, -1);
                const long long up_l = g.neighbor(p, l, +1), dn_l = g.neighbor(p, l, -1);
                if (up_k < 0 || dn_k < 0 || up_l < 0 || dn_l < 0) continue; // face: term dropped
                const double scale = 2.0 * g.dx[k] * g.dx[l];
                if (akl > 0.0) {
                    const long long pp = g.neighbor(up_k, l, +1), mm = g.neighbor(dn_k, l, -1);
                    if (pp < 0 || mm < 0) continue;
                    acc += akl *
                           (2.0 * vp + v[pp] + v[mm] - v[up_k] - v[dn_k] - v[up_l] - v[dn_l]) /
                           scale;
                } else {
                    const long long pm = g.neighbor(up_k, l, -1), mp = g.neighbor(dn_k, l, +1);
                    if (pm < 0 || mp < 0) continue;
                    acc -= akl *
                           (2.0 * vp + v[pm] + v[mp] - v[up_k] - v[dn_k] - v[up_l] - v[dn_l]) /
                           scale;
                }
            }
        }
    }
    return acc;
}

void explicit_update(const Launch& launch, const CoefficientTable& tab, int regime,
                     const double* vnext, double* out, double dt) {
    const long long n = tab.grid->nnodes;
    const double* f = &tab.fpen[tab.np(regime, 0)];
    const int nt = resolve_threads(launch);
    (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long p = 0; p < n; ++p)
        out[p] = vnext[p] + dt * (generator_at(tab, regime, vnext, p) + f[p]);
}

bool obstacle_sweep(const Launch& launch, const CoefficientTable& tab, int regime,
                    const std::vector<double*>& v, double tol) {
    const long long n = tab.grid->nnodes;
    const int m = tab.regimes;
    double* vi = v[regime];
    bool changed = false;
    const int nt = resolve_threads(launch);
    (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt) reduction(|| : changed)
#endif
    for (long long p = 0; p < n; ++p) {
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (j == regime) continue;
            const double cand = v[j][p] - tab.cost[tab.cost_at(regime, j, p)];
            if (cand > best) best = cand;
        }
        if (best > vi[p]) {
            if (best - vi[p] > tol) changed = true;
            vi[p] = best;
        }
    }
    return changed;
}

void envelope(const Launch& launch, const CoefficientTable& tab, int regime,
              const std::vector<const double*>& v, double* out, std::int8_t* argmax) {
    const long long n = tab.grid->nnodes;
    const int m = tab.regimes;
    const int nt = resolve_threads(launch);
    (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (long long p = 0; p < n; ++p) {
        double best = -std::numeric_limits<double>::infinity();
        int who = -1;
        for (int j = 0; j < m; ++j) {
            if (j == regime) continue;
            const double cand = v[j][p] - tab.cost[tab.cost_at(regime, j, p)];
            if (cand > best) { // strict: ties keep the lowest index
                best = cand;
                who = j;
            }
        }
        out[p] = best;
        if (argmax) argmax[p] = static_cast<std::int8_t>(who);
    }
}

long long first_nonfinite(const double* data, long long n) {
    for (long long p = 0; p < n; ++p)
        if (!std::isfinite(data[p])) return p;
    return -1;
}

} // namespace switchgrid::kernels
