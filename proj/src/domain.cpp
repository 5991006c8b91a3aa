#include "switchgrid/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "switchgrid/errors.hpp"

namespace switchgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(std::size_t d, const char* what) {
    if (d == 0) throw ConfigError(std::string(what) + ": dimension must be positive");
}

// Solves the k x k system G y = r in place by Gaussian elimination with
// partial pivoting; returns false when G is (numerically) singular.
bool solve_small(std::vector<double>& G, std::vector<double>& r, int k) {
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int row = col + 1; row < k; ++row)
            if (std::fabs(G[row * k + col]) > std::fabs(G[piv * k + col])) piv = row;
        if (std::fabs(G[piv * k + col]) < 1e-14) return false;
        if (piv != col) {
            for (int j = 0; j < k; ++j) std::swap(G[col * k + j], G[piv * k + j]);
            std::swap(r[col], r[piv]);
        }
        const double d = G[col * k + col];
        for (int row = col + 1; row < k; ++row) {
            const double m = G[row * k + col] / d;
            if (m == 0.0) continue;
            for (int j = col; j < k; ++j) G[row * k + j] -= m * G[col * k + j];
            r[row] -= m * r[col];
        }
    }
    for (int col = k - 1; col >= 0; --col) {
        double s = r[col];
        for (int j = col + 1; j < k; ++j) s -= G[col * k + j] * r[j];
        r[col] = s / G[col * k + col];
    }
    return true;
}

} // namespace

ConstraintDomain ConstraintDomain::box(Point lo, Point hi) {
    check_dim(lo.size(), "box domain");
    if (lo.size() != hi.size()) throw ConfigError("box domain: lo/hi dimension mismatch");
    for (std::size_t k = 0; k < lo.size(); ++k) {
        if (std::isnan(lo[k]) || std::isnan(hi[k]))
            throw ConfigError("box domain: NaN bound");
        if (!(lo[k] <= hi[k]))
            throw ConfigError("box domain: lo > hi on axis " + std::to_string(k + 1));
    }
    ConstraintDomain d;
    d.kind_ = Kind::box;
    d.dim_ = static_cast<int>(lo.size());
    d.lo_ = std::move(lo);
    d.hi_ = std::move(hi);
    return d;
}

ConstraintDomain ConstraintDomain::half_space(Point normal, double offset) {
    check_dim(normal.size(), "half-space domain");
    const double nn = norm2(normal);
    if (!(nn > 0.0) || !std::isfinite(nn) || !std::isfinite(offset))
        throw ConfigError("half-space domain: normal must be finite and nonzero");
    for (double& c : normal) c /= nn;
    ConstraintDomain d;
    d.kind_ = Kind::half_space;
    d.dim_ = static_cast<int>(normal.size());
    d.normals_ = {std::move(normal)};
    d.offsets_ = {offset / nn};
    return d;
}

ConstraintDomain ConstraintDomain::ball(Point center, double radius) {
    check_dim(center.size(), "ball domain");
    if (!all_finite(center) || !std::isfinite(radius) || radius < 0.0)
        throw ConfigError("ball domain: center must be finite and radius >= 0");
    ConstraintDomain d;
    d.kind_ = Kind::ball;
    d.dim_ = static_cast<int>(center.size());
    d.center_ = std::move(center);
    d.radius_ = radius;
    return d;
}

ConstraintDomain ConstraintDomain::half_space_intersection(std::vector<Point> normals,
                                                           std::vector<double> offsets) {
    if (normals.empty()) throw ConfigError("half-space intersection: no constraints given");
    if (normals.size() != offsets.size())
        throw ConfigError("half-space intersection: normals/offsets count mismatch");
    if (normals.size() > 16)
        throw ConfigError("half-space intersection: at most 16 half-spaces supported");
    const std::size_t dim = normals[0].size();
    check_dim(dim, "half-space intersection");
    for (std::size_t r = 0; r < normals.size(); ++r) {
        if (normals[r].size() != dim)
            throw ConfigError("half-space intersection: inconsistent dimensions");
        const double nn = norm2(normals[r]);
        if (!(nn > 0.0) || !std::isfinite(nn) || !std::isfinite(offsets[r]))
            throw ConfigError("half-space intersection: normal must be finite and nonzero");
        for (double& c : normals[r]) c /= nn;
        offsets[r] /= nn;
    }
    ConstraintDomain d;
    d.kind_ = Kind::half_space_intersection;
    d.dim_ = static_cast<int>(dim);
    d.normals_ = std::move(normals);
    d.offsets_ = std::move(offsets);
    // Nonemptiness probe: the projection search returns a feasible point iff
    // the polyhedron is nonempty.
    Point probe(dim, 0.0), proj;
    if (d.polyhedron_distance(probe, &proj) < 0.0)
        throw ConfigError("half-space intersection: empty domain");
    return d;
}

double ConstraintDomain::polyhedron_distance(const Point& x, Point* proj) const {
    const int d = dim_;
    const int m = static_cast<int>(normals_.size());
    const double scale = 1.0 + norm2(x);
    const double feas_tol = 1e-12 * scale;

    auto feasible = [&](const Point& y) {
        for (int r = 0; r < m; ++r)
            if (dot(normals_[r], y) - offsets_[r] > feas_tol) return false;
        return true;
    };

    if (feasible(x)) {
        if (proj) *proj = x;
        return 0.0;
    }

    // Candidate projections come from affine subsets of active constraints:
    // the true projection's active set is one of them.
    double best = kInf;
    Point best_y;
    const int max_k = std::min(d, m);
    std::vector<int> idx;
    std::vector<double> G, rhs;

    // Enumerate all nonempty subsets of size <= d (m <= 16 keeps this cheap).
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        idx.clear();
        for (int r = 0; r < m; ++r)
            if (mask & (1u << r)) idx.push_back(r);
        const int k = static_cast<int>(idx.size());
        if (k > max_k) continue;

        // y = x + N^T lam with (N N^T) lam = b - N x projects onto {N y = b}.
        G.assign(static_cast<std::size_t>(k) * k, 0.0);
        rhs.assign(k, 0.0);
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) G[a * k + b] = dot(normals_[idx[a]], normals_[idx[b]]);
            rhs[a] = offsets_[idx[a]] - dot(normals_[idx[a]], x);
        }
        if (!solve_small(G, rhs, k)) continue;
        Point y = x;
        for (int a = 0; a < k; ++a)
            for (int c = 0; c < d; ++c) y[c] += rhs[a] * normals_[idx[a]][c];
        if (!feasible(y)) continue;
        const double dist = dist2(x, y);
        if (dist < best) {
            best = dist;
            best_y = y;
        }
    }

    if (!std::isfinite(best)) return -1.0; // no feasible candidate: empty set
    if (proj) *proj = best_y;
    return best;
}

double ConstraintDomain::distance(const Point& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw ConfigError("domain distance: point dimension mismatch");
    switch (kind_) {
        case Kind::box: {
            double s = 0.0;
            for (int k = 0; k < dim_; ++k) {
                double g = 0.0;
                if (x[k] < lo_[k]) g = lo_[k] - x[k];
                else if (x[k] > hi_[k]) g = x[k] - hi_[k];
                s += g * g;
            }
            return std::sqrt(s);
        }
        case Kind::half_space: {
            const double g = dot(normals_[0], x) - offsets_[0];
            return g > 0.0 ? g : 0.0;
        }
        case Kind::ball: {
            const double g = dist2(x, center_) - radius_;
            return g > 0.0 ? g : 0.0;
        }
        case Kind::half_space_intersection: {
            const double r = polyhedron_distance(x, nullptr);
            if (r < 0.0) throw ConfigError("half-space intersection: empty domain");
            return r;
        }
    }
    return 0.0;
}

std::vector<Point> ConstraintDomain::active_normals(const Point& x, double tol) const {
    std::vector<Point> out;
    switch (kind_) {
        case Kind::box: {
            for (int k = 0; k < dim_; ++k) {
                if (std::isfinite(lo_[k]) && std::fabs(x[k] - lo_[k]) <= tol) {
                    Point n(dim_, 0.0);
                    n[k] = -1.0;
                    out.push_back(std::move(n));
                }
                if (std::isfinite(hi_[k]) && std::fabs(x[k] - hi_[k]) <= tol) {
                    Point n(dim_, 0.0);
                    n[k] = 1.0;
                    out.push_back(std::move(n));
                }
            }
            break;
        }
        case Kind::half_space:
        case Kind::half_space_intersection: {
            for (std::size_t r = 0; r < normals_.size(); ++r)
                if (std::fabs(dot(normals_[r], x) - offsets_[r]) <= tol)
                    out.push_back(normals_[r]);
            break;
        }
        case Kind::ball: {
            const double g = dist2(x, center_);
            if (std::fabs(g - radius_) <= tol && g > 0.0) {
                Point n = sub(x, center_);
                for (double& c : n) c /= g;
                out.push_back(std::move(n));
            }
            break;
        }
    }
    return out;
}

std::vector<Point> ConstraintDomain::sample_boundary(int count, std::mt19937_64& rng,
                                                     const Point& box_lo,
                                                     const Point& box_hi) const {
    std::vector<Point> out;
    out.reserve(count);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto clamped_uniform = [&](int k) {
        const double a = box_lo[k], b = box_hi[k];
        return a + (b - a) * unit(rng);
    };

    switch (kind_) {
        case Kind::box: {
            // Bounded faces only; unbounded axes carry no constraint.
            struct Face { int axis; bool upper; };
            std::vector<Face> faces;
            for (int k = 0; k < dim_; ++k) {
                if (std::isfinite(lo_[k])) faces.push_back({k, false});
                if (std::isfinite(hi_[k])) faces.push_back({k, true});
            }
            if (faces.empty()) return out;
            for (int i = 0; i < count; ++i) {
                const Face& f = faces[i % faces.size()];
                Point x(dim_);
                for (int k = 0; k < dim_; ++k) {
                    if (k == f.axis) {
                        x[k] = f.upper ? hi_[k] : lo_[k];
                    } else {
                        const double a = std::max(box_lo[k], lo_[k]);
                        const double b = std::min(box_hi[k], hi_[k]);
                        x[k] = a + (b - a) * unit(rng);
                    }
                }
                out.push_back(std::move(x));
            }
            break;
        }
        case Kind::half_space: {
            for (int i = 0; i < count; ++i) {
                Point x(dim_);
                for (int k = 0; k < dim_; ++k) x[k] = clamped_uniform(k);
                const double g = dot(normals_[0], x) - offsets_[0];
                for (int k = 0; k < dim_; ++k) x[k] -= g * normals_[0][k];
                out.push_back(std::move(x));
            }
            break;
        }
        case Kind::ball: {
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (int i = 0; i < count; ++i) {
                Point u(dim_);
                double nn = 0.0;
                do {
                    for (int k = 0; k < dim_; ++k) u[k] = gauss(rng);
                    nn = norm2(u);
                } while (nn == 0.0);
                Point x(dim_);
                for (int k = 0; k < dim_; ++k) x[k] = center_[k] + radius_ * u[k] / nn;
                out.push_back(std::move(x));
            }
            break;
        }
        case Kind::half_space_intersection: {
            // Project exterior box samples onto the set; the projections land
            // on the boundary.
            int tries = 0;
            while (static_cast<int>(out.size()) < count && tries < 100 * count) {
                ++tries;
                Point x(dim_);
                for (int k = 0; k < dim_; ++k) x[k] = clamped_uniform(k);
                Point proj;
                const double dist = polyhedron_distance(x, &proj);
                if (dist > 1e-12) out.push_back(std::move(proj));
            }
            break;
        }
    }
    return out;
}

void ConstraintDomain::axis_bounds(Point& lo, Point& hi) const {
    lo.assign(dim_, -kInf);
    hi.assign(dim_, kInf);
    switch (kind_) {
        case Kind::box:
            lo = lo_;
            hi = hi_;
            break;
        case Kind::ball:
            for (int k = 0; k < dim_; ++k) {
                lo[k] = center_[k] - radius_;
                hi[k] = center_[k] + radius_;
            }
            break;
        case Kind::half_space:
        case Kind::half_space_intersection:
            // Only axis-aligned rows give per-axis bounds without an LP; that
            // is enough for grid-margin validation, which rechecks via the
            // distance field anyway.
            for (std::size_t r = 0; r < normals_.size(); ++r) {
                for (int k = 0; k < dim_; ++k) {
                    bool aligned = true;
                    for (int j = 0; j < dim_; ++j)
                        if (j != k && std::fabs(normals_[r][j]) > 1e-14) aligned = false;
                    if (!aligned || std::fabs(normals_[r][k]) < 1e-14) continue;
                    if (normals_[r][k] > 0.0)
                        hi[k] = std::min(hi[k], offsets_[r] / normals_[r][k]);
                    else
                        lo[k] = std::max(lo[k], offsets_[r] / normals_[r][k]);
                }
            }
            break;
    }
}

std::string ConstraintDomain::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::box: os << "box"; break;
        case Kind::half_space: os << "half_space"; break;
        case Kind::ball: os << "ball"; break;
        case Kind::half_space_intersection: os << "half_space_intersection"; break;
    }
    os << "(dim=" << dim_ << ")";
    return os.str();
}

} // namespace switchgrid
