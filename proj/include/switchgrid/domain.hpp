#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "switchgrid/vecmath.hpp"

namespace switchgrid {

// Closed convex state-constraint set with an exact Euclidean distance.
// Four kinds are supported: axis box (bounds may be infinite), single
// half-space {n.x <= b}, closed ball, and intersection of half-spaces.
// Membership is by definition distance(x) == 0.
class ConstraintDomain {
  public:
    enum class Kind { box, half_space, ball, half_space_intersection };

    // Zero-dimensional placeholder; every usable instance comes from one of
    // the factories below and model validation rejects a dimension mismatch.
    ConstraintDomain() = default;

    static ConstraintDomain box(Point lo, Point hi);
    static ConstraintDomain half_space(Point normal, double offset);
    static ConstraintDomain ball(Point center, double radius);
    // Rows n_r with offsets b_r define {x : n_r . x <= b_r for all r}.
    // Throws ConfigError if the intersection is empty.
    static ConstraintDomain half_space_intersection(std::vector<Point> normals,
                                                    std::vector<double> offsets);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    double distance(const Point& x) const;
    bool contains(const Point& x) const { return distance(x) == 0.0; }

    // Outward unit normals of the constraints active at a boundary point
    // (empty if x is interior or far from the boundary).
    std::vector<Point> active_normals(const Point& x, double tol = 1e-9) const;

    // Draws points on the boundary, restricted to the given sampling box.
    // Used by the structural condition checks; deterministic given the engine state.
    std::vector<Point> sample_boundary(int count, std::mt19937_64& rng,
                                       const Point& box_lo, const Point& box_hi) const;

    // Per-axis bounds implied by the set where cheaply known; +-inf otherwise.
    // Exact for box and ball; for half-spaces only axis-aligned normals bound an axis.
    void axis_bounds(Point& lo, Point& hi) const;

    const Point& box_lo() const { return lo_; }
    const Point& box_hi() const { return hi_; }
    const std::vector<Point>& normals() const { return normals_; }
    const std::vector<double>& offsets() const { return offsets_; }
    const Point& center() const { return center_; }
    double radius() const { return radius_; }

    std::string describe() const;

  private:
    Kind kind_ = Kind::box;
    int dim_ = 0;
    Point lo_, hi_;                  // box
    std::vector<Point> normals_;     // half-space(s), stored unit-length
    std::vector<double> offsets_;    // matching offsets for unit normals
    Point center_;                   // ball
    double radius_ = 0.0;

    // Exact projection onto the polyhedron by active-set enumeration.
    double polyhedron_distance(const Point& x, Point* proj) const;
};

} // namespace switchgrid
