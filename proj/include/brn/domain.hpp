#pragma once

#include "brn/types.hpp"

#include <variant>
#include <vector>

namespace brn {

struct BallShape {
    Vec center;
    double radius;
};

struct DisjointBallsShape {
    std::vector<BallShape> balls;  // closures pairwise disjoint
};

/// Smooth star-shaped domain handled by the MFS engine. Concretely an
/// ellipsoid: { c + diag(semi_axes) u : |u| <= 1 }.
struct SmoothShape {
    Vec center;
    Vec semi_axes;
    double mfs_offset = 2.0;      // sources on the boundary dilated by (1 + offset)
    int mfs_sources = 800;
    int collocation_points = 2000;
    double fit_tolerance = 1e-4;  // held-out boundary residual gate of each pole fit
};

/// Declarative description of the domain Omega.
struct DomainSpec {
    Dimension dimension;
    std::variant<BallShape, DisjointBallsShape, SmoothShape> shape;

    static DomainSpec unit_ball(int n);
    static DomainSpec balls(int n, std::vector<BallShape> balls);

    void validate() const;  // throws DomainError / std::invalid_argument

    bool contains(const Vec& x) const;
    /// Signed only in the interior: distance from x to the boundary (0 outside).
    double boundary_distance(const Vec& x) const;
    /// Index of the connected component containing x (always 0 except DisjointBalls).
    int component(const Vec& x) const;
    int component_count() const;
    double diameter() const;
    /// Axis-aligned bounding box, for rejection sampling.
    void bounding_box(Vec& lo, Vec& hi) const;
};

}  // namespace brn
