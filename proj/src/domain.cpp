#include "brn/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace brn {

namespace {

void check_point_dim(const Vec& x, int n, const char* what) {
    if (x.size() != n)
        throw DomainError(std::string(what) + ": point has dimension " +
                          std::to_string(x.size()) + ", domain has " + std::to_string(n));
}

}  // namespace

DomainSpec DomainSpec::unit_ball(int n) {
    DomainSpec spec{Dimension(n), BallShape{Vec::Zero(n), 1.0}};
    spec.validate();
    return spec;
}

DomainSpec DomainSpec::balls(int n, std::vector<BallShape> balls) {
    DomainSpec spec{Dimension(n), DisjointBallsShape{std::move(balls)}};
    spec.validate();
    return spec;
}

void DomainSpec::validate() const {
    const int n = dimension.value();
    if (const auto* b = std::get_if<BallShape>(&shape)) {
        check_point_dim(b->center, n, "ball center");
        if (!(b->radius > 0.0)) throw std::invalid_argument("ball radius must be > 0");
    } else if (const auto* db = std::get_if<DisjointBallsShape>(&shape)) {
        if (db->balls.empty()) throw std::invalid_argument("disjoint_balls needs at least one ball");
        for (const auto& b : db->balls) {
            check_point_dim(b.center, n, "ball center");
            if (!(b.radius > 0.0)) throw std::invalid_argument("ball radius must be > 0");
        }
        for (size_t i = 0; i < db->balls.size(); ++i)
            for (size_t j = i + 1; j < db->balls.size(); ++j) {
                const double d = (db->balls[i].center - db->balls[j].center).norm();
                if (!(d > db->balls[i].radius + db->balls[j].radius))
                    throw std::invalid_argument("disjoint_balls: closures of balls " +
                                                std::to_string(i) + " and " + std::to_string(j) +
                                                " are not disjoint");
            }
    } else {
        const auto& s = std::get<SmoothShape>(shape);
        check_point_dim(s.center, n, "smooth center");
        check_point_dim(s.semi_axes, n, "smooth semi_axes");
        if (s.semi_axes.minCoeff() <= 0.0)
            throw std::invalid_argument("smooth semi_axes must be > 0");
        if (!(s.mfs_offset > 0.0)) throw std::invalid_argument("mfs_offset must be > 0");
        if (s.mfs_sources <= 0 || s.collocation_points <= 0)
            throw std::invalid_argument("mfs point counts must be positive");
        if (s.mfs_sources > s.collocation_points)
            throw std::invalid_argument("mfs_sources must be <= collocation_points");
        if (!(s.fit_tolerance > 0.0)) throw std::invalid_argument("fit_tolerance must be > 0");
    }
}

bool DomainSpec::contains(const Vec& x) const {
    return boundary_distance(x) > 0.0;
}

double DomainSpec::boundary_distance(const Vec& x) const {
    const int n = dimension.value();
    check_point_dim(x, n, "boundary_distance");
    if (const auto* b = std::get_if<BallShape>(&shape)) {
        return std::max(0.0, b->radius - (x - b->center).norm());
    }
    if (const auto* db = std::get_if<DisjointBallsShape>(&shape)) {
        double best = 0.0;
        for (const auto& b : db->balls)
            best = std::max(best, b.radius - (x - b.center).norm());
        return std::max(0.0, best);
    }
    const auto& s = std::get<SmoothShape>(shape);
    // Scaled radial coordinate; exact for a ball, a sharp lower-bound style
    // surrogate for genuine ellipsoids (adequate for margins and sampling).
    const Vec u = (x - s.center).cwiseQuotient(s.semi_axes);
    const double r = u.norm();
    if (r >= 1.0) return 0.0;
    return (1.0 - r) * s.semi_axes.minCoeff();
}

int DomainSpec::component(const Vec& x) const {
    if (const auto* db = std::get_if<DisjointBallsShape>(&shape)) {
        for (size_t i = 0; i < db->balls.size(); ++i)
            if ((x - db->balls[i].center).norm() < db->balls[i].radius)
                return static_cast<int>(i);
        throw DomainError("point outside every component of the disjoint-balls domain");
    }
    if (!contains(x)) throw DomainError("point outside the domain");
    return 0;
}

int DomainSpec::component_count() const {
    if (const auto* db = std::get_if<DisjointBallsShape>(&shape))
        return static_cast<int>(db->balls.size());
    return 1;
}

double DomainSpec::diameter() const {
    if (const auto* b = std::get_if<BallShape>(&shape)) return 2.0 * b->radius;
    if (const auto* db = std::get_if<DisjointBallsShape>(&shape)) {
        double d = 0.0;
        for (const auto& a : db->balls)
            for (const auto& b : db->balls)
                d = std::max(d, (a.center - b.center).norm() + a.radius + b.radius);
        return d;
    }
    const auto& s = std::get<SmoothShape>(shape);
    return 2.0 * s.semi_axes.maxCoeff();
}

void DomainSpec::bounding_box(Vec& lo, Vec& hi) const {
    const int n = dimension.value();
    lo = Vec::Constant(n, std::numeric_limits<double>::infinity());
    hi = Vec::Constant(n, -std::numeric_limits<double>::infinity());
    auto grow = [&](const Vec& c, const Vec& r) {
        lo = lo.cwiseMin(c - r);
        hi = hi.cwiseMax(c + r);
    };
    if (const auto* b = std::get_if<BallShape>(&shape)) {
        grow(b->center, Vec::Constant(n, b->radius));
    } else if (const auto* db = std::get_if<DisjointBallsShape>(&shape)) {
        for (const auto& b : db->balls) grow(b.center, Vec::Constant(n, b.radius));
    } else {
        const auto& s = std::get<SmoothShape>(shape);
        grow(s.center, s.semi_axes);
    }
}

}  // namespace brn
