#pragma once

#include "brn/types.hpp"

#include <cmath>

namespace brn {

/// Image-charge kernel of a sphere B_rho(c):
///   T(x,y) = k rho^{n-2} t^{-(n-2)/2},
///   t(x,y) = |u|^2 |v|^2 - 2 rho^2 u.v + rho^4,  u = x - c, v = y - c,
/// with k = 1 / ((n-2) omega_n). t is a symmetric polynomial bounded below by
/// (rho^2 - |u||v|)^2 > 0 inside the sphere, so T and all derivatives are
/// smooth there. For the ball domain itself T is exactly the regular part H;
/// for other domains it serves as a harmonic preconditioner whose only
/// singularity (the Kelvin image of x) lies outside the sphere.
class ImageChargeKernel {
public:
    ImageChargeKernel(Vec center, double radius, int n, double kernel_scale)
        : center_(std::move(center)),
          n_(n),
          m_((n - 2.0) / 2.0),
          rho2_(radius * radius),
          amp_(kernel_scale * std::pow(radius, n - 2.0)) {}

    const Vec& center() const { return center_; }
    double radius() const { return std::sqrt(rho2_); }

    /// Kelvin image of the pole x; the y-singularity of T(x, .).
    Vec image_point(const Vec& x) const {
        const Vec u = x - center_;
        return center_ + rho2_ / u.squaredNorm() * u;
    }

    double value(const Vec& x, const Vec& y) const { return amp_ * std::pow(t(x, y), -m_); }

    Vec grad_y(const Vec& x, const Vec& y) const {
        const Vec u = x - center_, v = y - center_;
        return -m_ * amp_ * std::pow(t(x, y), -m_ - 1.0) * t_y(u, v);
    }

    Vec grad_x(const Vec& x, const Vec& y) const { return grad_y(y, x); }

    Mat hess_yy(const Vec& x, const Vec& y) const {
        const Vec u = x - center_, v = y - center_;
        const double tv = t(x, y);
        const Vec ty = t_y(u, v);
        const Mat tyy = 2.0 * u.squaredNorm() * Mat::Identity(n_, n_);
        return amp_ * (m_ * (m_ + 1.0) * std::pow(tv, -m_ - 2.0) * ty * ty.transpose() -
                       m_ * std::pow(tv, -m_ - 1.0) * tyy);
    }

    Mat hess_xx(const Vec& x, const Vec& y) const { return hess_yy(y, x); }

    /// (i,j) entry is d^2 T / dx_i dy_j.
    Mat hess_xy(const Vec& x, const Vec& y) const {
        const Vec u = x - center_, v = y - center_;
        const double tv = t(x, y);
        const Vec tx = t_y(v, u);  // d t / dx by the u <-> v symmetry
        const Vec ty = t_y(u, v);
        const Mat txy = 4.0 * u * v.transpose() - 2.0 * rho2_ * Mat::Identity(n_, n_);
        return amp_ * (m_ * (m_ + 1.0) * std::pow(tv, -m_ - 2.0) * tx * ty.transpose() -
                       m_ * std::pow(tv, -m_ - 1.0) * txy);
    }

private:
    double t(const Vec& x, const Vec& y) const {
        const Vec u = x - center_, v = y - center_;
        return u.squaredNorm() * v.squaredNorm() - 2.0 * rho2_ * u.dot(v) + rho2_ * rho2_;
    }
    Vec t_y(const Vec& u, const Vec& v) const {
        return 2.0 * u.squaredNorm() * v - 2.0 * rho2_ * u;
    }

    Vec center_;
    int n_;
    double m_;
    double rho2_;
    double amp_;
};

}  // namespace brn
