#pragma once

// Independent test oracles: adaptive quadrature, Monte Carlo geometry
// estimates, and finite-difference derivatives. Kept free of the library's
// runtime paths on purpose.

#include "brn/types.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 40) {
    const double c = 0.5 * (a + b);
    const double whole = simpson(f, a, b);
    const double left = simpson(f, a, c), right = simpson(f, c, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, c, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, c, b, 0.5 * tol, depth - 1);
}

/// Radial integral int_0^inf r^{n-1} g(r) dr via [0, r_cut] quadrature plus
/// the leading analytic tail term for g(r) ~ r^{-p} (p > n).
inline double radial_integral(const std::function<double(double)>& g, int n, double tail_power,
                              double r_cut = 1e4, double tol = 1e-12) {
    auto f = [&](double r) { return std::pow(r, n - 1) * g(r); };
    // split at 1 so the adaptive rule resolves the near-origin region well
    double v = adaptive_simpson(f, 0.0, 1.0, tol) + adaptive_simpson(f, 1.0, r_cut, tol);
    // tail: r^{n-1} g ~ r^{n-1-tail_power}
    const double q = tail_power - n;  // decay exponent of the integrand tail + 1
    v += f(r_cut) * r_cut / q;
    return v;
}

/// Monte Carlo estimate of the unit-sphere surface area via the ball volume,
/// omega_n = n * V_n.
inline double mc_sphere_area(int n, long samples, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    long hits = 0;
    for (long s = 0; s < samples; ++s) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = u(rng);
            r2 += x * x;
        }
        if (r2 <= 1.0) ++hits;
    }
    const double volume = std::pow(2.0, n) * static_cast<double>(hits) / samples;
    return n * volume;
}

/// Central-difference gradient of a scalar function of a vector.
inline brn::Vec fd_gradient(const std::function<double(const brn::Vec&)>& f, const brn::Vec& x,
                            double h) {
    brn::Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        brn::Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// Central-difference Jacobian of a vector function (used to difference
/// analytic gradients into Hessians).
inline brn::Mat fd_jacobian(const std::function<brn::Vec(const brn::Vec&)>& f, const brn::Vec& x,
                            double h) {
    const brn::Vec f0 = f(x);
    brn::Mat j(f0.size(), x.size());
    for (int i = 0; i < x.size(); ++i) {
        brn::Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return j;
}

/// Finite-difference Laplacian with the standard 2n+1 stencil.
inline double fd_laplacian(const std::function<double(const brn::Vec&)>& f, const brn::Vec& x,
                           double h) {
    double acc = -2.0 * x.size() * f(x);
    for (int i = 0; i < x.size(); ++i) {
        brn::Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        acc += f(xp) + f(xm);
    }
    return acc / (h * h);
}

/// Bisection root finder for a scalar function on [a, b].
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a);
    for (int it = 0; it < 400; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = f(c);
        if (b - a < tol) return c;
        if ((fa < 0.0) == (fc < 0.0)) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace oracle
