#pragma once

#include "brn/types.hpp"

namespace brn {

class GreenProvider;

/// Center and concentration scale of an Aubin-Talenti bubble.
struct BubbleParams {
    Vec center;
    double scale;  // lambda > 0

    BubbleParams(Vec c, double s) : center(std::move(c)), scale(s) {
        if (!(scale > 0.0)) throw std::invalid_argument("bubble scale must be > 0");
    }
};

/// Dimension-determined constants of the critical problem:
/// omega_n  surface measure of the unit sphere S^{n-1},
/// c_n      bubble amplitude (n(n-2))^{(n-2)/4},
/// a_const  integral of U^{(n+2)/(n-2)} over R^n,
/// b_const  integral of U^2 over R^n (finite only for n >= 5).
struct UniversalConstants {
    double omega_n;
    double c_n;
    double a_const;
    double b_const;

    static UniversalConstants for_dimension(Dimension n);
};

/// Surface measure of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(Dimension n);

/// Bubble amplitude C_n = (n(n-2))^{(n-2)/4}.
double bubble_amplitude(Dimension n);

/// U_{x,lambda}(y) = C_n lambda^{(n-2)/2} / (1 + lambda^2 |y-x|^2)^{(n-2)/2}.
double bubble_value(const BubbleParams& p, const Vec& y, Dimension n);

/// A = (n-2) omega_n C_n, the flux form of the integral of U^{(n+2)/(n-2)}.
double constant_A(Dimension n);

/// B = C_n^2 omega_n Beta(n/2, (n-4)/2) / 2; diverges for n <= 4.
double constant_B(Dimension n);

/// Leading-order harmonic projection of the bubble onto zero boundary values:
/// PU(y) ~ U_{x,lambda}(y) - (A / lambda^{(n-2)/2}) H(x, y).
/// Accurate to O(lambda^{-(n-2)/2}); the exact projection needs a PDE solve.
double projected_bubble(const BubbleParams& p, const Vec& y, const GreenProvider& g);

}  // namespace brn
