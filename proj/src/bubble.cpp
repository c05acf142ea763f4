#include "brn/bubble.hpp"

#include "brn/green.hpp"

#include <cmath>

namespace brn {

double sphere_area(Dimension n) {
    const double nd = n.value();
    return 2.0 * std::pow(M_PI, nd / 2.0) / std::tgamma(nd / 2.0);
}

double bubble_amplitude(Dimension n) {
    const double nd = n.value();
    return std::pow(nd * (nd - 2.0), (nd - 2.0) / 4.0);
}

double bubble_value(const BubbleParams& p, const Vec& y, Dimension n) {
    const double nd = n.value();
    const double r2 = (y - p.center).squaredNorm();
    const double lam = p.scale;
    return bubble_amplitude(n) * std::pow(lam, (nd - 2.0) / 2.0) /
           std::pow(1.0 + lam * lam * r2, (nd - 2.0) / 2.0);
}

double constant_A(Dimension n) {
    if (n.value() < 5)
        throw DimensionError("constant_A requires n >= 5, got " + std::to_string(n.value()));
    const double nd = n.value();
    // Flux identity: -Delta U = U^{(n+2)/(n-2)} and U ~ C_n |y|^{2-n} at infinity.
    return (nd - 2.0) * sphere_area(n) * bubble_amplitude(n);
}

double constant_B(Dimension n) {
    if (n.value() < 5)
        throw DimensionError("constant_B diverges for n <= 4, got " + std::to_string(n.value()));
    const double nd = n.value();
    const double cn = bubble_amplitude(n);
    // int_0^inf r^{n-1} (1+r^2)^{2-n} dr = Beta(n/2, (n-4)/2) / 2.
    const double beta = std::tgamma(nd / 2.0) * std::tgamma((nd - 4.0) / 2.0) / std::tgamma(nd - 2.0);
    return cn * cn * sphere_area(n) * 0.5 * beta;
}

UniversalConstants UniversalConstants::for_dimension(Dimension n) {
    return UniversalConstants{sphere_area(n), bubble_amplitude(n), constant_A(n), constant_B(n)};
}

double projected_bubble(const BubbleParams& p, const Vec& y, const GreenProvider& g) {
    g.require_interior(p.center, "projected_bubble");
    g.require_interior(y, "projected_bubble");
    const Dimension n = g.spec().dimension;
    const double a = constant_A(n);
    const double m = (n.value() - 2.0) / 2.0;
    return bubble_value(p, y, n) - a / std::pow(p.scale, m) * g.h_value(p.center, y);
}

}  // namespace brn
