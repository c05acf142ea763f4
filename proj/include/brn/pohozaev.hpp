#pragma once

#include "brn/critical.hpp"
#include "brn/green.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace brn {

struct MonteCarloScheme {
    long samples = 100000;
    std::uint64_t seed = 1;
};

struct ProductScheme {
    int points_per_angle = 12;
};

/// Quadrature sphere dB_theta(center); the closed ball must stay inside the
/// domain and clear of every other pole.
struct SphereQuadrature {
    Vec center;
    double radius;
    std::variant<MonteCarloScheme, ProductScheme> scheme;
};

struct QuadratureResult {
    double value;
    double std_error;  // 0 for the product rule
};

/// Scalar field with gradient, as consumed by the surface quadratic forms.
/// When a field is singular at the quadrature center, its free-space singular
/// component can be attached; the quadrature then subtracts the pure
/// singular-singular product pointwise and re-integrates it with a
/// deterministic product rule, which removes the dominant zero-mean noise
/// from the Monte Carlo estimate.
struct ScalarField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    std::optional<Vec> pole;
    std::function<double(const Vec&)> sing_value;
    std::function<Vec(const Vec&)> sing_grad;
};

/// y -> G(pole, y) with the S(pole, .) singular component attached.
ScalarField green_field(const GreenProvider& g, const Vec& pole);
/// y -> d/dy_h G(pole, y) with the d/dy_h S(pole, .) singular component.
ScalarField green_deriv_field(const GreenProvider& g, const Vec& pole, int h);

/// Translation Pohozaev surface form
///   P(u,v) = -theta I[(du.nu)(dv.nu)] + theta/2 I[du.dv]
///            + (2-n)/4 I[(du.nu) v + (dv.nu) u],
/// theta-independent for u, v harmonic in the punctured ball.
QuadratureResult form_P(const ScalarField& u, const ScalarField& v, const SphereQuadrature& q,
                        Dimension n);

/// Dilation-type form
///   Q_i(u,v) = -I[(dv.nu) du_i] - I[(du.nu) dv_i] + I[(du.dv) nu_i].
QuadratureResult form_Q(const ScalarField& u, const ScalarField& v, int direction,
                        const SphereQuadrature& q, Dimension n);

/// Same kernels evaluated with a derivative field in the second slot.
QuadratureResult form_P1(const ScalarField& u, const ScalarField& dv, const SphereQuadrature& q,
                         Dimension n);
QuadratureResult form_Q1(const ScalarField& u, const ScalarField& dv, int direction,
                         const SphereQuadrature& q, Dimension n);

struct IdentityResidual {
    std::string name;
    double numeric_lhs;
    double closed_form_rhs;
    double abs_residual;
    double rel_residual;       // relative to a per-family reference scale
    double theta_pair_drift;   // |value(theta) - value(theta/2)|
    double std_error;          // combined MC standard error (0 for product rule)
};

/// Evaluates every case of the four Green-identity families for the given
/// poles, comparing quadrature against closed forms from the provider.
/// Quadrature balls are centered at each pole with q.radius; poles must be
/// pairwise separated by more than 4 radii.
std::vector<IdentityResidual> verify_identities(const GreenProvider& g,
                                                const std::vector<Vec>& poles,
                                                const SphereQuadrature& q);

/// Per-peak residual of the concentration balance equation at scale epsilon,
/// with lambda_{j,eps} = eps^{-1/(n-4)} / lambda_j. Vanishes (to rounding)
/// at exact critical points.
Vec balance_residual(const GreenProvider& g, const CriticalPoint& cp, double epsilon,
                     const UniversalConstants& consts);

}  // namespace brn
