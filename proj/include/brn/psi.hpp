#pragma once

#include "brn/bubble.hpp"
#include "brn/green.hpp"
#include "brn/types.hpp"

#include <vector>

namespace brn {

/// Candidate peak locations and concentration scales, the argument of the
/// reduced energy. Gradient/Hessian layout: peak-major position block of
/// k*n entries, then the k scales.
struct PeakConfig {
    std::vector<Vec> points;
    Vec scales;

    int k() const { return static_cast<int>(points.size()); }
    void validate(double dedup_tol = 1e-12) const;
};

/// Symmetric k x k matrix with Robin values on the diagonal and negative
/// mutual Green values off-diagonal.
struct InteractionMatrix {
    Mat entries;
    double smallest_eigenvalue;
};

InteractionMatrix m_matrix(const GreenProvider& g, const std::vector<Vec>& points);

bool is_positive(const InteractionMatrix& m, double tol);
/// Scale-free default tolerance: 1e-10 * ||M||.
bool is_positive(const InteractionMatrix& m);

/// Reduced energy
///   Psi_k(a, lambda) = A^2 (M_k(a) mu, mu) - B sum lambda_j^2,
/// with mu_j = lambda_j^{(n-2)/2}.
double psi_value(const GreenProvider& g, const PeakConfig& c, const UniversalConstants& consts);

/// Analytic gradient, length k*n + k.
Vec psi_grad(const GreenProvider& g, const PeakConfig& c, const UniversalConstants& consts);

/// Analytic Hessian, (k*n + k)^2, exactly symmetric by construction.
Mat psi_hess(const GreenProvider& g, const PeakConfig& c, const UniversalConstants& consts);

}  // namespace brn
