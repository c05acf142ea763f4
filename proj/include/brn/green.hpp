#pragma once

#include "brn/domain.hpp"
#include "brn/types.hpp"

#include <memory>

namespace brn {

/// Robin function R(x) = H(x,x) together with its first two derivatives.
struct RobinEvaluation {
    Vec location;
    double value;
    Vec gradient;
    Mat hessian;
    bool near_boundary = false;  // inside the provider's boundary margin
};

/// Singular (free-space) part S(x,y) = 1 / ((n-2) omega_n |x-y|^{n-2})
/// and its derivatives in the field point y.
double singular_part(const Vec& x, const Vec& y, Dimension n);
Vec singular_part_grad_y(const Vec& x, const Vec& y, Dimension n);
Mat singular_part_hess_yy(const Vec& x, const Vec& y, Dimension n);

/// Evaluator for the Green function G = S - H of a bounded domain and its
/// derivatives. Immutable after construction; all evaluations reentrant.
///
/// Derivative naming: x is the pole, y the field point. H is symmetric, so
/// x-derivatives are obtained from y-derivatives of the swapped pair where a
/// subclass does not supply them directly.
class GreenProvider {
public:
    explicit GreenProvider(DomainSpec spec);
    virtual ~GreenProvider() = default;

    const DomainSpec& spec() const { return spec_; }
    int dim() const { return spec_.dimension.value(); }
    double boundary_margin() const { return margin_; }

    // Regular part H and derivatives. x, y interior.
    virtual double h_value(const Vec& x, const Vec& y) const = 0;
    virtual Vec h_grad_y(const Vec& x, const Vec& y) const = 0;
    virtual Mat h_hess_yy(const Vec& x, const Vec& y) const = 0;
    /// d^2 H / dx_i dy_j
    virtual Mat h_hess_xy(const Vec& x, const Vec& y) const = 0;

    // Defaults exploit the symmetry H(x,y) = H(y,x); the MFS provider
    // overrides them with directly differentiated fits.
    virtual Vec h_grad_x(const Vec& x, const Vec& y) const { return h_grad_y(y, x); }
    virtual Mat h_hess_xx(const Vec& x, const Vec& y) const { return h_hess_yy(y, x); }

    /// Held-out boundary residual max |S(x,.) - H_fit(x,.)| of the fit backing
    /// this pole; identically 0 for closed-form providers.
    virtual double fit_residual(const Vec& x) const {
        require_interior(x, "fit_residual");
        return 0.0;
    }

    // Green function G = S - H and derivatives; x != y, both interior.
    double green(const Vec& x, const Vec& y) const;
    Vec grad_y_green(const Vec& x, const Vec& y) const;
    Vec grad_x_green(const Vec& x, const Vec& y) const;
    Mat hess_yy_green(const Vec& x, const Vec& y) const;
    Mat hess_xy_green(const Vec& x, const Vec& y) const;
    Mat hess_xx_green(const Vec& x, const Vec& y) const;

    /// R(x) = H(x,x); gradient 2 (grad_x H)(x,x) by symmetry; Hessian from
    /// the full second differential of H along the diagonal.
    RobinEvaluation robin(const Vec& x) const;

    void require_interior(const Vec& x, const char* who) const;
    void require_distinct(const Vec& x, const Vec& y, const char* who) const;

protected:
    DomainSpec spec_;
    double margin_;  // near-boundary warning margin
};

/// Construct the provider matching the spec: closed-form image charges for
/// balls and disjoint balls, an MFS least-squares fit for smooth domains.
std::unique_ptr<GreenProvider> make_provider(DomainSpec spec);

}  // namespace brn
