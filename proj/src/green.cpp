#include "brn/green.hpp"

#include "brn/bubble.hpp"
#include "src/image_charge.hpp"
#include "src/mfs_provider.hpp"

#include <cmath>

namespace brn {

namespace {

/// Free-space kernel as a function of the offset d = y - x:
/// f(d) = k |d|^{2-n}, k = 1 / ((n-2) omega_n).
struct FreeKernel {
    double k;
    int n;
    explicit FreeKernel(Dimension dim)
        : k(1.0 / ((dim.value() - 2.0) * sphere_area(dim))), n(dim.value()) {}

    double value(const Vec& d) const { return k * std::pow(d.norm(), 2.0 - n); }
    Vec grad(const Vec& d) const {
        const double r = d.norm();
        return k * (2.0 - n) * std::pow(r, -static_cast<double>(n)) * d;
    }
    Mat hess(const Vec& d) const {
        const double r = d.norm();
        const double rn = std::pow(r, -static_cast<double>(n));
        return k * (2.0 - n) *
               (rn * Mat::Identity(d.size(), d.size()) - n * rn / (r * r) * d * d.transpose());
    }
};

}  // namespace

double singular_part(const Vec& x, const Vec& y, Dimension n) {
    return FreeKernel(n).value(y - x);
}
Vec singular_part_grad_y(const Vec& x, const Vec& y, Dimension n) {
    return FreeKernel(n).grad(y - x);
}
Mat singular_part_hess_yy(const Vec& x, const Vec& y, Dimension n) {
    return FreeKernel(n).hess(y - x);
}

GreenProvider::GreenProvider(DomainSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    margin_ = 1e-3 * spec_.diameter();
}

void GreenProvider::require_interior(const Vec& x, const char* who) const {
    if (!spec_.contains(x))
        throw DomainError(std::string(who) + ": point is not interior to the domain");
}

void GreenProvider::require_distinct(const Vec& x, const Vec& y, const char* who) const {
    if ((x - y).norm() < 1e-14 * (1.0 + spec_.diameter()))
        throw SingularityError(std::string(who) + ": pole and field point coincide");
}

double GreenProvider::green(const Vec& x, const Vec& y) const {
    require_interior(x, "green");
    require_interior(y, "green");
    require_distinct(x, y, "green");
    return singular_part(x, y, spec_.dimension) - h_value(x, y);
}

Vec GreenProvider::grad_y_green(const Vec& x, const Vec& y) const {
    require_distinct(x, y, "grad_y_green");
    return singular_part_grad_y(x, y, spec_.dimension) - h_grad_y(x, y);
}

Vec GreenProvider::grad_x_green(const Vec& x, const Vec& y) const {
    require_distinct(x, y, "grad_x_green");
    return singular_part_grad_y(y, x, spec_.dimension) - h_grad_x(x, y);
}

Mat GreenProvider::hess_yy_green(const Vec& x, const Vec& y) const {
    require_distinct(x, y, "hess_yy_green");
    return singular_part_hess_yy(x, y, spec_.dimension) - h_hess_yy(x, y);
}

Mat GreenProvider::hess_xy_green(const Vec& x, const Vec& y) const {
    require_distinct(x, y, "hess_xy_green");
    // d^2 S / dx dy = -Hess_d f.
    return -singular_part_hess_yy(x, y, spec_.dimension) - h_hess_xy(x, y);
}

Mat GreenProvider::hess_xx_green(const Vec& x, const Vec& y) const {
    require_distinct(x, y, "hess_xx_green");
    return singular_part_hess_yy(x, y, spec_.dimension) - h_hess_xx(x, y);
}

RobinEvaluation GreenProvider::robin(const Vec& x) const {
    require_interior(x, "robin");
    RobinEvaluation out;
    out.location = x;
    out.value = h_value(x, x);
    out.gradient = h_grad_x(x, x) + h_grad_y(x, x);
    const Mat hxy = h_hess_xy(x, x);
    out.hessian = h_hess_xx(x, x) + h_hess_yy(x, x) + hxy + hxy.transpose();
    out.near_boundary = spec_.boundary_distance(x) < margin_;
    return out;
}

namespace {

/// Image-charge provider for a single ball B_rho(c): H is exactly the Kelvin
/// image kernel of the ball's own sphere.
class BallProvider : public GreenProvider {
public:
    BallProvider(DomainSpec spec, BallShape ball)
        : GreenProvider(std::move(spec)),
          image_(ball.center, ball.radius, dim(),
                 1.0 / ((dim() - 2.0) * sphere_area(spec_.dimension))) {}

    double h_value(const Vec& x, const Vec& y) const override { return image_.value(x, y); }
    Vec h_grad_y(const Vec& x, const Vec& y) const override { return image_.grad_y(x, y); }
    Mat h_hess_yy(const Vec& x, const Vec& y) const override { return image_.hess_yy(x, y); }
    Mat h_hess_xy(const Vec& x, const Vec& y) const override { return image_.hess_xy(x, y); }

private:
    ImageChargeKernel image_;
};

/// Disjoint union of balls: same-component pairs use the image formula of
/// their ball; cross-component pairs have G = 0, i.e. H = S.
class DisjointBallsProvider : public GreenProvider {
public:
    explicit DisjointBallsProvider(DomainSpec spec) : GreenProvider(std::move(spec)) {
        for (const auto& b : std::get<DisjointBallsShape>(spec_.shape).balls) {
            DomainSpec sub{spec_.dimension, b};
            balls_.push_back(std::make_unique<BallProvider>(std::move(sub), b));
        }
    }

    double h_value(const Vec& x, const Vec& y) const override {
        const int cx = spec_.component(x), cy = spec_.component(y);
        if (cx == cy) return balls_[cx]->h_value(x, y);
        return singular_part(x, y, spec_.dimension);
    }
    Vec h_grad_y(const Vec& x, const Vec& y) const override {
        const int cx = spec_.component(x), cy = spec_.component(y);
        if (cx == cy) return balls_[cx]->h_grad_y(x, y);
        return singular_part_grad_y(x, y, spec_.dimension);
    }
    Mat h_hess_yy(const Vec& x, const Vec& y) const override {
        const int cx = spec_.component(x), cy = spec_.component(y);
        if (cx == cy) return balls_[cx]->h_hess_yy(x, y);
        return singular_part_hess_yy(x, y, spec_.dimension);
    }
    Mat h_hess_xy(const Vec& x, const Vec& y) const override {
        const int cx = spec_.component(x), cy = spec_.component(y);
        if (cx == cy) return balls_[cx]->h_hess_xy(x, y);
        return -singular_part_hess_yy(x, y, spec_.dimension);
    }

private:
    std::vector<std::unique_ptr<BallProvider>> balls_;
};

}  // namespace

std::unique_ptr<GreenProvider> make_provider(DomainSpec spec) {
    spec.validate();
    if (const auto* b = std::get_if<BallShape>(&spec.shape)) {
        BallShape ball = *b;
        return std::make_unique<BallProvider>(std::move(spec), std::move(ball));
    }
    if (std::holds_alternative<DisjointBallsShape>(spec.shape))
        return std::make_unique<DisjointBallsProvider>(std::move(spec));
    return make_mfs_provider(std::move(spec));
}

}  // namespace brn
