#include "brn/bubble.hpp"
#include "src/image_charge.hpp"
#include "src/mfs_provider.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cmath>
#include <cstring>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

namespace brn {

namespace {

/// Van der Corput radical inverse in the given base.
double radical_inverse(unsigned long long i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

/// Low-discrepancy directions on S^{n-1}: Halton points pushed through
/// Box-Muller pairs and normalized.
std::vector<Vec> sphere_directions(int n, int count, unsigned long long skip) {
    const int pairs = (n + 1) / 2;
    std::vector<Vec> dirs;
    dirs.reserve(count);
    for (int c = 0; c < count; ++c) {
        const unsigned long long idx = skip + 31 + c;  // drop the early, clumpy prefix
        Vec z(n);
        for (int p = 0; p < pairs; ++p) {
            double u1 = radical_inverse(idx, kHaltonBases[2 * p]);
            const double u2 = radical_inverse(idx, kHaltonBases[2 * p + 1]);
            u1 = std::max(u1, 1e-16);
            const double rad = std::sqrt(-2.0 * std::log(u1));
            z[2 * p] = rad * std::cos(2.0 * M_PI * u2);
            if (2 * p + 1 < n) z[2 * p + 1] = rad * std::sin(2.0 * M_PI * u2);
        }
        const double norm = z.norm();
        if (norm < 1e-12) continue;
        dirs.push_back(z / norm);
    }
    return dirs;
}

/// Closest point on the ellipsoid boundary { c + diag(a) u : |u| = 1 } to the
/// interior point x. Lagrange form: b_i = c_i + w_i a_i^2 / (a_i^2 + mu) with
/// w = x - c and mu in (-a_min^2, 0] for interior x; the constraint value is
/// strictly decreasing in mu, so bisection is safe.
Vec ellipsoid_nearest_boundary(const Vec& center, const Vec& axes, const Vec& x) {
    const int n = static_cast<int>(x.size());
    Vec w = x - center;
    const double amin = axes.minCoeff();
    // tiny perturbation off exact symmetry planes keeps the Lagrange root
    // safely inside the bisection bracket below; it moves the resulting
    // boundary point by a comparable, negligible amount
    for (int i = 0; i < n; ++i)
        if (std::abs(w[i]) < 1e-8 * axes[i]) w[i] = 1e-8 * axes[i];
    auto constraint = [&](double mu) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a2 = axes[i] * axes[i];
            const double r = w[i] * a2 / ((a2 + mu) * axes[i]);
            s += r * r;
        }
        return s - 1.0;
    };
    double lo = -amin * amin * (1.0 - 1e-12), hi = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (constraint(mid) > 0.0 ? lo : hi) = mid;
    }
    const double mu = 0.5 * (lo + hi);
    Vec b(n);
    for (int i = 0; i < n; ++i) {
        const double a2 = axes[i] * axes[i];
        b[i] = center[i] + w[i] * a2 / (a2 + mu);
    }
    return b;
}

/// Minimum principal radius of curvature of the ellipsoid at boundary point b:
/// the shape operator of the level set F = sum ((y-c)_i / a_i)^2 is
/// P (Hess F / |grad F|) P restricted to the tangent space, P = I - nu nu^T.
double ellipsoid_min_curvature_radius(const Vec& center, const Vec& axes, const Vec& b) {
    const int n = static_cast<int>(b.size());
    Vec g(n);
    for (int i = 0; i < n; ++i) g[i] = (b[i] - center[i]) / (axes[i] * axes[i]);
    const Vec nu = g / g.norm();
    const Mat p = Mat::Identity(n, n) - nu * nu.transpose();
    Mat shape = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) shape(i, i) = 1.0 / (axes[i] * axes[i] * g.norm());
    shape = p * shape * p;
    Eigen::SelfAdjointEigenSolver<Mat> es(shape);
    return 1.0 / es.eigenvalues().maxCoeff();
}

/// MFS provider for smooth (ellipsoidal) domains. For each pole x the regular
/// part is split H(x,.) = T(x,.) + W(x,.): T is the image-charge kernel of the
/// sphere osculating the boundary at the point nearest to x (frozen per pole,
/// so its x-derivatives are closed forms), and the smooth remainder W is
/// expanded in free-space kernels with poles outside Omega, fitted so that
/// T + W matches S(x,.) on boundary collocation points. The preconditioner T
/// carries the near-boundary singular behaviour that a quasi-uniform source
/// cloud cannot resolve in high dimension; for a ball it equals H exactly.
/// The collocation matrix depends only on the geometry, so its factorization
/// is shared by all poles; per-pole coefficient vectors (and their first and
/// second x-derivatives, obtained by solving with differentiated right-hand
/// sides) are cached.
class MfsProvider : public GreenProvider {
public:
    explicit MfsProvider(DomainSpec spec) : GreenProvider(std::move(spec)) {
        const auto& s = std::get<SmoothShape>(spec_.shape);
        const int n = dim();
        kernel_scale_ = 1.0 / ((n - 2.0) * sphere_area(spec_.dimension));
        fit_tolerance_ = s.fit_tolerance;

        for (const auto& u : sphere_directions(n, s.collocation_points, 0))
            colloc_.push_back(s.center + s.semi_axes.cwiseProduct(u));
        for (const auto& u : sphere_directions(n, s.mfs_sources, 100000))
            sources_.push_back(s.center + (1.0 + s.mfs_offset) * s.semi_axes.cwiseProduct(u));
        for (const auto& u : sphere_directions(n, s.collocation_points / 4 + 16, 400000))
            heldout_.push_back(s.center + s.semi_axes.cwiseProduct(u));

        Mat A(colloc_.size(), sources_.size());
        for (size_t i = 0; i < colloc_.size(); ++i)
            for (size_t q = 0; q < sources_.size(); ++q)
                A(i, q) = kernel(sources_[q], colloc_[i]);
        // the kernel columns are highly correlated; rank-truncating the
        // factorization keeps the coefficients bounded so that boundary-level
        // accuracy carries into interior evaluations
        qr_ = std::make_unique<Eigen::ColPivHouseholderQR<Mat>>();
        qr_->setThreshold(1e-10);
        qr_->compute(A);
        A_ = std::move(A);
    }

    double h_value(const Vec& x, const Vec& y) const override {
        const auto fit = fit_for(x);
        const double v = fit->image ? fit->image->value(x, y) : 0.0;
        return v + sum_value(*fit, fit->c0, y);
    }

    Vec h_grad_y(const Vec& x, const Vec& y) const override {
        const auto fit = fit_for(x);
        const Vec g = fit->image ? fit->image->grad_y(x, y) : Vec(Vec::Zero(dim()));
        return g + sum_grad(*fit, fit->c0, y);
    }

    Mat h_hess_yy(const Vec& x, const Vec& y) const override {
        const auto fit = fit_for(x);
        const Mat h = fit->image ? fit->image->hess_yy(x, y) : Mat(Mat::Zero(dim(), dim()));
        return h + sum_hess(*fit, fit->c0, y);
    }

    Vec h_grad_x(const Vec& x, const Vec& y) const override {
        const auto fit = fit_for(x);
        Vec g(dim());
        for (int i = 0; i < dim(); ++i) g[i] = sum_value(*fit, fit->c1[i], y);
        if (fit->image) g += fit->image->grad_x(x, y);
        return g;
    }

    Mat h_hess_xy(const Vec& x, const Vec& y) const override {
        const auto fit = fit_for(x);
        Mat h(dim(), dim());
        for (int i = 0; i < dim(); ++i) h.row(i) = sum_grad(*fit, fit->c1[i], y).transpose();
        if (fit->image) h += fit->image->hess_xy(x, y);
        return h;
    }

    Mat h_hess_xx(const Vec& x, const Vec& y) const override {
        const auto fit = fit_for(x);
        Mat h(dim(), dim());
        for (int i = 0; i < dim(); ++i)
            for (int j = i; j < dim(); ++j) {
                const double v = sum_value(*fit, fit->c2[sym_index(i, j)], y);
                h(i, j) = v;
                h(j, i) = v;
            }
        if (fit->image) h += fit->image->hess_xx(x, y);
        return h;
    }

    double fit_residual(const Vec& x) const override { return fit_for(x)->residual; }

private:
    struct PoleFit {
        std::optional<ImageChargeKernel> image;  // osculating-sphere preconditioner
        std::vector<Vec> extra;   // pole-adapted sources clustered at the image
        Vec c0;                   // remainder W(x,.) coefficients (cloud + extra)
        std::vector<Vec> c1;      // d/dx_i coefficients
        std::vector<Vec> c2;      // d^2/dx_i dx_j, upper-triangular packing
        double residual = 0.0;    // max |S - H_fit| on held-out boundary points
    };

    // Coefficient vectors are laid out as [global cloud | per-pole extras].
    double sum_value(const PoleFit& f, const Vec& c, const Vec& y) const {
        double v = 0.0;
        for (size_t q = 0; q < sources_.size(); ++q) v += c[q] * kernel(sources_[q], y);
        for (size_t j = 0; j < f.extra.size(); ++j)
            v += c[sources_.size() + j] * kernel(f.extra[j], y);
        return v;
    }
    Vec sum_grad(const PoleFit& f, const Vec& c, const Vec& y) const {
        Vec g = Vec::Zero(dim());
        for (size_t q = 0; q < sources_.size(); ++q) g += c[q] * kernel_grad(sources_[q], y);
        for (size_t j = 0; j < f.extra.size(); ++j)
            g += c[sources_.size() + j] * kernel_grad(f.extra[j], y);
        return g;
    }
    Mat sum_hess(const PoleFit& f, const Vec& c, const Vec& y) const {
        Mat h = Mat::Zero(dim(), dim());
        for (size_t q = 0; q < sources_.size(); ++q) h += c[q] * kernel_hess(sources_[q], y);
        for (size_t j = 0; j < f.extra.size(); ++j)
            h += c[sources_.size() + j] * kernel_hess(f.extra[j], y);
        return h;
    }

    /// Pole-adapted extra sources: a tight cluster around the Kelvin image of
    /// x, sized by the image point's clearance from the boundary. They absorb
    /// the localized defect left by the spherical preconditioner when the
    /// boundary curvature is anisotropic. Empty when the image is (near)
    /// infinity or its clearance is too small to keep the cluster exterior.
    std::vector<Vec> cluster_sources(const Vec& x, const ImageChargeKernel& image) const {
        std::vector<Vec> out;
        if ((x - image.center()).norm() < 1e-6 * image.radius()) return out;
        const auto& s = std::get<SmoothShape>(spec_.shape);
        const Vec xs = image.image_point(x);
        const double q = ((xs - s.center).cwiseQuotient(s.semi_axes)).norm();
        if (q < 1.0 + 1e-6) return out;
        const double h = 0.4 * (q - 1.0) * s.semi_axes.minCoeff();
        auto push = [&](const Vec& p) {
            if (((p - s.center).cwiseQuotient(s.semi_axes)).norm() > 1.0 + 1e-9)
                out.push_back(p);
        };
        out.push_back(xs);
        // axis and diagonal offsets: together with the center they span the
        // multipole corrections through quadrupole order at the image point
        for (int i = 0; i < dim(); ++i)
            for (double sgn : {1.0, -1.0}) {
                Vec p = xs;
                p[i] += sgn * h;
                push(p);
            }
        const double hd = h / std::sqrt(2.0);
        for (int i = 0; i < dim(); ++i)
            for (int j = i + 1; j < dim(); ++j)
                for (double si : {1.0, -1.0})
                    for (double sj : {1.0, -1.0}) {
                        Vec p = xs;
                        p[i] += si * hd;
                        p[j] += sj * hd;
                        push(p);
                    }
        return out;
    }

    /// Osculating-sphere image preconditioner for the pole x. The pole lies on
    /// the inward normal of its nearest boundary point, so for depth d below
    /// the tangent sphere radius the Kelvin image sits on the outward normal
    /// ray, strictly outside any convex domain. A pole deeper than the local
    /// curvature radius (possible only away from the ball case) inflates the
    /// tangent sphere so that property is preserved.
    std::optional<ImageChargeKernel> preconditioner(const Vec& x) const {
        const auto& s = std::get<SmoothShape>(spec_.shape);
        const Vec b = ellipsoid_nearest_boundary(s.center, s.semi_axes, x);
        const double d = (x - b).norm();
        double rho = ellipsoid_min_curvature_radius(s.center, s.semi_axes, b);
        // the tolerance keeps rounding in d (one ulp for a center pole of a
        // ball) from spuriously inflating an exactly-tangent sphere
        if (d > rho * (1.0 + 1e-9)) rho = 1.25 * d;
        const Vec nu = (b - x) / d;  // outward normal direction at b
        ImageChargeKernel image(Vec(b - rho * nu), rho, dim(), kernel_scale_);
        // safety net, unreachable for convex shapes; the pole may coincide
        // with the sphere center (image at infinity), which is fine
        if ((x - image.center()).norm() > 1e-12 * rho &&
            spec_.contains(image.image_point(x)))
            return std::nullopt;
        return image;
    }

    int sym_index(int i, int j) const { return i * dim() - i * (i - 1) / 2 + (j - i); }

    double kernel(const Vec& s, const Vec& y) const {
        return kernel_scale_ * std::pow((y - s).norm(), 2.0 - dim());
    }
    Vec kernel_grad(const Vec& s, const Vec& y) const {
        const Vec d = y - s;
        const double r = d.norm();
        return kernel_scale_ * (2.0 - dim()) * std::pow(r, -static_cast<double>(dim())) * d;
    }
    Mat kernel_hess(const Vec& s, const Vec& y) const {
        const Vec d = y - s;
        const double r = d.norm();
        const double rn = std::pow(r, -static_cast<double>(dim()));
        return kernel_scale_ * (2.0 - dim()) *
               (rn * Mat::Identity(dim(), dim()) - dim() * rn / (r * r) * d * d.transpose());
    }

    std::shared_ptr<const PoleFit> fit_for(const Vec& x) const {
        const std::string key(reinterpret_cast<const char*>(x.data()), x.size() * sizeof(double));
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        auto fit = compute_fit(x);
        std::lock_guard<std::mutex> lock(mutex_);
        auto [it, inserted] = cache_.emplace(key, std::move(fit));
        return it->second;
    }

    std::shared_ptr<const PoleFit> compute_fit(const Vec& x) const {
        require_interior(x, "mfs fit");
        const int n = dim();
        auto fit = std::make_shared<PoleFit>();
        fit->image = preconditioner(x);

        if (fit->image) fit->extra = cluster_sources(x, *fit->image);
        const size_t ns = sources_.size(), m = fit->extra.size();

        // augmented least squares [A | E] via the Schur complement of the
        // shared factorization: solve the cloud part, then fit the extras to
        // the residual projected off the cloud's column space
        Mat E(colloc_.size(), m), G(ns, m);
        for (size_t j = 0; j < m; ++j) {
            for (size_t i = 0; i < colloc_.size(); ++i)
                E(i, j) = kernel(fit->extra[j], colloc_[i]);
            G.col(j) = qr_->solve(E.col(j));
        }
        const Mat RE = E - A_ * G;
        // far images make the cluster columns nearly collinear; rank-truncate
        // so redundant directions get zero weight instead of huge cancelling
        // coefficients that would leak noise into interior evaluations
        Eigen::ColPivHouseholderQR<Mat> re_qr;
        re_qr.setThreshold(1e-8);
        if (m > 0) re_qr.compute(RE);
        auto solve_aug = [&](const Vec& r) {
            Vec cloud = qr_->solve(r);
            Vec full(ns + m);
            if (m == 0) {
                full = cloud;
                return full;
            }
            const Vec d = re_qr.solve(Vec(r - A_ * cloud));
            full << cloud - G * d, d;
            return full;
        };

        Vec rhs(colloc_.size());
        for (size_t i = 0; i < colloc_.size(); ++i) {
            rhs[i] = singular_part(x, colloc_[i], spec_.dimension);
            if (fit->image) rhs[i] -= fit->image->value(x, colloc_[i]);
        }
        fit->c0 = solve_aug(rhs);

        // x-derivatives of the preconditioned boundary data, one vector /
        // matrix per collocation point, reused across the component loops
        std::vector<Vec> img_gx;
        std::vector<Mat> img_hxx;
        if (fit->image) {
            img_gx.reserve(colloc_.size());
            img_hxx.reserve(colloc_.size());
            for (const auto& b : colloc_) {
                img_gx.push_back(fit->image->grad_x(x, b));
                img_hxx.push_back(fit->image->hess_xx(x, b));
            }
        }

        fit->c1.resize(n);
        for (int h = 0; h < n; ++h) {
            Vec r(colloc_.size());
            for (size_t i = 0; i < colloc_.size(); ++i) {
                // dS/dx_h = -grad_d f evaluated at d = b - x
                const Vec d = colloc_[i] - x;
                const double rr = d.norm();
                r[i] = -kernel_scale_ * (2.0 - n) * std::pow(rr, -static_cast<double>(n)) * d[h];
                if (fit->image) r[i] -= img_gx[i][h];
            }
            fit->c1[h] = solve_aug(r);
        }

        fit->c2.resize(n * (n + 1) / 2);
        for (int h = 0; h < n; ++h)
            for (int l = h; l < n; ++l) {
                Vec r(colloc_.size());
                for (size_t i = 0; i < colloc_.size(); ++i) {
                    // d^2 S / dx_h dx_l = (Hess_d f)_{hl} at d = b - x
                    const Vec d = colloc_[i] - x;
                    const double rr = d.norm();
                    const double rn = std::pow(rr, -static_cast<double>(n));
                    double v = -n * rn / (rr * rr) * d[h] * d[l];
                    if (h == l) v += rn;
                    r[i] = kernel_scale_ * (2.0 - n) * v;
                    if (fit->image) r[i] -= img_hxx[i](h, l);
                }
                fit->c2[sym_index(h, l)] = solve_aug(r);
            }

        double res = 0.0;
        for (const auto& b : heldout_) {
            double hv = fit->image ? fit->image->value(x, b) : 0.0;
            hv += sum_value(*fit, fit->c0, b);
            res = std::max(res, std::abs(singular_part(x, b, spec_.dimension) - hv));
        }
        fit->residual = res;
        if (res > fit_tolerance_)
            throw FitError("MFS boundary fit residual " + std::to_string(res) +
                               " exceeds tolerance " + std::to_string(fit_tolerance_),
                           res);
        return fit;
    }

    double kernel_scale_;
    double fit_tolerance_;
    std::vector<Vec> colloc_;
    std::vector<Vec> sources_;
    std::vector<Vec> heldout_;
    Mat A_;
    std::unique_ptr<Eigen::ColPivHouseholderQR<Mat>> qr_;

    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, std::shared_ptr<const PoleFit>> cache_;
};

}  // namespace

std::unique_ptr<GreenProvider> make_mfs_provider(DomainSpec spec) {
    return std::make_unique<MfsProvider>(std::move(spec));
}

}  // namespace brn
