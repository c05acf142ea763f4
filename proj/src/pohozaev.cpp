#include "brn/pohozaev.hpp"

#include "brn/bubble.hpp"

#include <cmath>
#include <random>

namespace brn {

namespace {

struct FieldEval {
    double v;
    Vec g;
};

using Kernel = std::function<double(const FieldEval&, const FieldEval&, const Vec&)>;

Kernel p_kernel(int n, double theta) {
    const double c = (2.0 - n) / 4.0;
    return [=](const FieldEval& u, const FieldEval& v, const Vec& nu) {
        const double un = u.g.dot(nu), vn = v.g.dot(nu);
        return -theta * un * vn + 0.5 * theta * u.g.dot(v.g) + c * (un * v.v + vn * u.v);
    };
}

Kernel q_kernel(int i) {
    return [=](const FieldEval& u, const FieldEval& v, const Vec& nu) {
        return -v.g.dot(nu) * u.g[i] - u.g.dot(nu) * v.g[i] + u.g.dot(v.g) * nu[i];
    };
}

// --- Gauss-Legendre nodes on [-1, 1] ---------------------------------------

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.resize(m);
    w.resize(m);
    for (int i = 0; i < m; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (t * p1 - p0) / (t * t - 1.0);
            const double dt = -p1 / dp;
            t += dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

/// Tensor-product nodes on S^{n-1}: Gauss-Legendre in the n-2 polar angles,
/// uniform in the azimuth. Weights sum to omega_n.
void product_sphere_nodes(int n, int per_angle, std::vector<Vec>& dirs,
                          std::vector<double>& weights) {
    std::vector<double> gx, gw;
    gauss_legendre(per_angle, gx, gw);
    const int naz = 2 * per_angle;

    dirs.clear();
    weights.clear();
    std::vector<int> idx(n - 2, 0);
    for (;;) {
        double wpolar = 1.0;
        std::vector<double> phi(n - 2);
        for (int i = 0; i < n - 2; ++i) {
            phi[i] = 0.5 * M_PI * (gx[idx[i]] + 1.0);
            wpolar *= 0.5 * M_PI * gw[idx[i]] * std::pow(std::sin(phi[i]), n - 2 - i);
        }
        for (int a = 0; a < naz; ++a) {
            const double az = 2.0 * M_PI * (a + 0.5) / naz;
            Vec d(n);
            double s = 1.0;
            for (int i = 0; i < n - 2; ++i) {
                d[i] = s * std::cos(phi[i]);
                s *= std::sin(phi[i]);
            }
            d[n - 2] = s * std::cos(az);
            d[n - 1] = s * std::sin(az);
            dirs.push_back(std::move(d));
            weights.push_back(wpolar * 2.0 * M_PI / naz);
        }
        int pos = n - 3;
        while (pos >= 0 && ++idx[pos] == per_angle) idx[pos--] = 0;
        if (pos < 0) break;
    }
}

bool singular_at(const ScalarField& f, const Vec& center) {
    return f.pole && f.sing_value && f.sing_grad && ((*f.pole) - center).norm() < 1e-12;
}

FieldEval eval(const ScalarField& f, const Vec& y) { return {f.value(y), f.grad(y)}; }
FieldEval eval_sing(const ScalarField& f, const Vec& y) { return {f.sing_value(y), f.sing_grad(y)}; }

// When both fields carry their free-space singular component at the
// quadrature center, the pure singular-singular product is removed
// pointwise. Its exact surface integral vanishes for every kernel used
// here: the translation kernel cancels pointwise on concentric spheres,
// the dilation kernel is odd in the direction, and the derivative-slot
// kernels reduce to a zero-mean quadratic in the direction. Subtracting
// it therefore changes nothing analytically while removing both the
// dominant Monte Carlo noise and the worst resolution demand on the
// product rule.
QuadratureResult quadrature(const Kernel& kern, const ScalarField& u, const ScalarField& v,
                            const SphereQuadrature& q, Dimension dim) {
    const int n = dim.value();
    if (q.center.size() != n) throw DomainError("quadrature center dimension mismatch");
    if (!(q.radius > 0.0)) throw DomainError("quadrature radius must be > 0");

    const bool compensate = singular_at(u, q.center) && singular_at(v, q.center);

    if (const auto* prod = std::get_if<ProductScheme>(&q.scheme)) {
        std::vector<Vec> dirs;
        std::vector<double> weights;
        product_sphere_nodes(n, prod->points_per_angle, dirs, weights);
        const double surf = std::pow(q.radius, n - 1);
        double acc = 0.0;
        for (size_t i = 0; i < dirs.size(); ++i) {
            const Vec y = q.center + q.radius * dirs[i];
            double f = kern(eval(u, y), eval(v, y), dirs[i]);
            if (compensate) f -= kern(eval_sing(u, y), eval_sing(v, y), dirs[i]);
            acc += weights[i] * f;
        }
        return {acc * surf, 0.0};
    }

    const auto& mc = std::get<MonteCarloScheme>(q.scheme);
    std::mt19937_64 rng(mc.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const long pairs = std::max(1L, mc.samples / 2);
    const double area = sphere_area(dim) * std::pow(q.radius, n - 1);

    double sum = 0.0, sumsq = 0.0;
    for (long s = 0; s < pairs; ++s) {
        Vec d(n);
        do {
            for (int i = 0; i < n; ++i) d[i] = gauss(rng);
        } while (d.norm() < 1e-12);
        d /= d.norm();

        double val = 0.0;
        for (int sign = 0; sign < 2; ++sign) {  // antithetic pair
            const Vec nu = sign ? Vec(-d) : d;
            const Vec y = q.center + q.radius * nu;
            double f = kern(eval(u, y), eval(v, y), nu);
            if (compensate) f -= kern(eval_sing(u, y), eval_sing(v, y), nu);
            val += 0.5 * f;
        }
        sum += val;
        sumsq += val * val;
    }
    const double mean = sum / pairs;
    const double var = std::max(0.0, sumsq / pairs - mean * mean);
    return {area * mean, area * std::sqrt(var / pairs)};
}

}  // namespace

ScalarField green_field(const GreenProvider& g, const Vec& pole) {
    g.require_interior(pole, "green_field");
    const Dimension n = g.spec().dimension;
    ScalarField f;
    f.value = [&g, pole](const Vec& y) { return g.green(pole, y); };
    f.grad = [&g, pole](const Vec& y) { return g.grad_y_green(pole, y); };
    f.pole = pole;
    f.sing_value = [pole, n](const Vec& y) { return singular_part(pole, y, n); };
    f.sing_grad = [pole, n](const Vec& y) { return singular_part_grad_y(pole, y, n); };
    return f;
}

// Derivative of the Green function in the h-th coordinate of its pole,
// as a field in the running variable. This is the object the
// concentration analysis pairs with peak-location perturbations.
ScalarField green_deriv_field(const GreenProvider& g, const Vec& pole, int h) {
    g.require_interior(pole, "green_deriv_field");
    const Dimension n = g.spec().dimension;
    ScalarField f;
    f.value = [&g, pole, h](const Vec& y) { return g.grad_x_green(pole, y)[h]; };
    f.grad = [&g, pole, h](const Vec& y) { return Vec(g.hess_xy_green(pole, y).row(h)); };
    f.pole = pole;
    // pole derivative of the free-space kernel: minus the running-variable one
    f.sing_value = [pole, n, h](const Vec& y) { return -singular_part_grad_y(pole, y, n)[h]; };
    f.sing_grad = [pole, n, h](const Vec& y) {
        return Vec(-singular_part_hess_yy(pole, y, n).row(h));
    };
    return f;
}

QuadratureResult form_P(const ScalarField& u, const ScalarField& v, const SphereQuadrature& q,
                        Dimension n) {
    return quadrature(p_kernel(n.value(), q.radius), u, v, q, n);
}

QuadratureResult form_Q(const ScalarField& u, const ScalarField& v, int direction,
                        const SphereQuadrature& q, Dimension n) {
    return quadrature(q_kernel(direction), u, v, q, n);
}

QuadratureResult form_P1(const ScalarField& u, const ScalarField& dv, const SphereQuadrature& q,
                         Dimension n) {
    return form_P(u, dv, q, n);
}

QuadratureResult form_Q1(const ScalarField& u, const ScalarField& dv, int direction,
                         const SphereQuadrature& q, Dimension n) {
    return form_Q(u, dv, direction, q, n);
}

std::vector<IdentityResidual> verify_identities(const GreenProvider& g,
                                                const std::vector<Vec>& poles,
                                                const SphereQuadrature& q) {
    const int n = g.dim();
    const Dimension dim = g.spec().dimension;
    const int k = static_cast<int>(poles.size());
    for (int j = 0; j < k; ++j) {
        if (g.spec().boundary_distance(poles[j]) <= q.radius)
            throw DomainError("verify_identities: quadrature ball leaves the domain");
        for (int l = j + 1; l < k; ++l)
            if ((poles[j] - poles[l]).norm() <= 4.0 * q.radius)
                throw DomainError("verify_identities: poles closer than 4 quadrature radii");
    }

    std::vector<IdentityResidual> out;
    for (int j = 0; j < k; ++j) {
        const RobinEvaluation rj = g.robin(poles[j]);

        // per-family reference scales for the relative residuals
        const double scale_p = 0.5 * (n - 2.0) * rj.value;
        const double scale_q = std::max(rj.gradient.cwiseAbs().maxCoeff(), 1e-3 * scale_p);
        const double scale_q1 = std::max(rj.hessian.cwiseAbs().maxCoeff(), 1e-3 * scale_p);

        auto closed_G = [&](int m, int l) -> double {
            // closed form of the P family for the (m, l) pair around pole j
            if (m == j && l == j) return -0.5 * (n - 2.0) * rj.value;
            if (m == j) return 0.25 * (n - 2.0) * g.green(poles[j], poles[l]);
            if (l == j) return 0.25 * (n - 2.0) * g.green(poles[j], poles[m]);
            return 0.0;
        };

        for (int m = 0; m < k; ++m) {
            const ScalarField um = green_field(g, poles[m]);
            for (int l = 0; l < k; ++l) {
                const ScalarField vl = green_field(g, poles[l]);
                const std::string tag = "[j=" + std::to_string(j) + ",m=" + std::to_string(m) +
                                        ",l=" + std::to_string(l) + "]";

                auto push = [&](const std::string& name, const QuadratureResult& r1,
                                const QuadratureResult& r2, double rhs, double scale) {
                    IdentityResidual res;
                    res.name = name;
                    res.numeric_lhs = r1.value;
                    res.closed_form_rhs = rhs;
                    res.abs_residual = std::abs(r1.value - rhs);
                    res.rel_residual = res.abs_residual / std::abs(scale);
                    res.theta_pair_drift = std::abs(r1.value - r2.value);
                    res.std_error = std::hypot(r1.std_error, r2.std_error);
                    out.push_back(std::move(res));
                };

                SphereQuadrature qj{poles[j], q.radius, q.scheme};
                SphereQuadrature qj2{poles[j], 0.5 * q.radius, q.scheme};

                push("P" + tag, form_P(um, vl, qj, dim), form_P(um, vl, qj2, dim),
                     closed_G(m, l), scale_p);

                for (int i = 0; i < n; ++i) {
                    double rhs = 0.0;
                    if (m == j && l == j)
                        rhs = -rj.gradient[i];
                    else if (l == j)
                        rhs = g.grad_y_green(poles[m], poles[j])[i];
                    else if (m == j)
                        rhs = g.grad_y_green(poles[l], poles[j])[i];
                    push("Q_i" + std::to_string(i) + tag, form_Q(um, vl, i, qj, dim),
                         form_Q(um, vl, i, qj2, dim), rhs, scale_q);
                }

                for (int h = 0; h < n; ++h) {
                    const ScalarField dvh = green_deriv_field(g, poles[l], h);
                    double rhs = 0.0;
                    if (m == j && l == j)
                        rhs = -0.25 * (n - 1.0) * rj.gradient[h];
                    else if (m == j)
                        rhs = 0.25 * (n - 2.0) * g.grad_x_green(poles[l], poles[j])[h];
                    else if (l == j)
                        rhs = 0.25 * n * g.grad_y_green(poles[m], poles[j])[h];
                    push("P1_h" + std::to_string(h) + tag, form_P1(um, dvh, qj, dim),
                         form_P1(um, dvh, qj2, dim), rhs, scale_q);

                    for (int i = 0; i < n; ++i) {
                        double rhs2 = 0.0;
                        if (m == j && l == j)
                            rhs2 = -0.5 * rj.hessian(i, h);
                        else if (l == j)
                            rhs2 = g.hess_yy_green(poles[m], poles[j])(i, h);
                        else if (m == j)
                            rhs2 = g.hess_xy_green(poles[l], poles[j])(h, i);
                        push("Q1_i" + std::to_string(i) + "_h" + std::to_string(h) + tag,
                             form_Q1(um, dvh, i, qj, dim), form_Q1(um, dvh, i, qj2, dim), rhs2,
                             scale_q1);
                    }
                }
            }
        }
    }
    return out;
}

Vec balance_residual(const GreenProvider& g, const CriticalPoint& cp, double epsilon,
                     const UniversalConstants& consts) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("balance_residual: epsilon must be > 0");
    const int n = g.dim();
    const int k = cp.config.k();
    const double m = (n - 2.0) / 2.0;
    const double scale = std::pow(epsilon, -1.0 / (n - 4.0));

    Vec lam_eps(k);
    for (int j = 0; j < k; ++j) lam_eps[j] = scale / cp.config.scales[j];

    Vec res(k);
    for (int j = 0; j < k; ++j) {
        double v = g.robin(cp.config.points[j]).value / std::pow(lam_eps[j], n - 2.0);
        for (int l = 0; l < k; ++l) {
            if (l == j) continue;
            v -= g.green(cp.config.points[j], cp.config.points[l]) /
                 std::pow(lam_eps[j] * lam_eps[l], m);
        }
        v -= 2.0 * consts.b_const * epsilon /
             (consts.a_const * consts.a_const * (n - 2.0) * lam_eps[j] * lam_eps[j]);
        res[j] = v;
    }
    return res;
}

}  // namespace brn
