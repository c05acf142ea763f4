#include "brn/psi.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace brn {

void PeakConfig::validate(double dedup_tol) const {
    if (points.empty()) throw std::invalid_argument("PeakConfig needs at least one peak");
    if (scales.size() != k()) throw std::invalid_argument("PeakConfig scales/points size mismatch");
    if (scales.minCoeff() <= 0.0) throw std::invalid_argument("PeakConfig scales must be > 0");
    for (size_t i = 0; i < points.size(); ++i)
        for (size_t j = i + 1; j < points.size(); ++j)
            if ((points[i] - points[j]).norm() <= dedup_tol)
                throw SingularityError("PeakConfig points " + std::to_string(i) + " and " +
                                       std::to_string(j) + " coincide");
}

InteractionMatrix m_matrix(const GreenProvider& g, const std::vector<Vec>& points) {
    const int k = static_cast<int>(points.size());
    Mat m(k, k);
    for (int i = 0; i < k; ++i) {
        m(i, i) = g.robin(points[i]).value;
        for (int j = i + 1; j < k; ++j) {
            const double val = -g.green(points[i], points[j]);
            m(i, j) = val;
            m(j, i) = val;
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(m, Eigen::EigenvaluesOnly);
    return InteractionMatrix{std::move(m), eig.eigenvalues().minCoeff()};
}

bool is_positive(const InteractionMatrix& m, double tol) {
    return m.smallest_eigenvalue > tol;
}

bool is_positive(const InteractionMatrix& m) {
    return is_positive(m, 1e-10 * m.entries.norm());
}

double psi_value(const GreenProvider& g, const PeakConfig& c, const UniversalConstants& consts) {
    c.validate();
    const double m = (g.dim() - 2.0) / 2.0;
    const double a2 = consts.a_const * consts.a_const;
    const InteractionMatrix mk = m_matrix(g, c.points);
    Vec mu(c.k());
    for (int j = 0; j < c.k(); ++j) mu[j] = std::pow(c.scales[j], m);
    return a2 * mu.dot(mk.entries * mu) - consts.b_const * c.scales.squaredNorm();
}

Vec psi_grad(const GreenProvider& g, const PeakConfig& c, const UniversalConstants& consts) {
    c.validate();
    const int n = g.dim(), k = c.k();
    const double m = (g.dim() - 2.0) / 2.0;
    const double a2 = consts.a_const * consts.a_const;
    Vec grad(k * n + k);

    Vec mu(k);
    for (int j = 0; j < k; ++j) mu[j] = std::pow(c.scales[j], m);

    for (int j = 0; j < k; ++j) {
        const RobinEvaluation rj = g.robin(c.points[j]);
        Vec gx = mu[j] * mu[j] * rj.gradient;
        double cross = 0.0;  // sum_{l != j} G_jl mu_l
        for (int l = 0; l < k; ++l) {
            if (l == j) continue;
            gx -= 2.0 * mu[j] * mu[l] * g.grad_x_green(c.points[j], c.points[l]);
            cross += mu[l] * g.green(c.points[j], c.points[l]);
        }
        grad.segment(j * n, n) = a2 * gx;
        grad[k * n + j] = a2 * (2.0 * m * rj.value * mu[j] * mu[j] / c.scales[j] -
                                2.0 * m * std::pow(c.scales[j], m - 1.0) * cross) -
                          2.0 * consts.b_const * c.scales[j];
    }
    return grad;
}

Mat psi_hess(const GreenProvider& g, const PeakConfig& c, const UniversalConstants& consts) {
    c.validate();
    const int n = g.dim(), k = c.k();
    const double m = (g.dim() - 2.0) / 2.0;
    const double a2 = consts.a_const * consts.a_const;
    const double b = consts.b_const;
    Mat hess = Mat::Zero(k * n + k, k * n + k);

    Vec mu(k), dmu(k), d2mu(k);
    for (int j = 0; j < k; ++j) {
        mu[j] = std::pow(c.scales[j], m);
        dmu[j] = m * std::pow(c.scales[j], m - 1.0);
        d2mu[j] = m * (m - 1.0) * std::pow(c.scales[j], m - 2.0);
    }

    for (int j = 0; j < k; ++j) {
        const RobinEvaluation rj = g.robin(c.points[j]);

        // x_j x_j block and lambda_j diagonal
        Mat hxx = mu[j] * mu[j] * rj.hessian;
        double gsum = 0.0;
        Vec gxsum = Vec::Zero(n);
        for (int l = 0; l < k; ++l) {
            if (l == j) continue;
            hxx -= 2.0 * mu[j] * mu[l] * g.hess_xx_green(c.points[j], c.points[l]);
            gsum += mu[l] * g.green(c.points[j], c.points[l]);
            gxsum += mu[l] * g.grad_x_green(c.points[j], c.points[l]);
        }
        hess.block(j * n, j * n, n, n) = a2 * hxx;
        hess(k * n + j, k * n + j) =
            a2 * (2.0 * dmu[j] * dmu[j] + 2.0 * mu[j] * d2mu[j]) * rj.value -
            2.0 * a2 * d2mu[j] * gsum - 2.0 * b;

        // x_j lambda_j block
        const Vec hxl = a2 * (2.0 * mu[j] * dmu[j] * rj.gradient - 2.0 * dmu[j] * gxsum);
        hess.block(j * n, k * n + j, n, 1) = hxl;
        hess.block(k * n + j, j * n, 1, n) = hxl.transpose();

        for (int l = j + 1; l < k; ++l) {
            const Vec& aj = c.points[j];
            const Vec& al = c.points[l];
            const double gjl = g.green(aj, al);
            const Vec dg_j = g.grad_x_green(aj, al);   // d/d a_j
            const Vec dg_l = g.grad_x_green(al, aj);   // d/d a_l

            // x_j x_l block: rows a_j, cols a_l
            const Mat cross = -2.0 * a2 * mu[j] * mu[l] * g.hess_xy_green(aj, al);
            hess.block(j * n, l * n, n, n) = cross;
            hess.block(l * n, j * n, n, n) = cross.transpose();

            // lambda_j lambda_l
            const double hll = -2.0 * a2 * dmu[j] * dmu[l] * gjl;
            hess(k * n + j, k * n + l) = hll;
            hess(k * n + l, k * n + j) = hll;

            // x_j lambda_l and x_l lambda_j
            const Vec hjl = -2.0 * a2 * mu[j] * dmu[l] * dg_j;
            hess.block(j * n, k * n + l, n, 1) = hjl;
            hess.block(k * n + l, j * n, 1, n) = hjl.transpose();
            const Vec hlj = -2.0 * a2 * mu[l] * dmu[j] * dg_l;
            hess.block(l * n, k * n + j, n, 1) = hlj;
            hess.block(k * n + j, l * n, 1, n) = hlj.transpose();
        }
    }

    return 0.5 * (hess + hess.transpose());
}

}  // namespace brn
