// Acceptance gate: one pass/fail line per criterion, pinned tolerances and
// runtime budgets. Exits nonzero if any criterion fails.

#include "brn/bubble.hpp"
#include "brn/critical.hpp"
#include "brn/green.hpp"
#include "brn/pohozaev.hpp"
#include "brn/predictor.hpp"
#include "brn/psi.hpp"
#include "oracles.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace brn;

namespace {

int failures = 0;

class Criterion {
public:
    Criterion(int number, const char* title, double budget_s)
        : number_(number), title_(title), budget_s_(budget_s),
          start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const bool in_budget = elapsed < budget_s_;
        if (!ok || !in_budget) ++failures;
        std::printf("criterion %d [%s]: %s (%s; %.1f s of %.0f s budget%s)\n", number_,
                    title_, ok && in_budget ? "PASS" : "FAIL", detail.c_str(), elapsed,
                    budget_s_, in_budget ? "" : " EXCEEDED");
        std::fflush(stdout);
    }

private:
    int number_;
    const char* title_;
    double budget_s_;
    std::chrono::steady_clock::time_point start_;
};

Vec e6(int i, double v) {
    Vec x = Vec::Zero(6);
    x[i] = v;
    return x;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// 1. single-peak unit ball: the closed-form center configuration
void criterion_1() {
    Criterion c(1, "single-ball closed form", 5.0);
    auto g = make_provider(DomainSpec::unit_ball(6));
    const auto consts = UniversalConstants::for_dimension(Dimension(6));
    const auto found = find_critical(*g, 1, SearchConfig{}, consts);

    bool ok = found.size() == 1;
    double loc_err = 1.0, lam_rel = 1.0;
    if (ok) {
        loc_err = found[0].config.points[0].norm();
        // independent 1-d oracle: bisect the scale stationarity condition
        // (n-2) A^2 R(0) lam^{n-3} - 2 B lam = 0 with closed-form A, B and
        // the image-charge value R(0) = c_6
        const double A = constant_A(Dimension(6)), B = constant_B(Dimension(6));
        const double R0 = 1.0 / (4.0 * std::pow(M_PI, 3));
        auto f = [&](double lam) {
            return 4.0 * A * A * R0 * std::pow(lam, 3) - 2.0 * B * lam;
        };
        const double lam_oracle = oracle::bisect(f, 1e-2, 1e2, 1e-13);
        lam_rel = std::abs(found[0].config.scales[0] - lam_oracle) / lam_oracle;
        ok = loc_err < 1e-6 && lam_rel < 1e-6;
    }
    c.check(ok, "points=" + std::to_string(found.size()) + " loc_err=" + fmt(loc_err) +
                    " (tol 1e-6) scale_rel=" + fmt(lam_rel) + " (tol 1e-6)");
}

// 2. convexity exclusion: no two-peak points in the ball
void criterion_2() {
    Criterion c(2, "convexity exclusion k=2", 60.0);
    auto g = make_provider(DomainSpec::unit_ball(6));
    const auto consts = UniversalConstants::for_dimension(Dimension(6));
    SearchConfig cfg;
    cfg.starts = 200;
    const auto found = find_critical(*g, 2, cfg, consts);
    c.check(found.empty(),
            "starts=200 accepted=" + std::to_string(found.size()) + " (expect 0)");
}

// 3. disjoint-balls counting: binomial structure over components
void criterion_3() {
    Criterion c(3, "disjoint-balls counting", 120.0);
    const auto consts = UniversalConstants::for_dimension(Dimension(6));
    SearchConfig cfg;
    cfg.starts = 120;

    auto g2 = make_provider(DomainSpec::balls(6, {{e6(0, -2.0), 1.0}, {e6(0, 2.0), 1.0}}));
    const auto r2 = count_solutions(*g2, 2, cfg, consts);
    const bool two_ok =
        r2.per_k[0].count == 2 && r2.per_k[1].count == 1 && r2.total == 3;

    auto g3 = make_provider(
        DomainSpec::balls(6, {{e6(0, -4.0), 1.0}, {Vec::Zero(6), 1.0}, {e6(0, 4.0), 1.0}}));
    cfg.starts = 800;  // three components: random starts rarely split 1-1-1
    const auto r3 = count_solutions(*g3, 3, cfg, consts);
    const bool three_ok = r3.per_k[0].count == 3 && r3.per_k[1].count == 3 &&
                          r3.per_k[2].count == 1 && r3.total == 7;

    c.check(two_ok && three_ok,
            "two balls (" + std::to_string(r2.per_k[0].count) + "," +
                std::to_string(r2.per_k[1].count) + ") total " + std::to_string(r2.total) +
                " (expect (2,1), 3); three balls (" + std::to_string(r3.per_k[0].count) + "," +
                std::to_string(r3.per_k[1].count) + "," + std::to_string(r3.per_k[2].count) +
                ") total " + std::to_string(r3.total) + " (expect (3,3,1), 7)");
}

// 4. surface-identity suite: Monte Carlo vs closed forms
void criterion_4() {
    Criterion c(4, "surface-identity suite", 60.0);
    auto g = make_provider(DomainSpec::unit_ball(6));
    const SphereQuadrature q{e6(0, 0.3), 0.25, MonteCarloScheme{100000, 20240817}};
    const auto residuals = verify_identities(*g, {e6(0, 0.3)}, q);

    double worst_rel = 0.0, worst_drift_sigma = 0.0;
    for (const auto& r : residuals) {
        worst_rel = std::max(worst_rel, r.rel_residual);
        if (r.std_error > 0.0)
            worst_drift_sigma = std::max(worst_drift_sigma, r.theta_pair_drift / (3.0 * r.std_error));
    }
    c.check(!residuals.empty() && worst_rel < 1e-2 && worst_drift_sigma < 1.0,
            std::to_string(residuals.size()) + " cases, worst rel=" + fmt(worst_rel) +
                " (tol 1e-2), worst drift/3sigma=" + fmt(worst_drift_sigma) + " (tol 1)");
}

// 5. bubble-mass constants against independent radial quadrature
void criterion_5() {
    Criterion c(5, "constants A and B", 5.0);
    // int_0^inf r^{n-1} c / (1+r^2)^{p/2} dr, with the [1, inf) piece mapped
    // through u = 1/r so both halves are smooth integrals over [0, 1]
    auto bubble_mass = [](int n, double p, double c) {
        auto near = [&](double r) { return c * std::pow(r, n - 1) / std::pow(1.0 + r * r, 0.5 * p); };
        auto far = [&](double u) {
            return c * std::pow(u, p - n - 1) / std::pow(1.0 + u * u, 0.5 * p);
        };
        return oracle::adaptive_simpson(near, 0.0, 1.0, 1e-14) +
               oracle::adaptive_simpson(far, 0.0, 1.0, 1e-14);
    };

    double worst = 0.0;
    for (int n = 5; n <= 8; ++n) {
        const Dimension dim(n);
        const double cn = bubble_amplitude(dim), w = sphere_area(dim);
        // A equals the full-space integral of U^{(n+2)/(n-2)} at unit scale
        const double qa = bubble_mass(n, n + 2.0, std::pow(cn, (n + 2.0) / (n - 2.0)));
        worst = std::max(worst, std::abs(w * qa - constant_A(dim)) / constant_A(dim));
        // B equals the full-space integral of U^2
        const double qb = bubble_mass(n, 2.0 * (n - 2.0), cn * cn);
        worst = std::max(worst, std::abs(w * qb - constant_B(dim)) / constant_B(dim));
    }
    c.check(worst < 1e-8, "N in {5..8}, worst rel=" + fmt(worst) + " (tol 1e-8)");
}

// 6. analytic derivatives of the reduced energy vs finite differences
void criterion_6() {
    Criterion c(6, "derivative correctness", 30.0);
    const auto consts = UniversalConstants::for_dimension(Dimension(6));
    auto ball = make_provider(DomainSpec::unit_ball(6));
    auto balls = make_provider(DomainSpec::balls(6, {{e6(0, -2.0), 1.0}, {e6(0, 2.0), 1.0}}));

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-0.35, 0.35);
    std::uniform_real_distribution<double> ls(-0.5, 0.5);
    double worst_g = 0.0, worst_h = 0.0;

    auto pack = [](const PeakConfig& pc) {
        Vec z(pc.k() * 6 + pc.k());
        for (int j = 0; j < pc.k(); ++j) z.segment(j * 6, 6) = pc.points[j];
        z.tail(pc.k()) = pc.scales;
        return z;
    };
    auto unpack = [](const Vec& z, int k) {
        PeakConfig pc;
        for (int j = 0; j < k; ++j) pc.points.push_back(z.segment(j * 6, 6));
        pc.scales = z.tail(k);
        return pc;
    };

    for (int trial = 0; trial < 20; ++trial) {
        const bool two = trial % 2 == 1;
        const GreenProvider& g = two ? *balls : *ball;
        PeakConfig pc;
        if (two) {
            pc.points = {e6(0, -2.0), e6(0, 2.0)};
            for (auto& p : pc.points)
                for (int i = 0; i < 6; ++i) p[i] += u(rng);
            pc.scales = Vec::Constant(2, 0.0);
            for (int j = 0; j < 2; ++j) pc.scales[j] = 0.14 * std::exp(ls(rng));
        } else {
            pc.points = {Vec::Zero(6)};
            for (int i = 0; i < 6; ++i) pc.points[0][i] += 0.6 * u(rng);
            pc.scales = Vec::Constant(1, 0.14 * std::exp(ls(rng)));
        }
        const int k = pc.k();
        const Vec z = pack(pc);
        auto value = [&](const Vec& w) { return psi_value(g, unpack(w, k), consts); };
        auto grad = [&](const Vec& w) { return psi_grad(g, unpack(w, k), consts); };

        const Vec ag = psi_grad(g, pc, consts);
        const Vec fg = oracle::fd_gradient(value, z, 1e-5);
        worst_g = std::max(worst_g, (ag - fg).norm() / (1.0 + fg.norm()));

        const Mat ah = psi_hess(g, pc, consts);
        const Mat fh = oracle::fd_jacobian(grad, z, 1e-5);
        worst_h = std::max(worst_h, (ah - fh).norm() / (1.0 + fh.norm()));
    }
    c.check(worst_g < 1e-5 && worst_h < 1e-4,
            "20 configs, grad rel=" + fmt(worst_g) + " (tol 1e-5), hess rel=" + fmt(worst_h) +
                " (tol 1e-4)");
}

// 7. boundary-fit engine fidelity on the unit ball
void criterion_7() {
    Criterion c(7, "fitted-ball fidelity", 120.0);
    auto fitted =
        make_provider(DomainSpec{Dimension(6), SmoothShape{Vec::Zero(6), Vec::Constant(6, 1.0)}});
    auto exact = make_provider(DomainSpec::unit_ball(6));

    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
        Vec d(6);
        for (int i = 0; i < 6; ++i) d[i] = gauss(rng);
        d.normalize();
        const Vec x = (0.8 * std::pow(ur(rng), 1.0 / 6.0)) * d;  // boundary distance > 0.2
        const double rf = fitted->robin(x).value, re = exact->robin(x).value;
        worst = std::max(worst, std::abs(rf - re) / re);
    }
    c.check(worst < 1e-4, "50 poles, worst Robin rel=" + fmt(worst) + " (tol 1e-4)");
}

// 8. concentration balance at accepted critical points
void criterion_8() {
    Criterion c(8, "balance identity", 5.0);
    auto g = make_provider(DomainSpec::unit_ball(6));
    const auto consts = UniversalConstants::for_dimension(Dimension(6));
    const auto found = find_critical(*g, 1, SearchConfig{}, consts);

    bool ok = found.size() == 1;
    double worst_component = 1.0, worst_balance = 1.0;
    if (ok) {
        worst_component = 0.0;
        worst_balance = 0.0;
        const double A = consts.a_const, B = consts.b_const;
        for (const auto& cp : found) {
            // componentwise scale stationarity: (n-2) A^2 (M mu)_j lam_j^{n-6}
            // against 2B, relative form
            const auto m = m_matrix(*g, cp.config.points);
            Vec mu(cp.config.k());
            for (int j = 0; j < cp.config.k(); ++j)
                mu[j] = std::pow(cp.config.scales[j], 2.0);
            const Vec mmu = m.entries * mu;
            for (int j = 0; j < cp.config.k(); ++j) {
                const double lhs = 4.0 * A * A * mmu[j];  // lam_j^{n-6} = 1 at n = 6
                worst_component =
                    std::max(worst_component, std::abs(lhs - 2.0 * B) / (2.0 * B));
            }
        }
        for (double eps : {1e-2, 1e-4}) {
            const Vec r = balance_residual(*g, found[0], eps, consts);
            worst_balance = std::max(worst_balance, r.cwiseAbs().maxCoeff());
        }
        ok = worst_component < 1e-8 && worst_balance < 1e-10;
    }
    c.check(ok, "componentwise rel=" + fmt(worst_component) +
                    " (tol 1e-8), balance residual=" + fmt(worst_balance) + " (tol 1e-10)");
}

// 9. scale prediction obeys the epsilon power law exactly
void criterion_9() {
    Criterion c(9, "prediction scaling law", 1.0);
    CriticalPoint cp;
    cp.config.points = {Vec::Zero(6)};
    cp.config.scales = Vec::Constant(1, 1.0 / std::sqrt(48.0));
    cp.nondegenerate = true;
    cp.m_matrix_positive = true;

    double worst = 0.0;
    for (int d = 0; d < 5; ++d) {
        const double eps = std::pow(10.0, -2.0 - d);
        const auto base = predict(cp, eps, Dimension(6));
        for (double s : {10.0, 100.0}) {
            const auto scaled = predict(cp, s * eps, Dimension(6));
            const double expect =
                std::pow(s, -0.5) * base.per_peak[0].lambda_eps;  // -1/(n-4) at n = 6
            worst = std::max(worst,
                             std::abs(scaled.per_peak[0].lambda_eps - expect) / expect);
        }
    }
    c.check(worst < 1e-14, "5 decades, worst rel=" + fmt(worst) + " (tol 1e-14)");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%d criterion failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
