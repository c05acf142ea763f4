#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "brn/bubble.hpp"
#include "brn/green.hpp"
#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace brn;

namespace {

Vec random_interior(std::mt19937_64& rng, double rmax, int n) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> u(0.05, rmax);
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = gauss(rng);
    d /= d.norm();
    return u(rng) * d;
}

const double c6 = 1.0 / (4.0 * std::pow(M_PI, 3));

}  // namespace

TEST_CASE("unit ball: image-charge closed forms at n=6") {
    auto g = make_provider(DomainSpec::unit_ball(6));
    const Vec zero = Vec::Zero(6);

    SUBCASE("H(0,.) is the constant c_6") {
        std::mt19937_64 rng(1);
        for (int t = 0; t < 10; ++t) {
            const Vec y = random_interior(rng, 0.95, 6);
            CHECK(g->h_value(zero, y) == doctest::Approx(c6).epsilon(1e-13));
        }
    }

    SUBCASE("G(0,y) at |y| = 1/2") {
        Vec y = Vec::Zero(6);
        y[0] = 0.5;
        CHECK(g->green(zero, y) == doctest::Approx(15.0 * c6).epsilon(1e-13));
    }

    SUBCASE("G vanishes toward the boundary") {
        Vec x = Vec::Zero(6);
        x[0] = 0.3;
        Vec dir = Vec::Zero(6);
        dir[1] = 1.0;
        double prev = 1.0;
        for (double r : {0.9, 0.99, 0.999}) {
            const double val = g->green(x, Vec(r * dir));
            CHECK(std::abs(val) < prev);
            prev = std::abs(val);
        }
        CHECK(prev < 1e-3);
    }

    SUBCASE("coincident points raise a singularity error") {
        Vec x = Vec::Constant(6, 0.1);
        CHECK_THROWS_AS(g->green(x, x), SingularityError);
    }

    SUBCASE("exterior points raise a domain error") {
        CHECK_THROWS_AS(g->green(Vec::Constant(6, 1.0), zero), DomainError);
    }
}

TEST_CASE("green symmetry and positivity on the ball") {
    auto g = make_provider(DomainSpec::unit_ball(6));
    std::mt19937_64 rng(2);
    for (int t = 0; t < 25; ++t) {
        const Vec x = random_interior(rng, 0.9, 6);
        const Vec y = random_interior(rng, 0.9, 6);
        if ((x - y).norm() < 1e-3) continue;
        const double gxy = g->green(x, y);
        CHECK(gxy > 0.0);
        CHECK(gxy == doctest::Approx(g->green(y, x)).epsilon(1e-10));
        CHECK(g->h_value(x, y) == doctest::Approx(g->h_value(y, x)).epsilon(1e-12));
    }
}

TEST_CASE("H(x,.) is harmonic: finite-difference Laplacian") {
    auto g = make_provider(DomainSpec::unit_ball(6));
    std::mt19937_64 rng(3);
    const double h = 1e-3;
    for (int t = 0; t < 10; ++t) {
        const Vec x = random_interior(rng, 0.6, 6);
        const Vec y = random_interior(rng, 0.6, 6);
        const double lap = oracle::fd_laplacian(
            [&](const Vec& z) { return g->h_value(x, z); }, y, h);
        CHECK(std::abs(lap) < 1e-3 * std::abs(g->h_value(x, y)) / (h * h) * (h * h) + 1e-3);
    }
}

TEST_CASE("analytic H derivatives match finite differences") {
    auto g = make_provider(DomainSpec::unit_ball(6));
    std::mt19937_64 rng(4);
    const double h = 1e-5;
    for (int t = 0; t < 6; ++t) {
        const Vec x = random_interior(rng, 0.7, 6);
        const Vec y = random_interior(rng, 0.7, 6);

        const Vec gy = g->h_grad_y(x, y);
        const Vec gy_fd = oracle::fd_gradient([&](const Vec& z) { return g->h_value(x, z); }, y, h);
        CHECK((gy - gy_fd).norm() < 1e-7 * (1.0 + gy.norm()));

        const Vec gx = g->h_grad_x(x, y);
        const Vec gx_fd = oracle::fd_gradient([&](const Vec& z) { return g->h_value(z, y); }, x, h);
        CHECK((gx - gx_fd).norm() < 1e-7 * (1.0 + gx.norm()));

        const Mat hyy = g->h_hess_yy(x, y);
        const Mat hyy_fd =
            oracle::fd_jacobian([&](const Vec& z) { return g->h_grad_y(x, z); }, y, h);
        CHECK((hyy - hyy_fd).norm() < 1e-6 * (1.0 + hyy.norm()));

        const Mat hxy = g->h_hess_xy(x, y);
        const Mat hxy_fd =
            oracle::fd_jacobian([&](const Vec& z) { return g->h_grad_y(z, y); }, x, h);
        // fd_jacobian columns are x-derivatives of grad_y; transpose to (i,j) = d2/dx_i dy_j
        CHECK((hxy - hxy_fd.transpose()).norm() < 1e-6 * (1.0 + hxy.norm()));
    }
}

TEST_CASE("robin function on the unit ball") {
    auto g = make_provider(DomainSpec::unit_ball(6));
    const Vec zero = Vec::Zero(6);

    SUBCASE("closed form at the center") {
        const RobinEvaluation r = g->robin(zero);
        CHECK(r.value == doctest::Approx(c6).epsilon(1e-13));
        CHECK(r.gradient.norm() < 1e-13);
        CHECK_FALSE(r.near_boundary);
    }

    SUBCASE("radial closed form and monotone blow-up") {
        Vec dir = Vec::Zero(6);
        dir[2] = 1.0;
        double prev = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double rad = 0.045 * (i + 1);
            const double val = g->robin(Vec(rad * dir)).value;
            const double expected = c6 * std::pow(1.0 - rad * rad, -4.0);
            CHECK(val == doctest::Approx(expected).epsilon(1e-12));
            CHECK(val > prev);
            prev = val;
        }
    }

    SUBCASE("robin gradient and hessian vs finite differences") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 5; ++t) {
            const Vec x = random_interior(rng, 0.6, 6);
            const RobinEvaluation r = g->robin(x);
            const Vec grad_fd = oracle::fd_gradient(
                [&](const Vec& z) { return g->robin(z).value; }, x, 1e-5);
            CHECK((r.gradient - grad_fd).norm() < 1e-6 * (1.0 + r.gradient.norm()));
            const Mat hess_fd = oracle::fd_jacobian(
                [&](const Vec& z) { return g->robin(z).gradient; }, x, 1e-5);
            CHECK((r.hessian - hess_fd).norm() < 1e-5 * (1.0 + r.hessian.norm()));
        }
    }

    SUBCASE("near-boundary evaluations are flagged, not refused") {
        Vec x = Vec::Zero(6);
        x[0] = 1.0 - 1e-4;
        const RobinEvaluation r = g->robin(x);
        CHECK(r.near_boundary);
        CHECK(r.value > 1.0);
    }

    SUBCASE("minimum at the center from random starts") {
        // gradient descent from random starts must come back to the center
        std::mt19937_64 rng(6);
        for (int t = 0; t < 50; ++t) {
            Vec x = random_interior(rng, 0.7, 6);
            for (int it = 0; it < 400; ++it) {
                const RobinEvaluation r = g->robin(x);
                Vec step = -r.hessian.ldlt().solve(r.gradient);
                if (x.norm() > 0.8) break;
                if (r.gradient.norm() < 1e-12) break;
                x += step;
            }
            CHECK(x.norm() < 1e-6);
        }
    }
}

TEST_CASE("theta scaling of sphere means of G about a pole") {
    auto g = make_provider(DomainSpec::unit_ball(6));
    Vec x = Vec::Zero(6);
    x[0] = 0.2;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    auto sphere_mean = [&](double theta) {
        double acc = 0.0;
        const int m = 4000;
        std::mt19937_64 local(99);
        for (int s = 0; s < m; ++s) {
            Vec d(6);
            for (int i = 0; i < 6; ++i) d[i] = gauss(local);
            d /= d.norm();
            acc += g->green(x, Vec(x + theta * d));
        }
        return acc / m;
    };
    const double theta = 0.05;
    const double ratio = sphere_mean(theta / 2.0) / sphere_mean(theta);
    // leading term c_6 theta^{2-n}: halving theta multiplies by 2^{n-2} = 16
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.02));
}

TEST_CASE("disjoint balls provider") {
    std::vector<BallShape> balls;
    balls.push_back({Vec::Zero(6), 1.0});
    Vec c2 = Vec::Zero(6);
    c2[0] = 4.0;
    balls.push_back({c2, 1.0});
    auto g = make_provider(DomainSpec::balls(6, balls));

    SUBCASE("overlapping balls are rejected") {
        Vec c3 = Vec::Zero(6);
        c3[0] = 1.5;
        std::vector<BallShape> bad = {{Vec::Zero(6), 1.0}, {c3, 1.0}};
        CHECK_THROWS(DomainSpec::balls(6, bad));
    }

    SUBCASE("cross-component G vanishes identically") {
        std::mt19937_64 rng(9);
        for (int t = 0; t < 10; ++t) {
            const Vec x = random_interior(rng, 0.8, 6);
            const Vec y = c2 + random_interior(rng, 0.8, 6);
            CHECK(g->green(x, y) == doctest::Approx(0.0).epsilon(1e-15));
            CHECK(g->grad_y_green(x, y).norm() == doctest::Approx(0.0).epsilon(1e-15));
        }
    }

    SUBCASE("same-component values match the single ball") {
        auto gb = make_provider(DomainSpec::unit_ball(6));
        std::mt19937_64 rng(10);
        const Vec x = random_interior(rng, 0.7, 6);
        const Vec y = random_interior(rng, 0.7, 6);
        CHECK(g->green(Vec(c2 + x), Vec(c2 + y)) ==
              doctest::Approx(gb->green(x, y)).epsilon(1e-13));
        CHECK(g->robin(Vec(c2 + x)).value == doctest::Approx(gb->robin(x).value).epsilon(1e-13));
    }
}
