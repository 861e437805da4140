#include "pareto/random.hpp"
#include "pareto/surrogate/quadratic.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <cmath>
#include <numbers>

using namespace pareto;
using namespace pareto::surrogate;

namespace {

Mat cube(Stream& rng, Eigen::Index n, Eigen::Index d)
{
    Mat x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            x(i, j) = rng.uniform(-1.0, 1.0);
    return x;
}

// 0.5 * residual^2 with Q fixed and the affine part fitted by least squares.
double loss_with_fixed_q(const Mat& x, const Vec& f, const Mat& Q)
{
    const Eigen::Index n = x.rows(), d = x.cols();
    Mat A(n, d + 1);
    Vec b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A.row(i).tail(d) = x.row(i);
        const Vec xi = x.row(i).transpose();
        b(i) = -f(i) - xi.dot(Q * xi);
    }
    const Vec sol = A.colPivHouseholderQr().solve(b);
    return 0.5 * (A * sol - b).squaredNorm();
}

} // namespace

TEST_CASE("fit recovers a realisable convex quadratic")
{
    Stream rng(1);
    const Mat x = cube(rng, 50, 2);
    Vec f(50);
    for (Eigen::Index i = 0; i < 50; ++i)
        f(i) = -x.row(i).squaredNorm();
    const auto s = fit_psd_quadratic(x, f);
    CHECK((s.Q - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(s.a.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(s.c) < 1e-6);
    CHECK_FALSE(s.diagnostics.projected);
    CHECK(r_squared(s, x, f) == doctest::Approx(1.0));
}

TEST_CASE("fit with offset data and r = 5")
{
    Stream rng(2);
    const Eigen::Index r = 5;
    Mat B(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            B(i, j) = rng.normal();
    const Mat Q = B * B.transpose();
    Vec a(r);
    for (Eigen::Index i = 0; i < r; ++i)
        a(i) = rng.normal();
    const double c = 4.0;
    Mat x = cube(rng, 200, r);
    x = (x.array() * 3.0 + 10.0).matrix(); // far from the origin, badly scaled
    Vec f(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
        const Vec xi = x.row(i).transpose();
        f(i) = -(c + a.dot(xi) + xi.dot(Q * xi));
    }
    const auto s = fit_psd_quadratic(x, f);
    CHECK((s.Q - Q).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((s.a - a).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(std::abs(s.c - c) < 1e-4);
}

TEST_CASE("concave data projects onto the affine model")
{
    Stream rng(3);
    Mat half = cube(rng, 40, 2);
    Mat x(80, 2);
    x << half, -half;
    Vec f(80);
    for (Eigen::Index i = 0; i < 80; ++i)
        f(i) = x.row(i).squaredNorm();
    const auto s = fit_psd_quadratic(x, f);
    CHECK(s.diagnostics.projected);
    CHECK(s.Q.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(s.diagnostics.min_eigenvalue >= -1e-12);

    // Affine oracle, and no small PSD Q does better.
    const double best = loss_with_fixed_q(x, f, Mat::Zero(2, 2));
    CHECK(s.diagnostics.objective == doctest::Approx(best).epsilon(1e-8));
    for (double q : {0.01, 0.1, 0.5})
        for (int k = 0; k < 12; ++k) {
            const double ang = std::numbers::pi * k / 12.0;
            Vec v(2);
            v << std::cos(ang), std::sin(ang);
            CHECK(loss_with_fixed_q(x, f, q * v * v.transpose()) >= best);
            CHECK(loss_with_fixed_q(x, f, q * Mat::Identity(2, 2)) >= best);
        }
}

TEST_CASE("constant responses")
{
    Stream rng(4);
    const Mat x = cube(rng, 20, 3);
    const Vec f = Vec::Constant(20, 2.5);
    const auto s = fit_psd_quadratic(x, f);
    CHECK(s.Q.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.a.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.c == doctest::Approx(-2.5));
}

TEST_CASE("too few rows")
{
    Stream rng(5);
    CHECK_THROWS_AS(fit_psd_quadratic(cube(rng, 5, 2), Vec::Zero(5)), DimensionError);
}

TEST_CASE("coefficient of determination")
{
    Stream rng(6);
    const Mat x = cube(rng, 30, 2);
    Vec f(30);
    for (Eigen::Index i = 0; i < 30; ++i)
        f(i) = x(i, 0) - x(i, 1);
    QuadraticSurrogate s;
    s.Q = Mat::Zero(2, 2);
    s.a = Vec(2);
    s.a << -1.0, 1.0;
    CHECK(r_squared(s, x, f) == doctest::Approx(1.0));
    s.a.setZero();
    s.c = -f.mean();
    CHECK(std::abs(r_squared(s, x, f)) < 1e-12);
    s.c -= 0.5;
    CHECK(r_squared(s, x, f) < 0.0);
    CHECK_THROWS_AS(r_squared(s, x, Vec::Constant(30, 1.0)), DomainError);
}

TEST_CASE("value, gradient and Hessian")
{
    QuadraticSurrogate s;
    s.Q = Mat::Identity(2, 2);
    s.a = Vec::Zero(2);
    Vec e1(2);
    e1 << 1.0, 0.0;
    const auto e = surrogate_eval_grad_hess(s, e1);
    CHECK(e.value == -1.0);
    CHECK((e.gradient - (-2.0 * e1)).norm() == 0.0);
    CHECK((e.hessian + 2.0 * Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("lifted surrogate agrees with its projection; JSON round trip")
{
    Stream rng(7);
    QuadraticSurrogate s;
    s.Q = Mat(2, 2);
    s.Q << 2.0, 0.3, 0.3, 1.0;
    s.a = Vec(2);
    s.a << 0.5, -1.0;
    s.c = 0.25;
    Mat A(6, 2);
    for (Eigen::Index i = 0; i < 6; ++i)
        A.row(i) << rng.normal(), rng.normal();
    const Mat U = Eigen::HouseholderQR<Mat>(A).householderQ() * Mat::Identity(6, 2);
    const auto big = lift(s, U);
    for (int k = 0; k < 10; ++k) {
        const Vec x = cube(rng, 1, 6).row(0).transpose();
        const Vec g = U.transpose() * x;
        CHECK(big.value(x) == doctest::Approx(s.value(g)).epsilon(1e-12));
        CHECK((big.gradient(x) - U * s.gradient(g)).norm() < 1e-12);
    }

    const auto back = surrogate_from_json(to_json(s));
    CHECK(back.Q == s.Q);
    CHECK(back.a == s.a);
    CHECK(back.c == s.c);
}

TEST_CASE("polynomial R^2 diagnostic")
{
    Stream rng(8);
    const Mat x = cube(rng, 60, 2);
    Vec f(60);
    for (Eigen::Index i = 0; i < 60; ++i)
        f(i) = std::pow(x(i, 0), 3) + x(i, 1);
    CHECK(polynomial_r_squared(x, f, 3) == doctest::Approx(1.0));
    CHECK(polynomial_r_squared(x, f, 1) < 1.0);
}
