#include "pareto/random.hpp"
#include "pareto/subspace/zonotope.hpp"
#include "pareto/trace/trace.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <cmath>
#include <limits>

using namespace pareto;
using namespace pareto::trace;
using surrogate::QuadraticSurrogate;

namespace {

QuadraticSurrogate quad(double q1, double q2, double a1, double a2)
{
    QuadraticSurrogate s;
    s.Q = Mat::Zero(2, 2);
    s.Q(0, 0) = q1;
    s.Q(1, 1) = q2;
    s.a = Vec(2);
    s.a << a1, a2;
    return s;
}

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

Mat random_basis(Stream& rng, Eigen::Index d)
{
    Mat A(d, 2);
    for (Eigen::Index i = 0; i < d; ++i)
        A.row(i) << rng.normal(), rng.normal();
    return Eigen::HouseholderQR<Mat>(A).householderQ() * Mat::Identity(d, 2);
}

double max_gap(const TraceCurve& a, const TraceCurve& b)
{
    double g = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i)
        g = std::max(g, (a.points[i] - b.points[i]).cwiseAbs().maxCoeff());
    return g;
}

} // namespace

TEST_CASE("quadratic trace worked examples")
{
    const auto sw = quad(1, 2, -2, 0), sl = quad(2, 1, 0, -2);
    const auto tc = quadratic_trace(sw, sl, v2(0.0, 0.5));
    CHECK((tc.points[1] - v2(1.0 / 3, 1.0 / 3)).norm() < 1e-14);
    // t = 0 is the Wi-Fi maximiser -Q_W^-1 a_W / 2
    CHECK((tc.points[0] - v2(1.0, 0.0)).norm() < 1e-14);

    const auto iw = quad(1, 1, -2, 0), il = quad(1, 1, 0, -2);
    const auto lin = quadratic_trace(iw, il, linspace(0.0, 1.0, 3));
    CHECK((lin.points[0] - v2(1, 0)).norm() < 1e-14);
    CHECK((lin.points[1] - v2(0.5, 0.5)).norm() < 1e-14);
    CHECK((lin.points[2] - v2(0, 1)).norm() < 1e-14);
}

TEST_CASE("quadratic trace flags a singular combination")
{
    const auto sw = quad(1, 0, -2, 0), sl = quad(1, 0, 0, 0);
    const auto tc = quadratic_trace(sw, sl, linspace(0, 1, 5));
    for (bool r : tc.regularised)
        CHECK(r);
    for (const auto& p : tc.points)
        CHECK(p.allFinite());
}

TEST_CASE("constrained trace stays in the zonotope")
{
    Stream rng(1);
    const Mat U = random_basis(rng, 6);
    const auto z = subspace::zonotope_vertices(U);
    const auto sw = quad(1, 1, -20, 0), sl = quad(1, 1, 0, -20); // maximisers far outside
    const auto t = linspace(0, 1, 11);
    const auto tc = constrained_trace(sw, sl, z, t);
    for (std::size_t i = 0; i < tc.points.size(); ++i) {
        CHECK(tc.projected[i]);
        CHECK(z.contains({tc.points[i](0), tc.points[i](1)}, 1e-9));
        // No vertex does better than the returned point.
        const double ti = t(static_cast<Eigen::Index>(i));
        auto phi = [&](const Vec& g) { return (1 - ti) * sw.value(g) + ti * sl.value(g); };
        for (const auto& v : z.vertices)
            CHECK(phi(tc.points[i]) >= phi(Vec(v)) - 1e-12);
    }

    const auto inner = constrained_trace(quad(1, 1, -0.1, 0), quad(1, 1, 0, -0.1), z, t);
    const auto free = quadratic_trace(quad(1, 1, -0.1, 0), quad(1, 1, 0, -0.1), t);
    CHECK(max_gap(inner, free) < 1e-14);
}

TEST_CASE("RK4 trace against the closed form")
{
    const auto sw = quad(1, 2, -2, 0.5), sl = quad(2, 1, 0.3, -2);
    const auto t = linspace(0, 1, 21);
    CHECK(max_gap(ode_trace(sw, sl, t, 1e-3), quadratic_trace(sw, sl, t)) < 1e-6);

    const auto same = ode_trace(sw, sw, t);
    for (const auto& p : same.points)
        CHECK((p - same.points[0]).norm() == 0.0);

    // The flow keeps grad phi_t(theta) constant and, for quadratic surrogates,
    // RK4 reproduces it exactly: even one step per interval is at round-off.
    Mat qw(2, 2), ql(2, 2);
    qw << 1, 0.95, 0.95, 1;
    ql << 1, -0.9, -0.9, 1;
    auto hw = quad(0, 0, -1, 0.3), hl = quad(0, 0, 0.2, -1);
    hw.Q = qw;
    hl.Q = ql;
    const auto coarse = linspace(0, 1, 3);
    CHECK(max_gap(ode_trace(hw, hl, coarse, 0.5), quadratic_trace(hw, hl, coarse)) < 1e-12);
    CHECK(max_gap(ode_trace(hw, hl, t, 1e-3), quadratic_trace(hw, hl, t)) < 1e-12);
}

TEST_CASE("RK4 trace reports where the Hessian becomes singular")
{
    const auto sw = quad(1, 1, -1, 0), sl = quad(-1, -1, 0, 1); // combination vanishes at t = 1/2
    CHECK_THROWS_AS(ode_trace(sw, sl, linspace(0, 1, 11)), OptimizationError);
}

TEST_CASE("condition profile")
{
    const auto t = linspace(0, 1, 5);
    const Vec one = condition_profile(quad(1, 1, 0, 0), quad(1, 1, 0, 0), t);
    CHECK((one.array() - 1.0).abs().maxCoeff() < 1e-14);

    const Vec c = condition_profile(quad(1, 4, 0, 0), quad(9, 1, 0, 0), t);
    CHECK(c(0) == doctest::Approx(4.0));
    CHECK(c(4) == doctest::Approx(9.0));

    const double eps = 1e-3;
    CHECK(condition_profile(quad(1, eps, 0, 0), quad(eps, 1, 0, 0), v2(0.5, 0.0))(0) == doctest::Approx(1.0));
    CHECK(std::isinf(condition_profile(quad(1, 0, 0, 0), quad(1, 0, 0, 0), v2(0.5, 0.0))(0)));
}

TEST_CASE("Nelder-Mead and box maximisation")
{
    const Vec centre = (Vec(3) << 0.3, -0.25, 0.5).finished();
    auto f = [&](const Vec& x) { return (x - centre).squaredNorm(); };
    const auto r = nelder_mead(f, default_simplex(Vec::Zero(3), 0.25));
    CHECK((r.x - centre).cwiseAbs().maxCoeff() < 1e-4);

    sampling::UnitModel concave = [&](const Vec& x) {
        return Throughputs{-(x - centre).squaredNorm(), -(x + centre).squaredNorm()};
    };
    MaximizeOptions mo;
    mo.multistart = 4;
    mo.seed = 3;
    const auto m0 = maximize_throughput(concave, 3, 0.0, mo);
    CHECK((m0.x - centre).cwiseAbs().maxCoeff() < 1e-4);
    const auto m1 = maximize_throughput(concave, 3, 1.0, mo);
    CHECK((m1.x + centre).cwiseAbs().maxCoeff() < 1e-4);

    // Maximiser outside the box lands on its face.
    sampling::UnitModel edge = [](const Vec& x) { return Throughputs{x.sum(), 0.0}; };
    const auto me = maximize_throughput(edge, 3, 0.0, mo);
    CHECK(me.x.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(me.value == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("inactive endpoints of an exact ridge")
{
    Stream rng(4);
    const Mat U = random_basis(rng, 5);
    const subspace::InactiveSampler s(U, subspace::zonotope_vertices(U));
    sampling::UnitModel ridge = [&](const Vec& x) {
        const Vec g = U.transpose() * x;
        return Throughputs{-g.squaredNorm(), g(0) + g(1)};
    };
    const geometry::Point g0(0.2, 0.1), g1(-0.3, 0.4);
    MaximizeOptions mo;
    mo.multistart = 3;
    const auto e = inactive_endpoints(ridge, s, g0, g1, mo);
    CHECK(std::abs(e.f0.wifi + g0.squaredNorm()) < 1e-10);
    CHECK(std::abs(e.f1.laa - (g1(0) + g1(1))) < 1e-10);
    CHECK(s.feasible(g0, e.zeta0, 1e-12));
    CHECK(s.feasible(g1, e.zeta1, 1e-12));
    CHECK_THROWS_AS(inactive_endpoints(ridge, s, {50.0, 0.0}, g1, mo), DomainError);
}

TEST_CASE("fronts")
{
    Stream rng(5);
    const Eigen::Index D = 5;
    const Mat U = random_basis(rng, D);
    const auto z = subspace::zonotope_vertices(U);
    const subspace::InactiveSampler s(U, z);
    sampling::UnitModel ridge = [&](const Vec& x) {
        const Vec g = U.transpose() * x;
        return Throughputs{-g.squaredNorm(), g(0)};
    };
    sampling::UnitModel full = [](const Vec& x) { return Throughputs{x.sum(), -x.squaredNorm()}; };

    const auto t = linspace(0, 1, 15);
    const auto tc = constrained_trace(quad(1, 1, -0.2, 0), quad(1, 1, 0, -0.2), z, t);
    const Vec zeta0 = s.sample({tc.points[0](0), tc.points[0](1)}, 1, 1)[0];
    const Vec zeta1 = s.sample({tc.points[14](0), tc.points[14](1)}, 1, 2)[0];

    const auto geo = geodesic_front(full, s, tc, zeta0, zeta1);
    CHECK(geo.t.size() == 15);
    const Vec x0 = s.lift({tc.points[0](0), tc.points[0](1)}, zeta0);
    CHECK(geo.f_w(0) == full(x0).wifi);
    for (const auto& p : geo.points)
        CHECK(p.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(front_to_csv(geo).rows.size() == 15);

    const Vec xa = Vec::Constant(D, 0.2), xb = Vec::Constant(D, -0.4);
    const auto flat = linear_front(full, xa, xa, 7);
    for (Eigen::Index i = 0; i < 7; ++i)
        CHECK(flat.f_w(i) == flat.f_w(0));
    const auto lin = linear_front(full, xa, xb, 7);
    CHECK(lin.f_w(0) == full(xa).wifi);
    CHECK(lin.f_w(6) == doctest::Approx(full(xb).wifi));

    const auto cr = conditional_front(ridge, s, tc, 20, 9);
    for (Eigen::Index i = 0; i < cr.t.size(); ++i) {
        CHECK(cr.max_w(i) - cr.min_w(i) < 1e-12);
        CHECK(cr.max_l(i) - cr.min_l(i) < 1e-12);
    }

    const auto c20 = conditional_front(full, s, tc, 20, 9);
    const auto c40 = conditional_front(full, s, tc, 40, 9);
    for (Eigen::Index i = 0; i < c20.t.size(); ++i) {
        CHECK(c20.f_w(i) >= c20.min_w(i));
        CHECK(c20.f_w(i) <= c20.max_w(i));
        CHECK(c20.f_l(i) >= c20.min_l(i));
        CHECK(c20.f_l(i) <= c20.max_l(i));
        CHECK(std::abs(c40.f_w(i) - c20.f_w(i)) < 0.5 * (c20.max_w(i) - c20.min_w(i)));
        CHECK(std::abs(c40.f_l(i) - c20.f_l(i)) < 0.5 * (c20.max_l(i) - c20.min_l(i)));
    }
    // thread count does not matter
    const auto c20b = conditional_front(full, s, tc, 20, 9, 3);
    CHECK(c20b.f_w == c20.f_w);
}

TEST_CASE("non-dominated sorting")
{
    CHECK(nondominated({{1, 1}}) == std::vector<std::size_t>{0});
    CHECK(nondominated({{1, 2}, {2, 1}, {0.5, 0.5}}) == std::vector<std::size_t>{0, 1});
    CHECK(nondominated({{1, 1}, {1, 1}, {0, 3}}) == std::vector<std::size_t>{0, 2});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(nondominated({{nan, 5}, {1, 1}}) == std::vector<std::size_t>{1});
    CHECK(nondominated({}).empty());

    Stream rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Throughputs> pts(300);
        for (auto& p : pts)
            p = trial % 2 ? Throughputs{rng.uniform(), rng.uniform()}
                          : Throughputs{std::floor(10 * rng.uniform()), std::floor(10 * rng.uniform())};
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            bool keep = true;
            for (std::size_t j = 0; j < pts.size() && keep; ++j) {
                const bool ge = pts[j].wifi >= pts[i].wifi && pts[j].laa >= pts[i].laa;
                const bool gt = pts[j].wifi > pts[i].wifi || pts[j].laa > pts[i].laa;
                keep = !(ge && (gt || j < i));
            }
            if (keep)
                want.push_back(i);
        }
        CHECK(nondominated(pts) == want);
    }
}
