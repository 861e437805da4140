#include "pareto/random.hpp"
#include "pareto/subspace/active.hpp"
#include "pareto/subspace/zonotope.hpp"
#include "pareto/surrogate/quadratic.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace pareto;
using namespace pareto::subspace;

namespace {

Mat random_matrix(Stream& rng, Eigen::Index r, Eigen::Index c)
{
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = rng.normal();
    return m;
}

Mat orthonormal(const Mat& a)
{
    Eigen::HouseholderQR<Mat> qr(a);
    return qr.householderQ() * Mat::Identity(a.rows(), a.cols());
}

Mat uniform_cube(Stream& rng, Eigen::Index n, Eigen::Index d)
{
    Mat x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            x(i, j) = rng.uniform(-1.0, 1.0);
    return x;
}

Vec unit(Eigen::Index d, Eigen::Index i)
{
    Vec e = Vec::Zero(d);
    e(i) = 1.0;
    return e;
}

} // namespace

TEST_CASE("C matrix: rank one and two-sample cases")
{
    Stream rng(1);
    const Vec g = random_matrix(rng, 6, 1).col(0);
    const auto est = estimate_c_matrix(g.transpose());
    CHECK((est.C - g * g.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(est.eigenvalues(0) == doctest::Approx(g.squaredNorm()).epsilon(1e-12));
    CHECK(est.eigenvalues.tail(5).cwiseAbs().maxCoeff() < 1e-12);

    Mat two = Mat::Zero(2, 5);
    two(0, 0) = 3.0;
    two(1, 1) = 2.0;
    const auto e2 = estimate_c_matrix(two);
    CHECK(e2.eigenvalues(0) == doctest::Approx(4.5));
    CHECK(e2.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(e2.eigenvalues.tail(3).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(e2.eigenvectors(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("C matrix of a synthetic ridge")
{
    Stream rng(2);
    const Eigen::Index D = 17;
    Vec w = random_matrix(rng, D, 1).col(0);
    w.normalize();
    const Mat x = uniform_cube(rng, 300, D);
    Mat grads(300, D);
    for (Eigen::Index i = 0; i < 300; ++i)
        grads.row(i) = (std::cos(w.dot(x.row(i).transpose())) * w).transpose(); // f = sin(w'x)
    const auto est = estimate_c_matrix(grads, "wifi");
    CHECK(est.eigenvalues(1) / est.eigenvalues(0) < 1e-10);
    CHECK(std::abs(est.eigenvectors.col(0).dot(w)) > 1.0 - 1e-8);
    CHECK(est.network == "wifi");
}

TEST_CASE("principal angles and distance")
{
    const Mat x = unit(3, 0), y = unit(3, 1);
    CHECK(principal_angles(x, y)(0) == doctest::Approx(std::numbers::pi / 2));
    CHECK(subspace_distance(x, x) < 1e-8);

    Mat tilt(3, 1);
    tilt << std::cos(1e-5), std::sin(1e-5), 0.0;
    CHECK(principal_angles(x, tilt)(0) == doctest::Approx(1e-5).epsilon(1e-8));
}

TEST_CASE("geodesic endpoints and orthonormality")
{
    Stream rng(3);
    for (int k = 0; k < 5; ++k) {
        const Mat x = orthonormal(random_matrix(rng, 9, 2)), y = orthonormal(random_matrix(rng, 9, 2));
        CHECK(subspace_distance(grassmann_geodesic(x, y, 0.0), x) < 1e-7);
        CHECK(subspace_distance(grassmann_geodesic(x, y, 1.0), y) < 1e-7);
        const double d = subspace_distance(x, y);
        for (double s : {0.1, 0.37, 0.5, 0.9}) {
            const Mat g = grassmann_geodesic(x, y, s);
            CHECK((g.transpose() * g - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(subspace_distance(x, g) == doctest::Approx(s * d).epsilon(1e-9));
        }
    }
}

TEST_CASE("geodesic between orthogonal lines has no unique midpoint")
{
    CHECK_THROWS_AS(grassmann_geodesic(unit(3, 0), unit(3, 1), 0.5), GeometryError);

    // Just short of orthogonal, the midpoint is the bisector of the two lines.
    const double eps = 1e-3;
    Mat y(3, 1);
    y << eps, 1.0, 0.0;
    y /= y.norm();
    const double ang = std::atan2(1.0, eps);
    Mat want(3, 1);
    want << std::cos(ang / 2), std::sin(ang / 2), 0.0;
    const Mat mid = grassmann_geodesic(unit(3, 0), y, 0.5);
    CHECK(subspace_distance(mid, want) < 1e-9);

    // Identical endpoints give a constant path.
    const Mat b = orthonormal((Mat(4, 2) << 1, 0, 1, 1, 0, 1, 2, 0).finished());
    CHECK(subspace_distance(grassmann_geodesic(b, b, 0.4), b) < 1e-8);
}

TEST_CASE("mixing: identical bases and crossing accuracy curves")
{
    Stream rng(4);
    const Eigen::Index D = 5;
    const Mat x = uniform_cube(rng, 400, D);
    Vec f1(400), f2(400);
    for (Eigen::Index i = 0; i < 400; ++i) {
        f1(i) = -std::pow(x(i, 0), 2);
        f2(i) = -std::pow(x(i, 1), 2);
    }
    Mat bw(D, 2), bl(D, 2);
    bw << 1, 0, 0, 1, 0, 1, 0, 0, 0, 0;
    bl << 0, 1, 1, 0, 0, 0, 0, 1, 0, 0;
    bw = orthonormal(bw);
    bl = orthonormal(bl);

    const auto same = mix_subspaces(bw, bw, x, f1, f2);
    CHECK(same.s_star == 0.0);

    const auto mix = mix_subspaces(bw, bl, x, f1, f2);
    const auto n = mix.s_grid.size();
    CHECK(mix.grid_r2_w(0) > mix.grid_r2_l(0));
    CHECK(mix.grid_r2_w(n - 1) < mix.grid_r2_l(n - 1));
    CHECK(mix.s_star > 0.05);
    CHECK(mix.s_star < 0.95);
    CHECK(std::min(mix.r2_w, mix.r2_l) >= std::min(mix.grid_r2_w.minCoeff(), mix.grid_r2_l.minCoeff()));
    for (Eigen::Index i = 0; i < n; ++i)
        CHECK(std::min(mix.r2_w, mix.r2_l) >= std::min(mix.grid_r2_w(i), mix.grid_r2_l(i)) - 1e-12);
    CHECK((mix.basis.transpose() * mix.basis - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projection and shadow data")
{
    Stream rng(5);
    const Mat x = uniform_cube(rng, 30, 6);
    Mat U = Mat::Zero(6, 2);
    U(0, 0) = U(1, 1) = 1.0;
    const Mat g = project(U, x);
    CHECK(g == x.leftCols(2));
    const Vec f = x.col(3);
    const auto tab = shadow_data(U, x, f);
    CHECK(tab.rows.size() == 30);
    CHECK(tab.header == std::vector<std::string>{"gamma1", "gamma2", "f"});

    // A ridge collapses onto a curve in its own direction.
    Vec w = random_matrix(rng, 6, 1).col(0);
    w.normalize();
    Vec ridge(30);
    for (Eigen::Index i = 0; i < 30; ++i)
        ridge(i) = std::pow(w.dot(x.row(i).transpose()), 2);
    CHECK(surrogate::polynomial_r_squared(project(w, x), ridge, 2) > 1.0 - 1e-8);
}

TEST_CASE("orthogonal complement")
{
    Stream rng(6);
    const Mat U = orthonormal(random_matrix(rng, 7, 2));
    const Mat V = orthogonal_complement(U);
    CHECK(V.cols() == 5);
    CHECK((U.transpose() * V).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((V.transpose() * V - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("zonotope vertices")
{
    Mat U = Mat::Zero(4, 2);
    U(0, 0) = U(1, 1) = 1.0;
    auto z = zonotope_vertices(U);
    REQUIRE(z.vertices.size() == 4);
    for (const auto& v : z.vertices) {
        CHECK(std::abs(std::abs(v.x()) - 1.0) < 1e-14);
        CHECK(std::abs(std::abs(v.y()) - 1.0) < 1e-14);
    }

    const double c = std::sqrt(0.5);
    Mat R(2, 2);
    R << c, -c, c, c;
    z = zonotope_vertices(R);
    REQUIRE(z.vertices.size() == 4);
    for (const auto& v : z.vertices)
        CHECK(v.norm() == doctest::Approx(std::sqrt(2.0)));
    CHECK(z.contains({0.0, 0.0}));
    CHECK_FALSE(z.contains({1.0, 1.0}));

    Stream rng(7);
    for (int trial = 0; trial < 3; ++trial) {
        const Mat B = orthonormal(random_matrix(rng, 12, 2));
        const auto zz = zonotope_vertices(B);
        for (std::size_t k = 0; k < zz.vertices.size(); ++k) {
            const Vec g = B.transpose() * zz.corners[k];
            CHECK((g - Vec(zz.vertices[k])).norm() < 1e-12);
        }
        for (long mask = 0; mask < (1L << 12); ++mask) {
            Vec x(12);
            for (int b = 0; b < 12; ++b)
                x(b) = (mask >> b) & 1 ? 1.0 : -1.0;
            const Vec g = B.transpose() * x;
            CHECK(zz.contains({g(0), g(1)}, 1e-9));
        }
        for (int k = 0; k < 20; ++k) {
            const geometry::Point gam(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
            if (!zz.contains(gam))
                continue;
            const Vec x = zz.preimage(gam);
            CHECK(x.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
            CHECK((B.transpose() * x - Vec(gam)).norm() < 1e-10);
        }
    }
}

TEST_CASE("inactive sampling: separable box at the centre")
{
    const Eigen::Index D = 6;
    Mat U = Mat::Zero(D, 2);
    U(0, 0) = U(1, 1) = 1.0;
    const InactiveSampler s(U, zonotope_vertices(U));
    const auto box = s.bounding_box({0.0, 0.0});
    const auto zs = s.sample({0.0, 0.0}, 4000, 9);
    Vec mean = Vec::Zero(D), sq = Vec::Zero(D);
    for (const auto& z : zs) {
        const Vec x = s.lift({0.0, 0.0}, z);
        CHECK(x.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        CHECK(std::abs(x(0)) < 1e-15);
        mean += x;
        sq += x.cwiseProduct(x);
        CHECK((z.array() >= box.lower.array() - 1e-12).all());
        CHECK((z.array() <= box.upper.array() + 1e-12).all());
    }
    mean /= 4000.0;
    sq /= 4000.0;
    for (Eigen::Index i = 2; i < D; ++i) {
        CHECK(std::abs(mean(i)) < 0.05);
        CHECK(sq(i) == doctest::Approx(1.0 / 3.0).epsilon(0.05));
    }
}

TEST_CASE("inactive sampling: exact interval for a single inactive direction")
{
    Stream rng(10);
    const Mat U = orthonormal(random_matrix(rng, 3, 2));
    const auto z = zonotope_vertices(U);
    const InactiveSampler s(U, z);
    const Vec v = s.complement().col(0);
    for (int k = 0; k < 20; ++k) {
        const geometry::Point gam = 0.6 * (rng.uniform() * z.vertices[k % z.vertices.size()]);
        const Vec base = U * Vec(gam);
        double lo = -1e300, hi = 1e300;
        for (int i = 0; i < 3; ++i) {
            const double a = (-1.0 - base(i)) / v(i), b = (1.0 - base(i)) / v(i);
            lo = std::max(lo, std::min(a, b));
            hi = std::min(hi, std::max(a, b));
        }
        const auto box = s.bounding_box(gam);
        CHECK(box.lower(0) == doctest::Approx(lo).epsilon(1e-9));
        CHECK(box.upper(0) == doctest::Approx(hi).epsilon(1e-9));
    }
}

TEST_CASE("inactive sampling: vertices, hit-and-run and infeasible points")
{
    Stream rng(11);
    const Mat U = orthonormal(random_matrix(rng, 15, 2));
    const auto z = zonotope_vertices(U);
    const InactiveSampler s(U, z);

    const auto at_vertex = s.sample(z.vertices[0], 5, 1);
    REQUIRE(at_vertex.size() == 5);
    for (const auto& zeta : at_vertex) {
        CHECK((zeta - at_vertex[0]).norm() == 0.0);
        CHECK((s.lift(z.vertices[0], zeta) - z.corners[0]).cwiseAbs().maxCoeff() < 1e-9);
    }

    // Close to a vertex the fibre is tiny compared with its bounding box.
    const geometry::Point near = 0.999 * z.vertices[1];
    bool har = false;
    const auto zs = s.sample(near, 50, 2, &har);
    CHECK(zs.size() == 50);
    CHECK(har);
    for (const auto& zeta : zs)
        CHECK(s.feasible(near, zeta, 1e-12));

    const auto mid = s.sample({0.1, -0.1}, 200, 3);
    for (const auto& zeta : mid)
        CHECK(s.lift({0.1, -0.1}, zeta).cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    CHECK(s.sample({0.1, -0.1}, 200, 3) == mid);

    CHECK_THROWS_AS(s.sample(2.0 * z.vertices[0], 3, 1), DomainError);
}

TEST_CASE("stretch sampling fills the gap between data and zonotope")
{
    const Eigen::Index D = 4;
    Mat U = Mat::Zero(D, 2);
    U(0, 0) = U(1, 1) = 1.0;
    const InactiveSampler s(U, zonotope_vertices(U));
    Stream rng(12);

    Mat disk(200, D);
    for (Eigen::Index i = 0; i < 200; ++i) {
        const double r = 0.3 * std::sqrt(rng.uniform()), a = 2 * std::numbers::pi * rng.uniform();
        disk.row(i) << r * std::cos(a), r * std::sin(a), rng.uniform(-1, 1), rng.uniform(-1, 1);
    }
    const auto res = stretch_sample(s, disk, 25, 5);
    CHECK_FALSE(res.centers.empty());
    CHECK(res.unit.rows() == static_cast<Eigen::Index>(res.centers.size()));
    for (std::size_t k = 0; k < res.centers.size(); ++k) {
        CHECK(res.centers[k].norm() > 0.3);
        CHECK(res.centers[k].cwiseAbs().maxCoeff() <= 1.0);
        const Vec x = res.unit.row(static_cast<Eigen::Index>(k)).transpose();
        CHECK(x.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        CHECK((x.head(2) - Vec(res.centers[k])).norm() < 1e-12);
    }

    Mat full(204, D);
    full.topRows(200) = uniform_cube(rng, 200, D);
    full.bottomRows(4) << 1, 1, 0, 0, -1, 1, 0, 0, -1, -1, 0, 0, 1, -1, 0, 0;
    CHECK(stretch_sample(s, full, 25, 5).centers.size() <= 2);

    // deterministic in the seed
    CHECK(stretch_sample(s, disk, 25, 5).unit == res.unit);
}
