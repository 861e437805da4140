#include "pareto/common.hpp"
#include "pareto/geometry/planar.hpp"
#include "pareto/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace pareto;
using namespace pareto::geometry;

namespace {

double polygon_area(const std::vector<Point>& p)
{
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p[i];
        const auto& v = p[(i + 1) % p.size()];
        a += u.x() * v.y() - v.x() * u.y();
    }
    return 0.5 * a;
}

} // namespace

TEST_CASE("convex hull of a square with interior and collinear points")
{
    std::vector<Point> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}, {0.2, 0.7}};
    const auto h = convex_hull(pts);
    CHECK(h.size() == 4);
    CHECK(polygon_area(h) == doctest::Approx(1.0)); // positive: counterclockwise
    CHECK(inside_convex(h, {0.5, 0.5}));
    CHECK(inside_convex(h, {1.0, 0.5}));
    CHECK_FALSE(inside_convex(h, {1.01, 0.5}));
    CHECK(convex_depth(h, {0.5, 0.5}) == doctest::Approx(0.5));
    CHECK(convex_depth(h, {1.5, 0.5}) == doctest::Approx(-0.5));
}

TEST_CASE("boundary sampling stays on the polygon")
{
    std::vector<Point> sq{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    const auto b = sample_boundary(sq, 40);
    CHECK(b.size() == 40);
    for (const auto& p : b)
        CHECK(std::abs(convex_depth(sq, p)) < 1e-12);
}

TEST_CASE("circumcircle")
{
    Point c;
    double r2 = 0.0;
    REQUIRE(circumcircle({0, 0}, {2, 0}, {0, 2}, c, r2));
    CHECK(c.x() == doctest::Approx(1.0));
    CHECK(c.y() == doctest::Approx(1.0));
    CHECK(r2 == doctest::Approx(2.0));
    CHECK_FALSE(circumcircle({0, 0}, {1, 1}, {2, 2}, c, r2));
}

TEST_CASE("delaunay: empty circumcircles and area of the hull")
{
    Stream rng(17);
    std::vector<Point> pts;
    for (int i = 0; i < 150; ++i)
        pts.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const auto tri = delaunay(pts);
    REQUIRE_FALSE(tri.empty());
    double area = 0.0;
    std::size_t violations = 0;
    for (const auto& t : tri) {
        area += std::abs(cross(pts[static_cast<std::size_t>(t.v[0])], pts[static_cast<std::size_t>(t.v[1])], pts[static_cast<std::size_t>(t.v[2])])) / 2.0;
        for (int k = 0; k < static_cast<int>(pts.size()); ++k) {
            if (k == t.v[0] || k == t.v[1] || k == t.v[2])
                continue;
            if ((pts[static_cast<std::size_t>(k)] - t.center).squaredNorm() < t.radius2 * (1.0 - 1e-9))
                ++violations;
        }
    }
    CHECK(violations == 0);
    CHECK(area == doctest::Approx(polygon_area(convex_hull(pts))).epsilon(1e-9));
    // Euler: 2n - 2 - h triangles
    CHECK(tri.size() == 2 * pts.size() - 2 - convex_hull(pts).size());
}

TEST_CASE("delaunay rejects degenerate inputs")
{
    CHECK_THROWS_AS(delaunay({{0, 0}, {1, 1}}), pareto::GeometryError);
}
