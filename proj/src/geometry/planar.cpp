#include "pareto/geometry/planar.hpp"

#include "pareto/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace pareto::geometry {

std::vector<Point> convex_hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0)
            --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        const Point& p = pts[i - 1];
        while (k >= t && cross(h[k - 2], h[k - 1], p) <= 0.0)
            --k;
        h[k++] = p;
    }
    h.resize(k - 1);
    return h;
}

bool inside_convex(const std::vector<Point>& poly, const Point& p, double tol)
{
    return convex_depth(poly, p) >= -tol;
}

double convex_depth(const std::vector<Point>& poly, const Point& p)
{
    const std::size_t n = poly.size();
    if (n < 3)
        return -std::numeric_limits<double>::infinity();
    double depth = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % n];
        const double len = (b - a).norm();
        if (len == 0.0)
            continue;
        depth = std::min(depth, cross(a, b, p) / len);
    }
    return depth;
}

std::vector<Point> sample_boundary(const std::vector<Point>& poly, int n)
{
    std::vector<Point> out;
    if (n <= 0 || poly.empty())
        return out;
    const std::size_t m = poly.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        cum[i + 1] = cum[i] + (poly[(i + 1) % m] - poly[i]).norm();
    const double perim = cum[m];
    std::size_t e = 0;
    for (int k = 0; k < n; ++k) {
        const double s = perim * k / n;
        while (e + 1 < m && cum[e + 1] <= s)
            ++e;
        const double len = cum[e + 1] - cum[e];
        const double w = len > 0.0 ? (s - cum[e]) / len : 0.0;
        out.push_back((1.0 - w) * poly[e] + w * poly[(e + 1) % m]);
    }
    return out;
}

bool circumcircle(const Point& a, const Point& b, const Point& c, Point& center, double& radius2)
{
    const double bx = b.x() - a.x(), by = b.y() - a.y();
    const double cx = c.x() - a.x(), cy = c.y() - a.y();
    const double d = 2.0 * (bx * cy - by * cx);
    if (d == 0.0)
        return false;
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    const double ux = (cy * b2 - by * c2) / d;
    const double uy = (bx * c2 - cx * b2) / d;
    center = Point(a.x() + ux, a.y() + uy);
    radius2 = ux * ux + uy * uy;
    return true;
}

namespace {

constexpr int kGhost = -1; // the vertex at infinity

// Real triangles carry their circumcircle. A ghost triangle (a, b, ghost)
// stands for the unbounded region beyond the hull edge b -> a; its
// "circumcircle" is the open half-plane left of a -> b plus the open segment.
struct Cell {
    std::array<int, 3> v;
    Point center;
    double radius2;
    bool ghost() const { return v[2] == kGhost; }
};

Cell make_cell(const std::vector<Point>& P, int a, int b, int c)
{
    // rotate the ghost vertex (if any) into the last slot, keeping orientation
    if (a == kGhost)
        return make_cell(P, b, c, a);
    if (b == kGhost)
        return make_cell(P, c, a, b);
    Cell t{{a, b, c}, Point::Zero(), 0.0};
    if (c != kGhost && !circumcircle(P[static_cast<std::size_t>(a)], P[static_cast<std::size_t>(b)],
                                     P[static_cast<std::size_t>(c)], t.center, t.radius2))
        throw GeometryError("delaunay: degenerate triangle (collinear points)");
    return t;
}

bool in_circle(const std::vector<Point>& P, const Cell& t, const Point& p)
{
    if (!t.ghost())
        return (p - t.center).squaredNorm() < t.radius2;
    const Point& a = P[static_cast<std::size_t>(t.v[0])];
    const Point& b = P[static_cast<std::size_t>(t.v[1])];
    const double o = cross(a, b, p);
    if (o != 0.0)
        return o > 0.0;
    const double s = (p - a).dot(b - a);
    return s > 0.0 && s < (b - a).squaredNorm();
}

} // namespace

std::vector<Triangle> delaunay(const std::vector<Point>& pts)
{
    const int n = static_cast<int>(pts.size());
    if (n < 3)
        throw GeometryError("delaunay needs at least three points");

    // seed triangle: the first three points that are not collinear
    int i2 = -1;
    for (int k = 2; k < n && i2 < 0; ++k)
        if (cross(pts[0], pts[1], pts[static_cast<std::size_t>(k)]) != 0.0)
            i2 = k;
    if (i2 < 0)
        throw GeometryError("delaunay: all points are collinear");
    int a = 0, b = 1;
    if (cross(pts[0], pts[1], pts[static_cast<std::size_t>(i2)]) < 0.0)
        std::swap(a, b);

    std::vector<Cell> cells{make_cell(pts, a, b, i2), make_cell(pts, b, a, kGhost),
                            make_cell(pts, i2, b, kGhost), make_cell(pts, a, i2, kGhost)};
    for (int i = 2; i < n; ++i) {
        if (i == i2)
            continue;
        const Point& p = pts[static_cast<std::size_t>(i)];
        std::vector<Cell> keep;
        std::map<std::pair<int, int>, int> edges; // undirected edge -> multiplicity
        std::vector<std::pair<int, int>> order;   // directed, as seen from its cell
        for (const auto& t : cells) {
            if (in_circle(pts, t, p)) {
                for (int k = 0; k < 3; ++k) {
                    const int u = t.v[static_cast<std::size_t>(k)], w = t.v[static_cast<std::size_t>((k + 1) % 3)];
                    auto [it, fresh] = edges.emplace(std::minmax(u, w), 0);
                    ++it->second;
                    if (fresh)
                        order.emplace_back(u, w);
                }
            } else {
                keep.push_back(t);
            }
        }
        if (order.empty())
            continue; // duplicate of an existing vertex
        for (const auto& [u, w] : order)
            if (edges[std::minmax(u, w)] == 1)
                keep.push_back(make_cell(pts, u, w, i));
        cells = std::move(keep);
    }

    std::vector<Triangle> out;
    for (const auto& t : cells)
        if (!t.ghost())
            out.push_back({t.v, t.center, t.radius2});
    return out;
}

} // namespace pareto::geometry
