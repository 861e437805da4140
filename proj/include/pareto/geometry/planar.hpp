#pragma once

// Small planar geometry kit: convex hulls, polygon sampling and Delaunay
// triangulation.

#include <Eigen/Core>

#include <array>
#include <vector>

namespace pareto::geometry {

using Point = Eigen::Vector2d;

inline double cross(const Point& o, const Point& a, const Point& b)
{
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain. Counterclockwise, collinear points dropped, first
// vertex is the lowest-x (then lowest-y) point.
std::vector<Point> convex_hull(std::vector<Point> pts);

// Convex counterclockwise polygon membership; tol is an absolute distance.
bool inside_convex(const std::vector<Point>& poly, const Point& p, double tol = 1e-9);

// Signed distance to the boundary of a convex CCW polygon (positive inside).
double convex_depth(const std::vector<Point>& poly, const Point& p);

// n points equally spaced in arc length around the closed polygon, starting at
// vertex 0.
std::vector<Point> sample_boundary(const std::vector<Point>& poly, int n);

struct Triangle {
    std::array<int, 3> v; // counterclockwise
    Point center;
    double radius2;
};

bool circumcircle(const Point& a, const Point& b, const Point& c, Point& center, double& radius2);

// Bowyer-Watson with a vertex at infinity (no super triangle, so hull
// triangles are never lost). Triangles index into pts.
std::vector<Triangle> delaunay(const std::vector<Point>& pts);

} // namespace pareto::geometry
