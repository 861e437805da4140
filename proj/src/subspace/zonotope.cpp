#include "pareto/subspace/zonotope.hpp"

#include "pareto/random.hpp"
#include "pareto/subspace/active.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pareto::subspace {

using geometry::Point;

double Zonotope2D::scale() const
{
    double s = 0.0;
    for (const auto& v : vertices)
        s = std::max(s, v.norm());
    return s;
}

bool Zonotope2D::contains(const Point& p, double tol) const
{
    return geometry::inside_convex(vertices, p, tol * std::max(1.0, scale()));
}

Vec Zonotope2D::preimage(const Point& gamma) const
{
    if (!contains(gamma))
        throw DomainError(fmt::format("gamma ({}, {}) lies outside the zonotope", gamma.x(), gamma.y()));
    const std::size_t n = vertices.size();
    const Eigen::Index D = corners.front().size();
    if (gamma.norm() <= 1e-15 * std::max(1.0, scale()))
        return Vec::Zero(D);
    const Point o = Point::Zero();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& a = vertices[k];
        const Point& b = vertices[(k + 1) % n];
        if (geometry::cross(o, a, gamma) < 0.0 || geometry::cross(o, b, gamma) > 0.0)
            continue;
        Eigen::Matrix2d M;
        M.col(0) = a;
        M.col(1) = b;
        Eigen::Vector2d w = M.colPivHouseholderQr().solve(gamma);
        w = w.cwiseMax(0.0);
        const double sum = w.sum();
        if (sum > 1.0)
            w /= sum;
        Vec x = w(0) * corners[k] + w(1) * corners[(k + 1) % n];
        return x.cwiseMax(-1.0).cwiseMin(1.0);
    }
    throw GeometryError("preimage: no fan triangle contains gamma");
}

Zonotope2D zonotope_vertices(const Mat& basis)
{
    if (basis.cols() != 2)
        throw DimensionError("zonotope_vertices needs a D x 2 basis");
    const Eigen::Index D = basis.rows();
    struct Gen {
        Eigen::Index i;
        Point g;
        double sign; // g = sign * U.row(i)
        double angle;
    };
    std::vector<Gen> gens;
    double gmax = 0.0;
    for (Eigen::Index i = 0; i < D; ++i)
        gmax = std::max(gmax, basis.row(i).norm());
    for (Eigen::Index i = 0; i < D; ++i) {
        Point g = basis.row(i).transpose();
        if (g.norm() <= 1e-14 * std::max(1.0, gmax))
            continue;
        double sign = 1.0;
        if (g.y() < 0.0 || (g.y() == 0.0 && g.x() < 0.0)) {
            g = -g;
            sign = -1.0;
        }
        gens.push_back({i, g, sign, std::atan2(g.y(), g.x())});
    }
    if (gens.size() < 2)
        throw GeometryError("zonotope_vertices: fewer than two nonzero generators");
    std::stable_sort(gens.begin(), gens.end(), [](const Gen& a, const Gen& b) { return a.angle < b.angle; });

    // groups of parallel generators move together
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < gens.size(); ++k) {
        if (!groups.empty()) {
            const Point& p = gens[groups.back().front()].g;
            const Point& q = gens[k].g;
            if (std::abs(p.x() * q.y() - p.y() * q.x()) <= 1e-12 * p.norm() * q.norm()) {
                groups.back().push_back(k);
                continue;
            }
        }
        groups.push_back({k});
    }
    if (groups.size() < 2)
        throw GeometryError("zonotope_vertices: generators are all parallel");

    Zonotope2D z;
    Vec x = Vec::Zero(D);
    Point v = Point::Zero();
    for (const auto& g : gens) {
        x(g.i) = -g.sign;
        v -= g.g;
    }
    auto push = [&](const Point& p) {
        z.vertices.push_back(p);
        z.corners.push_back(x);
    };
    push(v);
    for (int pass = 0; pass < 2; ++pass) {
        const double dir = pass == 0 ? 1.0 : -1.0;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            for (std::size_t k : groups[gi]) {
                v += 2.0 * dir * gens[k].g;
                x(gens[k].i) = dir * gens[k].sign;
            }
            if (pass == 1 && gi + 1 == groups.size())
                break; // back at the start
            push(v);
        }
    }
    return z;
}

InactiveSampler::InactiveSampler(const Mat& basis, const Zonotope2D& zonotope)
    : U_(basis), V_(orthogonal_complement(basis)), Z_(zonotope)
{
    if (Z_.vertices.empty())
        throw GeometryError("InactiveSampler: empty zonotope");
}

Vec InactiveSampler::lift(const Point& gamma, const Vec& zeta) const
{
    return U_ * gamma + V_ * zeta;
}

bool InactiveSampler::feasible(const Point& gamma, const Vec& zeta, double tol) const
{
    return lift(gamma, zeta).cwiseAbs().maxCoeff() <= 1.0 + tol;
}

Box InactiveSampler::bounding_box(const Point& gamma) const
{
    const Eigen::Index D = U_.rows();
    const Eigen::Index m = V_.cols();
    // max c'x over the fibre equals min over lambda of lambda'gamma + |c - U lambda|_1,
    // a convex piecewise-linear function whose minimum sits on a vertex of
    // the line arrangement { u_i' lambda = c_i }.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < D; ++i)
        for (Eigen::Index k = i + 1; k < D; ++k) {
            const double det = U_(i, 0) * U_(k, 1) - U_(i, 1) * U_(k, 0);
            if (std::abs(det) > 1e-14)
                pairs.emplace_back(i, k);
        }
    if (pairs.empty())
        throw GeometryError("bounding_box: basis rows are all parallel");
    auto support = [&](const Vec& c) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [i, k] : pairs) {
            Eigen::Matrix2d A;
            A << U_(i, 0), U_(i, 1), U_(k, 0), U_(k, 1);
            const Eigen::Vector2d lam = A.inverse() * Eigen::Vector2d(c(i), c(k));
            const double val = lam.dot(gamma) + (c - U_ * lam).cwiseAbs().sum();
            best = std::min(best, val);
        }
        return best;
    };
    Box b;
    b.lower.resize(m);
    b.upper.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Vec c = V_.col(j);
        b.upper(j) = support(c);
        b.lower(j) = -support(-c);
        if (b.lower(j) > b.upper(j))
            b.lower(j) = b.upper(j) = 0.5 * (b.lower(j) + b.upper(j));
    }
    return b;
}

std::vector<Vec> InactiveSampler::sample(const Point& gamma, std::size_t n, std::uint64_t seed,
                                         bool* used_hit_and_run) const
{
    if (used_hit_and_run)
        *used_hit_and_run = false;
    if (!Z_.contains(gamma))
        throw DomainError(fmt::format("gamma ({}, {}) lies outside the zonotope", gamma.x(), gamma.y()));
    std::vector<Vec> out;
    out.reserve(n);
    const double vtol = 1e-12 * std::max(1.0, Z_.scale());
    for (std::size_t k = 0; k < Z_.vertices.size(); ++k)
        if ((Z_.vertices[k] - gamma).norm() <= vtol) {
            const Vec zeta = V_.transpose() * Z_.corners[k];
            out.assign(n, zeta);
            return out;
        }

    Stream rng = Stream::derive(seed, stream_tag::inactive);
    const Box box = bounding_box(gamma);
    const Eigen::Index m = V_.cols();
    const Vec base = U_ * gamma;
    int misses = 0;
    while (out.size() < n && misses < max_rejections) {
        Vec zeta(m);
        for (Eigen::Index j = 0; j < m; ++j)
            zeta(j) = rng.uniform(box.lower(j), box.upper(j));
        if ((base + V_ * zeta).cwiseAbs().maxCoeff() <= 1.0) {
            out.push_back(std::move(zeta));
            misses = 0;
        } else {
            ++misses;
        }
    }
    if (out.size() == n)
        return out;

    if (used_hit_and_run)
        *used_hit_and_run = true;
    Vec zeta = V_.transpose() * Z_.preimage(gamma);
    const int burn = 100 * static_cast<int>(m);
    const int thin = 5 * static_cast<int>(m);
    auto step = [&] {
        Vec d(m);
        for (Eigen::Index j = 0; j < m; ++j)
            d(j) = rng.normal();
        const Vec w = V_ * d;
        const Vec x = base + V_ * zeta;
        double tlo = -std::numeric_limits<double>::infinity();
        double thi = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (std::abs(w(i)) < 1e-300)
                continue;
            const double t1 = (-1.0 - x(i)) / w(i);
            const double t2 = (1.0 - x(i)) / w(i);
            tlo = std::max(tlo, std::min(t1, t2));
            thi = std::min(thi, std::max(t1, t2));
        }
        if (!(thi > tlo))
            return;
        zeta += rng.uniform(tlo, thi) * d;
    };
    for (int i = 0; i < burn; ++i)
        step();
    while (out.size() < n) {
        for (int i = 0; i < thin; ++i)
            step();
        out.push_back(zeta);
    }
    return out;
}

StretchResult stretch_sample(const InactiveSampler& sampler, const Mat& coords, int n_boundary,
                             std::uint64_t seed)
{
    const Mat g = project(sampler.basis(), coords);
    std::vector<Point> pts;
    pts.reserve(g.rows());
    for (Eigen::Index n = 0; n < g.rows(); ++n)
        pts.emplace_back(g(n, 0), g(n, 1));
    StretchResult res;
    res.data_hull = geometry::convex_hull(pts);
    if (res.data_hull.size() < 3)
        throw GeometryError("stretch_sample: projected data hull is degenerate");

    const auto& zono = sampler.zonotope().vertices;
    auto inner = geometry::sample_boundary(res.data_hull, n_boundary);
    auto outer = geometry::sample_boundary(zono, n_boundary);
    res.boundary_points = inner;
    res.boundary_points.insert(res.boundary_points.end(), outer.begin(), outer.end());
    Stream jitter = Stream::derive(seed, stream_tag::jitter);
    for (auto& p : res.boundary_points) {
        p.x() += 1e-9 * (2.0 * jitter.uniform() - 1.0);
        p.y() += 1e-9 * (2.0 * jitter.uniform() - 1.0);
    }

    const auto tris = geometry::delaunay(res.boundary_points);
    const double eps = 1e-9 * std::max(1.0, sampler.zonotope().scale());
    for (const auto& t : tris) {
        const Point& c = t.center;
        if (geometry::convex_depth(res.data_hull, c) >= -eps)
            continue;
        if (geometry::convex_depth(zono, c) <= eps)
            continue;
        bool dup = false;
        for (const auto& q : res.centers)
            if ((q - c).norm() <= eps) {
                dup = true;
                break;
            }
        if (!dup)
            res.centers.push_back(c);
    }

    const Eigen::Index D = sampler.basis().rows();
    res.unit.resize(static_cast<Eigen::Index>(res.centers.size()), D);
    for (std::size_t k = 0; k < res.centers.size(); ++k) {
        const std::uint64_t s = Stream::derive(seed, stream_tag::stretch, k).next();
        const Vec zeta = sampler.sample(res.centers[k], 1, s).front();
        Vec x = sampler.lift(res.centers[k], zeta);
        res.unit.row(static_cast<Eigen::Index>(k)) = x.cwiseMax(-1.0).cwiseMin(1.0).transpose();
    }
    return res;
}

} // namespace pareto::subspace
