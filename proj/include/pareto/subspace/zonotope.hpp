#pragma once

// The image of [-1, 1]^D under gamma = U'x for a D x 2 basis U, plus the
// inactive fibres Z_gamma = { zeta : U gamma + V zeta in [-1, 1]^D } where V
// spans the orthogonal complement of U.

#include "pareto/common.hpp"
#include "pareto/geometry/planar.hpp"

#include <cstdint>
#include <vector>

namespace pareto::subspace {

struct Zonotope2D {
    std::vector<geometry::Point> vertices; // counterclockwise
    std::vector<Vec> corners;              // cube corner generating each vertex

    bool contains(const geometry::Point& p, double tol = 1e-9) const;
    // A point x of the cube with U'x = gamma (gamma must be inside).
    Vec preimage(const geometry::Point& gamma) const;
    double scale() const;
};

Zonotope2D zonotope_vertices(const Mat& basis);

// Per-coordinate bounds of Z_gamma, exact (solved through the planar dual).
struct Box {
    Vec lower;
    Vec upper;
};

class InactiveSampler {
public:
    InactiveSampler(const Mat& basis, const Zonotope2D& zonotope);

    const Mat& basis() const { return U_; }
    const Mat& complement() const { return V_; }
    const Zonotope2D& zonotope() const { return Z_; }

    Box bounding_box(const geometry::Point& gamma) const;

    // n inactive vectors with lift(gamma, zeta) inside the cube. Rejection from
    // the bounding box; hit-and-run after 10,000 consecutive rejections.
    // Throws DomainError when gamma is outside the zonotope.
    std::vector<Vec> sample(const geometry::Point& gamma, std::size_t n, std::uint64_t seed,
                            bool* used_hit_and_run = nullptr) const;

    Vec lift(const geometry::Point& gamma, const Vec& zeta) const;
    bool feasible(const geometry::Point& gamma, const Vec& zeta, double tol = 0.0) const;

    static constexpr int max_rejections = 10000;

private:
    Mat U_;
    Mat V_;
    Zonotope2D Z_;
};

struct StretchResult {
    std::vector<geometry::Point> data_hull;
    std::vector<geometry::Point> boundary_points;
    std::vector<geometry::Point> centers; // accepted circumcentres
    Mat unit;                             // lifted samples, one row per centre
};

// Exterior Voronoi vertices between the projected-data hull and the zonotope,
// lifted to the cube with random inactive coordinates.
StretchResult stretch_sample(const InactiveSampler& sampler, const Mat& coords, int n_boundary,
                             std::uint64_t seed);

} // namespace pareto::subspace
