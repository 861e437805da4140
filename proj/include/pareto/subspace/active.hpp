#pragma once

// Active subspaces from gradient samples and their Grassmann-geodesic mixing.

#include "pareto/common.hpp"
#include "pareto/io/csv.hpp"
#include "pareto/surrogate/quadratic.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace pareto::subspace {

struct SubspaceEstimate {
    Mat C;
    Vec eigenvalues;  // descending, clamped at 0
    Mat eigenvectors; // columns match eigenvalues
    std::size_t n_samples = 0;
    std::string network; // "wifi", "laa" or "mixed"

    Mat leading(Eigen::Index r) const { return eigenvectors.leftCols(r); }
};

// C = (1/N) sum g_n g_n' over the rows of gradients.
SubspaceEstimate estimate_c_matrix(const Mat& gradients, std::string network = "mixed");

// Principal angles between the ranges of two orthonormal bases, ascending.
Vec principal_angles(const Mat& x, const Mat& y);
double subspace_distance(const Mat& x, const Mat& y);

// Point s of the geodesic from Range(x) (s = 0) to Range(y) (s = 1).
// Throws GeometryError when x'y is singular.
Mat grassmann_geodesic(const Mat& x, const Mat& y, double s);

struct MixedSubspace {
    Mat basis;
    double s_star = 0.0;
    double r2_w = 0.0;
    double r2_l = 0.0;
    surrogate::QuadraticSurrogate sur_w;
    surrogate::QuadraticSurrogate sur_l;
    Vec s_grid;
    Vec grid_r2_w;
    Vec grid_r2_l;
};

struct MixOptions {
    int grid = 101;
    int refine_iter = 40;
    double flat_tol = 1e-6;
    unsigned threads = 1;
};

// Maximises min(R2_w, R2_l) of the PSD quadratic fits over gamma = U(s)'x
// along the geodesic from basis_w (s = 0) to basis_l (s = 1).
MixedSubspace mix_subspaces(const Mat& basis_w, const Mat& basis_l, const Mat& coords,
                            const Vec& responses_w, const Vec& responses_l,
                            const MixOptions& opts = {});

// Active coordinates gamma_n = U' x_n, one row per sample.
Mat project(const Mat& basis, const Mat& coords);

// Shadow-plot table: gamma1..gammaR, f for every sample.
io::CsvTable shadow_data(const Mat& basis, const Mat& coords, const Vec& responses);

// Columns spanning the orthogonal complement of Range(basis).
Mat orthogonal_complement(const Mat& basis);

nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

} // namespace pareto::subspace
