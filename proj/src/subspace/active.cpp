#include "pareto/subspace/active.hpp"

#include "pareto/parallel.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace pareto::subspace {

namespace {

// Flip each column so its largest-magnitude entry is positive.
void fix_signs(Mat& V)
{
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        Eigen::Index imax = 0;
        V.col(j).cwiseAbs().maxCoeff(&imax);
        if (V(imax, j) < 0.0)
            V.col(j) *= -1.0;
    }
}

void check_orthonormal(const Mat& b, const char* what)
{
    const Mat G = b.transpose() * b;
    if ((G - Mat::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff() > 1e-8)
        throw GeometryError(fmt::format("{}: basis columns are not orthonormal", what));
}

Mat orthonormalise(const Mat& A)
{
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ() * Mat::Identity(A.rows(), A.cols());
    const Mat R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        if (R(j, j) < 0.0)
            Q.col(j) *= -1.0;
    return Q;
}

} // namespace

SubspaceEstimate estimate_c_matrix(const Mat& gradients, std::string network)
{
    if (gradients.rows() < 1)
        throw DimensionError("estimate_c_matrix needs at least one gradient");
    if (!gradients.allFinite())
        throw DomainError("estimate_c_matrix: non-finite gradient entries");
    SubspaceEstimate e;
    const auto D = gradients.cols();
    e.n_samples = static_cast<std::size_t>(gradients.rows());
    e.network = std::move(network);
    e.C = (gradients.transpose() * gradients) / static_cast<double>(gradients.rows());
    e.C = 0.5 * (e.C + e.C.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(e.C);
    e.eigenvalues.resize(D);
    e.eigenvectors.resize(D, D);
    for (Eigen::Index j = 0; j < D; ++j) {
        e.eigenvalues(j) = std::max(0.0, es.eigenvalues()(D - 1 - j));
        e.eigenvectors.col(j) = es.eigenvectors().col(D - 1 - j);
    }
    fix_signs(e.eigenvectors);
    return e;
}

Vec principal_angles(const Mat& x, const Mat& y)
{
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimensionError("principal_angles: bases differ in shape");
    const Eigen::Index r = x.cols();
    const Vec cosv = Eigen::JacobiSVD<Mat>(x.transpose() * y).singularValues(); // descending
    const Vec sinv = Eigen::JacobiSVD<Mat>(y - x * (x.transpose() * y)).singularValues();
    Vec ang(r);
    for (Eigen::Index k = 0; k < r; ++k) {
        const double c = std::min(1.0, cosv(k));
        const double s = std::min(1.0, sinv(r - 1 - k));
        ang(k) = c * c >= 0.5 ? std::asin(s) : std::acos(c);
    }
    return ang;
}

double subspace_distance(const Mat& x, const Mat& y)
{
    return principal_angles(x, y).norm();
}

Mat grassmann_geodesic(const Mat& x, const Mat& y, double s)
{
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimensionError("grassmann_geodesic: bases differ in shape");
    if (x.cols() > x.rows())
        throw DimensionError("grassmann_geodesic: r exceeds D");
    check_orthonormal(x, "grassmann_geodesic");
    check_orthonormal(y, "grassmann_geodesic");
    const Mat M = x.transpose() * y;
    Eigen::JacobiSVD<Mat> msvd(M);
    if (msvd.singularValues().minCoeff() < 1e-12)
        throw GeometryError("grassmann_geodesic: x'y is singular (a principal angle is pi/2)");
    const Mat A = (y - x * M) * M.inverse();
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec theta = svd.singularValues().array().atan();
    const Vec c = (s * theta).array().cos();
    const Vec sn = (s * theta).array().sin();
    const Mat U = x * svd.matrixV() * c.asDiagonal() + svd.matrixU() * sn.asDiagonal();
    return orthonormalise(U);
}

Mat project(const Mat& basis, const Mat& coords)
{
    if (coords.cols() != basis.rows())
        throw DimensionError(fmt::format("project: coordinates have {} columns, basis has {} rows",
                                         coords.cols(), basis.rows()));
    return coords * basis;
}

io::CsvTable shadow_data(const Mat& basis, const Mat& coords, const Vec& responses)
{
    if (responses.size() != coords.rows())
        throw DimensionError("shadow_data: responses do not match the coordinate rows");
    const Mat g = project(basis, coords);
    io::CsvTable t;
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        t.header.push_back(fmt::format("gamma{}", j + 1));
    t.header.push_back("f");
    for (Eigen::Index n = 0; n < g.rows(); ++n) {
        std::vector<double> row;
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            row.push_back(g(n, j));
        row.push_back(responses(n));
        t.add_row(std::move(row));
    }
    return t;
}

Mat orthogonal_complement(const Mat& basis)
{
    const Eigen::Index D = basis.rows(), r = basis.cols();
    Eigen::HouseholderQR<Mat> qr(basis);
    const Mat Q = qr.householderQ();
    return Q.rightCols(D - r);
}

namespace {

struct MixPoint {
    double r2_w = 0.0, r2_l = 0.0;
    surrogate::QuadraticSurrogate sw, sl;
    Mat basis;
    double score() const { return std::min(r2_w, r2_l); }
};

MixPoint evaluate_mix(const Mat& bw, const Mat& bl, double s, const Mat& coords, const Vec& fw,
                      const Vec& fl)
{
    MixPoint m;
    m.basis = grassmann_geodesic(bw, bl, s);
    const Mat g = project(m.basis, coords);
    m.sw = surrogate::fit_psd_quadratic(g, fw);
    m.sl = surrogate::fit_psd_quadratic(g, fl);
    m.r2_w = surrogate::r_squared(m.sw, g, fw);
    m.r2_l = surrogate::r_squared(m.sl, g, fl);
    return m;
}

} // namespace

MixedSubspace mix_subspaces(const Mat& basis_w, const Mat& basis_l, const Mat& coords,
                            const Vec& responses_w, const Vec& responses_l, const MixOptions& opts)
{
    if (opts.grid < 2)
        throw DomainError("mix_subspaces: grid needs at least two points");
    if (responses_w.size() != coords.rows() || responses_l.size() != coords.rows())
        throw DimensionError("mix_subspaces: responses do not match the coordinate rows");

    const int G = opts.grid;
    std::vector<MixPoint> pts(G);
    parallel_for(static_cast<std::size_t>(G), opts.threads, [&](std::size_t k) {
        const double s = static_cast<double>(k) / (G - 1);
        pts[k] = evaluate_mix(basis_w, basis_l, s, coords, responses_w, responses_l);
    });

    MixedSubspace out;
    out.s_grid.resize(G);
    out.grid_r2_w.resize(G);
    out.grid_r2_l.resize(G);
    int best = 0;
    double lo = pts[0].score(), hi = pts[0].score();
    for (int k = 0; k < G; ++k) {
        out.s_grid(k) = static_cast<double>(k) / (G - 1);
        out.grid_r2_w(k) = pts[k].r2_w;
        out.grid_r2_l(k) = pts[k].r2_l;
        lo = std::min(lo, pts[k].score());
        hi = std::max(hi, pts[k].score());
        if (pts[k].score() > pts[best].score())
            best = k;
    }

    MixPoint chosen;
    double s_star = 0.0;
    if (hi - lo <= opts.flat_tol) {
        chosen = std::move(pts[0]);
    } else {
        chosen = pts[best];
        s_star = out.s_grid(best);
        // golden section on the cells either side of the best grid point
        double a = out.s_grid(std::max(0, best - 1));
        double b = out.s_grid(std::min(G - 1, best + 1));
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        MixPoint m1 = evaluate_mix(basis_w, basis_l, x1, coords, responses_w, responses_l);
        MixPoint m2 = evaluate_mix(basis_w, basis_l, x2, coords, responses_w, responses_l);
        for (int it = 0; it < opts.refine_iter; ++it) {
            if (m1.score() >= m2.score()) {
                b = x2;
                x2 = x1;
                m2 = std::move(m1);
                x1 = b - phi * (b - a);
                m1 = evaluate_mix(basis_w, basis_l, x1, coords, responses_w, responses_l);
            } else {
                a = x1;
                x1 = x2;
                m1 = std::move(m2);
                x2 = a + phi * (b - a);
                m2 = evaluate_mix(basis_w, basis_l, x2, coords, responses_w, responses_l);
            }
        }
        const bool first = m1.score() >= m2.score();
        MixPoint& cand = first ? m1 : m2;
        if (cand.score() > chosen.score()) {
            s_star = first ? x1 : x2;
            chosen = std::move(cand);
        }
    }

    out.basis = chosen.basis;
    out.s_star = s_star;
    out.r2_w = chosen.r2_w;
    out.r2_l = chosen.r2_l;
    out.sur_w = std::move(chosen.sw);
    out.sur_l = std::move(chosen.sl);
    return out;
}

nlohmann::json matrix_to_json(const Mat& m)
{
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            rows[i][j] = m(i, j);
    return rows;
}

Mat matrix_from_json(const nlohmann::json& j)
{
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty())
        return Mat();
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw ConfigError("matrix JSON: ragged rows");
        for (std::size_t k = 0; k < rows[i].size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    return m;
}

} // namespace pareto::subspace
