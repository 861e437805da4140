#include "pareto/surrogate/quadratic.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

namespace pareto::surrogate {

double QuadraticSurrogate::value(const Vec& x) const
{
    if (x.size() != dim())
        throw DimensionError(fmt::format("surrogate of dimension {} evaluated at a point of dimension {}",
                                         dim(), x.size()));
    return -(c + a.dot(x) + x.dot(Q * x));
}

Vec QuadraticSurrogate::gradient(const Vec& x) const
{
    if (x.size() != dim())
        throw DimensionError(fmt::format("surrogate of dimension {} evaluated at a point of dimension {}",
                                         dim(), x.size()));
    return -(a + 2.0 * Q * x);
}

EvalGradHess surrogate_eval_grad_hess(const QuadraticSurrogate& s, const Vec& x)
{
    return {s.value(x), s.gradient(x), s.hessian()};
}

namespace {

struct Normalisation {
    Vec mean;
    Vec scale;
    double y_mean = 0.0;
    double y_scale = 1.0;
};

Normalisation normalise(const Mat& X, const Vec& y)
{
    Normalisation n;
    const double N = static_cast<double>(X.rows());
    n.mean = X.colwise().mean().transpose();
    n.scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double rms = std::sqrt((X.col(j).array() - n.mean(j)).square().sum() / N);
        n.scale(j) = rms > 0.0 ? rms : 1.0;
    }
    n.y_mean = y.mean();
    const double sd = std::sqrt((y.array() - n.y_mean).square().sum() / N);
    n.y_scale = sd > 0.0 ? sd : 1.0;
    return n;
}

// Rows [1, z, vec(z z')] with the full (redundant) matrix parametrisation.
Mat full_features(const Mat& Z)
{
    const Eigen::Index r = Z.cols();
    Mat F(Z.rows(), 1 + r + r * r);
    for (Eigen::Index n = 0; n < Z.rows(); ++n) {
        F(n, 0) = 1.0;
        for (Eigen::Index i = 0; i < r; ++i)
            F(n, 1 + i) = Z(n, i);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < r; ++j)
                F(n, 1 + r + i * r + j) = Z(n, i) * Z(n, j);
    }
    return F;
}

// Rows [1, z, z_i z_j (i <= j)]: a basis of the quadratic monomials.
Mat vech_features(const Mat& Z)
{
    const Eigen::Index r = Z.cols();
    Mat F(Z.rows(), 1 + r + r * (r + 1) / 2);
    for (Eigen::Index n = 0; n < Z.rows(); ++n) {
        Eigen::Index k = 0;
        F(n, k++) = 1.0;
        for (Eigen::Index i = 0; i < r; ++i)
            F(n, k++) = Z(n, i);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = i; j < r; ++j)
                F(n, k++) = Z(n, i) * Z(n, j);
    }
    return F;
}

struct Coeffs {
    double c = 0.0;
    Vec a;
    Mat Q;
};

Vec pack(const Coeffs& k)
{
    const Eigen::Index r = k.a.size();
    Vec x(1 + r + r * r);
    x(0) = k.c;
    x.segment(1, r) = k.a;
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            x(1 + r + i * r + j) = k.Q(i, j);
    return x;
}

Coeffs unpack(const Vec& x, Eigen::Index r)
{
    Coeffs k;
    k.c = x(0);
    k.a = x.segment(1, r);
    k.Q.resize(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            k.Q(i, j) = x(1 + r + i * r + j);
    return k;
}

Mat project_psd(const Mat& Q, double* min_eig = nullptr)
{
    const Mat S = 0.5 * (Q + Q.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    if (min_eig)
        *min_eig = es.eigenvalues().minCoeff();
    if (es.eigenvalues().minCoeff() >= 0.0)
        return S;
    const Vec lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

void project_in_place(Vec& x, Eigen::Index r)
{
    Coeffs k = unpack(x, r);
    k.Q = project_psd(k.Q);
    x = pack(k);
}

} // namespace

QuadraticSurrogate fit_psd_quadratic(const Mat& coords, const Vec& responses, const FitOptions& opts)
{
    const Eigen::Index N = coords.rows();
    const Eigen::Index r = coords.cols();
    if (responses.size() != N)
        throw DimensionError(fmt::format("fit: {} coordinate rows but {} responses", N, responses.size()));
    if (r < 1)
        throw DimensionError("fit: coordinates have no columns");
    const Eigen::Index need = (r + 1) * (r + 2) / 2;
    if (N < need)
        throw DimensionError(
            fmt::format("fit: {} rows is fewer than the {} quadratic monomials in dimension {}", N, need, r));
    if (!coords.allFinite() || !responses.allFinite())
        throw DomainError("fit: non-finite input");

    // model target g = -response ~ c + a'x + x'Qx
    const Vec g = -responses;
    const Normalisation nz = normalise(coords, g);
    Mat Z = coords;
    for (Eigen::Index j = 0; j < r; ++j)
        Z.col(j) = (Z.col(j).array() - nz.mean(j)) / nz.scale(j);
    const Vec y = (g.array() - nz.y_mean) / nz.y_scale;

    FitDiagnostics diag;

    const Mat Fv = vech_features(Z);
    const Vec beta = Fv.colPivHouseholderQr().solve(y);
    Coeffs k;
    k.c = beta(0);
    k.a = beta.segment(1, r);
    k.Q.resize(r, r);
    {
        Eigen::Index idx = 1 + r;
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = i; j < r; ++j) {
                const double v = beta(idx++);
                if (i == j) {
                    k.Q(i, i) = v;
                } else {
                    k.Q(i, j) = 0.5 * v;
                    k.Q(j, i) = 0.5 * v;
                }
            }
    }

    double lmin = 0.0;
    project_psd(k.Q, &lmin);
    if (lmin < 0.0) {
        diag.projected = true;
        const Mat F = full_features(Z);
        const Mat G = F.transpose() * F;
        const Vec b = F.transpose() * y;
        const double yy = y.squaredNorm();
        const double L = Eigen::SelfAdjointEigenSolver<Mat>(G, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        const double step = 1.0 / L;
        auto objective = [&](const Vec& x) { return 0.5 * x.dot(G * x) - b.dot(x) + 0.5 * yy; };

        Vec x = pack(k);
        project_in_place(x, r);
        double fx = objective(x);
        const double gscale = std::max(b.norm(), 1.0);
        Vec yk = x;
        double tk = 1.0;
        bool converged = false;
        int it = 0;
        for (; it < opts.max_iter; ++it) {
            Vec xn = yk - step * (G * yk - b);
            project_in_place(xn, r);
            double fn = objective(xn);
            bool restarted = false;
            if (fn > fx) {
                // momentum overshot: plain projected step from the current iterate
                restarted = true;
                tk = 1.0;
                xn = x - step * (G * x - b);
                project_in_place(xn, r);
                fn = objective(xn);
                if (fn > fx) {
                    converged = true;
                    break;
                }
            }
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            yk = xn + ((tk - 1.0) / tn) * (xn - x);
            tk = restarted ? 1.0 : tn;
            x = std::move(xn);
            fx = fn;
            // stationarity: length of the projected-gradient step from x
            Vec px = x - step * (G * x - b);
            project_in_place(px, r);
            if ((px - x).norm() <= opts.rel_tol * step * gscale) {
                converged = true;
                ++it;
                break;
            }
        }
        diag.iterations = it;
        diag.converged = converged;
        k = unpack(x, r);
        k.Q = project_psd(k.Q);
        if (!converged)
            std::cerr << fmt::format("warning: PSD fit stopped after {} iterations, objective {}\n", it,
                                     fx * nz.y_scale * nz.y_scale);
    }

    // map back: g = y_mean + y_scale * (c' + a'z + z'Qz), z = S^-1 (x - m)
    const Vec sinv = nz.scale.cwiseInverse();
    const Mat Qs = sinv.asDiagonal() * k.Q * sinv.asDiagonal();
    const Vec as = sinv.cwiseProduct(k.a);
    QuadraticSurrogate s;
    s.Q = nz.y_scale * Qs;
    s.Q = 0.5 * (s.Q + s.Q.transpose());
    s.a = nz.y_scale * (as - 2.0 * Qs * nz.mean);
    s.c = nz.y_mean + nz.y_scale * (k.c - as.dot(nz.mean) + nz.mean.dot(Qs * nz.mean));

    double res = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) {
        const Vec xn = coords.row(n).transpose();
        const double e = s.c + s.a.dot(xn) + xn.dot(s.Q * xn) - g(n);
        res += e * e;
    }
    diag.objective = 0.5 * res;
    diag.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Mat>(s.Q, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    s.diagnostics = diag;
    return s;
}

double r_squared(const QuadraticSurrogate& s, const Mat& coords, const Vec& responses)
{
    const Eigen::Index N = coords.rows();
    if (responses.size() != N)
        throw DimensionError("r_squared: row count mismatch");
    if (N < 2)
        throw DomainError("r_squared needs at least two samples");
    const double mean = responses.mean();
    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) {
        const double pred = s.value(coords.row(n).transpose());
        ss_res += (responses(n) - pred) * (responses(n) - pred);
        ss_tot += (responses(n) - mean) * (responses(n) - mean);
    }
    if (!(ss_tot > 0.0))
        throw DomainError("r_squared: responses have zero variance");
    return 1.0 - ss_res / ss_tot;
}

namespace {

void exponents(int r, int degree, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    const int used = static_cast<int>(cur.size());
    if (used == r) {
        out.push_back(cur);
        return;
    }
    int total = 0;
    for (int e : cur)
        total += e;
    for (int e = 0; e + total <= degree; ++e) {
        cur.push_back(e);
        exponents(r, degree, cur, out);
        cur.pop_back();
    }
}

} // namespace

double polynomial_r_squared(const Mat& coords, const Vec& responses, int degree)
{
    if (degree < 0)
        throw DomainError("polynomial degree must be nonnegative");
    const int r = static_cast<int>(coords.cols());
    std::vector<std::vector<int>> terms;
    std::vector<int> cur;
    exponents(r, degree, cur, terms);
    const Eigen::Index N = coords.rows();
    if (N < static_cast<Eigen::Index>(terms.size()))
        throw DimensionError(fmt::format("degree-{} fit needs {} rows, have {}", degree, terms.size(), N));
    const Normalisation nz = normalise(coords, responses);
    Mat F(N, static_cast<Eigen::Index>(terms.size()));
    for (Eigen::Index n = 0; n < N; ++n)
        for (std::size_t k = 0; k < terms.size(); ++k) {
            double v = 1.0;
            for (int i = 0; i < r; ++i)
                v *= std::pow((coords(n, i) - nz.mean(i)) / nz.scale(i), terms[k][i]);
            F(n, static_cast<Eigen::Index>(k)) = v;
        }
    const Vec y = (responses.array() - nz.y_mean) / nz.y_scale;
    const Vec beta = F.colPivHouseholderQr().solve(y);
    const double ss_res = (F * beta - y).squaredNorm();
    const double ss_tot = y.squaredNorm();
    if (!(ss_tot > 0.0))
        throw DomainError("polynomial_r_squared: responses have zero variance");
    return 1.0 - ss_res / ss_tot;
}

QuadraticSurrogate lift(const QuadraticSurrogate& s, const Mat& basis)
{
    if (basis.cols() != s.dim())
        throw DimensionError("lift: basis columns do not match surrogate dimension");
    QuadraticSurrogate out;
    out.Q = basis * s.Q * basis.transpose();
    out.Q = 0.5 * (out.Q + out.Q.transpose());
    out.a = basis * s.a;
    out.c = s.c;
    out.diagnostics = s.diagnostics;
    return out;
}

nlohmann::json to_json(const QuadraticSurrogate& s)
{
    nlohmann::json j;
    j["dim"] = s.dim();
    j["sign_convention"] = "models -f: f(x) = -(c + a'x + x'Qx)";
    std::vector<std::vector<double>> Q(s.dim(), std::vector<double>(s.dim()));
    for (Eigen::Index i = 0; i < s.dim(); ++i)
        for (Eigen::Index k = 0; k < s.dim(); ++k)
            Q[i][k] = s.Q(i, k);
    j["Q"] = Q;
    j["a"] = std::vector<double>(s.a.data(), s.a.data() + s.a.size());
    j["c"] = s.c;
    j["diagnostics"] = {{"objective", s.diagnostics.objective},
                        {"iterations", s.diagnostics.iterations},
                        {"converged", s.diagnostics.converged},
                        {"projected", s.diagnostics.projected},
                        {"min_eigenvalue", s.diagnostics.min_eigenvalue}};
    return j;
}

QuadraticSurrogate surrogate_from_json(const nlohmann::json& j)
{
    QuadraticSurrogate s;
    const auto a = j.at("a").get<std::vector<double>>();
    const auto Q = j.at("Q").get<std::vector<std::vector<double>>>();
    const auto r = static_cast<Eigen::Index>(a.size());
    if (static_cast<Eigen::Index>(Q.size()) != r)
        throw ConfigError("surrogate JSON: Q and a sizes differ");
    s.a = Eigen::Map<const Vec>(a.data(), r);
    s.Q.resize(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(Q[i].size()) != r)
            throw ConfigError("surrogate JSON: Q is not square");
        for (Eigen::Index k = 0; k < r; ++k)
            s.Q(i, k) = Q[i][k];
    }
    s.c = j.at("c").get<double>();
    if (j.contains("diagnostics")) {
        const auto& d = j["diagnostics"];
        s.diagnostics.objective = d.value("objective", 0.0);
        s.diagnostics.iterations = d.value("iterations", 0);
        s.diagnostics.converged = d.value("converged", true);
        s.diagnostics.projected = d.value("projected", false);
        s.diagnostics.min_eigenvalue = d.value("min_eigenvalue", 0.0);
    }
    return s;
}

} // namespace pareto::surrogate
