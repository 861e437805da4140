#pragma once

// Convex quadratic surrogates fitted under a positive semi-definite constraint.
//
// A surrogate models the negated throughput: -f(x) ~ c + a'x + x'Qx with Q PSD,
// so larger throughput corresponds to a smaller quadratic.

#include "pareto/common.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace pareto::surrogate {

struct FitDiagnostics {
    double objective = 0.0; // 0.5 * sum of squared residuals, original units
    int iterations = 0;     // projected-gradient iterations (0 if least squares was feasible)
    bool converged = true;
    bool projected = false; // unconstrained least squares violated Q >= 0
    double min_eigenvalue = 0.0;
};

struct QuadraticSurrogate {
    Mat Q;
    Vec a;
    double c = 0.0;
    FitDiagnostics diagnostics;

    Eigen::Index dim() const { return a.size(); }

    // Throughput prediction -(c + a'x + x'Qx).
    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    Mat hessian() const { return -2.0 * Q; }
};

struct FitOptions {
    int max_iter = 50000;
    // stop once the projected-gradient step is below rel_tol * |F'y| in
    // normalised coordinates
    double rel_tol = 1e-10;
};

// Minimises 0.5 * sum (c + x_n'a + x_n'Q x_n + response_n)^2 over Q PSD.
// Throws DimensionError when N < (r + 1)(r + 2) / 2.
QuadraticSurrogate fit_psd_quadratic(const Mat& coords, const Vec& responses,
                                     const FitOptions& opts = {});

// Coefficient of determination of the surrogate's throughput predictions.
double r_squared(const QuadraticSurrogate& s, const Mat& coords, const Vec& responses);

struct EvalGradHess {
    double value;
    Vec gradient;
    Mat hessian;
};

EvalGradHess surrogate_eval_grad_hess(const QuadraticSurrogate& s, const Vec& x);

// Ordinary least-squares R^2 of a total-degree polynomial; diagnostic only.
double polynomial_r_squared(const Mat& coords, const Vec& responses, int degree);

// Surrogate expressed in full coordinates x with gamma = U'x.
QuadraticSurrogate lift(const QuadraticSurrogate& s, const Mat& basis);

nlohmann::json to_json(const QuadraticSurrogate& s);
QuadraticSurrogate surrogate_from_json(const nlohmann::json& j);

} // namespace pareto::surrogate
