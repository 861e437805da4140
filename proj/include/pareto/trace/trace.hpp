#pragma once

// Pareto traces of convex quadratic surrogate pairs, maximisation of the true
// model, and the geodesic / linear / conditional fronts.

#include "pareto/common.hpp"
#include "pareto/io/csv.hpp"
#include "pareto/sampling/sampling.hpp"
#include "pareto/subspace/zonotope.hpp"
#include "pareto/surrogate/quadratic.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pareto::trace {

Vec linspace(double a, double b, int n);

struct TraceCurve {
    Vec t;
    std::vector<Vec> points;
    std::vector<bool> feasible;
    std::vector<bool> regularised; // Hessian combination needed the eigenvalue floor
    std::vector<bool> projected;   // replaced by the constrained maximiser
};

using Feasibility = std::function<bool(const Vec&)>;

// theta(t) = 1/2 [t Q_L + (1 - t) Q_W]^-1 [(t - 1) a_W - t a_L].
TraceCurve quadratic_trace(const surrogate::QuadraticSurrogate& sw,
                           const surrogate::QuadraticSurrogate& sl, const Vec& t_grid,
                           const Feasibility& feasible = {});

// Maximiser of (1 - t) h_W + t h_L over the zonotope; equals the quadratic
// trace wherever that point is feasible and otherwise sits on the boundary.
TraceCurve constrained_trace(const surrogate::QuadraticSurrogate& sw,
                             const surrogate::QuadraticSurrogate& sl,
                             const subspace::Zonotope2D& zonotope, const Vec& t_grid);

// RK4 on Hess(phi_t) theta' = grad h_W - grad h_L. Starts from the quadratic
// trace at t_grid(0) unless theta0 is given. Throws OptimizationError naming t
// when the Hessian combination becomes singular.
TraceCurve ode_trace(const surrogate::QuadraticSurrogate& sw, const surrogate::QuadraticSurrogate& sl,
                     const Vec& t_grid, double h = 1e-3, const std::optional<Vec>& theta0 = {});

// lambda_max / lambda_min of t Q_L + (1 - t) Q_W; infinity when lambda_min < 1e-14.
Vec condition_profile(const surrogate::QuadraticSurrogate& sw, const surrogate::QuadraticSurrogate& sl,
                      const Vec& t_grid);

// Nelder-Mead -----------------------------------------------------------------

struct NelderMeadOptions {
    int max_evals = 4000;
    double ftol = 1e-12;
    double xtol = 1e-10;
    bool box = true; // keep trial points in [-1, 1]^n by reflecting then clipping
};

struct NelderMeadResult {
    Vec x;
    double value = 0.0; // minimised value
    int evaluations = 0;
};

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, std::vector<Vec> simplex,
                             const NelderMeadOptions& opts = {});

std::vector<Vec> default_simplex(const Vec& x0, double step, bool box = true);

struct MaximizeOptions {
    int multistart = 20;
    std::uint64_t seed = 0;
    NelderMeadOptions nm;
    unsigned threads = 1;
};

struct MaximizeResult {
    Vec x;
    double value = 0.0;
    Throughputs f{};
    int evaluations = 0;
    int failed_starts = 0;
};

// Box-constrained maximiser of (1 - t) f_W + t f_L over [-1, 1]^D. When
// `supplied` rows are given, the best of them (by the same objective) is used
// as one of the starts.
MaximizeResult maximize_throughput(const sampling::UnitModel& model, Eigen::Index dim, double t,
                                   const MaximizeOptions& opts = {}, const Mat* supplied = nullptr);

struct InactiveEndpoints {
    Vec zeta0;
    Vec zeta1;
    Throughputs f0{};
    Throughputs f1{};
};

// zeta0 maximises f_W over Z_gamma0, zeta1 maximises f_L over Z_gamma1.
InactiveEndpoints inactive_endpoints(const sampling::UnitModel& model,
                                     const subspace::InactiveSampler& sampler,
                                     const geometry::Point& gamma0, const geometry::Point& gamma1,
                                     const MaximizeOptions& opts = {});

// Fronts ----------------------------------------------------------------------

enum class FrontKind { Geodesic, Linear, Conditional };
std::string to_string(FrontKind k);

struct FrontCurve {
    FrontKind kind = FrontKind::Geodesic;
    Vec t;
    Vec f_w;
    Vec f_l;
    // conditional fronts only
    Vec min_w, max_w, min_l, max_l;
    std::vector<Vec> points;   // unit coordinates evaluated (geodesic / linear)
    std::vector<bool> clipped; // lift left the cube and was projected back
};

FrontCurve geodesic_front(const sampling::UnitModel& model, const subspace::InactiveSampler& sampler,
                          const TraceCurve& active_trace, const Vec& zeta0, const Vec& zeta1,
                          unsigned threads = 1);

FrontCurve linear_front(const sampling::UnitModel& model, const Vec& x0, const Vec& x1, int n_t,
                        unsigned threads = 1);

FrontCurve conditional_front(const sampling::UnitModel& model, const subspace::InactiveSampler& sampler,
                             const TraceCurve& active_trace, int n_inactive, std::uint64_t seed,
                             unsigned threads = 1);

io::CsvTable front_to_csv(const FrontCurve& f);
io::CsvTable trace_to_csv(const TraceCurve& t, const TraceCurve* ode = nullptr);

// Indices (ascending) of the points not dominated under componentwise >=.
// Exact duplicates keep the first occurrence; NaN rows are never returned.
std::vector<std::size_t> nondominated(const std::vector<Throughputs>& pts);

} // namespace pareto::trace
