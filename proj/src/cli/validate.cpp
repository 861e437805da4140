#include "pareto/cli/validate.hpp"

#include "pareto/random.hpp"
#include "pareto/subspace/active.hpp"
#include "pareto/subspace/zonotope.hpp"
#include "pareto/surrogate/quadratic.hpp"
#include "pareto/trace/trace.hpp"

#include <fmt/format.h>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace pareto::cli {

bool ValidationReport::ok() const
{
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::table() const
{
    std::size_t w = 5;
    for (const auto& c : checks)
        w = std::max(w, c.name.size());
    std::string out = fmt::format("{:<{}}  {:<6}  {}\n", "check", w, "result", "detail");
    for (const auto& c : checks)
        out += fmt::format("{:<{}}  {:<6}  {}\n", c.name, w, c.passed ? "PASS" : "FAIL", c.detail);
    out += fmt::format("solver: {} solves, {} fallback activations, {} failures\n", solves, fallback_activations,
                       solver_failures);
    return out;
}

namespace {

Mat random_orthonormal(Stream& rng, Eigen::Index D, Eigen::Index r)
{
    Mat A(D, r);
    for (Eigen::Index i = 0; i < D; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            A(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(A);
    return qr.householderQ() * Mat::Identity(D, r);
}

surrogate::QuadraticSurrogate random_convex(Stream& rng, Eigen::Index r)
{
    Mat B(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            B(i, j) = rng.normal();
    surrogate::QuadraticSurrogate s;
    s.Q = B * B.transpose() + 0.5 * Mat::Identity(r, r);
    s.a = Vec(r);
    for (Eigen::Index i = 0; i < r; ++i)
        s.a(i) = rng.normal();
    s.c = rng.normal();
    return s;
}

template <typename Fn>
void run_check(ValidationReport& rep, const std::string& name, Fn&& fn)
{
    CheckResult c;
    c.name = name;
    try {
        fn(c);
    } catch (const std::exception& e) {
        c.passed = false;
        c.detail = e.what();
    }
    rep.checks.push_back(std::move(c));
}

} // namespace

ValidationReport run_validation(const RunConfig& config, std::size_t n)
{
    ValidationReport rep;
    CheckResult cfg{"config", true, "ok"};
    try {
        validate(config);
    } catch (const std::exception& e) {
        cfg.passed = false;
        cfg.detail = e.what();
    }
    rep.checks.push_back(cfg);
    if (!cfg.passed)
        return rep;

    const std::uint64_t seed = config.sampling.seed;
    const auto samples = sampling::sample_uniform(config.domain, n, seed ^ stream_tag::validate);

    run_check(rep, "slot_normalization", [&](CheckResult& c) {
        double worst = 0.0, worst_res = 0.0;
        bool range_ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec raw = samples.thetas_raw.row(static_cast<Eigen::Index>(i)).transpose();
            const auto theta = coex::ParameterVector::from(std::span<const double>(raw.data(), raw.size()));
            ++rep.solves;
            try {
                const auto r = coex::evaluate(theta, config.scenario, config.solver);
                if (r.state.used_fallback)
                    ++rep.fallback_activations;
                double sum = 0.0;
                for (double p : r.slots) {
                    sum += p;
                    range_ok = range_ok && p >= 0.0 && p <= 1.0;
                }
                worst = std::max(worst, std::abs(sum - 1.0));
                const auto mac = coex::MacParameters::from_theta(theta, config.scenario.W, config.scenario.L);
                worst_res = std::max(worst_res, coex::fixed_point_residual(mac, r.state));
            } catch (const SolverError&) {
                ++rep.solver_failures;
            }
        }
        c.passed = worst < 1e-10 && range_ok && worst_res <= config.solver.tol && rep.solver_failures * 100 <= n;
        c.detail = fmt::format("max |sum p_T - 1| = {:.3g}, max residual = {:.3g}, failures {}/{}", worst, worst_res,
                               rep.solver_failures, n);
    });

    run_check(rep, "bianchi_continuity", [&](CheckResult& c) {
        double worst = 0.0;
        for (double omega = 8.0; omega <= 1024.0; omega *= 2.0)
            for (int mu = 0; mu <= 8; ++mu) {
                const double p = coex::bianchi_probability(0.5, omega, mu);
                worst = std::max({worst, std::abs(p - coex::bianchi_probability(0.5 - 1e-8, omega, mu)),
                                  std::abs(p - coex::bianchi_probability(0.5 + 1e-8, omega, mu))});
            }
        c.passed = worst < 1e-6;
        c.detail = fmt::format("max jump at c = 1/2: {:.3g}", worst);
    });

    Stream rng = Stream::derive(seed, stream_tag::validate, 1);

    run_check(rep, "psd_fit", [&](CheckResult& c) {
        const Mat U = random_orthonormal(rng, static_cast<Eigen::Index>(config.domain.dim()), 2);
        const Mat g = subspace::project(U, samples.thetas_unit);
        const auto truth = random_convex(rng, 2);
        Vec y(g.rows()), yc(g.rows());
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const Vec x = g.row(i).transpose();
            y(i) = truth.value(x);
            yc(i) = -y(i) + 2.0 * truth.c;
        }
        const auto fit = surrogate::fit_psd_quadratic(g, y);
        const double err = std::max({(fit.Q - truth.Q).cwiseAbs().maxCoeff(), (fit.a - truth.a).cwiseAbs().maxCoeff(),
                                     std::abs(fit.c - truth.c)});
        const auto concave = surrogate::fit_psd_quadratic(g, yc);
        c.passed = err < 1e-6 && concave.diagnostics.min_eigenvalue >= -1e-8;
        c.detail = fmt::format("recovery error {:.3g}, concave-data min eig {:.3g}", err,
                               concave.diagnostics.min_eigenvalue);
    });

    run_check(rep, "geodesic_orthonormality", [&](CheckResult& c) {
        const auto D = static_cast<Eigen::Index>(config.domain.dim());
        const Mat X = random_orthonormal(rng, D, 2), Y = random_orthonormal(rng, D, 2);
        double worst = 0.0, lin = 0.0;
        const double d1 = subspace::subspace_distance(X, Y);
        for (int k = 0; k <= 100; ++k) {
            const double s = k / 100.0;
            const Mat G = subspace::grassmann_geodesic(X, Y, s);
            worst = std::max(worst, (G.transpose() * G - Mat::Identity(2, 2)).cwiseAbs().maxCoeff());
            lin = std::max(lin, std::abs(subspace::subspace_distance(X, G) - s * d1));
        }
        c.passed = worst < 1e-9 && lin < 1e-8;
        c.detail = fmt::format("max |U'U - I| = {:.3g}, distance linearity error {:.3g}", worst, lin);
    });

    run_check(rep, "zonotope_containment", [&](CheckResult& c) {
        const auto D = static_cast<Eigen::Index>(config.domain.dim());
        const Mat U = random_orthonormal(rng, D, 2);
        const auto z = subspace::zonotope_vertices(U);
        const int bits = static_cast<int>(std::min<Eigen::Index>(D, 13));
        std::size_t outside = 0;
        for (long mask = 0; mask < (1L << bits); ++mask) {
            Vec x = Vec::Ones(D);
            for (int b = 0; b < bits; ++b)
                if (mask & (1L << b))
                    x(b) = -1.0;
            const Vec g = U.transpose() * x;
            if (!z.contains({g(0), g(1)}, 1e-9))
                ++outside;
        }
        c.passed = outside == 0;
        c.detail = fmt::format("{} of {} corner projections outside", outside, 1L << bits);
    });

    run_check(rep, "trace_stationarity", [&](CheckResult& c) {
        const auto sw = random_convex(rng, 2), sl = random_convex(rng, 2);
        const Vec t = trace::linspace(0.0, 1.0, 100);
        const auto tc = trace::quadratic_trace(sw, sl, t);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const Vec g = (1.0 - t(i)) * sw.gradient(tc.points[i]) + t(i) * sl.gradient(tc.points[i]);
            worst = std::max(worst, g.cwiseAbs().maxCoeff());
        }
        const auto ode = trace::ode_trace(sw, sl, t, config.trace.rk4_step);
        double gap = 0.0;
        for (Eigen::Index i = 0; i < t.size(); ++i)
            gap = std::max(gap, (ode.points[i] - tc.points[i]).cwiseAbs().maxCoeff());
        c.passed = worst < 1e-8 && gap < 1e-6;
        c.detail = fmt::format("max |grad phi_t| = {:.3g}, RK4 vs closed form {:.3g}", worst, gap);
    });

    run_check(rep, "nondominated_oracle", [&](CheckResult& c) {
        std::vector<Throughputs> pts(500);
        for (auto& p : pts)
            p = {std::floor(rng.uniform() * 50.0), std::floor(rng.uniform() * 50.0)};
        const auto got = trace::nondominated(pts);
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            bool keep = true;
            for (std::size_t j = 0; j < pts.size() && keep; ++j) {
                const bool ge = pts[j].wifi >= pts[i].wifi && pts[j].laa >= pts[i].laa;
                const bool gt = pts[j].wifi > pts[i].wifi || pts[j].laa > pts[i].laa;
                if (ge && (gt || j < i))
                    keep = false;
            }
            if (keep)
                want.push_back(i);
        }
        c.passed = got == want;
        c.detail = fmt::format("{} maximal points", got.size());
    });

    return rep;
}

} // namespace pareto::cli
