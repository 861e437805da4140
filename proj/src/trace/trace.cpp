#include "pareto/trace/trace.hpp"

#include "pareto/parallel.hpp"
#include "pareto/random.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace pareto::trace {

using surrogate::QuadraticSurrogate;

Vec linspace(double a, double b, int n)
{
    if (n < 1)
        throw DomainError("linspace needs n >= 1");
    Vec v(n);
    for (int i = 0; i < n; ++i)
        v(i) = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
    return v;
}

namespace {

void check_pair(const QuadraticSurrogate& sw, const QuadraticSurrogate& sl)
{
    if (sw.dim() != sl.dim())
        throw DimensionError(fmt::format("surrogates differ in dimension ({} vs {})", sw.dim(), sl.dim()));
}

void check_grid(const Vec& t)
{
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (!(t(i) >= 0.0 && t(i) <= 1.0))
            throw DomainError(fmt::format("trace grid value {} outside [0, 1]", t(i)));
        if (i > 0 && !(t(i) > t(i - 1)))
            throw DomainError("trace grid must be strictly increasing");
    }
}

struct Stationary {
    Vec x;
    bool regularised = false;
};

// Minimiser of x'Hx + b'x, with the eigenvalue floor for near-singular H.
Stationary solve_stationary(const Mat& H, const Vec& b)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
    Vec lam = es.eigenvalues();
    Stationary s;
    const double lmax = std::max(lam.maxCoeff(), 0.0);
    if (lam.minCoeff() < 1e-12) {
        s.regularised = true;
        const double floor = std::max(1e-10 * lmax, std::numeric_limits<double>::min());
        lam = lam.cwiseMax(floor);
    }
    const Mat& V = es.eigenvectors();
    s.x = -0.5 * (V * (lam.cwiseInverse().asDiagonal() * (V.transpose() * b)));
    return s;
}

} // namespace

TraceCurve quadratic_trace(const QuadraticSurrogate& sw, const QuadraticSurrogate& sl, const Vec& t_grid,
                           const Feasibility& feasible)
{
    check_pair(sw, sl);
    check_grid(t_grid);
    TraceCurve tc;
    tc.t = t_grid;
    for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid(i);
        const Mat H = t * sl.Q + (1.0 - t) * sw.Q;
        const Vec b = (1.0 - t) * sw.a + t * sl.a;
        Stationary s = solve_stationary(H, b);
        tc.feasible.push_back(s.x.allFinite() && (!feasible || feasible(s.x)));
        tc.regularised.push_back(s.regularised);
        tc.projected.push_back(false);
        tc.points.push_back(std::move(s.x));
    }
    return tc;
}

TraceCurve constrained_trace(const QuadraticSurrogate& sw, const QuadraticSurrogate& sl,
                             const subspace::Zonotope2D& zonotope, const Vec& t_grid)
{
    check_pair(sw, sl);
    if (sw.dim() != 2)
        throw DimensionError("constrained_trace works in two active coordinates");
    TraceCurve tc = quadratic_trace(sw, sl, t_grid, [&](const Vec& x) {
        return zonotope.contains(geometry::Point(x(0), x(1)), 0.0);
    });
    const auto& P = zonotope.vertices;
    for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
        if (tc.feasible[i])
            continue;
        const double t = t_grid(i);
        const Mat H = t * sl.Q + (1.0 - t) * sw.Q;
        const Vec b = (1.0 - t) * sw.a + t * sl.a;
        auto q = [&](const Vec& x) { return x.dot(H * x) + b.dot(x); };
        double best = std::numeric_limits<double>::infinity();
        Vec arg;
        for (std::size_t k = 0; k < P.size(); ++k) {
            const Vec p = P[k];
            const Vec d = P[(k + 1) % P.size()] - P[k];
            const double curv = d.dot(H * d);
            const double slope = 2.0 * d.dot(H * p) + b.dot(d);
            double s;
            if (curv > 0.0)
                s = std::clamp(-slope / (2.0 * curv), 0.0, 1.0);
            else
                s = slope < 0.0 ? 1.0 : 0.0;
            const Vec x = p + s * d;
            const double v = q(x);
            if (v < best) {
                best = v;
                arg = x;
            }
        }
        tc.points[i] = arg;
        tc.feasible[i] = true;
        tc.projected[i] = true;
    }
    return tc;
}

TraceCurve ode_trace(const QuadraticSurrogate& sw, const QuadraticSurrogate& sl, const Vec& t_grid,
                     double h, const std::optional<Vec>& theta0)
{
    check_pair(sw, sl);
    check_grid(t_grid);
    if (!(h > 0.0))
        throw DomainError("ode_trace: step must be positive");
    if (t_grid.size() == 0)
        return {};

    auto rhs = [&](double t, const Vec& x) {
        const Mat hess = (1.0 - t) * sw.hessian() + t * sl.hessian();
        Eigen::SelfAdjointEigenSolver<Mat> es(-hess);
        if (es.eigenvalues().minCoeff() < 1e-12)
            throw OptimizationError(fmt::format("ode_trace: Hessian combination singular at t = {}", t));
        const Vec g = sw.gradient(x) - sl.gradient(x);
        const Mat& V = es.eigenvectors();
        // hess = -V diag(lam) V'
        return Vec(-(V * (es.eigenvalues().cwiseInverse().asDiagonal() * (V.transpose() * g))));
    };

    TraceCurve tc;
    tc.t = t_grid;
    Vec x = theta0 ? *theta0 : quadratic_trace(sw, sl, t_grid.head(1)).points.front();
    if (x.size() != sw.dim())
        throw DimensionError("ode_trace: initial point has the wrong dimension");
    tc.points.push_back(x);
    for (Eigen::Index i = 1; i < t_grid.size(); ++i) {
        const double t0 = t_grid(i - 1);
        const double span = t_grid(i) - t0;
        const int steps = std::max(1, static_cast<int>(std::ceil(span / h - 1e-9)));
        const double dt = span / steps;
        for (int k = 0; k < steps; ++k) {
            const double t = t0 + k * dt;
            const Vec k1 = rhs(t, x);
            const Vec k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
            const Vec k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
            const Vec k4 = rhs(t + dt, x + dt * k3);
            x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        tc.points.push_back(x);
    }
    tc.feasible.assign(tc.points.size(), true);
    tc.regularised.assign(tc.points.size(), false);
    tc.projected.assign(tc.points.size(), false);
    return tc;
}

Vec condition_profile(const QuadraticSurrogate& sw, const QuadraticSurrogate& sl, const Vec& t_grid)
{
    check_pair(sw, sl);
    Vec out(t_grid.size());
    for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid(i);
        const Mat H = t * sl.Q + (1.0 - t) * sw.Q;
        const Vec lam = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly)
                            .eigenvalues();
        out(i) = lam.minCoeff() < 1e-14 ? std::numeric_limits<double>::infinity()
                                        : lam.maxCoeff() / lam.minCoeff();
    }
    return out;
}

// Nelder-Mead ----------------------------------------------------------------

namespace {

Vec into_box(Vec x)
{
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) > 1.0)
            x(i) = 2.0 - x(i);
        else if (x(i) < -1.0)
            x(i) = -2.0 - x(i);
        x(i) = std::clamp(x(i), -1.0, 1.0);
    }
    return x;
}

} // namespace

std::vector<Vec> default_simplex(const Vec& x0, double step, bool box)
{
    std::vector<Vec> s{x0};
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        Vec v = x0;
        v(i) += step;
        if (box && v(i) > 1.0)
            v(i) = x0(i) - step;
        s.push_back(v);
    }
    return s;
}

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& f, std::vector<Vec> simplex,
                             const NelderMeadOptions& opts)
{
    if (simplex.empty())
        throw DomainError("nelder_mead: empty simplex");
    const std::size_t n = static_cast<std::size_t>(simplex.front().size());
    if (simplex.size() != n + 1)
        throw DimensionError("nelder_mead: simplex needs n + 1 vertices");
    NelderMeadResult res;
    auto eval = [&](const Vec& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    auto fix = [&](Vec x) { return opts.box ? into_box(std::move(x)) : x; };

    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        simplex[i] = fix(simplex[i]);
        fv[i] = eval(simplex[i]);
    }
    std::vector<std::size_t> idx(n + 1);
    while (true) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        {
            std::vector<Vec> s2;
            std::vector<double> f2;
            for (auto i : idx) {
                s2.push_back(simplex[i]);
                f2.push_back(fv[i]);
            }
            simplex = std::move(s2);
            fv = std::move(f2);
        }
        const double fbest = fv.front(), fworst = fv.back();
        double spread = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            spread = std::max(spread, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
        const bool fconv = std::isfinite(fworst) && fworst - fbest <= opts.ftol * std::max(1.0, std::abs(fbest));
        if ((fconv && spread <= opts.xtol) || spread == 0.0 || res.evaluations >= opts.max_evals)
            break;

        Vec c = Vec::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            c += simplex[i];
        c /= static_cast<double>(n);
        const Vec& worst = simplex[n];

        const Vec xr = fix(c + (c - worst));
        const double fr = eval(xr);
        if (fr < fv[0]) {
            const Vec xe = fix(c + 2.0 * (xr - c));
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
            continue;
        }
        if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
            continue;
        }
        if (fr < fv[n]) {
            const Vec xc = fix(c + 0.5 * (xr - c));
            const double fc = eval(xc);
            if (fc <= fr) {
                simplex[n] = xc;
                fv[n] = fc;
                continue;
            }
        } else {
            const Vec xc = fix(c + 0.5 * (worst - c));
            const double fc = eval(xc);
            if (fc < fv[n]) {
                simplex[n] = xc;
                fv[n] = fc;
                continue;
            }
        }
        for (std::size_t i = 1; i <= n; ++i) {
            simplex[i] = fix(simplex[0] + 0.5 * (simplex[i] - simplex[0]));
            fv[i] = eval(simplex[i]);
        }
    }
    res.x = simplex.front();
    res.value = fv.front();
    return res;
}

MaximizeResult maximize_throughput(const sampling::UnitModel& model, Eigen::Index dim, double t,
                                   const MaximizeOptions& opts, const Mat* supplied)
{
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError(fmt::format("scalarisation weight {} outside [0, 1]", t));
    if (opts.multistart < 1)
        throw DomainError("maximize_throughput needs at least one start");
    auto objective = [&](const Vec& x) {
        try {
            return -model(x).scalarized(t);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<Vec> starts;
    if (supplied && supplied->rows() > 0) {
        if (supplied->cols() != dim)
            throw DimensionError("maximize_throughput: supplied samples have the wrong dimension");
        Eigen::Index best = -1;
        double bv = std::numeric_limits<double>::infinity();
        for (Eigen::Index n = 0; n < supplied->rows(); ++n) {
            const double v = objective(supplied->row(n).transpose());
            if (v < bv) {
                bv = v;
                best = n;
            }
        }
        if (best >= 0)
            starts.push_back(supplied->row(best).transpose());
    }
    for (int k = static_cast<int>(starts.size()); k < opts.multistart; ++k) {
        Stream rng = Stream::derive(opts.seed, stream_tag::multistart, static_cast<std::uint64_t>(k));
        Vec x(dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            x(i) = rng.uniform(-1.0, 1.0);
        starts.push_back(x);
    }

    std::vector<NelderMeadResult> runs(starts.size());
    parallel_for(starts.size(), opts.threads, [&](std::size_t k) {
        NelderMeadOptions nm = opts.nm;
        nm.box = true;
        runs[k] = nelder_mead(objective, default_simplex(starts[k], 0.25), nm);
    });

    MaximizeResult out;
    int best = -1;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        out.evaluations += runs[k].evaluations;
        if (!std::isfinite(runs[k].value)) {
            ++out.failed_starts;
            continue;
        }
        if (best < 0 || runs[k].value < runs[best].value)
            best = static_cast<int>(k);
    }
    if (best < 0)
        throw OptimizationError("maximize_throughput: every start failed");
    out.x = runs[best].x;
    out.value = -runs[best].value;
    out.f = model(out.x);
    return out;
}

InactiveEndpoints inactive_endpoints(const sampling::UnitModel& model, const subspace::InactiveSampler& sampler,
                                     const geometry::Point& gamma0, const geometry::Point& gamma1,
                                     const MaximizeOptions& opts)
{
    const auto m = static_cast<std::size_t>(sampler.complement().cols());
    auto solve = [&](const geometry::Point& gamma, NetworkId id, std::uint64_t which) {
        if (!sampler.zonotope().contains(gamma))
            throw DomainError(fmt::format("inactive_endpoints: gamma ({}, {}) outside the zonotope", gamma.x(),
                                          gamma.y()));
        auto objective = [&](const Vec& zeta) {
            if (!sampler.feasible(gamma, zeta, 1e-12))
                return std::numeric_limits<double>::infinity();
            try {
                return -model(sampler.lift(gamma, zeta).cwiseMax(-1.0).cwiseMin(1.0)).get(id);
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        std::vector<NelderMeadResult> runs(static_cast<std::size_t>(opts.multistart));
        parallel_for(runs.size(), opts.threads, [&](std::size_t k) {
            const std::uint64_t seed = Stream::derive(opts.seed, stream_tag::endpoints, 2 * k + which).next();
            std::vector<Vec> simplex = sampler.sample(gamma, m + 1, seed);
            NelderMeadOptions nm = opts.nm;
            nm.box = false;
            runs[k] = nelder_mead(objective, std::move(simplex), nm);
        });
        int best = -1;
        for (std::size_t k = 0; k < runs.size(); ++k)
            if (std::isfinite(runs[k].value) && (best < 0 || runs[k].value < runs[best].value))
                best = static_cast<int>(k);
        if (best < 0)
            throw OptimizationError("inactive_endpoints: every start failed");
        return runs[best].x;
    };
    InactiveEndpoints e;
    e.zeta0 = solve(gamma0, NetworkId::WiFi, 0);
    e.zeta1 = solve(gamma1, NetworkId::LAA, 1);
    e.f0 = model(sampler.lift(gamma0, e.zeta0).cwiseMax(-1.0).cwiseMin(1.0));
    e.f1 = model(sampler.lift(gamma1, e.zeta1).cwiseMax(-1.0).cwiseMin(1.0));
    return e;
}

// Fronts ---------------------------------------------------------------------

std::string to_string(FrontKind k)
{
    switch (k) {
    case FrontKind::Geodesic:
        return "geodesic";
    case FrontKind::Linear:
        return "linear";
    case FrontKind::Conditional:
        return "conditional";
    }
    return "unknown";
}

namespace {

FrontCurve evaluate_points(const sampling::UnitModel& model, FrontKind kind, const Vec& t,
                           std::vector<Vec> pts, unsigned threads)
{
    FrontCurve fc;
    fc.kind = kind;
    fc.t = t;
    const auto n = pts.size();
    fc.f_w.resize(static_cast<Eigen::Index>(n));
    fc.f_l.resize(static_cast<Eigen::Index>(n));
    fc.clipped.assign(n, false);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (pts[i].cwiseAbs().maxCoeff() > 1.0 + 1e-12) {
            pts[i] = pts[i].cwiseMax(-1.0).cwiseMin(1.0);
            fc.clipped[i] = true;
            ++clipped;
        } else {
            pts[i] = pts[i].cwiseMax(-1.0).cwiseMin(1.0);
        }
    if (clipped)
        std::cerr << fmt::format("warning: {} of {} {} front points left the domain and were projected onto it\n",
                                 clipped, n, to_string(kind));
    parallel_for(n, threads, [&](std::size_t i) {
        const Throughputs f = model(pts[i]);
        fc.f_w(static_cast<Eigen::Index>(i)) = f.wifi;
        fc.f_l(static_cast<Eigen::Index>(i)) = f.laa;
    });
    fc.points = std::move(pts);
    return fc;
}

geometry::Point as_point(const Vec& v)
{
    if (v.size() != 2)
        throw DimensionError("expected two active coordinates");
    return {v(0), v(1)};
}

} // namespace

FrontCurve geodesic_front(const sampling::UnitModel& model, const subspace::InactiveSampler& sampler,
                          const TraceCurve& active_trace, const Vec& zeta0, const Vec& zeta1, unsigned threads)
{
    std::vector<Vec> pts;
    for (Eigen::Index i = 0; i < active_trace.t.size(); ++i) {
        const double t = active_trace.t(i);
        const Vec zeta = t * zeta1 + (1.0 - t) * zeta0;
        pts.push_back(sampler.lift(as_point(active_trace.points[i]), zeta));
    }
    return evaluate_points(model, FrontKind::Geodesic, active_trace.t, std::move(pts), threads);
}

FrontCurve linear_front(const sampling::UnitModel& model, const Vec& x0, const Vec& x1, int n_t, unsigned threads)
{
    if (x0.size() != x1.size())
        throw DimensionError("linear_front: endpoints differ in dimension");
    const Vec t = linspace(0.0, 1.0, n_t);
    std::vector<Vec> pts;
    for (Eigen::Index i = 0; i < t.size(); ++i)
        pts.push_back((1.0 - t(i)) * x0 + t(i) * x1);
    return evaluate_points(model, FrontKind::Linear, t, std::move(pts), threads);
}

FrontCurve conditional_front(const sampling::UnitModel& model, const subspace::InactiveSampler& sampler,
                             const TraceCurve& active_trace, int n_inactive, std::uint64_t seed, unsigned threads)
{
    if (n_inactive < 1)
        throw DomainError("conditional_front needs at least one inactive sample");
    const auto n = static_cast<std::size_t>(active_trace.t.size());
    FrontCurve fc;
    fc.kind = FrontKind::Conditional;
    fc.t = active_trace.t;
    const auto N = static_cast<Eigen::Index>(n);
    fc.f_w.resize(N);
    fc.f_l.resize(N);
    fc.min_w.resize(N);
    fc.max_w.resize(N);
    fc.min_l.resize(N);
    fc.max_l.resize(N);
    parallel_for(n, threads, [&](std::size_t i) {
        const geometry::Point g = as_point(active_trace.points[i]);
        const std::uint64_t s = Stream::derive(seed, stream_tag::conditional, i).next();
        const auto zetas = sampler.sample(g, static_cast<std::size_t>(n_inactive), s);
        double sw = 0.0, sl = 0.0;
        double lw = std::numeric_limits<double>::infinity(), hw = -lw, ll = lw, hl = -lw;
        for (const auto& z : zetas) {
            const Throughputs f = model(sampler.lift(g, z).cwiseMax(-1.0).cwiseMin(1.0));
            sw += f.wifi;
            sl += f.laa;
            lw = std::min(lw, f.wifi);
            hw = std::max(hw, f.wifi);
            ll = std::min(ll, f.laa);
            hl = std::max(hl, f.laa);
        }
        const auto k = static_cast<Eigen::Index>(i);
        fc.f_w(k) = sw / static_cast<double>(zetas.size());
        fc.f_l(k) = sl / static_cast<double>(zetas.size());
        fc.min_w(k) = lw;
        fc.max_w(k) = hw;
        fc.min_l(k) = ll;
        fc.max_l(k) = hl;
    });
    return fc;
}

io::CsvTable front_to_csv(const FrontCurve& f)
{
    io::CsvTable t;
    t.header = {"t", "f_w", "f_l"};
    const bool spread = f.kind == FrontKind::Conditional;
    if (spread)
        t.header.insert(t.header.end(), {"min_w", "max_w", "min_l", "max_l"});
    const Eigen::Index D = f.points.empty() ? 0 : f.points.front().size();
    if (!f.points.empty()) {
        t.header.push_back("clipped");
        for (Eigen::Index i = 0; i < D; ++i)
            t.header.push_back(fmt::format("u{}", i + 1));
    }
    for (Eigen::Index k = 0; k < f.t.size(); ++k) {
        std::vector<double> row{f.t(k), f.f_w(k), f.f_l(k)};
        if (spread)
            row.insert(row.end(), {f.min_w(k), f.max_w(k), f.min_l(k), f.max_l(k)});
        if (!f.points.empty()) {
            row.push_back(f.clipped[k] ? 1.0 : 0.0);
            for (Eigen::Index i = 0; i < D; ++i)
                row.push_back(f.points[k](i));
        }
        t.add_row(std::move(row));
    }
    return t;
}

io::CsvTable trace_to_csv(const TraceCurve& tc, const TraceCurve* ode)
{
    io::CsvTable t;
    const Eigen::Index r = tc.points.empty() ? 0 : tc.points.front().size();
    t.header = {"t"};
    for (Eigen::Index i = 0; i < r; ++i)
        t.header.push_back(fmt::format("gamma{}", i + 1));
    t.header.insert(t.header.end(), {"feasible", "regularised", "projected"});
    if (ode)
        for (Eigen::Index i = 0; i < r; ++i)
            t.header.push_back(fmt::format("ode_gamma{}", i + 1));
    for (Eigen::Index k = 0; k < tc.t.size(); ++k) {
        std::vector<double> row{tc.t(k)};
        for (Eigen::Index i = 0; i < r; ++i)
            row.push_back(tc.points[k](i));
        row.push_back(tc.feasible[k] ? 1.0 : 0.0);
        row.push_back(tc.regularised[k] ? 1.0 : 0.0);
        row.push_back(tc.projected[k] ? 1.0 : 0.0);
        if (ode)
            for (Eigen::Index i = 0; i < r; ++i)
                row.push_back(ode->points[k](i));
        t.add_row(std::move(row));
    }
    return t;
}

std::vector<std::size_t> nondominated(const std::vector<Throughputs>& pts)
{
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (!std::isnan(pts[i].wifi) && !std::isnan(pts[i].laa))
            order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].wifi != pts[b].wifi)
            return pts[a].wifi > pts[b].wifi;
        if (pts[a].laa != pts[b].laa)
            return pts[a].laa > pts[b].laa;
        return a < b;
    });
    std::vector<std::size_t> keep;
    double best_l = -std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
        if (pts[i].laa > best_l || (keep.empty() && pts[i].laa == best_l)) {
            keep.push_back(i);
            best_l = pts[i].laa;
        }
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

} // namespace pareto::trace
