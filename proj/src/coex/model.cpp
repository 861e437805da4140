#include "pareto/coex/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pareto::coex {

namespace {

constexpr double kProbabilityCeiling = 1.0 - 1e-12;

const std::array<ParameterInfo, kNumParameters> kTable{{
    {"wifi_cw_min", "", 8.0, 1024.0, 516.0},
    {"laa_cw_min", "", 8.0, 1024.0, 516.0},
    {"wifi_max_backoff", "", 0.0, 8.0, 4.0},
    {"laa_max_backoff", "", 0.0, 8.0, 4.0},
    {"tx_separation", "m", 10.0, 20.0, 15.0},
    {"link_distance", "m", 10.0, 35.0, 22.5},
    {"tx_height", "m", 3.0, 6.0, 4.5},
    {"rx_height", "m", 1.0, 1.5, 1.25},
    {"shadow_std", "dB", 8.03, 8.29, 8.16},
    {"k_los", "dB", 45.12, 46.38, 45.75},
    {"k_nlos", "dB", 34.70, 46.38, 40.54},
    {"alpha_los", "dB/decade", 17.3, 21.5, 19.4},
    {"alpha_nlos", "dB/decade", 31.9, 38.3, 35.1},
    {"antenna_gain", "dBi", 0.0, 5.0, 2.5},
    {"noise_figure", "dB", 5.0, 9.0, 7.0},
    {"tx_power", "dBm", 18.0, 23.0, 20.5},
    {"bandwidth", "Hz", 10e6, 20e6, 15e6},
}};

// (1 - (1 - eps)^mu) / eps, including the removable singularity at eps = 0.
double backoff_ratio(double eps, double mu)
{
    if (std::abs(eps) < 1e-8)
        return mu - 0.5 * mu * (mu - 1.0) * eps;
    return -std::expm1(mu * std::log1p(-eps)) / eps;
}

double backoff_ratio_derivative(double eps, double mu)
{
    if (std::abs(eps) < 1e-4)
        return -0.5 * mu * (mu - 1.0) + mu * (mu - 1.0) * (mu - 2.0) * eps / 3.0;
    const double g = -std::expm1(mu * std::log1p(-eps));
    const double dg = mu * std::pow(1.0 - eps, mu - 1.0);
    return (dg * eps - g) / (eps * eps);
}

void check_bianchi_domain(double c, double omega, double mu)
{
    if (!(c >= 0.0 && c < 1.0))
        throw DomainError(fmt::format("collision probability {} outside [0, 1)", c));
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError(fmt::format("contention window {} must be positive", omega));
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw DomainError(fmt::format("back-off stage {} must be non-negative", mu));
}

double product_of_complements(std::span<const double> p)
{
    double prod = 1.0;
    for (double v : p)
        prod *= 1.0 - v;
    return prod;
}

// Probability that at least two nodes transmit. Accumulated by count (none,
// one, two or more) so that no subtraction can push it below zero.
double at_least_two(std::span<const double> p)
{
    double none = 1.0, one = 0.0, more = 0.0;
    for (double v : p) {
        more += one * v;
        one = one * (1.0 - v) + none * v;
        none *= 1.0 - v;
    }
    return more;
}

// ---- nonlinear system -------------------------------------------------------

// Unknowns stacked as [p_w, p_l, c_w, c_l].
class ProbabilitySystem {
public:
    explicit ProbabilitySystem(const MacParameters& mac)
        : mac_(mac), W_(mac.omega_w.size()), L_(mac.omega_l.size()), n_(2 * (W_ + L_)) {}

    std::size_t size() const { return n_; }

    double omega(std::size_t node) const
    {
        return node < W_ ? mac_.omega_w[node] : mac_.omega_l[node - W_];
    }
    double mu(std::size_t node) const
    {
        return node < W_ ? mac_.mu_w[node] : mac_.mu_l[node - W_];
    }

    // Complete state from the collision half by applying Bianchi then the coupling.
    Vec initial_guess() const
    {
        Vec x(n_);
        const std::size_t m = W_ + L_;
        for (std::size_t k = 0; k < m; ++k)
            x[k] = std::min(bianchi_probability(0.0, omega(k), mu(k)), kProbabilityCeiling);
        write_coupling(x);
        clamp(x);
        return x;
    }

    void write_coupling(Vec& x) const
    {
        const auto cc = collision_probabilities(std::span<const double>(x.data(), W_),
                                                std::span<const double>(x.data() + W_, L_));
        const std::size_t m = W_ + L_;
        for (std::size_t j = 0; j < W_; ++j)
            x[m + j] = cc.c_w[j];
        for (std::size_t i = 0; i < L_; ++i)
            x[m + W_ + i] = cc.c_l[i];
    }

    // One sweep of the fixed-point map x -> G(x).
    Vec fixed_point_map(const Vec& x) const
    {
        Vec y = x;
        const std::size_t m = W_ + L_;
        write_coupling(y);
        for (std::size_t k = 0; k < m; ++k)
            y[k] = bianchi_probability(std::min(x[m + k], kProbabilityCeiling), omega(k), mu(k));
        clamp(y);
        return y;
    }

    Vec residual(const Vec& x) const
    {
        Vec f(n_);
        const std::size_t m = W_ + L_;
        for (std::size_t k = 0; k < m; ++k)
            f[k] = x[k] - bianchi_probability(x[m + k], omega(k), mu(k));
        const auto cc = collision_probabilities(std::span<const double>(x.data(), W_),
                                                std::span<const double>(x.data() + W_, L_));
        for (std::size_t j = 0; j < W_; ++j)
            f[m + j] = x[m + j] - cc.c_w[j];
        for (std::size_t i = 0; i < L_; ++i)
            f[m + W_ + i] = x[m + W_ + i] - cc.c_l[i];
        return f;
    }

    Mat jacobian(const Vec& x) const
    {
        const std::size_t m = W_ + L_;
        Mat J = Mat::Identity(n_, n_);
        for (std::size_t k = 0; k < m; ++k)
            J(k, m + k) = -bianchi_derivative(x[m + k], omega(k), mu(k));

        const double prod_w = product_of_complements(std::span<const double>(x.data(), W_));
        const double prod_l = product_of_complements(std::span<const double>(x.data() + W_, L_));
        // c_w[j] = 1 - prod_{q != j}(1 - p_w[q]) * prod_l, similarly for c_l.
        for (std::size_t j = 0; j < W_; ++j) {
            const double survive = prod_w / (1.0 - x[j]) * prod_l;
            for (std::size_t k = 0; k < m; ++k) {
                if (k == j)
                    continue;
                J(m + j, k) = -survive / (1.0 - x[k]);
            }
        }
        for (std::size_t i = 0; i < L_; ++i) {
            const double survive = prod_l / (1.0 - x[W_ + i]) * prod_w;
            for (std::size_t k = 0; k < m; ++k) {
                if (k == W_ + i)
                    continue;
                J(m + W_ + i, k) = -survive / (1.0 - x[k]);
            }
        }
        return J;
    }

    static void clamp(Vec& x)
    {
        for (Eigen::Index k = 0; k < x.size(); ++k)
            x[k] = std::clamp(x[k], 0.0, kProbabilityCeiling);
    }

    ProbabilityState to_state(const Vec& x) const
    {
        ProbabilityState s;
        const std::size_t m = W_ + L_;
        s.p_w.assign(x.data(), x.data() + W_);
        s.p_l.assign(x.data() + W_, x.data() + m);
        s.c_w.assign(x.data() + m, x.data() + m + W_);
        s.c_l.assign(x.data() + m + W_, x.data() + n_);
        return s;
    }

private:
    const MacParameters& mac_;
    std::size_t W_;
    std::size_t L_;
    std::size_t n_;
};

struct TrustRegionResult {
    Vec x;
    double residual;
    int iterations;
    bool converged;
};

// Powell dogleg on 0.5 * |F(x)|^2 with iterates kept inside the probability box.
TrustRegionResult dogleg(const ProbabilitySystem& sys, Vec x, const SolverOptions& opts)
{
    Vec f = sys.residual(x);
    double radius = 0.5;
    constexpr double kMaxRadius = 2.0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (f.lpNorm<Eigen::Infinity>() < opts.tol)
            break;
        const Mat J = sys.jacobian(x);
        const Vec g = J.transpose() * f;
        Eigen::PartialPivLU<Mat> lu(J);
        Vec newton = -lu.solve(f);
        const bool newton_ok = newton.allFinite() && std::abs(lu.determinant()) > 1e-300;

        const Vec Jg = J * g;
        const double jg2 = Jg.squaredNorm();
        const Vec cauchy = jg2 > 0.0 ? Vec(-(g.squaredNorm() / jg2) * g) : Vec(-g);

        Vec step;
        if (newton_ok && newton.norm() <= radius) {
            step = newton;
        } else if (!newton_ok || cauchy.norm() >= radius) {
            const double gn = g.norm();
            if (gn == 0.0)
                break;
            step = -(radius / gn) * g;
        } else {
            // Intersect the segment cauchy -> newton with the trust-region boundary.
            const Vec d = newton - cauchy;
            const double a = d.squaredNorm();
            const double b = 2.0 * cauchy.dot(d);
            const double c = cauchy.squaredNorm() - radius * radius;
            const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
            step = cauchy + tau * d;
        }

        Vec trial = x + step;
        ProbabilitySystem::clamp(trial);
        const Vec taken = trial - x;
        const Vec f_trial = sys.residual(trial);
        const double predicted = 0.5 * f.squaredNorm() - 0.5 * (f + J * taken).squaredNorm();
        const double actual = 0.5 * f.squaredNorm() - 0.5 * f_trial.squaredNorm();
        const double rho = predicted > 0.0 ? actual / predicted : -1.0;

        const double taken_norm = taken.norm();
        if (rho < 0.25)
            radius = 0.25 * std::max(taken_norm, 1e-3 * radius);
        else if (rho > 0.75 && taken_norm >= 0.99 * radius)
            radius = std::min(2.0 * radius, kMaxRadius);

        if (rho > 1e-4 || (actual > 0.0 && predicted <= 0.0)) {
            x = trial;
            f = f_trial;
        }
        if (radius < 1e-15)
            break;
    }

    double res = f.lpNorm<Eigen::Infinity>();
    const bool converged = res < opts.tol;
    if (converged) {
        // A few undamped Newton steps push the residual to rounding level; the
        // finite-difference gradients downstream need that headroom.
        for (int k = 0; k < 3 && res > 0.0; ++k) {
            Vec trial = x - sys.jacobian(x).partialPivLu().solve(f);
            ProbabilitySystem::clamp(trial);
            const Vec f_trial = sys.residual(trial);
            const double r_trial = f_trial.lpNorm<Eigen::Infinity>();
            if (!(r_trial < res))
                break;
            x = trial;
            f = f_trial;
            res = r_trial;
        }
    }
    return {std::move(x), res, it, converged};
}

} // namespace

const std::array<ParameterInfo, kNumParameters>& parameter_table() { return kTable; }

ParameterVector ParameterVector::nominal()
{
    ParameterVector p;
    for (std::size_t i = 0; i < kNumParameters; ++i)
        p.values[i] = kTable[i].nominal;
    return p;
}

ParameterVector ParameterVector::from(std::span<const double> v)
{
    if (v.size() != kNumParameters)
        throw DimensionError(
            fmt::format("parameter vector needs {} entries, got {}", kNumParameters, v.size()));
    ParameterVector p;
    std::copy(v.begin(), v.end(), p.values.begin());
    return p;
}

Vec ParameterVector::to_vec() const
{
    return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(kNumParameters));
}

void validate(const ParameterVector& theta)
{
    for (std::size_t i = 0; i < kNumParameters; ++i) {
        const auto& info = kTable[i];
        const double v = theta[i];
        if (!std::isfinite(v) || v < info.lower || v > info.upper)
            throw DomainError(fmt::format("theta_{} ({}) = {} violates bound [{}, {}]", i + 1,
                                          info.name, v, info.lower, info.upper));
    }
}

MacParameters MacParameters::uniform(std::size_t W, std::size_t L, double omega_w, double omega_l,
                                     double mu_w, double mu_l)
{
    MacParameters mac;
    mac.omega_w.assign(W, omega_w);
    mac.mu_w.assign(W, mu_w);
    mac.omega_l.assign(L, omega_l);
    mac.mu_l.assign(L, mu_l);
    return mac;
}

MacParameters MacParameters::from_theta(const ParameterVector& theta, std::size_t W, std::size_t L)
{
    return uniform(W, L, theta[param::wifi_cw_min], theta[param::laa_cw_min],
                   theta[param::wifi_max_backoff], theta[param::laa_max_backoff]);
}

void validate(const MacParameters& mac)
{
    if (mac.omega_w.size() != mac.mu_w.size() || mac.omega_l.size() != mac.mu_l.size())
        throw DimensionError("MAC parameter vectors disagree in length");
    if (mac.omega_w.empty() || mac.omega_l.empty())
        throw DomainError("each network needs at least one node");
    auto check = [](const std::vector<double>& omega, const std::vector<double>& mu) {
        for (double w : omega)
            if (!std::isfinite(w) || !(w > 0.0))
                throw DomainError(fmt::format("contention window {} must be positive", w));
        for (double m : mu)
            if (!std::isfinite(m) || m < 0.0)
                throw DomainError(fmt::format("back-off stage {} must be non-negative", m));
    };
    check(mac.omega_w, mac.mu_w);
    check(mac.omega_l, mac.mu_l);
}

void validate(const TimingVector& timing)
{
    static constexpr std::array<const char*, 6> names{"T_idle", "T_s,W", "T_s,L",
                                                      "T_c,W",  "T_c,L", "T_c,WL"};
    for (std::size_t i = 0; i < 6; ++i)
        if (!std::isfinite(timing.t[i]) || !(timing.t[i] > 0.0))
            throw DomainError(fmt::format("TimingVector invariant violated: {} = {} must be > 0",
                                          names[i], timing.t[i]));
}

void validate(const Scenario& s)
{
    if (s.L < 1 || s.W < 1)
        throw DomainError("Scenario invariant violated: L >= 1 and W >= 1 required");
    if (!(s.area_width > 0.0) || !(s.area_height > 0.0))
        throw DomainError("Scenario invariant violated: area dimensions must be positive");
    if (!(s.payload_w > 0.0) || !(s.payload_l > 0.0))
        throw DomainError("Scenario invariant violated: payload durations must be positive");
    if (!(s.los_weight >= 0.0 && s.los_weight <= 1.0))
        throw DomainError("Scenario invariant violated: los_weight must lie in [0, 1]");
    if (!std::isfinite(s.shadow_margin_scale))
        throw DomainError("Scenario invariant violated: shadow_margin_scale must be finite");
    validate(s.timing);
}

double bianchi_probability(double c, double omega, double mu)
{
    check_bianchi_domain(c, omega, mu);
    if (c == 0.0)
        return 2.0 / (1.0 + omega);
    return 2.0 / ((1.0 + omega) + c * omega * backoff_ratio(1.0 - 2.0 * c, mu));
}

double bianchi_derivative(double c, double omega, double mu)
{
    check_bianchi_domain(c, omega, mu);
    const double eps = 1.0 - 2.0 * c;
    if (c == 0.0) {
        // (1 - 0^mu) is 1 for mu > 0 and 0 for mu = 0.
        const double q0 = mu > 0.0 ? 1.0 : 0.0;
        return -2.0 * omega * q0 / ((1.0 + omega) * (1.0 + omega));
    }
    const double q = backoff_ratio(eps, mu);
    const double den = (1.0 + omega) + c * omega * q;
    // d den / dc = omega q + c omega q'(eps) * d eps / dc
    const double dden = omega * q - 2.0 * c * omega * backoff_ratio_derivative(eps, mu);
    return -2.0 * dden / (den * den);
}

CollisionProbabilities collision_probabilities(std::span<const double> p_w,
                                               std::span<const double> p_l)
{
    for (double v : p_w)
        if (!(v >= 0.0 && v < 1.0))
            throw DomainError(fmt::format("transmission probability {} outside [0, 1)", v));
    for (double v : p_l)
        if (!(v >= 0.0 && v < 1.0))
            throw DomainError(fmt::format("transmission probability {} outside [0, 1)", v));

    const double prod_w = product_of_complements(p_w);
    const double prod_l = product_of_complements(p_l);
    CollisionProbabilities out;
    out.c_w.resize(p_w.size());
    out.c_l.resize(p_l.size());
    // iota_j = prod / (1 - p_j): all other nodes of the same network stay silent.
    for (std::size_t j = 0; j < p_w.size(); ++j) {
        const double comp = 1.0 - p_w[j];
        if (comp == 0.0)
            throw DomainError("complementary transmission probability is zero");
        out.c_w[j] = std::clamp(1.0 - (prod_w / comp) * prod_l, 0.0, 1.0);
    }
    for (std::size_t i = 0; i < p_l.size(); ++i) {
        const double comp = 1.0 - p_l[i];
        if (comp == 0.0)
            throw DomainError("complementary transmission probability is zero");
        out.c_l[i] = std::clamp(1.0 - (prod_l / comp) * prod_w, 0.0, 1.0);
    }
    return out;
}

ProbabilityState solve_probability_system(const MacParameters& mac, const SolverOptions& opts)
{
    validate(mac);
    const ProbabilitySystem sys(mac);

    auto finish = [&](const TrustRegionResult& r, int extra_iter, bool fallback) {
        ProbabilityState s = sys.to_state(r.x);
        s.residual_norm = r.residual;
        s.iterations = r.iterations + extra_iter;
        s.used_fallback = fallback;
        return s;
    };

    const Vec x0 = sys.initial_guess();
    TrustRegionResult first = dogleg(sys, x0, opts);
    if (first.converged)
        return finish(first, 0, false);

    // Damped fixed-point iteration from the initial guess, then back into the
    // trust region from wherever it ended.
    Vec x = x0;
    for (int k = 0; k < opts.fallback_iter; ++k)
        x = (1.0 - opts.fallback_damping) * x + opts.fallback_damping * sys.fixed_point_map(x);
    TrustRegionResult second = dogleg(sys, x, opts);
    if (second.converged)
        return finish(second, first.iterations + opts.fallback_iter, true);

    const double last = std::min(first.residual, second.residual);
    throw SolverError(
        fmt::format("probability system did not converge: residual {:.3e} after {} iterations",
                    last, first.iterations + second.iterations + opts.fallback_iter),
        last);
}

double fixed_point_residual(const MacParameters& mac, const ProbabilityState& state)
{
    const ProbabilitySystem sys(mac);
    Vec x(sys.size());
    std::size_t k = 0;
    for (const auto* v : {&state.p_w, &state.p_l, &state.c_w, &state.c_l})
        for (double e : *v)
            x[static_cast<Eigen::Index>(k++)] = e;
    if (k != sys.size())
        throw DimensionError("state does not match the MAC parameter dimensions");
    return sys.residual(x).lpNorm<Eigen::Infinity>();
}

SlotProbabilities slot_probabilities(const ProbabilityState& s)
{
    if (s.p_w.size() != s.c_w.size() || s.p_l.size() != s.c_l.size())
        throw DimensionError("probability state vectors disagree in length");
    auto in_unit = [](const std::vector<double>& v) {
        for (double e : v)
            if (!(e >= 0.0 && e <= 1.0))
                throw DomainError(fmt::format("probability {} outside [0, 1]", e));
    };
    in_unit(s.p_w);
    in_unit(s.p_l);
    in_unit(s.c_w);
    in_unit(s.c_l);

    const double idle_w = product_of_complements(s.p_w);
    const double idle_l = product_of_complements(s.p_l);
    double success_w = 0.0;
    for (std::size_t j = 0; j < s.p_w.size(); ++j)
        success_w += s.p_w[j] * (1.0 - s.c_w[j]);
    double success_l = 0.0;
    for (std::size_t i = 0; i < s.p_l.size(); ++i)
        success_l += s.p_l[i] * (1.0 - s.c_l[i]);

    return {idle_w * idle_l,
            success_w,
            success_l,
            idle_l * at_least_two(s.p_w),
            idle_w * at_least_two(s.p_l),
            (1.0 - idle_l) * (1.0 - idle_w)};
}

LinkBudget link_budget(const ParameterVector& theta, const Scenario& scenario, NetworkId)
{
    LinkBudget b{};
    const double dh = theta[param::tx_height] - theta[param::rx_height];
    b.distance_m = std::sqrt(theta[param::link_distance] * theta[param::link_distance] + dh * dh);
    if (!(b.distance_m > 0.0))
        throw DomainError("link distance must be positive");
    const double ld = std::log10(b.distance_m);
    const double rho = scenario.los_weight;
    const double pl_los = theta[param::k_los] + theta[param::alpha_los] * ld;
    const double pl_nlos = theta[param::k_nlos] + theta[param::alpha_nlos] * ld;
    b.path_loss_db = rho * pl_los + (1.0 - rho) * pl_nlos;
    b.shadow_margin_db = scenario.shadow_margin_scale * theta[param::shadow_std];
    b.noise_floor_dbm =
        -174.0 + 10.0 * std::log10(theta[param::bandwidth]) + theta[param::noise_figure];
    b.snr_db = theta[param::tx_power] + theta[param::antenna_gain] - b.path_loss_db -
               b.shadow_margin_db - b.noise_floor_dbm;
    return b;
}

double link_snr(const ParameterVector& theta, const Scenario& scenario, NetworkId network)
{
    return std::pow(10.0, link_budget(theta, scenario, network).snr_db / 10.0);
}

ThroughputReport evaluate(const ParameterVector& theta, const Scenario& scenario,
                          const SolverOptions& opts)
{
    ThroughputReport r;
    r.state = solve_probability_system(MacParameters::from_theta(theta, scenario.W, scenario.L),
                                       opts);
    r.slots = slot_probabilities(r.state);
    r.mean_slot_duration = 0.0;
    for (std::size_t k = 0; k < 6; ++k)
        r.mean_slot_duration += scenario.timing.t[k] * r.slots[k];
    if (!(r.mean_slot_duration > 0.0))
        throw DomainError("mean slot duration t'p_T must be positive");
    r.snr_w = link_snr(theta, scenario, NetworkId::WiFi);
    r.snr_l = link_snr(theta, scenario, NetworkId::LAA);
    r.f.wifi = scenario.payload_w * std::log2(1.0 + r.snr_w) * r.slots[1] / r.mean_slot_duration;
    r.f.laa = scenario.payload_l * std::log2(1.0 + r.snr_l) * r.slots[2] / r.mean_slot_duration;
    return r;
}

Throughputs throughput(const ParameterVector& theta, const Scenario& scenario,
                       const SolverOptions& opts)
{
    return evaluate(theta, scenario, opts).f;
}

} // namespace pareto::coex
