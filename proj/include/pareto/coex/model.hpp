#pragma once

// Analytic LAA / Wi-Fi coexistence model: saturated contention probabilities,
// slot occupancy, link budget and per-network throughput.

#include "pareto/common.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pareto::coex {

inline constexpr std::size_t kNumParameters = 17;

// Indices into the 17-entry design vector.
namespace param {
inline constexpr std::size_t wifi_cw_min = 0;
inline constexpr std::size_t laa_cw_min = 1;
inline constexpr std::size_t wifi_max_backoff = 2;
inline constexpr std::size_t laa_max_backoff = 3;
inline constexpr std::size_t tx_separation = 4;   // inert under exclusive channel access
inline constexpr std::size_t link_distance = 5;
inline constexpr std::size_t tx_height = 6;
inline constexpr std::size_t rx_height = 7;
inline constexpr std::size_t shadow_std = 8;
inline constexpr std::size_t k_los = 9;
inline constexpr std::size_t k_nlos = 10;
inline constexpr std::size_t alpha_los = 11;
inline constexpr std::size_t alpha_nlos = 12;
inline constexpr std::size_t antenna_gain = 13;
inline constexpr std::size_t noise_figure = 14;
inline constexpr std::size_t tx_power = 15;
inline constexpr std::size_t bandwidth = 16;
} // namespace param

struct ParameterInfo {
    const char* name;
    const char* unit;
    double lower;
    double upper;
    double nominal;
};

// Bounds and nominal values of the 17 MAC+PHY design variables.
const std::array<ParameterInfo, kNumParameters>& parameter_table();

// MAC + PHY design variables in their physical units.
struct ParameterVector {
    std::array<double, kNumParameters> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    static ParameterVector nominal();
    static ParameterVector from(std::span<const double> v);
    Vec to_vec() const;
};

// Checks every entry against the parameter table (inclusive bounds); throws
// DomainError naming the first violated bound.
void validate(const ParameterVector& theta);

struct MacParameters {
    std::vector<double> omega_w; // minimum contention window, per AP
    std::vector<double> mu_w;    // maximum back-off stage, per AP
    std::vector<double> omega_l; // per eNodeB
    std::vector<double> mu_l;

    // Network-wide common values for W APs and L eNodeBs.
    static MacParameters uniform(std::size_t W, std::size_t L, double omega_w, double omega_l,
                                 double mu_w, double mu_l);
    static MacParameters from_theta(const ParameterVector& theta, std::size_t W, std::size_t L);
};

void validate(const MacParameters& mac);

// (T_idle, T_s,W, T_s,L, T_c,W, T_c,L, T_c,WL)
struct TimingVector {
    std::array<double, 6> t{9.0, 1100.0, 1100.0, 1050.0, 1050.0, 1100.0};
};

void validate(const TimingVector& timing);

struct Scenario {
    std::size_t L = 6;
    std::size_t W = 6;
    std::size_t n_ue = 6;
    std::size_t n_sta = 6;
    std::size_t n_channels = 1;
    double area_width = 120.0;
    double area_height = 80.0;
    TimingVector timing;
    double payload_w = 1000.0;
    double payload_l = 1000.0;
    double los_weight = 0.5;
    double shadow_margin_scale = 1.0;
    std::uint64_t seed = 0;

    double payload(NetworkId id) const { return id == NetworkId::WiFi ? payload_w : payload_l; }
};

void validate(const Scenario& scenario);

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 200;
    int fallback_iter = 200;
    double fallback_damping = 0.5;
};

struct ProbabilityState {
    std::vector<double> p_w;
    std::vector<double> p_l;
    std::vector<double> c_w;
    std::vector<double> c_l;
    double residual_norm = 0.0;
    int iterations = 0;
    bool used_fallback = false;
};

using SlotProbabilities = std::array<double, 6>;

// Saturated transmission probability of one contending node given its
// collision probability. Continuous across c = 1/2.
double bianchi_probability(double c, double omega, double mu);

// d/dc of bianchi_probability.
double bianchi_derivative(double c, double omega, double mu);

struct CollisionProbabilities {
    std::vector<double> c_w;
    std::vector<double> c_l;
};

CollisionProbabilities collision_probabilities(std::span<const double> p_w,
                                               std::span<const double> p_l);

// Solves p = bianchi(c), c = coupling(p) for all APs and eNodeBs. Throws
// SolverError when neither the trust-region iteration nor the damped
// fixed-point fallback reaches opts.tol.
ProbabilityState solve_probability_system(const MacParameters& mac,
                                          const SolverOptions& opts = {});

// Max-norm of the stacked fixed-point residual at `state`.
double fixed_point_residual(const MacParameters& mac, const ProbabilityState& state);

SlotProbabilities slot_probabilities(const ProbabilityState& state);

struct LinkBudget {
    double distance_m;
    double path_loss_db;
    double shadow_margin_db;
    double noise_floor_dbm;
    double snr_db;
};

LinkBudget link_budget(const ParameterVector& theta, const Scenario& scenario, NetworkId network);

// Linear SNR of the representative link of `network`.
double link_snr(const ParameterVector& theta, const Scenario& scenario, NetworkId network);

struct ThroughputReport {
    Throughputs f;
    ProbabilityState state;
    SlotProbabilities slots;
    double snr_w;
    double snr_l;
    double mean_slot_duration;
};

ThroughputReport evaluate(const ParameterVector& theta, const Scenario& scenario,
                          const SolverOptions& opts = {});

Throughputs throughput(const ParameterVector& theta, const Scenario& scenario,
                       const SolverOptions& opts = {});

} // namespace pareto::coex
