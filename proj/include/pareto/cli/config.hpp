#pragma once

// Run configuration: JSON schema documented in README.md.

#include "pareto/coex/model.hpp"
#include "pareto/sampling/sampling.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

namespace pareto::cli {

struct SamplingConfig {
    std::size_t n = 2000;
    std::uint64_t seed = 1;
    double delta = 1e-6;
};

struct SubspaceConfig {
    int r = 2;
    int mix_grid = 101;
    int n_boundary = 25;
};

struct TraceConfig {
    int n_t = 15;
    int n_inactive = 25;
    double rk4_step = 1e-3;
    int profile_points = 100;
    int multistart = 20;
    int nm_max_evals = 4000;
};

struct RunConfig {
    coex::Scenario scenario;
    coex::SolverOptions solver;
    sampling::ParameterDomain domain = sampling::ParameterDomain::coexistence_default();
    SamplingConfig sampling;
    SubspaceConfig subspace;
    TraceConfig trace;
    std::string output_dir = "pareto_out";
    unsigned threads = 0; // 0: PARETO_TRACE_THREADS, else hardware concurrency
};

// Missing keys keep their defaults; unknown keys are a ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

// Hex SHA-256 of the canonical JSON form (threads and output_dir excluded,
// since they do not change any artifact).
std::string config_hash(const RunConfig& c);

void validate(const RunConfig& c);

std::string sha256_hex(const std::string& bytes);

} // namespace pareto::cli
