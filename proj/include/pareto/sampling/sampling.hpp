#pragma once

// Parameter scaling to the centred unit cube, Monte Carlo sampling and
// forward-difference gradients.

#include "pareto/coex/model.hpp"
#include "pareto/common.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pareto::sampling {

enum class ScaleMode { Log, Linear };

struct ParameterDomain {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<ScaleMode> mode;

    std::size_t dim() const { return lower.size(); }

    // Bounds of the coexistence model; entries whose lower bound is not
    // positive fall back to Linear scaling.
    static ParameterDomain coexistence_default();
};

void validate(const ParameterDomain& domain);

// Log entries: M ln(theta) + b, centred on the geometric mean.
// Linear entries: affine map centred on the midpoint.
Vec scale_to_unit(const Vec& raw, const ParameterDomain& domain);

// Exact inverse of scale_to_unit. Values slightly outside [-1, 1] (finite
// difference perturbations) extrapolate instead of failing.
Vec from_unit(const Vec& unit, const ParameterDomain& domain);

using UnitModel = std::function<Throughputs(const Vec& unit)>;

// The coexistence model seen through the unit-cube parametrisation.
struct CoexistenceModel {
    coex::Scenario scenario;
    ParameterDomain domain = ParameterDomain::coexistence_default();
    coex::SolverOptions solver;

    Throughputs operator()(const Vec& unit) const;
    UnitModel as_function() const;
};

struct SampleSet {
    Mat thetas_unit; // N x D
    Mat thetas_raw;  // N x D
    Vec responses_w;
    Vec responses_l;
    std::optional<Mat> gradients_w; // N x D, unit scale
    std::optional<Mat> gradients_l;
    std::uint64_t seed = 0;
    double delta = 1e-6;
    std::size_t failed = 0;      // samples excluded after a model failure
    std::size_t evaluations = 0; // model calls made while filling

    std::size_t size() const { return static_cast<std::size_t>(thetas_unit.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(thetas_unit.cols()); }
    bool has_responses() const { return responses_w.size() == thetas_unit.rows(); }
    const Vec& responses(NetworkId id) const
    {
        return id == NetworkId::WiFi ? responses_w : responses_l;
    }
    const Mat& gradients(NetworkId id) const;
};

void validate(const SampleSet& samples);

// n i.i.d. uniform points of [-1, 1]^D; sample i draws from its own stream
// derived from (seed, i).
SampleSet sample_uniform(const ParameterDomain& domain, std::size_t n, std::uint64_t seed);

// Forward differences (f(x + delta e_i) - f(x)) / delta using D + 1 calls.
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double delta = 1e-6);

struct PairGradient {
    Throughputs value;
    Vec wifi;
    Vec laa;
};

// Both throughput gradients from one set of D + 1 model calls.
PairGradient fd_gradient_pair(const UnitModel& model, const Vec& x, double delta = 1e-6);

struct BatchOptions {
    bool with_gradients = false;
    double delta = 1e-6;
    unsigned threads = 0;
    double max_failure_fraction = 0.01;
};

// Fills responses (and gradients) for every sample. Rows whose evaluation
// throws are dropped and counted; more than max_failure_fraction of them is an
// OptimizationError.
SampleSet evaluate_batch(SampleSet samples, const UnitModel& model, const BatchOptions& opts);

// CSV: one row per sample, unit coordinates, raw coordinates, f_w, f_l.
std::string samples_to_csv(const SampleSet& samples);
SampleSet samples_from_csv(const std::string& text);

// JSON sidecar carrying the gradient matrices.
std::string gradients_to_json(const SampleSet& samples);
void gradients_from_json(const std::string& text, SampleSet& samples);

} // namespace pareto::sampling
