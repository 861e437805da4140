#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace pareto {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class NetworkId { WiFi, LAA };

constexpr std::string_view to_string(NetworkId id)
{
    return id == NetworkId::WiFi ? "wifi" : "laa";
}

// Error hierarchy. Every failure the library reports derives from Error so the
// CLI can map them onto exit codes without knowing the module that threw.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class OptimizationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

// Both throughputs at one design; the units follow the configured timing vector.
struct Throughputs {
    double wifi = 0.0;
    double laa = 0.0;

    double get(NetworkId id) const { return id == NetworkId::WiFi ? wifi : laa; }
    // Scalarization (1 - t) f_W + t f_L.
    double scalarized(double t) const { return (1.0 - t) * wifi + t * laa; }
};

} // namespace pareto
