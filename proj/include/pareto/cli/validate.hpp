#pragma once

#include "pareto/cli/config.hpp"

#include <string>
#include <vector>

namespace pareto::cli {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    std::size_t solves = 0;
    std::size_t fallback_activations = 0;
    std::size_t solver_failures = 0;

    bool ok() const;
    std::string table() const;
};

// Invariant suite on n random parameter vectors plus synthetic oracles. A
// config that fails validation is reported as a failed "config" check.
ValidationReport run_validation(const RunConfig& config, std::size_t n = 200);

} // namespace pareto::cli
