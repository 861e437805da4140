#pragma once

// Staged end-to-end run writing every artifact into the output directory.

#include "pareto/cli/config.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pareto::cli {

enum class Stage { Sample = 1, Subspace, Shadow, Stretch, Fit, Trace, Fronts };

inline constexpr Stage first_stage = Stage::Sample;
inline constexpr Stage last_stage = Stage::Fronts;

std::string stage_name(Stage s);
// Accepts a stage name ("fit") or its number ("5").
Stage parse_stage(const std::string& s);

// Files written by a stage, in write order.
std::vector<std::string> stage_outputs(Stage s);

class StageError : public Error {
public:
    StageError(Stage s, const std::string& what)
        : Error("stage '" + stage_name(s) + "' failed: " + what), stage_(s)
    {
    }
    Stage stage() const { return stage_; }

private:
    Stage stage_;
};

// Runs stages [from, to]; earlier stages are reloaded from the output
// directory. Writes manifest.json afterwards and returns it.
nlohmann::json run_pipeline(const RunConfig& config, Stage from = first_stage, Stage to = last_stage,
                            std::ostream* log = nullptr);

} // namespace pareto::cli
