// pareto-trace: command-line front end for the coexistence Pareto pipeline.

#include "pareto/cli/config.hpp"
#include "pareto/cli/pipeline.hpp"
#include "pareto/cli/validate.hpp"
#include "pareto/coex/model.hpp"
#include "pareto/io/csv.hpp"
#include "pareto/sampling/sampling.hpp"
#include "pareto/trace/trace.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>
#include <sstream>

using namespace pareto;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::string output_dir;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "JSON run configuration (defaults apply when omitted)");
    cmd->add_option("--seed", c.seed, "Master RNG seed");
    cmd->add_option("--n", c.n, "Number of Monte Carlo samples");
    cmd->add_option("--output-dir", c.output_dir, "Artifact directory");
    cmd->add_option("--threads", c.threads, "Worker threads (fallback: PARETO_TRACE_THREADS)");
}

cli::RunConfig resolve(const Common& c)
{
    cli::RunConfig cfg = c.config.empty() ? cli::RunConfig{} : cli::load_config(c.config);
    if (c.seed)
        cfg.sampling.seed = *c.seed;
    if (c.n)
        cfg.sampling.n = *c.n;
    if (!c.output_dir.empty())
        cfg.output_dir = c.output_dir;
    if (c.threads)
        cfg.threads = *c.threads;
    return cfg;
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("'{}' is not a number", item));
        }
        if (used != item.size())
            throw ConfigError(fmt::format("'{}' is not a number", item));
        out.push_back(v);
    }
    return out;
}

int cmd_eval(const Common& c, const std::string& theta_s, const std::string& unit_s)
{
    const auto cfg = resolve(c);
    cli::validate(cfg);
    coex::ParameterVector theta = coex::ParameterVector::nominal();
    if (!theta_s.empty() && !unit_s.empty())
        throw ConfigError("give either --theta or --unit, not both");
    if (!theta_s.empty()) {
        theta = coex::ParameterVector::from(parse_list(theta_s));
    } else if (!unit_s.empty()) {
        const auto u = parse_list(unit_s);
        const Vec raw = sampling::from_unit(Eigen::Map<const Vec>(u.data(), static_cast<Eigen::Index>(u.size())),
                                            cfg.domain);
        theta = coex::ParameterVector::from(std::span<const double>(raw.data(), raw.size()));
    }
    coex::validate(theta);
    const auto r = coex::evaluate(theta, cfg.scenario, cfg.solver);
    json j;
    j["f_w"] = r.f.wifi;
    j["f_l"] = r.f.laa;
    j["p_T"] = std::vector<double>(r.slots.begin(), r.slots.end());
    j["snr_w"] = r.snr_w;
    j["snr_l"] = r.snr_l;
    j["snr_w_db"] = 10.0 * std::log10(r.snr_w);
    j["snr_l_db"] = 10.0 * std::log10(r.snr_l);
    j["mean_slot_duration"] = r.mean_slot_duration;
    j["state"] = {{"p_w", r.state.p_w},
                  {"p_l", r.state.p_l},
                  {"c_w", r.state.c_w},
                  {"c_l", r.state.c_l},
                  {"residual", r.state.residual_norm},
                  {"iterations", r.state.iterations},
                  {"used_fallback", r.state.used_fallback}};
    j["theta"] = std::vector<double>(theta.values.begin(), theta.values.end());
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_stages(const Common& c, cli::Stage from, cli::Stage to)
{
    const auto cfg = resolve(c);
    const auto manifest = cli::run_pipeline(cfg, from, to, &std::cerr);
    std::cerr << fmt::format("wrote {} files to {}\n", manifest["files"].size(), cfg.output_dir);
    return 0;
}

int cmd_validate(const Common& c)
{
    const auto cfg = resolve(c);
    const auto rep = cli::run_validation(cfg, c.n.value_or(200));
    std::cout << rep.table();
    return rep.ok() ? 0 : 1;
}

int cmd_nondominated(const Common& c, const std::string& input, const std::string& output)
{
    const auto cfg = resolve(c);
    const std::string path = input.empty() ? cfg.output_dir + "/samples.csv" : input;
    const auto t = io::CsvTable::parse(io::read_file(path));
    const auto iw = t.column("f_w"), il = t.column("f_l");
    std::vector<Throughputs> pts;
    for (const auto& row : t.rows)
        pts.push_back({row[iw], row[il]});
    io::CsvTable out;
    out.header = {"index", "f_w", "f_l"};
    for (auto i : trace::nondominated(pts))
        out.add_row({static_cast<double>(i), pts[i].wifi, pts[i].laa});
    if (output.empty())
        std::cout << out.to_string();
    else
        io::write_file(output, out.to_string());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pareto traces of LAA / Wi-Fi coexistence throughput"};
    app.require_subcommand(1);

    Common common;
    std::string theta_s, unit_s, from_stage, input, output;

    auto* eval = app.add_subcommand("eval", "Evaluate the model at one parameter vector");
    add_common(eval, common);
    eval->add_option("--theta", theta_s, "17 comma-separated values in physical units (default: nominal)");
    eval->add_option("--unit", unit_s, "17 comma-separated unit-cube coordinates");

    auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write all artifacts");
    add_common(pipeline, common);
    pipeline->add_option("--from-stage", from_stage,
                         "Resume at this stage (sample, subspace, shadow, stretch, fit, trace, fronts or 1-7)");

    auto* validate = app.add_subcommand("validate", "Run the invariant suite and print a pass/fail table");
    add_common(validate, common);

    auto* sample = app.add_subcommand("sample", "Sampling stage: samples.csv, gradients.json");
    add_common(sample, common);
    auto* subspace = app.add_subcommand("subspace", "Subspace, shadow and stretch stages");
    add_common(subspace, common);
    auto* fit = app.add_subcommand("fit", "Surrogate fits: surrogates.json");
    add_common(fit, common);
    auto* tr = app.add_subcommand("trace", "Condition profile and quadratic trace");
    add_common(tr, common);
    auto* front = app.add_subcommand("front", "Geodesic, linear and conditional fronts");
    add_common(front, common);

    auto* nd = app.add_subcommand("nondominated", "Non-dominated rows of a CSV with f_w, f_l columns");
    add_common(nd, common);
    nd->add_option("--input", input, "CSV file (default: <output-dir>/samples.csv)");
    nd->add_option("--output", output, "Write here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        using cli::Stage;
        if (*eval)
            return cmd_eval(common, theta_s, unit_s);
        if (*pipeline)
            return cmd_stages(common, from_stage.empty() ? cli::first_stage : cli::parse_stage(from_stage),
                              cli::last_stage);
        if (*validate)
            return cmd_validate(common);
        if (*sample)
            return cmd_stages(common, Stage::Sample, Stage::Sample);
        if (*subspace)
            return cmd_stages(common, Stage::Subspace, Stage::Stretch);
        if (*fit)
            return cmd_stages(common, Stage::Fit, Stage::Fit);
        if (*tr)
            return cmd_stages(common, Stage::Trace, Stage::Trace);
        if (*front)
            return cmd_stages(common, Stage::Fronts, Stage::Fronts);
        if (*nd)
            return cmd_nondominated(common, input, output);
    } catch (const cli::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
