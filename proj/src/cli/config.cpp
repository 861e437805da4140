#include "pareto/cli/config.hpp"

#include "pareto/io/csv.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <initializer_list>
#include <set>

namespace pareto::cli {

namespace {

using nlohmann::json;

void only_keys(const json& j, const char* where, std::initializer_list<const char*> keys)
{
    if (!j.is_object())
        throw ConfigError(fmt::format("config: '{}' must be an object", where));
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k))
            throw ConfigError(fmt::format("config: unknown key '{}' in '{}'", k, where));
}

template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

const char* mode_name(sampling::ScaleMode m) { return m == sampling::ScaleMode::Log ? "log" : "linear"; }

} // namespace

RunConfig config_from_json(const json& j)
{
    RunConfig c;
    try {
        only_keys(j, "root", {"scenario", "solver", "domain", "sampling", "subspace", "trace", "output_dir", "threads"});
        if (j.contains("scenario")) {
            const auto& s = j["scenario"];
            only_keys(s, "scenario", {"L", "W", "n_ue", "n_sta", "n_channels", "area_width", "area_height", "timing",
                                      "payload_w", "payload_l", "los_weight", "shadow_margin_scale", "seed"});
            auto& sc = c.scenario;
            read(s, "L", sc.L);
            read(s, "W", sc.W);
            read(s, "n_ue", sc.n_ue);
            read(s, "n_sta", sc.n_sta);
            read(s, "n_channels", sc.n_channels);
            read(s, "area_width", sc.area_width);
            read(s, "area_height", sc.area_height);
            if (s.contains("timing")) {
                const auto t = s["timing"].get<std::vector<double>>();
                if (t.size() != sc.timing.t.size())
                    throw ConfigError(fmt::format("config: scenario.timing needs 6 entries, got {}", t.size()));
                std::copy(t.begin(), t.end(), sc.timing.t.begin());
            }
            read(s, "payload_w", sc.payload_w);
            read(s, "payload_l", sc.payload_l);
            read(s, "los_weight", sc.los_weight);
            read(s, "shadow_margin_scale", sc.shadow_margin_scale);
            read(s, "seed", sc.seed);
        }
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            only_keys(s, "solver", {"tol", "max_iter", "fallback_iter", "fallback_damping"});
            read(s, "tol", c.solver.tol);
            read(s, "max_iter", c.solver.max_iter);
            read(s, "fallback_iter", c.solver.fallback_iter);
            read(s, "fallback_damping", c.solver.fallback_damping);
        }
        if (j.contains("domain")) {
            const auto& d = j["domain"];
            only_keys(d, "domain", {"lower", "upper", "mode"});
            read(d, "lower", c.domain.lower);
            read(d, "upper", c.domain.upper);
            if (d.contains("mode")) {
                c.domain.mode.clear();
                for (const auto& m : d["mode"]) {
                    const auto name = m.get<std::string>();
                    if (name == "log")
                        c.domain.mode.push_back(sampling::ScaleMode::Log);
                    else if (name == "linear")
                        c.domain.mode.push_back(sampling::ScaleMode::Linear);
                    else
                        throw ConfigError(fmt::format("config: unknown scale mode '{}'", name));
                }
            }
        }
        if (j.contains("sampling")) {
            const auto& s = j["sampling"];
            only_keys(s, "sampling", {"n", "seed", "delta"});
            read(s, "n", c.sampling.n);
            read(s, "seed", c.sampling.seed);
            read(s, "delta", c.sampling.delta);
        }
        if (j.contains("subspace")) {
            const auto& s = j["subspace"];
            only_keys(s, "subspace", {"r", "mix_grid", "n_boundary"});
            read(s, "r", c.subspace.r);
            read(s, "mix_grid", c.subspace.mix_grid);
            read(s, "n_boundary", c.subspace.n_boundary);
        }
        if (j.contains("trace")) {
            const auto& s = j["trace"];
            only_keys(s, "trace", {"n_t", "n_inactive", "rk4_step", "profile_points", "multistart", "nm_max_evals"});
            read(s, "n_t", c.trace.n_t);
            read(s, "n_inactive", c.trace.n_inactive);
            read(s, "rk4_step", c.trace.rk4_step);
            read(s, "profile_points", c.trace.profile_points);
            read(s, "multistart", c.trace.multistart);
            read(s, "nm_max_evals", c.trace.nm_max_evals);
        }
        read(j, "output_dir", c.output_dir);
        read(j, "threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    }
    return c;
}

RunConfig load_config(const std::string& path)
{
    const std::string text = io::read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path, e.what()));
    }
    return config_from_json(j);
}

json to_json(const RunConfig& c)
{
    json j;
    const auto& s = c.scenario;
    j["scenario"] = {{"L", s.L},
                     {"W", s.W},
                     {"n_ue", s.n_ue},
                     {"n_sta", s.n_sta},
                     {"n_channels", s.n_channels},
                     {"area_width", s.area_width},
                     {"area_height", s.area_height},
                     {"timing", std::vector<double>(s.timing.t.begin(), s.timing.t.end())},
                     {"payload_w", s.payload_w},
                     {"payload_l", s.payload_l},
                     {"los_weight", s.los_weight},
                     {"shadow_margin_scale", s.shadow_margin_scale},
                     {"seed", s.seed}};
    j["solver"] = {{"tol", c.solver.tol},
                   {"max_iter", c.solver.max_iter},
                   {"fallback_iter", c.solver.fallback_iter},
                   {"fallback_damping", c.solver.fallback_damping}};
    std::vector<std::string> modes;
    for (auto m : c.domain.mode)
        modes.emplace_back(mode_name(m));
    j["domain"] = {{"lower", c.domain.lower}, {"upper", c.domain.upper}, {"mode", modes}};
    j["sampling"] = {{"n", c.sampling.n}, {"seed", c.sampling.seed}, {"delta", c.sampling.delta}};
    j["subspace"] = {{"r", c.subspace.r}, {"mix_grid", c.subspace.mix_grid}, {"n_boundary", c.subspace.n_boundary}};
    j["trace"] = {{"n_t", c.trace.n_t},
                  {"n_inactive", c.trace.n_inactive},
                  {"rk4_step", c.trace.rk4_step},
                  {"profile_points", c.trace.profile_points},
                  {"multistart", c.trace.multistart},
                  {"nm_max_evals", c.trace.nm_max_evals}};
    j["output_dir"] = c.output_dir;
    j["threads"] = c.threads;
    return j;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::string out;
    for (unsigned int i = 0; i < len; ++i)
        out += fmt::format("{:02x}", md[i]);
    return out;
}

std::string config_hash(const RunConfig& c)
{
    json j = to_json(c);
    j.erase("threads");
    j.erase("output_dir");
    return sha256_hex(j.dump());
}

void validate(const RunConfig& c)
{
    coex::validate(c.scenario);
    sampling::validate(c.domain);
    if (c.domain.dim() != coex::kNumParameters)
        throw ConfigError(fmt::format("config: domain has {} entries, the coexistence model takes {}",
                                      c.domain.dim(), coex::kNumParameters));
    if (!(c.solver.tol > 0.0) || c.solver.max_iter < 1 || c.solver.fallback_iter < 0 ||
        !(c.solver.fallback_damping > 0.0 && c.solver.fallback_damping <= 1.0))
        throw ConfigError("config: solver options out of range");
    if (c.sampling.n < c.domain.dim() + 1)
        throw ConfigError(fmt::format("config: sampling.n = {} is below D + 1 = {}", c.sampling.n, c.domain.dim() + 1));
    if (!(c.sampling.delta > 0.0))
        throw ConfigError("config: sampling.delta must be positive");
    if (c.subspace.r != 1 && c.subspace.r != 2)
        throw ConfigError(fmt::format("config: subspace.r = {} (only 1 and 2 are supported)", c.subspace.r));
    if (c.subspace.mix_grid < 2)
        throw ConfigError("config: subspace.mix_grid must be at least 2");
    if (c.subspace.n_boundary < 3)
        throw ConfigError("config: subspace.n_boundary must be at least 3");
    if (c.trace.n_t < 2 || c.trace.n_inactive < 1 || !(c.trace.rk4_step > 0.0) || c.trace.profile_points < 2 ||
        c.trace.multistart < 1 || c.trace.nm_max_evals < 1)
        throw ConfigError("config: trace options out of range");
}

} // namespace pareto::cli
