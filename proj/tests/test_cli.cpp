#include "pareto/cli/config.hpp"
#include "pareto/cli/pipeline.hpp"
#include "pareto/cli/validate.hpp"
#include "pareto/io/csv.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using namespace pareto;
using namespace pareto::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run shell(const std::string& args)
{
    const std::string cmd = std::string(PARETO_TRACE_BIN) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), p))
        out += buf.data();
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("pareto_trace_test_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small(const fs::path& dir, std::size_t n = 200)
{
    RunConfig c;
    c.sampling.n = n;
    c.output_dir = dir.string();
    c.trace.multistart = 4;
    c.trace.nm_max_evals = 800;
    c.threads = 1;
    return c;
}

std::string read(const fs::path& p) { return io::read_file(p.string()); }

} // namespace

TEST_CASE("config JSON round trip, hashing and validation")
{
    RunConfig c;
    c.sampling.seed = 9;
    c.scenario.timing.t[0] = 11.0;
    c.domain.upper[0] = 512.0;
    const auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));

    auto t = c;
    t.threads = 7;
    t.output_dir = "elsewhere";
    CHECK(config_hash(t) == config_hash(c));
    t.sampling.seed = 10;
    CHECK(config_hash(t) != config_hash(c));

    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"sampling", {{"nn", 3}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"sampling", {{"n", "many"}}}}), ConfigError);

    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    auto bad = RunConfig{};
    bad.subspace.r = 3;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = RunConfig{};
    bad.sampling.n = 5;
    CHECK_THROWS(validate(bad));
}

TEST_CASE("stage names")
{
    CHECK(parse_stage("fit") == Stage::Fit);
    CHECK(parse_stage("3") == Stage::Shadow);
    CHECK_THROWS_AS(parse_stage("nope"), ConfigError);
    for (int s = 1; s <= 7; ++s)
        CHECK(parse_stage(stage_name(static_cast<Stage>(s))) == static_cast<Stage>(s));
}

TEST_CASE("validation suite")
{
    const auto rep = run_validation(RunConfig{}, 50);
    CHECK(rep.ok());
    CHECK(rep.checks.size() == 8);

    RunConfig broken;
    broken.scenario.timing.t[2] = -5.0;
    const auto bad = run_validation(broken, 50);
    CHECK_FALSE(bad.ok());
    CHECK(bad.table().find("TimingVector") != std::string::npos);
}

TEST_CASE("pipeline: artifacts, manifest, determinism, resume")
{
    const auto a = scratch("a"), b = scratch("b");
    auto ca = small(a), cb = small(b);
    cb.threads = 3;
    const auto man = run_pipeline(ca);
    run_pipeline(cb);

    std::size_t listed = 0;
    for (int s = 1; s <= 7; ++s)
        listed += stage_outputs(static_cast<Stage>(s)).size();
    CHECK(man["files"].size() == listed);
    CHECK(man["seed"] == ca.sampling.seed);
    CHECK(man["config_hash"] == config_hash(ca));
    for (const auto& f : man["files"]) {
        const auto name = f["file"].get<std::string>();
        const auto bytes = read(a / name);
        CHECK(f["sha256"] == sha256_hex(bytes));
        CHECK(f["bytes"] == bytes.size());
        CHECK(bytes == read(b / name));
    }
    CHECK(read(a / "manifest.json") == read(b / "manifest.json"));

    const auto rows = io::CsvTable::parse(read(a / "fronts_geodesic.csv")).rows.size();
    CHECK(rows == static_cast<std::size_t>(ca.trace.n_t));

    // Resume from the fit stage: upstream artifacts are reloaded, output unchanged.
    const auto before = read(a / "fronts_linear.csv");
    fs::remove(a / "surrogates.json");
    fs::remove(a / "fronts_linear.csv");
    run_pipeline(ca, Stage::Fit);
    CHECK(read(a / "fronts_linear.csv") == before);
    CHECK(read(a / "manifest.json") == read(b / "manifest.json"));

    // Missing upstream artifacts name the stage that needed them.
    const auto c = scratch("c");
    CHECK_THROWS_WITH_AS(run_pipeline(small(c), Stage::Fit), doctest::Contains("fit"), StageError);

    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("one-dimensional reduction stops after the shadow stage")
{
    const auto d = scratch("r1");
    auto c = small(d);
    c.subspace.r = 1;
    run_pipeline(c, Stage::Sample, Stage::Shadow);
    CHECK(fs::exists(d / "zonotope.csv"));
    CHECK(io::CsvTable::parse(read(d / "zonotope.csv")).rows.size() == 2);
    CHECK_THROWS(run_pipeline(c, Stage::Stretch, Stage::Stretch));
    fs::remove_all(d);
}

TEST_CASE("command-line tool")
{
    auto r = shell("--help");
    CHECK(r.code == 0);
    CHECK(r.out.find("pipeline") != std::string::npos);

    r = shell("eval");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["f_w"].get<double>() > 0.0);
    CHECK(j["p_T"].size() == 6);

    const auto nom = coex::ParameterVector::nominal();
    std::string theta = "4";
    for (std::size_t i = 1; i < 17; ++i)
        theta += "," + io::format_double(nom[i]);
    r = shell("eval --theta " + theta);
    CHECK(r.code == 2);
    CHECK(r.out.find("wifi_cw_min") != std::string::npos);

    r = shell("eval --theta 1,2,3");
    CHECK(r.code == 2);

    r = shell("nosuchcommand");
    CHECK(r.code != 0);

    const auto d = scratch("cli");
    r = shell("sample --n 40 --output-dir " + d.string());
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "samples.csv"));
    r = shell("nondominated --output-dir " + d.string());
    CHECK(r.code == 0);
    CHECK(r.out.rfind("index,f_w,f_l", 0) == 0);
    r = shell("fit --n 40 --output-dir " + d.string());
    CHECK(r.code == 1);
    CHECK(r.out.find("stage") != std::string::npos);
    fs::remove_all(d);
}
