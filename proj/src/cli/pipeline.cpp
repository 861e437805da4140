#include "pareto/cli/pipeline.hpp"

#include "pareto/io/csv.hpp"
#include "pareto/parallel.hpp"
#include "pareto/random.hpp"
#include "pareto/subspace/active.hpp"
#include "pareto/subspace/zonotope.hpp"
#include "pareto/surrogate/quadratic.hpp"
#include "pareto/trace/trace.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>

namespace pareto::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string stage_name(Stage s)
{
    switch (s) {
    case Stage::Sample:
        return "sample";
    case Stage::Subspace:
        return "subspace";
    case Stage::Shadow:
        return "shadow";
    case Stage::Stretch:
        return "stretch";
    case Stage::Fit:
        return "fit";
    case Stage::Trace:
        return "trace";
    case Stage::Fronts:
        return "fronts";
    }
    return "unknown";
}

Stage parse_stage(const std::string& s)
{
    for (int k = static_cast<int>(first_stage); k <= static_cast<int>(last_stage); ++k) {
        const auto st = static_cast<Stage>(k);
        if (s == stage_name(st) || s == std::to_string(k))
            return st;
    }
    throw ConfigError(fmt::format("unknown stage '{}'", s));
}

std::vector<std::string> stage_outputs(Stage s)
{
    switch (s) {
    case Stage::Sample:
        return {"samples.csv", "gradients.json"};
    case Stage::Subspace:
        return {"eigenvalues_wifi.csv", "eigenvalues_laa.csv", "subspace.json"};
    case Stage::Shadow:
        return {"shadow_wifi.csv", "shadow_laa.csv", "zonotope.csv"};
    case Stage::Stretch:
        return {"stretch_samples.csv"};
    case Stage::Fit:
        return {"surrogates.json"};
    case Stage::Trace:
        return {"condition_profile.csv", "trace.csv"};
    case Stage::Fronts:
        return {"fronts_geodesic.csv", "fronts_linear.csv", "fronts_conditional.csv", "nondominated.csv",
                "fronts.json"};
    }
    return {};
}

namespace {

struct State {
    const RunConfig& cfg;
    fs::path dir;
    unsigned threads;
    sampling::CoexistenceModel model;
    sampling::UnitModel fn;

    std::optional<sampling::SampleSet> samples;
    std::optional<Mat> basis; // mixed D x r basis
    std::optional<sampling::SampleSet> stretch;
    std::optional<surrogate::QuadraticSurrogate> act_w, act_l, full_w, full_l;

    explicit State(const RunConfig& c)
        : cfg(c), dir(c.output_dir), threads(c.threads ? c.threads : default_thread_count()),
          model{c.scenario, c.domain, c.solver}, fn(model.as_function())
    {
    }

    std::string path(const std::string& name) const { return (dir / name).string(); }
    void write(const std::string& name, const std::string& text) const { io::write_file(path(name), text); }
    std::string read(const std::string& name) const { return io::read_file(path(name)); }
};

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

void require_r2(const State& st, Stage s)
{
    if (st.cfg.subspace.r != 2)
        throw ConfigError(fmt::format("stage '{}' needs subspace.r = 2", stage_name(s)));
}

// loaders for resumed runs ---------------------------------------------------

const sampling::SampleSet& need_samples(State& st, bool gradients)
{
    if (!st.samples) {
        auto s = sampling::samples_from_csv(st.read("samples.csv"));
        sampling::gradients_from_json(st.read("gradients.json"), s);
        st.samples = std::move(s);
    }
    if (gradients && !st.samples->gradients_w)
        throw ConfigError("gradients are missing from the sample artifacts");
    return *st.samples;
}

const Mat& need_basis(State& st)
{
    if (!st.basis) {
        const json j = json::parse(st.read("subspace.json"));
        st.basis = subspace::matrix_from_json(j.at("basis"));
    }
    return *st.basis;
}

const sampling::SampleSet& need_stretch(State& st)
{
    if (!st.stretch)
        st.stretch = sampling::samples_from_csv(st.read("stretch_samples.csv"));
    return *st.stretch;
}

void need_surrogates(State& st)
{
    if (st.act_w)
        return;
    const json j = json::parse(st.read("surrogates.json"));
    st.act_w = surrogate::surrogate_from_json(j.at("active").at("wifi"));
    st.act_l = surrogate::surrogate_from_json(j.at("active").at("laa"));
    st.full_w = surrogate::surrogate_from_json(j.at("full").at("wifi"));
    st.full_l = surrogate::surrogate_from_json(j.at("full").at("laa"));
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// stages ---------------------------------------------------------------------

void stage_sample(State& st)
{
    auto s = sampling::sample_uniform(st.cfg.domain, st.cfg.sampling.n, st.cfg.sampling.seed);
    sampling::BatchOptions bo;
    bo.with_gradients = true;
    bo.delta = st.cfg.sampling.delta;
    bo.threads = st.threads;
    s = sampling::evaluate_batch(std::move(s), st.fn, bo);
    st.write("samples.csv", sampling::samples_to_csv(s));
    st.write("gradients.json", sampling::gradients_to_json(s));
    st.samples = std::move(s);
}

json estimate_json(const subspace::SubspaceEstimate& e)
{
    return {{"network", e.network},
            {"n_samples", e.n_samples},
            {"eigenvalues", vec_json(e.eigenvalues)},
            {"eigenvectors", subspace::matrix_to_json(e.eigenvectors)},
            {"C", subspace::matrix_to_json(e.C)}};
}

io::CsvTable eigen_table(const subspace::SubspaceEstimate& e)
{
    io::CsvTable t;
    t.header = {"index", "eigenvalue", "relative"};
    for (Eigen::Index k = 0; k < e.eigenvalues.size(); ++k)
        t.add_row({static_cast<double>(k + 1), e.eigenvalues(k),
                   e.eigenvalues(0) > 0.0 ? e.eigenvalues(k) / e.eigenvalues(0) : 0.0});
    return t;
}

void stage_subspace(State& st)
{
    const auto& s = need_samples(st, true);
    const auto ew = subspace::estimate_c_matrix(*s.gradients_w, "wifi");
    const auto el = subspace::estimate_c_matrix(*s.gradients_l, "laa");
    st.write("eigenvalues_wifi.csv", eigen_table(ew).to_string());
    st.write("eigenvalues_laa.csv", eigen_table(el).to_string());

    const int r = st.cfg.subspace.r;
    subspace::MixOptions mo;
    mo.grid = st.cfg.subspace.mix_grid;
    mo.threads = st.threads;
    const auto mix =
        subspace::mix_subspaces(ew.leading(r), el.leading(r), s.thetas_unit, s.responses_w, s.responses_l, mo);

    json poly;
    const Mat g = subspace::project(mix.basis, s.thetas_unit);
    for (auto id : {NetworkId::WiFi, NetworkId::LAA}) {
        json row;
        for (int deg = 2; deg <= 5; ++deg)
            row[std::to_string(deg)] = surrogate::polynomial_r_squared(g, s.responses(id), deg);
        poly[std::string(to_string(id))] = row;
    }
    json j;
    j["r"] = r;
    j["s_star"] = mix.s_star;
    j["r2_w"] = mix.r2_w;
    j["r2_l"] = mix.r2_l;
    j["basis"] = subspace::matrix_to_json(mix.basis);
    j["basis_w"] = subspace::matrix_to_json(ew.leading(r));
    j["basis_l"] = subspace::matrix_to_json(el.leading(r));
    j["grid"] = {{"s", vec_json(mix.s_grid)}, {"r2_w", vec_json(mix.grid_r2_w)}, {"r2_l", vec_json(mix.grid_r2_l)}};
    j["polynomial_r2"] = poly;
    j["wifi"] = estimate_json(ew);
    j["laa"] = estimate_json(el);
    st.write("subspace.json", json_text(j));
    st.basis = mix.basis;
}

void stage_shadow(State& st)
{
    const auto& s = need_samples(st, false);
    const Mat& U = need_basis(st);
    st.write("shadow_wifi.csv", subspace::shadow_data(U, s.thetas_unit, s.responses_w).to_string());
    st.write("shadow_laa.csv", subspace::shadow_data(U, s.thetas_unit, s.responses_l).to_string());
    io::CsvTable z;
    if (U.cols() == 2) {
        const auto zono = subspace::zonotope_vertices(U);
        z.header = {"vertex", "gamma1", "gamma2"};
        for (std::size_t k = 0; k < zono.vertices.size(); ++k)
            z.add_row({static_cast<double>(k), zono.vertices[k].x(), zono.vertices[k].y()});
    } else {
        const double h = U.col(0).cwiseAbs().sum();
        z.header = {"vertex", "gamma1"};
        z.add_row({0.0, -h});
        z.add_row({1.0, h});
    }
    st.write("zonotope.csv", z.to_string());
}

subspace::InactiveSampler make_sampler(State& st)
{
    const Mat& U = need_basis(st);
    return subspace::InactiveSampler(U, subspace::zonotope_vertices(U));
}

void stage_stretch(State& st)
{
    require_r2(st, Stage::Stretch);
    const auto& s = need_samples(st, false);
    const auto sampler = make_sampler(st);
    const auto res = subspace::stretch_sample(sampler, s.thetas_unit, st.cfg.subspace.n_boundary,
                                              st.cfg.sampling.seed);
    sampling::SampleSet out;
    const Eigen::Index D = s.thetas_unit.cols();
    out.seed = st.cfg.sampling.seed;
    out.thetas_unit = res.unit;
    out.thetas_raw.resize(res.unit.rows(), D);
    for (Eigen::Index n = 0; n < res.unit.rows(); ++n)
        out.thetas_raw.row(n) = sampling::from_unit(res.unit.row(n).transpose(), st.cfg.domain).transpose();
    if (res.unit.rows() > 0) {
        sampling::BatchOptions bo;
        bo.threads = st.threads;
        out = sampling::evaluate_batch(std::move(out), st.fn, bo);
    } else {
        out.responses_w.resize(0);
        out.responses_l.resize(0);
    }
    st.write("stretch_samples.csv", sampling::samples_to_csv(out));
    st.stretch = std::move(out);
}

void stage_fit(State& st)
{
    require_r2(st, Stage::Fit);
    const auto& s = need_samples(st, false);
    const auto& extra = need_stretch(st);
    const Mat& U = need_basis(st);
    const Eigen::Index N = s.thetas_unit.rows(), M = extra.thetas_unit.rows();
    Mat X(N + M, s.thetas_unit.cols());
    X << s.thetas_unit, extra.thetas_unit;
    Vec fw(N + M), fl(N + M);
    fw << s.responses_w, extra.responses_w;
    fl << s.responses_l, extra.responses_l;
    const Mat g = subspace::project(U, X);
    std::vector<surrogate::QuadraticSurrogate> fits(4);
    parallel_for(4, st.threads, [&](std::size_t k) {
        switch (k) {
        case 0:
            fits[0] = surrogate::fit_psd_quadratic(g, fw);
            break;
        case 1:
            fits[1] = surrogate::fit_psd_quadratic(g, fl);
            break;
        case 2:
            fits[2] = surrogate::fit_psd_quadratic(s.thetas_unit, s.responses_w);
            break;
        default:
            fits[3] = surrogate::fit_psd_quadratic(s.thetas_unit, s.responses_l);
        }
    });
    st.act_w = fits[0];
    st.act_l = fits[1];
    st.full_w = fits[2];
    st.full_l = fits[3];
    json j;
    j["basis"] = subspace::matrix_to_json(U);
    j["augmented_rows"] = N + M;
    j["active"] = {{"wifi", surrogate::to_json(*st.act_w)}, {"laa", surrogate::to_json(*st.act_l)}};
    j["full"] = {{"wifi", surrogate::to_json(*st.full_w)}, {"laa", surrogate::to_json(*st.full_l)}};
    j["r2"] = {{"active_wifi", surrogate::r_squared(*st.act_w, g, fw)},
               {"active_laa", surrogate::r_squared(*st.act_l, g, fl)},
               {"full_wifi", surrogate::r_squared(*st.full_w, s.thetas_unit, s.responses_w)},
               {"full_laa", surrogate::r_squared(*st.full_l, s.thetas_unit, s.responses_l)}};
    st.write("surrogates.json", json_text(j));
}

void stage_trace(State& st)
{
    require_r2(st, Stage::Trace);
    need_surrogates(st);
    const auto sampler = make_sampler(st);
    const Vec t = trace::linspace(0.0, 1.0, st.cfg.trace.profile_points);
    const Vec ca = trace::condition_profile(*st.act_w, *st.act_l, t);
    const Vec cf = trace::condition_profile(*st.full_w, *st.full_l, t);
    io::CsvTable cp;
    cp.header = {"t", "cond_active", "cond_full"};
    for (Eigen::Index i = 0; i < t.size(); ++i)
        cp.add_row({t(i), ca(i), cf(i)});
    st.write("condition_profile.csv", cp.to_string());

    const auto raw = trace::quadratic_trace(*st.act_w, *st.act_l, t, [&](const Vec& x) {
        return sampler.zonotope().contains({x(0), x(1)}, 0.0);
    });
    const auto con = trace::constrained_trace(*st.act_w, *st.act_l, sampler.zonotope(), t);
    io::CsvTable tt;
    tt.header = {"t", "gamma1", "gamma2", "projected", "raw_gamma1", "raw_gamma2", "raw_feasible", "regularised"};
    for (Eigen::Index i = 0; i < t.size(); ++i)
        tt.add_row({t(i), con.points[i](0), con.points[i](1), con.projected[i] ? 1.0 : 0.0, raw.points[i](0),
                    raw.points[i](1), raw.feasible[i] ? 1.0 : 0.0, raw.regularised[i] ? 1.0 : 0.0});
    st.write("trace.csv", tt.to_string());
}

void stage_fronts(State& st)
{
    require_r2(st, Stage::Fronts);
    need_surrogates(st);
    const auto& s = need_samples(st, false);
    const auto sampler = make_sampler(st);
    const auto& tc = st.cfg.trace;
    const std::uint64_t seed = st.cfg.sampling.seed;

    const Vec t = trace::linspace(0.0, 1.0, tc.n_t);
    const auto active = trace::constrained_trace(*st.act_w, *st.act_l, sampler.zonotope(), t);

    trace::MaximizeOptions mo;
    mo.multistart = tc.multistart;
    mo.seed = seed;
    mo.threads = st.threads;
    mo.nm.max_evals = tc.nm_max_evals;
    const geometry::Point g0(active.points.front()(0), active.points.front()(1));
    const geometry::Point g1(active.points.back()(0), active.points.back()(1));
    const auto ends = trace::inactive_endpoints(st.fn, sampler, g0, g1, mo);
    const auto geo = trace::geodesic_front(st.fn, sampler, active, ends.zeta0, ends.zeta1, st.threads);

    const auto left = trace::maximize_throughput(st.fn, s.thetas_unit.cols(), 0.0, mo, &s.thetas_unit);
    const auto right = trace::maximize_throughput(st.fn, s.thetas_unit.cols(), 1.0, mo, &s.thetas_unit);
    const auto lin = trace::linear_front(st.fn, left.x, right.x, tc.n_t, st.threads);

    const auto cond = trace::conditional_front(st.fn, sampler, active, tc.n_inactive, seed, st.threads);

    st.write("fronts_geodesic.csv", trace::front_to_csv(geo).to_string());
    st.write("fronts_linear.csv", trace::front_to_csv(lin).to_string());
    st.write("fronts_conditional.csv", trace::front_to_csv(cond).to_string());

    std::vector<Throughputs> pts;
    for (Eigen::Index n = 0; n < s.responses_w.size(); ++n)
        pts.push_back({s.responses_w(n), s.responses_l(n)});
    io::CsvTable nd;
    nd.header = {"index", "f_w", "f_l"};
    for (auto i : trace::nondominated(pts))
        nd.add_row({static_cast<double>(i), pts[i].wifi, pts[i].laa});
    st.write("nondominated.csv", nd.to_string());

    const Eigen::Index last = geo.t.size() - 1;
    json j;
    j["best_sample"] = {{"f_w", s.responses_w.maxCoeff()}, {"f_l", s.responses_l.maxCoeff()}};
    j["geodesic_endpoints"] = {{"f_w_at_0", geo.f_w(0)}, {"f_l_at_1", geo.f_l(last)}};
    j["zeta0"] = vec_json(ends.zeta0);
    j["zeta1"] = vec_json(ends.zeta1);
    j["gamma0"] = {g0.x(), g0.y()};
    j["gamma1"] = {g1.x(), g1.y()};
    j["trace_projected"] = std::count(active.projected.begin(), active.projected.end(), true);
    j["maximizers"] = {{"wifi", {{"x", vec_json(left.x)}, {"f_w", left.f.wifi}, {"f_l", left.f.laa}}},
                       {"laa", {{"x", vec_json(right.x)}, {"f_w", right.f.wifi}, {"f_l", right.f.laa}}}};
    st.write("fronts.json", json_text(j));
}

void write_manifest(const State& st, json& manifest)
{
    manifest = json::object();
    manifest["config_hash"] = config_hash(st.cfg);
    manifest["seed"] = st.cfg.sampling.seed;
    manifest["n"] = st.cfg.sampling.n;
    json files = json::array();
    for (int k = static_cast<int>(first_stage); k <= static_cast<int>(last_stage); ++k)
        for (const auto& name : stage_outputs(static_cast<Stage>(k))) {
            if (!fs::exists(st.dir / name))
                continue;
            const std::string bytes = st.read(name);
            files.push_back({{"file", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
        }
    manifest["files"] = files;
    st.write("manifest.json", json_text(manifest));
}

} // namespace

json run_pipeline(const RunConfig& config, Stage from, Stage to, std::ostream* log)
{
    validate(config);
    if (static_cast<int>(from) > static_cast<int>(to))
        throw ConfigError("first stage comes after the last stage");
    State st(config);
    fs::create_directories(st.dir);
    for (int k = static_cast<int>(from); k <= static_cast<int>(to); ++k) {
        const auto stage = static_cast<Stage>(k);
        if (log)
            *log << fmt::format("[{}/{}] {}\n", k, static_cast<int>(last_stage), stage_name(stage)) << std::flush;
        try {
            switch (stage) {
            case Stage::Sample:
                stage_sample(st);
                break;
            case Stage::Subspace:
                stage_subspace(st);
                break;
            case Stage::Shadow:
                stage_shadow(st);
                break;
            case Stage::Stretch:
                stage_stretch(st);
                break;
            case Stage::Fit:
                stage_fit(st);
                break;
            case Stage::Trace:
                stage_trace(st);
                break;
            case Stage::Fronts:
                stage_fronts(st);
                break;
            }
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(stage, e.what());
        }
    }
    json manifest;
    write_manifest(st, manifest);
    return manifest;
}

} // namespace pareto::cli
