#include "pareto/sampling/sampling.hpp"

#include "pareto/io/csv.hpp"
#include "pareto/parallel.hpp"
#include "pareto/random.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>

namespace pareto::sampling {

ParameterDomain ParameterDomain::coexistence_default()
{
    ParameterDomain d;
    for (const auto& info : coex::parameter_table()) {
        d.lower.push_back(info.lower);
        d.upper.push_back(info.upper);
        d.mode.push_back(info.lower > 0.0 ? ScaleMode::Log : ScaleMode::Linear);
    }
    return d;
}

void validate(const ParameterDomain& domain)
{
    if (domain.lower.size() != domain.upper.size() || domain.lower.size() != domain.mode.size())
        throw DimensionError("domain bound and scale-mode lists disagree in length");
    if (domain.lower.empty())
        throw DimensionError("domain has no parameters");
    for (std::size_t i = 0; i < domain.dim(); ++i) {
        if (!std::isfinite(domain.lower[i]) || !std::isfinite(domain.upper[i]) ||
            !(domain.lower[i] < domain.upper[i]))
            throw DomainError(fmt::format("domain entry {}: lower {} must be below upper {}",
                                          i + 1, domain.lower[i], domain.upper[i]));
        if (domain.mode[i] == ScaleMode::Log && !(domain.lower[i] > 0.0))
            throw DomainError(
                fmt::format("domain entry {}: Log scaling requires a positive lower bound", i + 1));
    }
}

Vec scale_to_unit(const Vec& raw, const ParameterDomain& domain)
{
    const std::size_t D = domain.dim();
    if (static_cast<std::size_t>(raw.size()) != D)
        throw DimensionError(fmt::format("expected {} parameters, got {}", D, raw.size()));
    Vec u(raw.size());
    for (std::size_t i = 0; i < D; ++i) {
        const double lo = domain.lower[i];
        const double hi = domain.upper[i];
        const double v = raw[static_cast<Eigen::Index>(i)];
        if (!(v >= lo && v <= hi))
            throw DomainError(fmt::format("parameter {} = {} outside [{}, {}]", i + 1, v, lo, hi));
        double x;
        if (domain.mode[i] == ScaleMode::Log) {
            const double llo = std::log(lo);
            const double lhi = std::log(hi);
            x = (2.0 * std::log(v) - (lhi + llo)) / (lhi - llo);
        } else {
            x = (2.0 * v - (hi + lo)) / (hi - lo);
        }
        u[static_cast<Eigen::Index>(i)] = std::clamp(x, -1.0, 1.0);
    }
    return u;
}

Vec from_unit(const Vec& unit, const ParameterDomain& domain)
{
    const std::size_t D = domain.dim();
    if (static_cast<std::size_t>(unit.size()) != D)
        throw DimensionError(fmt::format("expected {} unit coordinates, got {}", D, unit.size()));
    Vec raw(unit.size());
    for (std::size_t i = 0; i < D; ++i) {
        const double lo = domain.lower[i];
        const double hi = domain.upper[i];
        const double x = unit[static_cast<Eigen::Index>(i)];
        double v;
        if (x == -1.0) {
            v = lo;
        } else if (x == 1.0) {
            v = hi;
        } else if (domain.mode[i] == ScaleMode::Log) {
            const double llo = std::log(lo);
            const double lhi = std::log(hi);
            v = std::exp(0.5 * (x * (lhi - llo) + (lhi + llo)));
        } else {
            v = 0.5 * (x * (hi - lo) + (hi + lo));
        }
        raw[static_cast<Eigen::Index>(i)] = v;
    }
    return raw;
}

Throughputs CoexistenceModel::operator()(const Vec& unit) const
{
    const Vec raw = from_unit(unit, domain);
    return coex::throughput(coex::ParameterVector::from(std::span<const double>(raw.data(),
                                                                                 raw.size())),
                            scenario, solver);
}

UnitModel CoexistenceModel::as_function() const
{
    return [self = *this](const Vec& unit) { return self(unit); };
}

const Mat& SampleSet::gradients(NetworkId id) const
{
    const auto& g = id == NetworkId::WiFi ? gradients_w : gradients_l;
    if (!g)
        throw DomainError("sample set carries no gradients");
    return *g;
}

void validate(const SampleSet& s)
{
    const auto n = s.thetas_unit.rows();
    if (s.thetas_raw.rows() != n || s.thetas_raw.cols() != s.thetas_unit.cols())
        throw DimensionError("unit and raw coordinate matrices disagree in shape");
    if (s.responses_w.size() != 0 && (s.responses_w.size() != n || s.responses_l.size() != n))
        throw DimensionError("response vectors do not match the sample count");
    for (const auto* g : {&s.gradients_w, &s.gradients_l})
        if (*g && ((*g)->rows() != n || (*g)->cols() != s.thetas_unit.cols()))
            throw DimensionError("gradient matrix does not match the sample shape");
    if (n > 0 && s.thetas_unit.cwiseAbs().maxCoeff() > 1.0)
        throw DomainError("unit samples must lie in [-1, 1]");
}

SampleSet sample_uniform(const ParameterDomain& domain, std::size_t n, std::uint64_t seed)
{
    validate(domain);
    if (n == 0)
        throw DomainError("sample count must be at least 1");
    const auto D = static_cast<Eigen::Index>(domain.dim());
    SampleSet s;
    s.seed = seed;
    s.thetas_unit.resize(static_cast<Eigen::Index>(n), D);
    s.thetas_raw.resize(static_cast<Eigen::Index>(n), D);
    for (std::size_t i = 0; i < n; ++i) {
        Stream rng = Stream::derive(seed, stream_tag::sampling, i);
        Vec u(D);
        for (Eigen::Index j = 0; j < D; ++j)
            u[j] = rng.uniform(-1.0, 1.0);
        const auto r = static_cast<Eigen::Index>(i);
        s.thetas_unit.row(r) = u.transpose();
        s.thetas_raw.row(r) = from_unit(u, domain).transpose();
    }
    return s;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double delta)
{
    if (!(delta > 0.0))
        throw DomainError("finite-difference step must be positive");
    const double f0 = f(x);
    Vec g(x.size());
    Vec xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + delta;
        g[i] = (f(xp) - f0) / delta;
        xp[i] = x[i];
    }
    return g;
}

PairGradient fd_gradient_pair(const UnitModel& model, const Vec& x, double delta)
{
    if (!(delta > 0.0))
        throw DomainError("finite-difference step must be positive");
    PairGradient out;
    out.value = model(x);
    out.wifi.resize(x.size());
    out.laa.resize(x.size());
    Vec xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + delta;
        const Throughputs fp = model(xp);
        out.wifi[i] = (fp.wifi - out.value.wifi) / delta;
        out.laa[i] = (fp.laa - out.value.laa) / delta;
        xp[i] = x[i];
    }
    return out;
}

SampleSet evaluate_batch(SampleSet samples, const UnitModel& model, const BatchOptions& opts)
{
    validate(samples);
    const std::size_t n = samples.size();
    const auto D = samples.thetas_unit.cols();

    struct Row {
        bool ok = false;
        Throughputs f;
        Vec gw;
        Vec gl;
    };
    std::vector<Row> rows(n);
    parallel_for(n, opts.threads, [&](std::size_t i) {
        const Vec x = samples.thetas_unit.row(static_cast<Eigen::Index>(i)).transpose();
        Row& row = rows[i];
        try {
            if (opts.with_gradients) {
                PairGradient g = fd_gradient_pair(model, x, opts.delta);
                row.f = g.value;
                row.gw = std::move(g.wifi);
                row.gl = std::move(g.laa);
            } else {
                row.f = model(x);
            }
            row.ok = std::isfinite(row.f.wifi) && std::isfinite(row.f.laa) &&
                     (!opts.with_gradients || (row.gw.allFinite() && row.gl.allFinite()));
        } catch (const Error&) {
            row.ok = false;
        }
    });

    std::size_t good = 0;
    for (const auto& r : rows)
        good += r.ok ? 1 : 0;
    const std::size_t failed = n - good;
    if (static_cast<double>(failed) > opts.max_failure_fraction * static_cast<double>(n))
        throw OptimizationError(fmt::format("{} of {} samples failed to evaluate", failed, n));

    SampleSet out;
    out.seed = samples.seed;
    out.delta = opts.delta;
    out.failed = samples.failed + failed;
    out.evaluations = samples.evaluations + n * (opts.with_gradients ? D + 1 : 1);
    const auto g = static_cast<Eigen::Index>(good);
    out.thetas_unit.resize(g, D);
    out.thetas_raw.resize(g, D);
    out.responses_w.resize(g);
    out.responses_l.resize(g);
    if (opts.with_gradients) {
        out.gradients_w = Mat(g, D);
        out.gradients_l = Mat(g, D);
    }
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].ok)
            continue;
        const auto src = static_cast<Eigen::Index>(i);
        out.thetas_unit.row(k) = samples.thetas_unit.row(src);
        out.thetas_raw.row(k) = samples.thetas_raw.row(src);
        out.responses_w[k] = rows[i].f.wifi;
        out.responses_l[k] = rows[i].f.laa;
        if (opts.with_gradients) {
            out.gradients_w->row(k) = rows[i].gw.transpose();
            out.gradients_l->row(k) = rows[i].gl.transpose();
        }
        ++k;
    }
    return out;
}

std::string samples_to_csv(const SampleSet& s)
{
    io::CsvTable t;
    const auto D = s.thetas_unit.cols();
    for (Eigen::Index j = 0; j < D; ++j)
        t.header.push_back(fmt::format("u{}", j + 1));
    for (Eigen::Index j = 0; j < D; ++j)
        t.header.push_back(fmt::format("theta{}", j + 1));
    t.header.push_back("f_w");
    t.header.push_back("f_l");
    const bool has_f = s.has_responses();
    for (Eigen::Index i = 0; i < s.thetas_unit.rows(); ++i) {
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(2 * D + 2));
        for (Eigen::Index j = 0; j < D; ++j)
            row.push_back(s.thetas_unit(i, j));
        for (Eigen::Index j = 0; j < D; ++j)
            row.push_back(s.thetas_raw(i, j));
        row.push_back(has_f ? s.responses_w[i] : std::nan(""));
        row.push_back(has_f ? s.responses_l[i] : std::nan(""));
        t.add_row(std::move(row));
    }
    return t.to_string();
}

SampleSet samples_from_csv(const std::string& text)
{
    const auto t = io::CsvTable::parse(text);
    if (t.header.size() < 4 || (t.header.size() - 2) % 2 != 0)
        throw ConfigError("sample CSV has an unexpected column layout");
    const auto D = static_cast<Eigen::Index>((t.header.size() - 2) / 2);
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    SampleSet s;
    s.thetas_unit.resize(n, D);
    s.thetas_raw.resize(n, D);
    s.responses_w.resize(n);
    s.responses_l.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = t.rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < D; ++j) {
            s.thetas_unit(i, j) = row[static_cast<std::size_t>(j)];
            s.thetas_raw(i, j) = row[static_cast<std::size_t>(D + j)];
        }
        s.responses_w[i] = row[static_cast<std::size_t>(2 * D)];
        s.responses_l[i] = row[static_cast<std::size_t>(2 * D + 1)];
    }
    return s;
}

namespace {

nlohmann::json matrix_to_json(const Mat& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

Mat matrix_from_json(const nlohmann::json& j)
{
    const auto n = static_cast<Eigen::Index>(j.size());
    const auto d = n > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Mat m(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != d)
            throw ConfigError("ragged gradient matrix in sidecar");
        for (Eigen::Index c = 0; c < d; ++c)
            m(r, c) = j[r][c].get<double>();
    }
    return m;
}

} // namespace

std::string gradients_to_json(const SampleSet& s)
{
    nlohmann::json j;
    j["delta"] = s.delta;
    j["seed"] = s.seed;
    j["failed"] = s.failed;
    j["evaluations"] = s.evaluations;
    j["wifi"] = matrix_to_json(s.gradients(NetworkId::WiFi));
    j["laa"] = matrix_to_json(s.gradients(NetworkId::LAA));
    return j.dump() + "\n";
}

void gradients_from_json(const std::string& text, SampleSet& s)
{
    const auto j = nlohmann::json::parse(text);
    s.delta = j.at("delta").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.failed = j.at("failed").get<std::size_t>();
    s.evaluations = j.at("evaluations").get<std::size_t>();
    s.gradients_w = matrix_from_json(j.at("wifi"));
    s.gradients_l = matrix_from_json(j.at("laa"));
    validate(s);
}

} // namespace pareto::sampling
