#include "ksflux/config.hpp"

#include "ksflux/regime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <type_traits>
#include <random>
#include <set>

#ifndef KSFLUX_VERSION
#define KSFLUX_VERSION "0.0.0"
#endif

namespace ksflux {

std::string tool_version()
{
    return "ksflux " KSFLUX_VERSION;
}

namespace {

using json = nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Reads one JSON object, remembering which keys were used so that
// leftovers can be reported as unknown.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw ConfigError(where() + "expected an object");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    double number(const char* key, double fallback)
    {
        const json* v = take(key);
        if (!v) return fallback;
        if (v->is_string()) {
            const auto s = v->get<std::string>();
            if (s == "inf") return kInf;
            throw ConfigError(where(key) + "expected a number, got \"" + s + "\"");
        }
        if (!v->is_number()) throw ConfigError(where(key) + "expected a number");
        return v->get<double>();
    }

    /// Returns nullopt for "auto" or absence.
    std::optional<double> number_or_auto(const char* key)
    {
        const json* v = take(key);
        if (!v || (v->is_string() && v->get<std::string>() == "auto")) return std::nullopt;
        if (v->is_string() && v->get<std::string>() == "inf") return kInf;
        if (!v->is_number()) throw ConfigError(where(key) + "expected a number, \"inf\" or \"auto\"");
        return v->get<double>();
    }

    long long integer(const char* key, long long fallback)
    {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ConfigError(where(key) + "expected an integer");
        return v->get<long long>();
    }

    std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback)
    {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
            throw ConfigError(where(key) + "expected a nonnegative integer");
        }
        return v->get<std::uint64_t>();
    }

    bool boolean(const char* key, bool fallback)
    {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(where(key) + "expected true or false");
        return v->get<bool>();
    }

    std::string string(const char* key, const std::string& fallback)
    {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(where(key) + "expected a string");
        return v->get<std::string>();
    }

    const json* take(const char* key)
    {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) {
                throw ConfigError(where(it.key().c_str()) + "unknown key");
            }
        }
    }

    std::string where(const char* key = nullptr) const
    {
        std::string p = key ? child_path(key) : (path_.empty() ? std::string("config") : path_);
        return p + ": ";
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

template <class T, std::size_t N>
std::array<T, N> pair_or_scalar(Section& s, const char* key, std::array<T, N> fallback)
{
    const json* v = s.take(key);
    if (!v) return fallback;
    std::array<T, N> out = fallback;
    auto convert = [&](const json& x) {
        if constexpr (std::is_integral_v<T>) {
            if (!x.is_number_integer()) throw ConfigError(s.where(key) + "expected integers");
        } else {
            if (!x.is_number()) throw ConfigError(s.where(key) + "expected numbers");
        }
        return x.get<T>();
    };
    if (v->is_array()) {
        if (v->empty() || v->size() > N) throw ConfigError(s.where(key) + "expected 1 or 2 entries");
        for (std::size_t k = 0; k < v->size(); ++k) out[k] = convert((*v)[k]);
        if (v->size() == 1) out[1] = out[0];
    } else {
        out[0] = convert(*v);
        out[1] = out[0];
    }
    return out;
}

json number_json(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

} // namespace

void RunConfig::validate() const
{
    try {
        model.validate();
        controls.validate();
        functionals.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (model.n != grid.dimension) throw ConfigError("model.n must equal grid.dimension");
    const auto& f = initial.family;
    if (f != "constant" && f != "cosine" && f != "gaussian" && f != "noise") {
        throw ConfigError("initial.family: unknown family '" + f + "'");
    }
    if (!(initial.mean > 0.0)) throw ConfigError("initial.mean > 0 required");
    if (!(initial.amplitude >= 0.0)) throw ConfigError("initial.amplitude >= 0 required");
    if (f == "cosine" && initial.amplitude > initial.mean) {
        throw ConfigError("initial.amplitude <= initial.mean required for the cosine family");
    }
    if (f == "noise" && initial.amplitude > 1.0) {
        throw ConfigError("initial.amplitude <= 1 required for the noise family (relative amplitude)");
    }
    if (initial.mode < 0) throw ConfigError("initial.mode >= 0 required");
    if (!(initial.width > 0.0)) throw ConfigError("initial.width > 0 required");
    if (initial.v0 != "u-theta" && initial.v0 != "zero") throw ConfigError("initial.v0 must be \"u-theta\" or \"zero\"");
    if (record_every < 1) throw ConfigError("record_every >= 1 required");
    if (output.snapshot_every < 0) throw ConfigError("output.snapshot_every >= 0 required");
}

RunConfig parse_config(const json& j)
{
    RunConfig c;
    Section root(j, "");
    root.take("version");

    if (const json* g = root.take("grid")) {
        Section s(*g, "grid");
        try {
            c.grid.mode = grid_mode_from_string(s.string("mode", to_string(c.grid.mode)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("grid.mode: ") + e.what());
        }
        c.grid.dimension = static_cast<int>(s.integer("dimension", c.grid.mode == GridMode::Cartesian2D ? 2 : 1));
        c.grid.extent = pair_or_scalar<double, 2>(s, "extent", c.grid.extent);
        c.grid.cells = pair_or_scalar<int, 2>(s, "cells", c.grid.cells);
        s.finish();
    }
    if (c.grid.mode != GridMode::Cartesian2D) {
        c.grid.extent[1] = 1.0;
        c.grid.cells[1] = 1;
    }
    try {
        build_grid(c.grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }

    c.model.n = c.grid.dimension;
    if (const json* m = root.take("model")) {
        Section s(*m, "model");
        c.model.chi = s.number("chi", c.model.chi);
        c.model.p = s.number("p", c.model.p);
        c.model.theta = s.number("theta", c.model.theta);
        c.model.eps = s.number("eps", c.model.eps);
        c.model.n = static_cast<int>(s.integer("n", c.model.n));
        s.finish();
    }
    try {
        c.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }

    if (const json* i = root.take("initial")) {
        Section s(*i, "initial");
        c.initial.family = s.string("family", c.initial.family);
        c.initial.mean = s.number("mean", c.initial.mean);
        c.initial.amplitude = s.number("amplitude", c.initial.amplitude);
        c.initial.mode = static_cast<int>(s.integer("mode", c.initial.mode));
        c.initial.width = s.number("width", c.initial.width);
        c.initial.center = s.number("center", c.initial.center);
        c.initial.v0 = s.string("v0", c.initial.v0);
        c.initial.mollify = s.boolean("mollify", c.initial.mollify);
        s.finish();
    }

    if (const json* k = root.take("controls")) {
        Section s(*k, "controls");
        auto& t = c.controls;
        t.dt_max = s.number("dt_max", t.dt_max);
        t.dt_min = s.number("dt_min", t.dt_min);
        t.cfl_safety = s.number("cfl_safety", t.cfl_safety);
        t.blowup_linf_threshold = s.number("blowup_linf_threshold", t.blowup_linf_threshold);
        t.t_end = s.number("t_end", t.t_end);
        t.diffusion_bound = s.boolean("diffusion_bound", t.diffusion_bound);
        t.fixed_dt = s.boolean("fixed_dt", t.fixed_dt);
        t.cg_tolerance = s.number("cg_tolerance", t.cg_tolerance);
        s.finish();
    }

    // Functionals: anything left on auto comes from the audit witnesses.
    FunctionalSpec resolved = FunctionalSpec::from_audit(audit({c.model.n, c.model.theta, c.model.p}));
    std::optional<std::vector<double>> q_set;
    const json* f = root.take("functionals");
    if (f && f->is_string() && f->get<std::string>() == "auto") f = nullptr;
    if (f) {
        Section s(*f, "functionals");
        if (const json* qs = s.take("q_set"); qs && !(qs->is_string() && qs->get<std::string>() == "auto")) {
            if (!qs->is_array()) throw ConfigError("functionals.q_set: expected an array or \"auto\"");
            std::vector<double> v;
            for (const auto& x : *qs) {
                if (!x.is_number()) throw ConfigError("functionals.q_set: expected numbers");
                v.push_back(x.get<double>());
            }
            q_set = v;
        }
        if (auto v = s.number_or_auto("s")) resolved.s = *v;
        if (auto v = s.number_or_auto("q_f1")) resolved.q_f1 = *v;
        if (auto v = s.number_or_auto("q_f2")) resolved.q_f2 = *v;
        resolved.c_f1 = s.number("c_f1", resolved.c_f1);
        s.finish();
    }
    if (q_set) {
        resolved.q_set = *q_set;
    } else {
        resolved.q_set = {1.0, resolved.q_f1, resolved.q_f2, 2.0};
        std::sort(resolved.q_set.begin(), resolved.q_set.end());
        resolved.q_set.erase(std::unique(resolved.q_set.begin(), resolved.q_set.end()), resolved.q_set.end());
    }
    c.functionals = resolved;

    c.record_every = static_cast<int>(root.integer("record_every", c.record_every));
    if (const json* o = root.take("output")) {
        Section s(*o, "output");
        c.output.dir = s.string("dir", c.output.dir);
        c.output.csv = s.string("csv", c.output.csv);
        c.output.snapshots = s.string("snapshots", c.output.snapshots);
        c.output.snapshot_every = static_cast<int>(s.integer("snapshot_every", c.output.snapshot_every));
        s.finish();
    }
    c.seed = root.unsigned_integer("seed", c.seed);
    root.finish();
    c.validate();
    return c;
}

RunConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

nlohmann::ordered_json to_json(const RunConfig& c)
{
    nlohmann::ordered_json j;
    j["grid"] = {{"mode", to_string(c.grid.mode)},
                 {"dimension", c.grid.dimension},
                 {"extent", {c.grid.extent[0], c.grid.extent[1]}},
                 {"cells", {c.grid.cells[0], c.grid.cells[1]}}};
    j["model"] = {{"chi", c.model.chi}, {"p", c.model.p}, {"theta", c.model.theta}, {"eps", c.model.eps},
                  {"n", c.model.n}};
    j["initial"] = {{"family", c.initial.family}, {"mean", c.initial.mean},     {"amplitude", c.initial.amplitude},
                    {"mode", c.initial.mode},     {"width", c.initial.width},   {"center", c.initial.center},
                    {"v0", c.initial.v0},         {"mollify", c.initial.mollify}};
    const auto& t = c.controls;
    j["controls"] = {{"dt_max", t.dt_max},
                     {"dt_min", t.dt_min},
                     {"cfl_safety", t.cfl_safety},
                     {"blowup_linf_threshold", number_json(t.blowup_linf_threshold)},
                     {"t_end", t.t_end},
                     {"diffusion_bound", t.diffusion_bound},
                     {"fixed_dt", t.fixed_dt},
                     {"cg_tolerance", t.cg_tolerance}};
    j["functionals"] = {{"q_set", c.functionals.q_set},
                        {"s", number_json(c.functionals.s)},
                        {"q_f1", c.functionals.q_f1},
                        {"c_f1", c.functionals.c_f1},
                        {"q_f2", c.functionals.q_f2}};
    j["record_every"] = c.record_every;
    j["output"] = {{"dir", c.output.dir},
                   {"csv", c.output.csv},
                   {"snapshots", c.output.snapshots},
                   {"snapshot_every", c.output.snapshot_every}};
    j["seed"] = c.seed;
    return j;
}

InitialData build_initial_data(const RunConfig& c, const GridPtr& grid)
{
    const auto& in = c.initial;
    const double lx = grid->extent(0);
    const double ly = grid->extent(1);
    const bool two_d = grid->axes() == 2;
    const double pi = std::numbers::pi;

    GridFunction u(grid);
    if (in.family == "constant") {
        u = GridFunction(grid, in.mean);
    } else if (in.family == "cosine") {
        u = sample(grid, [&](double x, double y) {
            const double wave = two_d ? 0.5 * (std::cos(in.mode * pi * x / lx) + std::cos(in.mode * pi * y / ly))
                                      : std::cos(in.mode * pi * x / lx);
            return in.mean + in.amplitude * wave;
        });
    } else if (in.family == "gaussian") {
        u = sample(grid, [&](double x, double y) {
            const double dx = x / lx - in.center;
            const double dy = two_d ? y / ly - in.center : 0.0;
            return in.mean + in.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * in.width * in.width));
        });
    } else {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (double& v : u.values()) {
            v = in.mean * (1.0 + in.amplitude * unit(rng));
        }
    }
    if (in.family == "gaussian" || in.family == "noise") {
        // Rescale so the mean is exactly the requested one.
        const double scale = in.mean * grid->measure() / integrate(u);
        for (double& x : u.values()) x *= scale;
    }

    GridFunction v(grid);
    if (in.v0 == "u-theta") {
        v = production(u, c.model);
    }
    InitialData data{u, v};
    if (in.mollify && c.model.eps > 0.0) {
        MollifierOptions opts;
        opts.keep_v0 = std::isinf(c.functionals.s);
        data = mollify_initial_data(data, c.model.eps, opts);
    }
    data.validate();
    return data;
}

std::string resolve_output_dir(const std::string& configured)
{
    if (const char* env = std::getenv("KSFLUX_OUTPUT_DIR"); env && *env) {
        return env;
    }
    return configured;
}

} // namespace ksflux
