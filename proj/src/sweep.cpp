#include "ksflux/sweep.hpp"

#include "ksflux/output.hpp"
#include "ksflux/regime.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

namespace ksflux {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

template <class T>
std::vector<T> list_of(const json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError(std::string(key) + ": missing");
    }
    std::vector<T> out;
    if (it->is_array()) {
        for (const auto& x : *it) {
            if (!x.is_number()) throw ConfigError(std::string(key) + ": expected numbers");
            if constexpr (std::is_integral_v<T>) {
                if (!x.is_number_integer()) throw ConfigError(std::string(key) + ": expected integers");
            }
            out.push_back(x.get<T>());
        }
    } else if (it->is_number()) {
        out.push_back(it->get<T>());
    } else {
        throw ConfigError(std::string(key) + ": expected a number or an array");
    }
    if (out.empty()) throw ConfigError(std::string(key) + ": empty list");
    return out;
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void SweepSpec::validate() const
{
    if (n_values.empty() || theta_values.empty() || p_values.empty()) {
        throw ConfigError("sweep lattice must be nonempty");
    }
    if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("eps: 0 <= eps < 1 required");
    if (cells < 4) throw ConfigError("cells >= 4 required");
    if (mode_n2 != "radial-n" && mode_n2 != "cartesian-2d") {
        throw ConfigError("mode_n2 must be \"radial-n\" or \"cartesian-2d\"");
    }
    if (parallelism < 1) throw ConfigError("parallelism >= 1 required");
    if (record_every < 1) throw ConfigError("record_every >= 1 required");
    for (double f : p_values) {
        if (p_relative && !(f > 0.0)) throw ConfigError("p: relative fractions must be positive");
    }
}

SweepSpec parse_sweep_spec(const json& j)
{
    if (!j.is_object()) throw ConfigError("sweep spec: expected an object");
    static const std::set<std::string> known{"version", "n", "theta", "p", "p_relative", "eps", "cells",
                                             "mode_n2", "initial", "controls", "record_every",
                                             "output_dir", "parallelism", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError(it.key() + ": unknown key");
    }
    SweepSpec s;
    s.n_values = list_of<int>(j, "n");
    s.theta_values = list_of<double>(j, "theta");
    s.p_values = list_of<double>(j, "p");
    auto get = [&](const char* key, auto fallback) {
        using T = decltype(fallback);
        const auto it = j.find(key);
        if (it == j.end()) return fallback;
        try {
            return it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string(key) + ": wrong type");
        }
    };
    s.p_relative = get("p_relative", s.p_relative);
    s.eps = get("eps", s.eps);
    s.cells = get("cells", s.cells);
    s.mode_n2 = get("mode_n2", s.mode_n2);
    s.record_every = get("record_every", s.record_every);
    s.output_dir = get("output_dir", s.output_dir);
    s.parallelism = get("parallelism", s.parallelism);
    s.seed = get("seed", s.seed);

    // Reuse the run-config reader for the shared sections.
    json sub = json::object();
    if (j.contains("initial")) sub["initial"] = j["initial"];
    if (j.contains("controls")) sub["controls"] = j["controls"];
    const RunConfig rc = parse_config(sub);
    s.initial = rc.initial;
    s.controls = rc.controls;
    s.validate();
    // Every lattice point must be a valid run on its own.
    sweep_points(s);
    return s;
}

SweepSpec parse_sweep_spec_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep spec '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
    return parse_sweep_spec(j);
}

ojson to_json(const SweepSpec& s)
{
    RunConfig rc;
    rc.initial = s.initial;
    rc.controls = s.controls;
    const auto rcj = to_json(rc);
    ojson j;
    j["n"] = s.n_values;
    j["theta"] = s.theta_values;
    j["p"] = s.p_values;
    j["p_relative"] = s.p_relative;
    j["eps"] = s.eps;
    j["cells"] = s.cells;
    j["mode_n2"] = s.mode_n2;
    j["initial"] = rcj["initial"];
    j["controls"] = rcj["controls"];
    j["record_every"] = s.record_every;
    j["output_dir"] = s.output_dir;
    j["parallelism"] = s.parallelism;
    j["seed"] = s.seed;
    return j;
}

std::string content_hash(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<SweepPoint> sweep_points(const SweepSpec& spec)
{
    spec.validate();
    std::vector<SweepPoint> out;
    for (int n : spec.n_values) {
        for (double theta : spec.theta_values) {
            for (double pv : spec.p_values) {
                SweepPoint pt;
                pt.index = out.size();
                pt.n = n;
                pt.theta = theta;
                const double pc = n * theta > 1.0 ? critical_exponent(n, theta)
                                                  : std::numeric_limits<double>::infinity();
                if (spec.p_relative) {
                    if (!std::isfinite(pc)) throw ConfigError("relative p needs n * theta > 1");
                    pt.p = 1.0 + pv * (pc - 1.0);
                    pt.p_fraction = pv;
                } else {
                    pt.p = pv;
                    pt.p_fraction = std::isfinite(pc) ? (pv - 1.0) / (pc - 1.0) : std::nan("");
                }

                json cfg;
                if (n == 1) {
                    cfg["grid"] = {{"mode", "cartesian-1d"}, {"dimension", 1}, {"cells", spec.cells}};
                } else if (spec.mode_n2 == "radial-n") {
                    cfg["grid"] = {{"mode", "radial-n"}, {"dimension", n}, {"cells", spec.cells}};
                } else {
                    if (n != 2) throw ConfigError("cartesian-2d sweeps need n = 2");
                    cfg["grid"] = {{"mode", "cartesian-2d"}, {"dimension", 2}, {"cells", {spec.cells, spec.cells}}};
                }
                cfg["model"] = {{"chi", 1.0}, {"p", pt.p}, {"theta", theta}, {"eps", spec.eps}};
                RunConfig base;
                base.initial = spec.initial;
                base.controls = spec.controls;
                const auto bj = to_json(base);
                cfg["initial"] = json::parse(bj["initial"].dump());
                cfg["controls"] = json::parse(bj["controls"].dump());
                cfg["record_every"] = spec.record_every;
                cfg["seed"] = spec.seed;
                try {
                    pt.config = parse_config(cfg);
                } catch (const ConfigError& e) {
                    throw ConfigError("sweep point " + std::to_string(pt.index) + ": " + e.what());
                }
                pt.hash = content_hash(to_json(pt.config).dump());
                out.push_back(std::move(pt));
            }
        }
    }
    return out;
}

ojson run_point(const SweepPoint& point)
{
    const auto& cfg = point.config;
    const auto a = audit({cfg.model.n, cfg.model.theta, cfg.model.p});
    ojson j;
    j["version"] = tool_version();
    j["hash"] = point.hash;
    j["index"] = point.index;
    j["n"] = point.n;
    j["theta"] = point.theta;
    j["p"] = point.p;
    j["p_fraction"] = std::isfinite(point.p_fraction) ? ojson(point.p_fraction) : ojson(nullptr);
    j["config"] = to_json(cfg);
    j["audit"] = to_json(a);
    try {
        const auto grid = build_grid(cfg.grid);
        const auto data = build_initial_data(cfg, grid);
        SimulationOptions opts;
        opts.record_every = cfg.record_every;
        opts.functionals = cfg.functionals;
        const auto run = simulate(data, cfg.model, cfg.controls, opts);
        const auto verdict = classify(run.status, run.records);
        double sup_f2 = -std::numeric_limits<double>::infinity();
        for (const auto& r : run.records) sup_f2 = std::max(sup_f2, r.F2);
        j["status"] = to_string(run.status);
        j["message"] = run.message;
        j["verdict"] = to_json(verdict);
        j["mass"] = to_json(check_mass(run.records, 1e-10));
        j["positivity"] = to_json(check_positivity(run.samples));
        j["extrema"] = {{"sup_u_linf", verdict.sup_u_linf},
                        {"final_u_linf", run.records.back().u_linf},
                        {"sup_F2", sup_f2},
                        {"max_mass_drift", run.max_mass_drift},
                        {"clamped_mass", run.clamped_mass_total},
                        {"final_time", run.final_state.t},
                        {"steps", run.steps},
                        {"rejected_steps", run.rejected_steps}};
    } catch (const std::exception& e) {
        RegimeVerdict v;
        v.terminal_status = TerminalStatus::NumericalFailure;
        j["status"] = to_string(TerminalStatus::NumericalFailure);
        j["message"] = e.what();
        j["verdict"] = to_json(v);
    }
    return j;
}

namespace {

ojson manifest(const SweepSpec& spec, const std::vector<SweepPoint>& points, const std::vector<PointResult>& results)
{
    auto sj = to_json(spec);
    // Not part of the reproducible content.
    sj.erase("parallelism");
    sj.erase("output_dir");
    ojson m;
    m["version"] = tool_version();
    m["spec"] = sj;
    ojson list = ojson::array();
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& r = results[k].json;
        list.push_back({{"index", points[k].index},
                        {"hash", points[k].hash},
                        {"n", points[k].n},
                        {"theta", points[k].theta},
                        {"p", points[k].p},
                        {"status", r.value("status", "")},
                        {"classification", r["verdict"].value("classification", "")}});
    }
    m["points"] = list;
    return m;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec)
{
    const auto points = sweep_points(spec);
    SweepResult result;
    result.output_dir = resolve_output_dir(spec.output_dir);
    const fs::path dir(result.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

    result.points.resize(points.size());
    std::vector<std::size_t> todo;
    for (std::size_t k = 0; k < points.size(); ++k) {
        auto& pr = result.points[k];
        pr.index = points[k].index;
        pr.hash = points[k].hash;
        const fs::path file = dir / (points[k].hash + ".json");
        if (fs::exists(file)) {
            try {
                auto j = ojson::parse(read_file(file.string()));
                if (j.value("hash", "") == points[k].hash) {
                    pr.json = std::move(j);
                    pr.resumed = true;
                    ++result.resumed;
                    continue;
                }
            } catch (const std::exception&) {
                // Unreadable leftovers are recomputed.
            }
        }
        todo.push_back(k);
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            const std::size_t slot = next.fetch_add(1);
            if (slot >= todo.size()) return;
            const std::size_t k = todo[slot];
            try {
                const auto t0 = std::chrono::steady_clock::now();
                auto j = run_point(points[k]);
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                atomic_write((dir / (points[k].hash + ".json")).string(), j.dump(2) + "\n");
                const ojson timing{{"hash", points[k].hash}, {"wall_seconds", secs}};
                atomic_write((dir / "timings" / (points[k].hash + ".json")).string(), timing.dump(2) + "\n");
                result.points[k].json = std::move(j);
                result.points[k].wall_seconds = secs;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(spec.parallelism, static_cast<int>(todo.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    result.simulated = todo.size();

    atomic_write((dir / "sweep.json").string(), manifest(spec, points, result.points).dump(2) + "\n");
    atomic_write((dir / "regime_map.csv").string(), regime_map_csv(regime_map(result)));
    return result;
}

RegimeMap regime_map(const std::vector<ojson>& point_results)
{
    RegimeMap map;
    for (const auto& j : point_results) {
        RegimeRow row;
        row.index = j.value("index", std::size_t{0});
        row.hash = j.value("hash", "");
        row.n = j.value("n", 0);
        row.theta = j.value("theta", 0.0);
        row.p = j.value("p", 0.0);
        row.p_fraction = j["p_fraction"].is_number() ? j["p_fraction"].get<double>() : std::nan("");
        const auto& a = j["audit"];
        row.p_critical = a["p_critical"].is_number() ? a["p_critical"].get<double>()
                                                     : std::numeric_limits<double>::infinity();
        row.subcritical = a.value("subcritical", false);
        row.classification = j["verdict"].value("classification", "Inconclusive");
        row.terminal_status = j.value("status", "");
        row.sup_u_linf = j["verdict"].value("sup_u_linf", 0.0);
        row.growth_rate = j["verdict"].value("growth_rate_estimate", 0.0);
        if (j.contains("config")) row.cells = j["config"]["grid"]["cells"][0].get<int>();
        row.flagged = row.subcritical && row.classification != "Bounded";
        row.marker = row.subcritical ? "" : "exploratory";
        map.flags += row.flagged ? 1 : 0;
        map.rows.push_back(std::move(row));
    }
    std::sort(map.rows.begin(), map.rows.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    return map;
}

RegimeMap regime_map(const SweepResult& result)
{
    std::vector<ojson> js;
    for (const auto& p : result.points) js.push_back(p.json);
    return regime_map(js);
}

std::string regime_map_csv(const RegimeMap& map)
{
    std::string out = "index,hash,n,theta,p,p_fraction,p_critical,subcritical,classification,terminal_status,"
                      "sup_u_linf,growth_rate,cells,flag,marker\n";
    for (const auto& r : map.rows) {
        out += std::to_string(r.index) + "," + r.hash + "," + std::to_string(r.n) + "," + fmt17(r.theta) + ","
               + fmt17(r.p) + "," + fmt17(r.p_fraction) + "," + fmt17(r.p_critical) + ","
               + (r.subcritical ? "true" : "false") + "," + r.classification + "," + r.terminal_status + ","
               + fmt17(r.sup_u_linf) + "," + fmt17(r.growth_rate) + "," + std::to_string(r.cells) + ","
               + (r.flagged ? "FLAG" : "") + "," + r.marker + "\n";
    }
    return out;
}

std::string regime_summary(const RegimeMap& map)
{
    std::size_t sub = 0, bounded = 0;
    for (const auto& r : map.rows) {
        if (r.subcritical) {
            ++sub;
            bounded += r.classification == "Bounded" ? 1 : 0;
        }
    }
    std::string out = tool_version() + " regime map\n";
    out += "points: " + std::to_string(map.rows.size()) + "\n";
    out += "subcritical: " + std::to_string(sub) + " (Bounded: " + std::to_string(bounded) + ")\n";
    out += "supercritical (exploratory): " + std::to_string(map.rows.size() - sub) + "\n";
    out += "flags: " + std::to_string(map.flags) + "\n";
    for (const auto& r : map.rows) {
        if (r.flagged) {
            out += "  FLAG index " + std::to_string(r.index) + " n=" + std::to_string(r.n) + " theta=" + fmt17(r.theta)
                   + " p=" + fmt17(r.p) + ": " + r.classification + " (" + r.terminal_status + ")\n";
        }
    }
    return out;
}

std::vector<ojson> load_sweep_results(const std::string& dir)
{
    const fs::path root(dir);
    const auto m = ojson::parse(read_file((root / "sweep.json").string()));
    std::vector<ojson> out;
    for (const auto& p : m.at("points")) {
        out.push_back(ojson::parse(read_file((root / (p.at("hash").get<std::string>() + ".json")).string())));
    }
    return out;
}

} // namespace ksflux
