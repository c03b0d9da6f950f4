#include "ksflux/config.hpp"
#include "ksflux/gn_verifier.hpp"
#include "ksflux/monitors.hpp"
#include "ksflux/output.hpp"
#include "ksflux/regime.hpp"
#include "ksflux/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <string>

namespace {

using namespace ksflux;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

enum Exit : int { Ok = 0, MonitorFailure = 1, RunFailure = 2, ConfigFailure = 3 };

int run_simulate(const std::string& config_path, const std::string& out_override)
{
    RunConfig cfg = parse_config_file(config_path);
    if (!out_override.empty()) cfg.output.dir = out_override;
    const fs::path dir(resolve_output_dir(cfg.output.dir));
    const auto cfg_json = to_json(cfg);

    const auto grid = build_grid(cfg.grid);
    const auto data = build_initial_data(cfg, grid);
    SimulationOptions opts;
    opts.record_every = cfg.record_every;
    opts.functionals = cfg.functionals;
    opts.keep_samples = true;
    const auto run = simulate(data, cfg.model, cfg.controls, opts);

    atomic_write((dir / cfg.output.csv).string(), functional_csv(cfg_json, cfg.functionals, run.records));
    atomic_write((dir / "config.json").string(), cfg_json.dump(2) + "\n");
    if (cfg.output.snapshot_every > 0) {
        std::vector<SimState> snaps;
        for (std::size_t k = 0; k < run.samples.size(); ++k) {
            if (k % cfg.output.snapshot_every == 0 || k + 1 == run.samples.size()) snaps.push_back(run.samples[k]);
        }
        atomic_write((dir / cfg.output.snapshots).string(), snapshot_text(snaps));
        atomic_write((dir / (cfg.output.snapshots + ".json")).string(),
                     snapshot_sidecar(cfg_json, *grid, snaps.size()).dump(2) + "\n");
    }

    const auto mass = check_mass(run.records, 1e-10);
    const auto positivity = check_positivity(run.samples);
    const auto regime = classify(run.status, run.records);
    bool ok = mass.pass && positivity.pass && regime.classification == Classification::Bounded;

    ojson verdicts;
    verdicts["version"] = tool_version();
    verdicts["config"] = cfg_json;
    verdicts["status"] = to_string(run.status);
    verdicts["message"] = run.message;
    verdicts["steps"] = run.steps;
    verdicts["rejected_steps"] = run.rejected_steps;
    verdicts["mass"] = to_json(mass);
    verdicts["positivity"] = to_json(positivity);
    verdicts["regime"] = to_json(regime);
    if (run.records.size() >= 10) {
        for (auto f : {EntropyFunctional::F1, EntropyFunctional::F2}) {
            const auto fit = check_dissipation_inequality(run.records, f);
            ok = ok && fit.verdict.pass;
            verdicts["dissipation_" + to_string(f)] = to_json(fit);
        }
    }
    atomic_write((dir / "verdicts.json").string(), verdicts.dump(2) + "\n");

    std::cout << "status " << to_string(run.status) << ", " << run.steps << " steps, t = " << run.final_state.t
              << "\nclassification " << to_string(regime.classification) << ", sup |u| = " << regime.sup_u_linf
              << "\nmass " << (mass.pass ? "ok" : "FAIL") << ", positivity " << (positivity.pass ? "ok" : "FAIL")
              << "\noutput " << dir.string() << "\n";
    if (run.status == TerminalStatus::BlowUpSuspected || run.status == TerminalStatus::NumericalFailure) {
        return RunFailure;
    }
    return ok ? Ok : MonitorFailure;
}

int run_sweep_command(const std::string& spec_path, const std::string& out_override, int jobs)
{
    SweepSpec spec = parse_sweep_spec_file(spec_path);
    if (!out_override.empty()) spec.output_dir = out_override;
    if (jobs > 0) spec.parallelism = jobs;
    spec.validate();
    const auto result = run_sweep(spec);
    const auto map = regime_map(result);
    std::cout << "simulated " << result.simulated << ", resumed " << result.resumed << "\n"
              << regime_summary(map) << "output " << result.output_dir << "\n";
    return map.flags == 0 ? Ok : MonitorFailure;
}

int run_audit(int n, double theta, double p)
{
    const auto a = audit({n, theta, p});
    ojson j = to_json(a);
    j["version"] = tool_version();
    std::cout << j.dump(2) << "\n";
    return Ok;
}

int run_gn_test(int n, double theta, double p, int cells, std::size_t ensemble)
{
    const auto a = audit({n, theta, p});
    DomainSpec dom;
    dom.mode = n == 1 ? GridMode::Cartesian1D : GridMode::Radial;
    dom.dimension = n;
    dom.cells = {cells, 1};
    ojson j;
    j["version"] = tool_version();
    j["audit"] = to_json(a);
    j["grid"] = {{"mode", to_string(dom.mode)}, {"dimension", n}, {"cells", cells}};
    j["ensemble"] = ensemble;
    bool ok = true;
    ojson sets = ojson::array();
    for (const auto& e : proof_exponent_sets(a)) {
        const auto r = gn_refinement(dom, e, ensemble);
        ok = ok && r.stable && std::isfinite(r.fine);
        sets.push_back({{"kind", "first-order"},
                        {"p", e.p},
                        {"q", e.q},
                        {"r", e.r},
                        {"s", e.s},
                        {"a", e.a},
                        {"refinement", to_json(r)}});
    }
    for (const auto& e : proof_exponent_sets_gn2(a)) {
        const auto r = gn2_refinement(dom, e, ensemble);
        ok = ok && r.stable && std::isfinite(r.fine);
        sets.push_back({{"kind", "second-order"},
                        {"p", e.p},
                        {"q", e.q},
                        {"r", e.r},
                        {"s", e.s},
                        {"b", e.b},
                        {"refinement", to_json(r)}});
    }
    j["sets"] = sets;
    j["stable"] = ok;
    std::cout << j.dump(2) << "\n";
    return ok ? Ok : MonitorFailure;
}

int run_report(const std::string& dir)
{
    const auto map = regime_map(load_sweep_results(dir));
    atomic_write((fs::path(dir) / "regime_map.csv").string(), regime_map_csv(map));
    std::cout << regime_summary(map);
    return map.flags == 0 ? Ok : MonitorFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Flux-limited chemotaxis simulator, regime audit and inequality verifier"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    std::string config_path, out_dir, spec_path, report_dir;
    int jobs = 0;
    int n = 1, cells = 128;
    double theta = 2.0, p = 1.5;
    std::size_t ensemble = 1000;

    auto* sim = app.add_subcommand("simulate", "Run one simulation and write the functional CSV and verdicts");
    sim->add_option("--config", config_path, "Run config (JSON)")->required();
    sim->add_option("--out", out_dir, "Output directory (overrides output.dir)");

    auto* sweep = app.add_subcommand("sweep", "Run or resume a parameter sweep");
    sweep->add_option("--spec", spec_path, "Sweep spec (JSON)")->required();
    sweep->add_option("--out", out_dir, "Results directory (overrides output_dir)");
    sweep->add_option("--jobs", jobs, "Concurrent points (overrides parallelism)")->check(CLI::PositiveNumber);

    auto* aud = app.add_subcommand("audit", "Print the exponent audit for (n, theta, p) as JSON");
    aud->add_option("--n", n, "Space dimension")->required();
    aud->add_option("--theta", theta, "Production exponent")->required();
    aud->add_option("--p", p, "Flux-limitation exponent")->required();

    auto* gn = app.add_subcommand("gn-test", "Estimate inequality constants at the audit witnesses");
    gn->add_option("--n", n, "Space dimension")->required();
    gn->add_option("--theta", theta, "Production exponent")->required();
    gn->add_option("--p", p, "Flux-limitation exponent")->required();
    gn->add_option("--cells", cells, "Coarse radial or 1D cells")->check(CLI::Range(8, 1 << 16));
    gn->add_option("--ensemble", ensemble, "Ensemble size")->check(CLI::PositiveNumber);

    auto* rep = app.add_subcommand("report", "Render regime_map.csv and a summary from a results directory");
    rep->add_option("--dir", report_dir, "Sweep results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ConfigFailure;
    }

    try {
        if (*sim) return run_simulate(config_path, out_dir);
        if (*sweep) return run_sweep_command(spec_path, out_dir, jobs);
        if (*aud) return run_audit(n, theta, p);
        if (*gn) return run_gn_test(n, theta, p, cells, ensemble);
        if (*rep) return run_report(report_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return RunFailure;
    }
    return ConfigFailure;
}
