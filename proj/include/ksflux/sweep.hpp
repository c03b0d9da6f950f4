#pragma once

#include "ksflux/config.hpp"
#include "ksflux/monitors.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ksflux {

struct SweepSpec {
    std::vector<int> n_values{1};
    std::vector<double> theta_values{2.0};
    /// Absolute p, or fractions f giving p = 1 + f (p_c - 1) when p_relative.
    std::vector<double> p_values{0.8};
    bool p_relative = true;
    double eps = 1e-3;
    int cells = 128;
    /// Grid mode for n >= 2 ("radial-n" or "cartesian-2d"); n = 1 is always cartesian-1d.
    std::string mode_n2 = "radial-n";
    InitialSpec initial;
    StepControls controls;
    int record_every = 20;
    std::string output_dir = "ksflux-sweep";
    int parallelism = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

SweepSpec parse_sweep_spec(const nlohmann::json& j);
SweepSpec parse_sweep_spec_file(const std::string& path);
nlohmann::ordered_json to_json(const SweepSpec& s);

struct SweepPoint {
    std::size_t index = 0;
    int n = 1;
    double theta = 2.0;
    double p = 1.5;
    /// Fraction of the way from 1 to p_c (NaN for absolute p without a finite p_c).
    double p_fraction = 0.0;
    RunConfig config;
    std::string hash;
};

/// Lattice points in (n, theta, p) order with their full run configs.
std::vector<SweepPoint> sweep_points(const SweepSpec& spec);

/// FNV-1a 64-bit of a string, as 16 hex digits.
std::string content_hash(const std::string& text);

struct PointResult {
    std::size_t index = 0;
    std::string hash;
    nlohmann::ordered_json json;
    double wall_seconds = 0.0;
    bool resumed = false;
};

struct SweepResult {
    std::vector<PointResult> points;
    std::size_t simulated = 0;
    std::size_t resumed = 0;
    std::string output_dir;
};

/// Runs every point not already present in the output directory, writing
/// <out>/<hash>.json atomically per point, then sweep.json and regime_map.csv.
/// Wall times go to <out>/timings/<hash>.json, outside the reproducible set.
SweepResult run_sweep(const SweepSpec& spec);

/// Runs one point; failures become NumericalFailure entries.
nlohmann::ordered_json run_point(const SweepPoint& point);

struct RegimeRow {
    std::size_t index = 0;
    std::string hash;
    int n = 1;
    double theta = 0.0;
    double p = 0.0;
    double p_fraction = 0.0;
    double p_critical = 0.0;
    bool subcritical = false;
    std::string classification;
    std::string terminal_status;
    double sup_u_linf = 0.0;
    double growth_rate = 0.0;
    int cells = 0;
    bool flagged = false;
    std::string marker;
};

struct RegimeMap {
    std::vector<RegimeRow> rows;
    std::size_t flags = 0;
};

/// Subcritical rows not classified Bounded are flagged; supercritical rows
/// are marked "exploratory" and never flagged.
RegimeMap regime_map(const std::vector<nlohmann::ordered_json>& point_results);
RegimeMap regime_map(const SweepResult& result);

std::string regime_map_csv(const RegimeMap& map);
std::string regime_summary(const RegimeMap& map);

/// Reads sweep.json and the point files of a results directory.
std::vector<nlohmann::ordered_json> load_sweep_results(const std::string& dir);

} // namespace ksflux
