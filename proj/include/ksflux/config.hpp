#pragma once

#include "ksflux/functionals.hpp"
#include "ksflux/grid.hpp"
#include "ksflux/model.hpp"
#include "ksflux/stepper.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ksflux {

/// Tool version embedded in every artifact.
std::string tool_version();

/// Invalid or unknown configuration entry; the message names the key.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct InitialSpec {
    /// constant | cosine | gaussian | noise
    std::string family = "cosine";
    double mean = 1.0;
    double amplitude = 0.5;
    /// Cosine wave number (in half periods over the extent).
    int mode = 1;
    /// Gaussian width and centre, as fractions of the extent.
    double width = 0.1;
    double center = 0.0;
    /// v0 = u0^theta ("u-theta") or v0 = 0 ("zero").
    std::string v0 = "u-theta";
    /// Apply the eps-scaled mollifier to the sampled data.
    bool mollify = true;
};

struct OutputSpec {
    std::string dir = "ksflux-out";
    std::string csv = "functionals.csv";
    std::string snapshots = "snapshots.txt";
    /// Write a snapshot every this many records; 0 disables snapshots.
    int snapshot_every = 0;
};

struct RunConfig {
    DomainSpec grid;
    ModelParams model;
    InitialSpec initial;
    StepControls controls;
    FunctionalSpec functionals;
    int record_every = 20;
    OutputSpec output;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Parses a config object. Missing entries take defaults; "auto" (or absent)
/// functionals are resolved from the regime audit. Unknown keys and
/// constraint violations throw ConfigError. The optional "version" key is
/// accepted and ignored.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_file(const std::string& path);

/// Fully resolved config; parse_config(to_json(c)) reproduces c.
nlohmann::ordered_json to_json(const RunConfig& c);

/// Samples the initial family on the grid, then mollifies if requested.
InitialData build_initial_data(const RunConfig& c, const GridPtr& grid);

/// Output directory after the KSFLUX_OUTPUT_DIR override.
std::string resolve_output_dir(const std::string& configured);

} // namespace ksflux
