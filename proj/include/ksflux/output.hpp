#pragma once

#include "ksflux/functionals.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ksflux {

/// Writes content to path via a temporary file and rename, so readers never
/// see a partial file. Creates parent directories. Throws std::runtime_error.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Functional time series as CSV: comment lines "# ksflux <version>" and
/// "# config <compact JSON>", the header of csv_columns, then one %.17g row
/// per record.
std::string functional_csv(const nlohmann::ordered_json& config, const FunctionalSpec& spec,
                           const std::vector<FunctionalRecord>& records);

/// One line per state: t, then every u value, then every v value, separated
/// by single spaces, each %.17g.
std::string snapshot_text(const std::vector<SimState>& states);

/// Sidecar describing a snapshot file: version, config, grid layout and the
/// column layout of each line.
nlohmann::ordered_json snapshot_sidecar(const nlohmann::ordered_json& config, const Grid& grid,
                                        std::size_t count);

} // namespace ksflux
