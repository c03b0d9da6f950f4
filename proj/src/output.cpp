#include "ksflux/output.hpp"

#include "ksflux/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ksflux {

namespace fs = std::filesystem;

void atomic_write(const std::string& path, const std::string& content)
{
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            throw std::runtime_error("cannot create directory '" + target.parent_path().string() + "': " + ec.message());
        }
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move '" + tmp.string() + "' into place: " + ec.message());
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string functional_csv(const nlohmann::ordered_json& config, const FunctionalSpec& spec,
                           const std::vector<FunctionalRecord>& records)
{
    std::string out = "# " + tool_version() + "\n";
    out += "# config " + config.dump() + "\n";
    const auto cols = csv_columns(spec);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k) out += ',';
        out += cols[k];
    }
    out += '\n';
    for (const auto& r : records) {
        out += csv_row(r);
        out += '\n';
    }
    return out;
}

std::string snapshot_text(const std::vector<SimState>& states)
{
    std::string out;
    char buf[40];
    for (const auto& s : states) {
        std::snprintf(buf, sizeof buf, "%.17g", s.t);
        out += buf;
        for (const auto* f : {&s.u, &s.v}) {
            for (double v : f->values()) {
                std::snprintf(buf, sizeof buf, " %.17g", v);
                out += buf;
            }
        }
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json snapshot_sidecar(const nlohmann::ordered_json& config, const Grid& grid, std::size_t count)
{
    nlohmann::ordered_json j;
    j["version"] = tool_version();
    j["format"] = "one line per snapshot: t, then u at every cell, then v at every cell; cells row-major (j * nx + i)";
    j["snapshots"] = count;
    j["cells"] = {grid.cells(0), grid.cells(1)};
    j["values_per_line"] = 1 + 2 * grid.size();
    j["config"] = config;
    return j;
}

} // namespace ksflux
