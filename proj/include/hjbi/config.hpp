#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hjbi/model.hpp"
#include "hjbi/solver.hpp"

namespace hjbi {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat dotted-key configuration, e.g.
///
///     run.command = "sweep"
///     model.psi0 = 0.5
///     sweep.param = "psi0"
///     sweep.values = [0.25, 0.5, 1.0]
///     model.disutility_f = "table"
///     model.disutility_f.table = [[0, 1], [0.5, 0], [1, 1]]
///
/// Statements are separated by newlines or ';'. '#' starts a comment outside
/// of strings. Values are JSON scalars or arrays.
using ConfigMap = std::map<std::string, nlohmann::json>;

ConfigMap parse_config(std::string_view text);
ConfigMap parse_config_file(const std::string& path);

/// Applies one `key=value` override. A value that is not valid JSON is taken
/// as a bare string.
void apply_override(ConfigMap& map, std::string_view assignment);

enum class Command { Solve, Sweep, McCheck };

const char* command_name(Command c);

struct SweepAxis {
    std::string param;
    std::vector<double> values;  // ascending
};

struct McSettings {
    double dt_sim = 5e-4;
    long n_paths = 100000;
    std::uint64_t seed = 12345;
    double start_x = 0.5;
    double start_t = 0.0;
    double tolerance = 0.02;  // absolute slack on top of 3 standard errors
    int threads = 0;
};

struct RunConfig {
    Command command = Command::Solve;
    std::string preset = "paper";  // "paper" or "paper_controlled"
    ProblemSpec spec = make_paper_spec(false);
    int n_cells = 500;
    double dt = 0.005;
    int n_quad = 64;
    PolicyConfig policy;
    std::vector<double> snapshot_times;
    std::optional<SweepAxis> sweep;
    McSettings mc;
    std::string output_dir = ".";
};

/// Throws ConfigError on unknown keys, wrong value types or invalid values.
RunConfig resolve_config(const ConfigMap& map);

/// Every resolved setting except the output directory, as a config map.
ConfigMap to_config_map(const RunConfig& cfg);

/// Single comment line "# resolved: key = value; ..." that parses back to
/// the same run.
std::string provenance_line(const RunConfig& cfg);
ConfigMap parse_provenance_line(std::string_view line);

/// Sets one scalar model parameter by name ("psi0", "nu1", ...). "psi" sets
/// psi1 and psi2, "nu" sets nu1 and nu2, "gamma" sets gamma0 and gamma1.
void set_parameter(ProblemSpec& spec, const std::string& name, double value);

}  // namespace hjbi
