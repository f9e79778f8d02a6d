#include "hjbi/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hjbi {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    return std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
}

void parse_statement(std::string_view stmt, int line, ConfigMap& out) {
    stmt = trim(stmt);
    if (stmt.empty()) return;
    const auto eq = stmt.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    const auto key = trim(stmt.substr(0, eq));
    const auto value = trim(stmt.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError("line " + std::to_string(line) + ": invalid key '" + std::string(key) + "'");
    try {
        out[std::string(key)] = json::parse(value);
    } catch (const json::parse_error&) {
        throw ConfigError("line " + std::to_string(line) + ": cannot parse value of '" + std::string(key) + "'");
    }
}

// Known keys of the four coefficient functions and two jump densities.
const std::vector<std::string> kCoefficients = {"growth_a", "growth_rate_r", "cost_h", "disutility_f"};
const std::vector<std::string> kDensities = {"jump1", "jump2"};
const std::vector<std::string> kScalars = {"sigma", "gamma0", "gamma1", "nu1", "nu2", "psi0", "psi1",
                                           "psi2", "lambda_max", "theta_max", "q_max", "horizon"};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k = {"run.command", "model.preset", "model.q_grid_size", "model.psi", "model.nu",
                                   "model.gamma", "grid.n_cells", "time.dt", "quad.n_quad", "policy.tol",
                                   "policy.max_iter", "solve.snapshot_times", "sweep.param", "sweep.values",
                                   "mc.dt_sim", "mc.n_paths", "mc.seed", "mc.start_x", "mc.start_t",
                                   "mc.tolerance", "mc.threads", "output.dir"};
        for (const auto& s : kScalars) k.insert("model." + s);
        for (const auto& c : kCoefficients) {
            k.insert("model." + c);
            k.insert("model." + c + ".params");
            k.insert("model." + c + ".table");
        }
        for (const auto& d : kDensities) {
            k.insert("model." + d);
            k.insert("model." + d + ".support");
            k.insert("model." + d + ".table");
        }
        return k;
    }();
    return keys;
}

const json* find(const ConfigMap& map, const std::string& key) {
    auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
}

double as_double(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number");
    return v.get<double>();
}

long long as_integer(const json& v, const std::string& key) {
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d)) return static_cast<long long>(d);
    }
    throw ConfigError(key + ": expected an integer");
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key + ": expected a quoted string");
    return v.get<std::string>();
}

std::vector<double> as_doubles(const json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError(key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_double(e, key));
    return out;
}

std::vector<std::pair<double, double>> as_pairs(const json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError(key + ": expected an array of [x, value] pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2) throw ConfigError(key + ": expected [x, value] pairs");
        out.emplace_back(as_double(e[0], key), as_double(e[1], key));
    }
    return out;
}

json pairs_to_json(const std::vector<std::pair<double, double>>& pairs) {
    json arr = json::array();
    for (const auto& [x, y] : pairs) arr.push_back(json::array({x, y}));
    return arr;
}

double* scalar_field(ProblemSpec& spec, const std::string& name) {
    if (name == "sigma") return &spec.sigma;
    if (name == "gamma0") return &spec.gamma0;
    if (name == "gamma1") return &spec.gamma1;
    if (name == "nu1") return &spec.nu1;
    if (name == "nu2") return &spec.nu2;
    if (name == "psi0") return &spec.psi0;
    if (name == "psi1") return &spec.psi1;
    if (name == "psi2") return &spec.psi2;
    if (name == "lambda_max") return &spec.lambda_max;
    if (name == "theta_max") return &spec.theta_max;
    if (name == "q_max") return &spec.q_max;
    if (name == "horizon") return &spec.horizon;
    return nullptr;
}

Coefficient& coefficient_field(ProblemSpec& spec, const std::string& name) {
    if (name == "growth_a") return spec.growth_a;
    if (name == "growth_rate_r") return spec.growth_rate_r;
    if (name == "cost_h") return spec.cost_h;
    return spec.disutility_f;
}

const Coefficient& coefficient_field(const ProblemSpec& spec, const std::string& name) {
    return coefficient_field(const_cast<ProblemSpec&>(spec), name);
}

JumpDensity& density_field(ProblemSpec& spec, const std::string& name) {
    return name == "jump1" ? spec.jump_density_1 : spec.jump_density_2;
}

std::string dump_value(const json& v) { return v.dump(); }

}  // namespace

ConfigMap parse_config(std::string_view text) {
    ConfigMap out;
    std::string stmt;
    int line = 1;
    int stmt_line = 1;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    bool in_comment = false;
    for (char c : text) {
        if (in_comment) {
            if (c == '\n') {
                in_comment = false;
                if (depth == 0) {
                    parse_statement(stmt, stmt_line, out);
                    stmt.clear();
                    stmt_line = line + 1;
                }
                ++line;
            }
            continue;
        }
        if (in_string) {
            stmt += c;
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            if (c == '\n') ++line;
            continue;
        }
        switch (c) {
        case '"': in_string = true; stmt += c; break;
        case '#': in_comment = true; break;
        case '[': ++depth; stmt += c; break;
        case ']': --depth; stmt += c; break;
        case '\n':
        case ';':
            if (depth == 0) {
                parse_statement(stmt, stmt_line, out);
                stmt.clear();
                stmt_line = line + (c == '\n' ? 1 : 0);
            } else {
                stmt += ' ';
            }
            if (c == '\n') ++line;
            break;
        default: stmt += c;
        }
    }
    if (in_string || depth != 0) throw ConfigError("unterminated string or array at end of config");
    parse_statement(stmt, stmt_line, out);
    return out;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_override(ConfigMap& map, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
    const std::string key(trim(assignment.substr(0, eq)));
    const std::string value(trim(assignment.substr(eq + 1)));
    if (!valid_key(key)) throw ConfigError("invalid override key '" + key + "'");
    try {
        map[key] = json::parse(value);
    } catch (const json::parse_error&) {
        map[key] = value;
    }
}

const char* command_name(Command c) {
    switch (c) {
    case Command::Solve: return "solve";
    case Command::Sweep: return "sweep";
    case Command::McCheck: return "mc-check";
    }
    return "?";
}

void set_parameter(ProblemSpec& spec, const std::string& name, double value) {
    if (name == "psi") { spec.psi1 = spec.psi2 = value; return; }
    if (name == "nu") { spec.nu1 = spec.nu2 = value; return; }
    if (name == "gamma") { spec.gamma0 = spec.gamma1 = value; return; }
    if (double* field = scalar_field(spec, name)) { *field = value; return; }
    throw ConfigError("unknown model parameter '" + name + "'");
}

RunConfig resolve_config(const ConfigMap& map) {
    for (const auto& [key, value] : map) {
        if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    RunConfig cfg;
    if (const json* v = find(map, "run.command")) {
        const std::string name = as_string(*v, "run.command");
        if (name == "solve") cfg.command = Command::Solve;
        else if (name == "sweep") cfg.command = Command::Sweep;
        else if (name == "mc-check") cfg.command = Command::McCheck;
        else throw ConfigError("run.command must be solve, sweep or mc-check (got '" + name + "')");
    }
    if (const json* v = find(map, "model.preset")) cfg.preset = as_string(*v, "model.preset");
    if (cfg.preset == "paper") cfg.spec = make_paper_spec(false);
    else if (cfg.preset == "paper_controlled") cfg.spec = make_paper_spec(true);
    else throw ConfigError("model.preset must be paper or paper_controlled (got '" + cfg.preset + "')");

    for (const char* alias : {"psi", "nu", "gamma"}) {
        const std::string key = std::string("model.") + alias;
        if (const json* v = find(map, key)) set_parameter(cfg.spec, alias, as_double(*v, key));
    }
    for (const auto& name : kScalars) {
        const std::string key = "model." + name;
        if (const json* v = find(map, key)) set_parameter(cfg.spec, name, as_double(*v, key));
    }
    if (const json* v = find(map, "model.q_grid_size")) {
        cfg.spec.q_grid_size = static_cast<int>(as_integer(*v, "model.q_grid_size"));
    }

    try {
        for (const auto& name : kCoefficients) {
            const std::string key = "model." + name;
            const json* kind = find(map, key);
            const json* params = find(map, key + ".params");
            const json* table = find(map, key + ".table");
            if (!kind && !params && !table) continue;
            Coefficient& field = coefficient_field(cfg.spec, name);
            const std::string kind_name = kind ? as_string(*kind, key)
                                          : table ? std::string("table")
                                                  : std::string(Coefficient::kind_name(field.kind()));
            field = Coefficient::from_name(kind_name, params ? as_doubles(*params, key + ".params") : std::vector<double>{},
                                           table ? as_pairs(*table, key + ".table")
                                                 : std::vector<std::pair<double, double>>{});
        }
        for (const auto& name : kDensities) {
            const std::string key = "model." + name;
            const json* kind = find(map, key);
            const json* support = find(map, key + ".support");
            const json* table = find(map, key + ".table");
            if (!kind && !support && !table) continue;
            const std::string kind_name = kind ? as_string(*kind, key) : table ? "table" : "uniform";
            JumpDensity& field = density_field(cfg.spec, name);
            if (kind_name == "uniform") {
                if (!support) throw ConfigError(key + ".support is required for a uniform density");
                const auto s = as_doubles(*support, key + ".support");
                if (s.size() != 2) throw ConfigError(key + ".support must be [lo, hi]");
                field = JumpDensity::uniform(s[0], s[1]);
            } else if (kind_name == "table") {
                if (!table) throw ConfigError(key + ".table is required for a tabulated density");
                field = JumpDensity::table(as_pairs(*table, key + ".table"));
            } else {
                throw ConfigError(key + " must be uniform or table (got '" + kind_name + "')");
            }
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (const json* v = find(map, "grid.n_cells")) cfg.n_cells = static_cast<int>(as_integer(*v, "grid.n_cells"));
    if (const json* v = find(map, "time.dt")) cfg.dt = as_double(*v, "time.dt");
    if (const json* v = find(map, "quad.n_quad")) cfg.n_quad = static_cast<int>(as_integer(*v, "quad.n_quad"));
    if (const json* v = find(map, "policy.tol")) cfg.policy.tol = as_double(*v, "policy.tol");
    if (const json* v = find(map, "policy.max_iter")) cfg.policy.max_iter = static_cast<int>(as_integer(*v, "policy.max_iter"));
    if (const json* v = find(map, "solve.snapshot_times")) cfg.snapshot_times = as_doubles(*v, "solve.snapshot_times");

    const json* sweep_param = find(map, "sweep.param");
    const json* sweep_values = find(map, "sweep.values");
    if (sweep_param || sweep_values) {
        if (!sweep_param || !sweep_values) throw ConfigError("sweep.param and sweep.values must be given together");
        SweepAxis axis{as_string(*sweep_param, "sweep.param"), as_doubles(*sweep_values, "sweep.values")};
        if (axis.param.rfind("model.", 0) == 0) axis.param = axis.param.substr(6);
        ProblemSpec probe = cfg.spec;
        set_parameter(probe, axis.param, 1.0);
        std::sort(axis.values.begin(), axis.values.end());
        cfg.sweep = std::move(axis);
    }
    if (cfg.command == Command::Sweep && (!cfg.sweep || cfg.sweep->values.empty())) {
        throw ConfigError("sweep needs a nonempty sweep.values");
    }

    if (const json* v = find(map, "mc.dt_sim")) cfg.mc.dt_sim = as_double(*v, "mc.dt_sim");
    if (const json* v = find(map, "mc.n_paths")) cfg.mc.n_paths = static_cast<long>(as_integer(*v, "mc.n_paths"));
    if (const json* v = find(map, "mc.seed")) cfg.mc.seed = static_cast<std::uint64_t>(as_integer(*v, "mc.seed"));
    if (const json* v = find(map, "mc.start_x")) cfg.mc.start_x = as_double(*v, "mc.start_x");
    if (const json* v = find(map, "mc.start_t")) cfg.mc.start_t = as_double(*v, "mc.start_t");
    if (const json* v = find(map, "mc.tolerance")) cfg.mc.tolerance = as_double(*v, "mc.tolerance");
    if (const json* v = find(map, "mc.threads")) cfg.mc.threads = static_cast<int>(as_integer(*v, "mc.threads"));
    if (const json* v = find(map, "output.dir")) cfg.output_dir = as_string(*v, "output.dir");

    if (cfg.n_cells < 2) throw ConfigError("grid.n_cells must be >= 2");
    if (!(cfg.dt > 0.0)) throw ConfigError("time.dt must be > 0");
    if (cfg.n_quad < 2) throw ConfigError("quad.n_quad must be >= 2");
    if (cfg.policy.max_iter < 1 || !(cfg.policy.tol > 0.0)) throw ConfigError("policy.tol and policy.max_iter must be positive");
    if (cfg.mc.n_paths < 1 || !(cfg.mc.dt_sim > 0.0)) throw ConfigError("mc.n_paths and mc.dt_sim must be positive");
    if (cfg.mc.dt_sim > cfg.dt) throw ConfigError("mc.dt_sim must not exceed time.dt");

    const ValidationResult vr = validate_spec(cfg.spec);
    if (!vr.ok()) {
        std::string msg = "invalid model:";
        for (const auto& v : vr.violations) msg += "\n  " + v;
        throw ConfigError(msg);
    }
    return cfg;
}

ConfigMap to_config_map(const RunConfig& cfg) {
    ConfigMap m;
    const ProblemSpec& s = cfg.spec;
    m["run.command"] = command_name(cfg.command);
    m["model.preset"] = cfg.preset;
    for (const auto& name : kScalars) m["model." + name] = *scalar_field(const_cast<ProblemSpec&>(s), name);
    m["model.q_grid_size"] = s.q_grid_size;
    for (const auto& name : kCoefficients) {
        const Coefficient& c = coefficient_field(s, name);
        m["model." + name] = Coefficient::kind_name(c.kind());
        if (c.kind() == Coefficient::Kind::Table) m["model." + name + ".table"] = pairs_to_json(c.samples());
        else m["model." + name + ".params"] = c.params();
    }
    for (const auto& name : kDensities) {
        const JumpDensity& d = name == "jump1" ? s.jump_density_1 : s.jump_density_2;
        if (d.kind() == JumpDensity::Kind::Table) {
            m["model." + name] = "table";
            m["model." + name + ".table"] = pairs_to_json(d.samples());
        } else {
            m["model." + name] = "uniform";
            m["model." + name + ".support"] = json::array({d.support_lo(), d.support_hi()});
        }
    }
    m["grid.n_cells"] = cfg.n_cells;
    m["time.dt"] = cfg.dt;
    m["quad.n_quad"] = cfg.n_quad;
    m["policy.tol"] = cfg.policy.tol;
    m["policy.max_iter"] = cfg.policy.max_iter;
    m["solve.snapshot_times"] = cfg.snapshot_times;
    if (cfg.sweep) {
        m["sweep.param"] = cfg.sweep->param;
        m["sweep.values"] = cfg.sweep->values;
    }
    m["mc.dt_sim"] = cfg.mc.dt_sim;
    m["mc.n_paths"] = cfg.mc.n_paths;
    m["mc.seed"] = cfg.mc.seed;
    m["mc.start_x"] = cfg.mc.start_x;
    m["mc.start_t"] = cfg.mc.start_t;
    m["mc.tolerance"] = cfg.mc.tolerance;
    m["mc.threads"] = cfg.mc.threads;
    return m;
}

std::string provenance_line(const RunConfig& cfg) {
    std::string out = "# resolved:";
    bool first = true;
    for (const auto& [key, value] : to_config_map(cfg)) {
        out += first ? " " : "; ";
        first = false;
        out += key + " = " + dump_value(value);
    }
    return out;
}

ConfigMap parse_provenance_line(std::string_view line) {
    constexpr std::string_view prefix = "# resolved:";
    line = trim(line);
    if (line.substr(0, prefix.size()) != prefix) throw ConfigError("not a provenance line");
    return parse_config(line.substr(prefix.size()));
}

}  // namespace hjbi
