#include "spinboson/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spinboson {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": not a number: " + value);
    }
    if (pos != value.size())
        throw ConfigError("line " + std::to_string(line) + ": trailing characters in " + value);
    return v;
}

long parse_int(const std::string& value, int line) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": not an integer: " + value);
    }
    if (pos != value.size())
        throw ConfigError("line " + std::to_string(line) + ": trailing characters in " + value);
    return v;
}

bool parse_bool(const std::string& value, int line) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ConfigError("line " + std::to_string(line) + ": not a boolean: " + value);
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    std::vector<std::string> bad_keys;

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");

        ModelParams& p = cfg.params;
        MultiscaleOptions& o = cfg.options;
        if (key == "g") p.g = parse_double(value, lineno);
        else if (key == "vartheta") p.vartheta = parse_double(value, lineno);
        else if (key == "lambda_uv") p.lambda_uv = parse_double(value, lineno);
        else if (key == "rho0") p.rho0 = parse_double(value, lineno);
        else if (key == "gamma") p.gamma = parse_double(value, lineno);
        else if (key == "n_scales") p.n_scales = static_cast<int>(parse_int(value, lineno));
        else if (key == "modes_per_shell") p.modes_per_shell = static_cast<int>(parse_int(value, lineno));
        else if (key == "modes_outer") p.modes_outer = static_cast<int>(parse_int(value, lineno));
        else if (key == "occupancy_cap") p.occupancy_cap = static_cast<int>(parse_int(value, lineno));
        else if (key == "total_cap") p.total_cap = static_cast<int>(parse_int(value, lineno));
        else if (key == "outer_kmax_factor") p.outer_kmax_factor = parse_double(value, lineno);
        else if (key == "basis_limit") p.basis_limit = static_cast<std::size_t>(parse_int(value, lineno));
        else if (key == "contour_nodes") o.contour_nodes = static_cast<int>(parse_int(value, lineno));
        else if (key == "idempotency_tol") o.idempotency_tol = parse_double(value, lineno);
        else if (key == "converge_tol") o.converge_tol = parse_double(value, lineno);
        else if (key == "renormalize_psi") o.renormalize_psi = parse_bool(value, lineno);
        else if (key == "audit_policy") {
            if (value == "warn") o.policy = AuditPolicy::WarnAndContinue;
            else if (value == "strict") o.policy = AuditPolicy::Strict;
            else throw ConfigError("line " + std::to_string(lineno) + ": audit_policy must be warn or strict");
        } else if (key == "audit_level") {
            if (value == "basic") o.level = AuditLevel::Basic;
            else if (value == "full") o.level = AuditLevel::Full;
            else throw ConfigError("line " + std::to_string(lineno) + ": audit_level must be basic or full");
        } else if (key == "enforce_chain") o.enforce_chain = parse_bool(value, lineno);
        else if (key == "keep_scale_operators") o.keep_scale_operators = parse_bool(value, lineno);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "emit_timing") cfg.emit_timing = parse_bool(value, lineno);
        else bad_keys.push_back(key + " (line " + std::to_string(lineno) + ")");
    }

    if (!bad_keys.empty()) {
        std::string msg = "unknown keys:";
        for (const auto& k : bad_keys) msg += " " + k;
        throw ConfigError(msg);
    }
    cfg.params.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

std::string render_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    const ModelParams& p = cfg.params;
    out << "g = " << p.g << "\n";
    out << "vartheta = " << p.vartheta << "\n";
    out << "lambda_uv = " << p.lambda_uv << "\n";
    out << "rho0 = " << p.rho0 << "\n";
    out << "gamma = " << p.gamma << "\n";
    out << "n_scales = " << p.n_scales << "\n";
    out << "modes_per_shell = " << p.modes_per_shell << "\n";
    out << "modes_outer = " << p.modes_outer << "\n";
    out << "occupancy_cap = " << p.occupancy_cap << "\n";
    out << "total_cap = " << p.total_cap << "\n";
    out << "outer_kmax_factor = " << p.outer_kmax_factor << "\n";
    return out.str();
}

}  // namespace spinboson
