#include "becsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace becsim {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        while (pos < value.size() && std::isspace((unsigned char)value[pos])) ++pos;
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        long v = std::stol(value, &pos, 10);
        while (pos < value.size() && std::isspace((unsigned char)value[pos])) ++pos;
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return (int)v;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key, "expected true/false, got '" + value + "'");
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "delta") cfg.params.delta = parse_double(key, value);
    else if (key == "gamma") cfg.params.gamma = parse_double(key, value);
    else if (key == "v_coeff") cfg.params.v_coeff = parse_double(key, value);
    else if (key == "omega_coeff") cfg.params.omega_coeff = parse_double(key, value);
    else if (key == "e0") cfg.params.e0 = parse_double(key, value);
    else if (key == "k0L") cfg.params.k0L = parse_double(key, value);
    else if (key == "max_order") cfg.params.modes.max_order = parse_int(key, value);
    else if (key == "nx") cfg.params.grid.nx = parse_int(key, value);
    else if (key == "stencil") {
        if (value == "central2") cfg.params.grid.stencil = Stencil::central2;
        else if (value == "upwind1") cfg.params.grid.stencil = Stencil::upwind1;
        else throw ConfigError(key, "expected central2 or upwind1, got '" + value + "'");
    }
    else if (key == "dt") cfg.params.dt = parse_double(key, value);
    else if (key == "drop_spatial_derivatives") cfg.params.drop_spatial_derivatives = parse_bool(key, value);
    else if (key == "dt_pulse") cfg.schedule.dt_pulse = parse_double(key, value);
    else if (key == "tau") cfg.schedule.tau = parse_double(key, value);
    else if (key == "sample_every") cfg.sample_every = parse_int(key, value);
    else if (key == "tau_min") cfg.tau_min = parse_double(key, value);
    else if (key == "tau_max") cfg.tau_max = parse_double(key, value);
    else if (key == "tau_count") cfg.tau_count = parse_int(key, value);
    else if (key == "delta_min") cfg.delta_min = parse_double(key, value);
    else if (key == "delta_max") cfg.delta_max = parse_double(key, value);
    else if (key == "delta_count") cfg.delta_count = parse_int(key, value);
    else if (key == "independent_runs") cfg.independent_runs = parse_bool(key, value);
    else if (key == "no_fringe") cfg.no_fringe = parse_bool(key, value);
    else throw ConfigError(key, "unknown key");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno), "expected 'key = value'");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(file.string(), "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), file.filename().string());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "delta = " << fmt_double(c.params.delta) << "\n";
    out << "gamma = " << fmt_double(c.params.gamma) << "\n";
    out << "v_coeff = " << fmt_double(c.params.v_coeff) << "\n";
    out << "omega_coeff = " << fmt_double(c.params.omega_coeff) << "\n";
    out << "e0 = " << fmt_double(c.params.e0) << "\n";
    out << "k0L = " << fmt_double(c.params.k0L) << "\n";
    out << "max_order = " << c.params.modes.max_order << "\n";
    out << "nx = " << c.params.grid.nx << "\n";
    out << "stencil = " << (c.params.grid.stencil == Stencil::central2 ? "central2" : "upwind1") << "\n";
    out << "dt = " << fmt_double(c.params.dt) << "\n";
    out << "drop_spatial_derivatives = " << (c.params.drop_spatial_derivatives ? "true" : "false") << "\n";
    out << "dt_pulse = " << fmt_double(c.schedule.dt_pulse) << "\n";
    out << "tau = " << fmt_double(c.schedule.tau) << "\n";
    out << "sample_every = " << c.sample_every << "\n";
    out << "tau_min = " << fmt_double(c.tau_min) << "\n";
    out << "tau_max = " << fmt_double(c.tau_max) << "\n";
    out << "tau_count = " << c.tau_count << "\n";
    out << "delta_min = " << fmt_double(c.delta_min) << "\n";
    out << "delta_max = " << fmt_double(c.delta_max) << "\n";
    out << "delta_count = " << c.delta_count << "\n";
    out << "independent_runs = " << (c.independent_runs ? "true" : "false") << "\n";
    out << "no_fringe = " << (c.no_fringe ? "true" : "false") << "\n";
    return out.str();
}

std::string parameter_hash(const RunConfig& config) {
    const std::string text = serialize_config(config);
    uint64_t h = 1469598103934665603ull; // FNV-1a 64
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

} // namespace becsim
