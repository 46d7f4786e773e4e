#pragma once

// Flat key = value scenario configuration. Frequencies are written as
// *_over_2pi_hz in the file and converted to angular rad/s exactly once at
// load; everything downstream works in rad/s. Unknown keys are hard errors so
// misspellings cannot silently fall back to defaults.

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "septrap/constants.hpp"
#include "septrap/coulomb_coupling.hpp"

namespace septrap {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::string scenario;          // pulse | exchange | sweep | cnot | chain
    std::string species = "Be9";
    std::string mode = "closed-form"; // closed-form | full-numeric

    // frequencies stored both ways; the Hz value is what the file carries
    double nu1_hz = 0, nu2_hz = 0, rabi_hz = 0, delta_hz = 0;
    double nu1 = 0, nu2 = 0, rabi = 0, delta = 0; // rad/s

    double distance = 0;  // m
    double eta = 0;
    int sideband_k = 1;
    double theta1 = 0;
    double theta3 = 0;
    double theta5 = 1.5 * constants::pi;
    double tau = 0;       // s
    int n_max = 0;        // 0 = scenario default (20 single-ion, 10 per mode)
    int n_ions = 2;
    int order_cutoff = 8;
    double tol = 1e-8;
    bool compensate_hold = false;
    double duration = 0;  // s, optional pulse/exchange override
    int samples = 200;
    std::string output_csv; // empty = <scenario>.csv

    int effective_n_max() const {
        if (n_max > 0) return n_max;
        return scenario == "pulse" ? 20 : 10;
    }

    IonSpecies ion() const {
        if (species == "Be9") return IonSpecies::be9();
        throw ConfigError("config error: unknown species '" + species + "'");
    }

    TrapPair pair() const {
        return TrapPair{ion(), ion(), nu1, nu2, distance};
    }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(value.c_str(), &end);
    if (errno != 0 || end == value.c_str() || *end != '\0')
        throw ConfigError("config error: " + key + " is not a number: '" + value + "'");
    return v;
}

inline int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const int i = int(v);
    if (double(i) != v)
        throw ConfigError("config error: " + key + " must be an integer: '" + value + "'");
    return i;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("config error: " + key + " must be true or false: '" + value + "'");
}

inline std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace detail

inline ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;
    std::map<std::string, std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config error: line " + std::to_string(lineno) +
                              " is not 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config error: line " + std::to_string(lineno) +
                              " is not 'key = value'");
        if (!seen.emplace(key, value).second)
            throw ConfigError("config error: duplicate key " + key);

        using detail::parse_bool;
        using detail::parse_double;
        using detail::parse_int;
        if (key == "scenario") c.scenario = value;
        else if (key == "species") c.species = value;
        else if (key == "mode") c.mode = value;
        else if (key == "nu1_over_2pi_hz") { c.nu1_hz = parse_double(key, value); c.nu1 = constants::two_pi * c.nu1_hz; }
        else if (key == "nu2_over_2pi_hz") { c.nu2_hz = parse_double(key, value); c.nu2 = constants::two_pi * c.nu2_hz; }
        else if (key == "rabi_over_2pi_hz") { c.rabi_hz = parse_double(key, value); c.rabi = constants::two_pi * c.rabi_hz; }
        else if (key == "delta_over_2pi_hz") { c.delta_hz = parse_double(key, value); c.delta = constants::two_pi * c.delta_hz; }
        else if (key == "distance_m") c.distance = parse_double(key, value);
        else if (key == "eta") c.eta = parse_double(key, value);
        else if (key == "sideband_k") c.sideband_k = parse_int(key, value);
        else if (key == "theta1_rad") c.theta1 = parse_double(key, value);
        else if (key == "theta3_rad") c.theta3 = parse_double(key, value);
        else if (key == "theta5_rad") c.theta5 = parse_double(key, value);
        else if (key == "tau_s") c.tau = parse_double(key, value);
        else if (key == "n_max") c.n_max = parse_int(key, value);
        else if (key == "n_ions") c.n_ions = parse_int(key, value);
        else if (key == "order_cutoff") c.order_cutoff = parse_int(key, value);
        else if (key == "tol") c.tol = parse_double(key, value);
        else if (key == "compensate_hold") c.compensate_hold = parse_bool(key, value);
        else if (key == "duration_s") c.duration = parse_double(key, value);
        else if (key == "samples") c.samples = parse_int(key, value);
        else if (key == "output_csv") c.output_csv = value;
        else throw ConfigError("config error: unknown key " + key);
    }
    return c;
}

inline void validate_config(const ScenarioConfig& c) {
    const auto require_positive = [](double v, const std::string& key) {
        if (v <= 0) throw ConfigError("config error: " + key + " must be positive");
    };
    if (c.scenario != "pulse" && c.scenario != "exchange" && c.scenario != "sweep" &&
        c.scenario != "cnot" && c.scenario != "chain")
        throw ConfigError("config error: scenario must be one of pulse, exchange, sweep, "
                          "cnot, chain");
    if (c.mode != "closed-form" && c.mode != "full-numeric")
        throw ConfigError("config error: mode must be closed-form or full-numeric");
    c.ion(); // species check
    if (c.n_max < 0) throw ConfigError("config error: n_max must be >= 1");
    if (c.eta < 0) throw ConfigError("config error: eta must be >= 0");
    if (c.tol <= 0) throw ConfigError("config error: tol must be positive");
    if (c.samples < 2) throw ConfigError("config error: samples must be >= 2");
    if (c.duration < 0) throw ConfigError("config error: duration_s must be >= 0");

    require_positive(c.nu1_hz, "nu1_over_2pi_hz");
    if (c.scenario == "pulse") {
        require_positive(c.rabi_hz, "rabi_over_2pi_hz");
        if (c.sideband_k < 0) throw ConfigError("config error: sideband_k must be >= 0");
        return;
    }
    require_positive(c.nu2_hz, "nu2_over_2pi_hz");
    require_positive(c.distance, "distance_m (d)");
    if (c.scenario == "exchange") return;
    require_positive(c.tau, "tau_s");
    if (c.delta_hz < 0) throw ConfigError("config error: delta_over_2pi_hz must be >= 0");
    if (c.scenario == "sweep") return;
    require_positive(c.rabi_hz, "rabi_over_2pi_hz");
    if (c.scenario == "chain" && c.n_ions < 2)
        throw ConfigError("config error: n_ions must be >= 2");
}

inline ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ScenarioConfig c = parse_config(ss.str());
    validate_config(c);
    return c;
}

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string serialize_config(const ScenarioConfig& c) {
    std::ostringstream out;
    const auto kv = [&](const std::string& k, const std::string& v) {
        out << k << " = " << v << "\n";
    };
    kv("scenario", c.scenario);
    kv("species", c.species);
    kv("mode", c.mode);
    kv("nu1_over_2pi_hz", detail::fmt_g17(c.nu1_hz));
    if (c.nu2_hz > 0) kv("nu2_over_2pi_hz", detail::fmt_g17(c.nu2_hz));
    if (c.rabi_hz > 0) kv("rabi_over_2pi_hz", detail::fmt_g17(c.rabi_hz));
    if (c.delta_hz > 0) kv("delta_over_2pi_hz", detail::fmt_g17(c.delta_hz));
    if (c.distance > 0) kv("distance_m", detail::fmt_g17(c.distance));
    kv("eta", detail::fmt_g17(c.eta));
    kv("sideband_k", std::to_string(c.sideband_k));
    kv("theta1_rad", detail::fmt_g17(c.theta1));
    kv("theta3_rad", detail::fmt_g17(c.theta3));
    kv("theta5_rad", detail::fmt_g17(c.theta5));
    if (c.tau > 0) kv("tau_s", detail::fmt_g17(c.tau));
    if (c.n_max > 0) kv("n_max", std::to_string(c.n_max));
    kv("n_ions", std::to_string(c.n_ions));
    kv("order_cutoff", std::to_string(c.order_cutoff));
    kv("tol", detail::fmt_g17(c.tol));
    kv("compensate_hold", c.compensate_hold ? "true" : "false");
    if (c.duration > 0) kv("duration_s", detail::fmt_g17(c.duration));
    kv("samples", std::to_string(c.samples));
    if (!c.output_csv.empty()) kv("output_csv", c.output_csv);
    return out.str();
}

// Feasibility scaling: Rabi frequency grows as sqrt(laser power), exchange
// coupling follows from the new distance downstream (g ~ 1/d^3).
inline ScenarioConfig scale_parameters(const ScenarioConfig& base, double power_factor,
                                       double distance) {
    if (power_factor <= 0) throw ConfigError("config error: power_factor must be positive");
    if (distance <= 0) throw ConfigError("config error: distance must be positive");
    ScenarioConfig c = base;
    c.rabi_hz = base.rabi_hz * std::sqrt(power_factor);
    c.rabi = constants::two_pi * c.rabi_hz;
    c.distance = distance;
    return c;
}

} // namespace septrap
