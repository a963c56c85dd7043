#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "becsim/params.hpp"

namespace becsim {

// Everything a run or sweep needs, resolvable from (reference parameters) <
// (config file) < (command-line overrides). The keys of the file format are
// exactly the field names below; see README for the schema.
struct RunConfig {
    DimensionlessParams params;
    PulseSchedule schedule;
    int sample_every = 100;

    // delay-sweep grid
    double tau_min = 3000.0;
    double tau_max = 90000.0;
    int tau_count = 50;

    // detuning-sweep grid
    double delta_min = -12.0;
    double delta_max = 12.0;
    int delta_count = 25;

    bool independent_runs = false; // delay sweeps: one full run per tau
    bool no_fringe = false;        // detuning sweeps: skip the per-delta fringe fit

    void validate() const {
        params.validate();
        schedule.validate();
        if (sample_every <= 0) throw ConfigError("sample_every", "must be positive");
        if (tau_count < 1) throw ConfigError("tau_count", "must be >= 1");
        if (delta_count < 1) throw ConfigError("delta_count", "must be >= 1");
        if (!(tau_max >= tau_min)) throw ConfigError("tau_max", "must be >= tau_min");
        if (!(delta_max >= delta_min)) throw ConfigError("delta_max", "must be >= delta_min");
    }
};

// `key = value` per line, '#' comments. Unknown keys and malformed values
// raise ConfigError naming the key.
RunConfig load_config(const std::filesystem::path& file);
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Canonical text form: fixed key order, doubles printed round-trip exact.
// Parsing the output reproduces the config bit-exactly.
std::string serialize_config(const RunConfig& config);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// FNV-1a digest of the canonical serialization; stable across runs.
std::string parameter_hash(const RunConfig& config);

// Round-trip exact double formatting (%.17g).
std::string fmt_double(double v);

} // namespace becsim
