#pragma once

#include <iosfwd>
#include <string>

#include "spinboson/model.hpp"
#include "spinboson/multiscale.hpp"

namespace spinboson {

struct RunConfig {
    ModelParams params;
    MultiscaleOptions options;
    std::string out_dir = ".";
    bool emit_timing = false;  // wall time is kept out of summary.json by default
};

/// `key = value` lines, '#' comments, UTF-8. Unknown keys are rejected with
/// their line numbers; every knob has a documented default.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

/// Writes a config that reproduces the given parameters.
std::string render_config(const RunConfig& cfg);

}  // namespace spinboson
