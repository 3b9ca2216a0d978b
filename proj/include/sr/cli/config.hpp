// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Flat key=value run configuration. '#' starts a comment; blank lines are
// ignored. The same setters back the config file and the command-line flags,
// so both accept the same spellings.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sr/errors.hpp"
#include "sr/synth/experiment.hpp"

namespace sr {

// Unknown key, malformed line or unparseable value. Exit code 2.
class ConfigError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct RunConfig {
  ExperimentConfig experiment;
  std::string out_dir = ".";
  std::size_t layer = 0;  // layer routed by `route`
};

// Every accepted key, in documentation order.
const std::vector<std::string>& config_keys();

// Throws ConfigError on unknown keys or values that cannot be parsed or break
// k >= 1 / temperature > 0.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// Unknown keys are collected and reported together.
RunConfig parse_config_text(std::string_view text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

// Accepts plain radians or multiples of pi: "pi", "pi/4", "3*pi/8", "0.785".
double parse_angle(std::string_view text);

// key=value lines that parse back to the same configuration.
std::string dump_config(const RunConfig& cfg);

}  // namespace sr
