// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// salb: align, route, simulate and inspect adapter bundles.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sr/cli/commands.hpp"
#include "sr/cli/config.hpp"

namespace {

struct Overrides {
  std::optional<std::string> router, k, merge, weighting, temperature, seed, out_dir, ranks, layer;
  std::vector<std::string> set;  // generic key=value
};

void add_override_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--router", o.router, "mu, arrow or spectr");
  cmd.add_option("--k", o.k, "experts selected per token");
  cmd.add_option("--merge", o.merge, "two_step or fused");
  cmd.add_option("--weighting", o.weighting, "uniform or softmax");
  cmd.add_option("--temperature", o.temperature, "softmax temperature");
  cmd.add_option("--seed", o.seed, "64-bit experiment seed");
  cmd.add_option("--out-dir", o.out_dir, "directory for CSV outputs");
  cmd.add_option("--ranks", o.ranks, "comma separated rank list for the sweep");
  cmd.add_option("--set", o.set, "any config key as key=value (repeatable)");
}

// Config file first, then flags, so flags win.
sr::RunConfig resolve(const std::string& config_path, const Overrides& o) {
  sr::RunConfig cfg;
  if (!config_path.empty()) cfg = sr::load_config_file(config_path);
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw sr::ConfigError("--set expects key=value, got '" + kv + "'");
    sr::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  const std::pair<const char*, const std::optional<std::string>*> flags[] = {
      {"router", &o.router},   {"k", &o.k},         {"merge", &o.merge},
      {"weighting", &o.weighting}, {"temperature", &o.temperature}, {"seed", &o.seed},
      {"out_dir", &o.out_dir}, {"ranks", &o.ranks}, {"layer", &o.layer},
  };
  for (const auto& [key, value] : flags) {
    if (*value) sr::apply_setting(cfg, key, **value);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral routing of LoRA adapter libraries"};
  app.require_subcommand(1);

  std::string in_path, out_path, bundle_path, vector_path, config_path;
  Overrides o;

  auto* align = app.add_subcommand("align", "Spectrally align a raw bundle");
  align->add_option("input", in_path, "raw SALB bundle")->required();
  align->add_option("output", out_path, "aligned SALB bundle to write")->required();
  align->add_option("--config", config_path, "key=value config file");
  add_override_flags(*align, o);

  auto* route = app.add_subcommand("route", "Score and select experts for token vectors");
  route->add_option("bundle", bundle_path, "SALB bundle (raw bundles are aligned in memory)")
      ->required();
  route->add_option("vectors", vector_path, "CSV file, one token vector per line")->required();
  route->add_option("--config", config_path, "key=value config file");
  route->add_option("--layer", o.layer, "layer index to route (default 0)");
  add_override_flags(*route, o);

  auto* simulate = app.add_subcommand("simulate", "Run the synthetic experiments");
  simulate->add_option("config", config_path, "key=value config file");
  add_override_flags(*simulate, o);

  auto* sweep = app.add_subcommand("sweep", "Alias of simulate, usually with --ranks");
  sweep->add_option("config", config_path, "key=value config file");
  add_override_flags(*sweep, o);

  auto* inspect = app.add_subcommand("inspect", "Print a bundle header without reading the payload");
  inspect->add_option("bundle", bundle_path, "SALB bundle")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? sr::kExitOk : sr::kExitInput;
  }

  if (inspect->parsed()) return sr::cmd_inspect(bundle_path, std::cout, std::cerr);

  sr::RunConfig cfg;
  try {
    cfg = resolve(config_path, o);
  } catch (const sr::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sr::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sr::kExitSemantic;
  }

  if (align->parsed()) return sr::cmd_align(in_path, out_path, cfg, std::cout, std::cerr);
  if (route->parsed()) return sr::cmd_route(bundle_path, vector_path, cfg, std::cout, std::cerr);
  return sr::cmd_simulate(cfg, std::cout, std::cerr);
}
