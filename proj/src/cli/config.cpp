// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/cli/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace sr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError(fmt::format("invalid value '{}' for key '{}': {}", value, key, why));
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "expected a non-negative integer");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    bad_value(key, value, "expected a finite number");
  }
  return out;
}

std::size_t parse_positive(std::string_view key, std::string_view value) {
  const auto v = parse_integer<std::size_t>(key, value);
  if (v == 0) bad_value(key, value, "must be at least 1");
  return v;
}

std::vector<std::size_t> parse_ranks(std::string_view key, std::string_view value) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto item = trim(value.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start));
    out.push_back(parse_positive(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename Fn>
auto parse_enum(std::string_view key, std::string_view value, Fn&& fn) {
  try {
    return fn(std::string(value));
  } catch (const Error& e) {
    bad_value(key, value, e.what());
  }
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"router",
       [](RunConfig& c, auto k, auto v) {
         c.experiment.routing.router = parse_enum(k, v, parse_router_kind);
       }},
      {"k", [](RunConfig& c, auto k, auto v) { c.experiment.routing.k = parse_positive(k, v); }},
      {"merge",
       [](RunConfig& c, auto k, auto v) {
         c.experiment.routing.strategy.kind = parse_enum(k, v, parse_merge_kind);
       }},
      {"weighting",
       [](RunConfig& c, auto k, auto v) {
         c.experiment.routing.strategy.weighting = parse_enum(k, v, parse_weighting);
       }},
      {"temperature",
       [](RunConfig& c, auto k, auto v) {
         const double t = parse_real(k, v);
         if (!(t > 0.0)) bad_value(k, v, "must be positive");
         c.experiment.routing.strategy.temperature = t;
       }},
      {"seed",
       [](RunConfig& c, auto k, auto v) { c.experiment.seed = parse_integer<std::uint64_t>(k, v); }},
      {"out_dir",
       [](RunConfig& c, auto k, auto v) {
         if (v.empty()) bad_value(k, v, "must not be empty");
         c.out_dir = std::string(v);
       }},
      {"ranks", [](RunConfig& c, auto k, auto v) { c.experiment.ranks = parse_ranks(k, v); }},
      {"tasks", [](RunConfig& c, auto k, auto v) { c.experiment.tasks = parse_positive(k, v); }},
      {"d_in", [](RunConfig& c, auto k, auto v) { c.experiment.d_in = parse_positive(k, v); }},
      {"d_out", [](RunConfig& c, auto k, auto v) { c.experiment.d_out = parse_positive(k, v); }},
      {"task_dim",
       [](RunConfig& c, auto k, auto v) { c.experiment.task_dim = parse_positive(k, v); }},
      {"rank", [](RunConfig& c, auto k, auto v) { c.experiment.rank = parse_positive(k, v); }},
      {"layers", [](RunConfig& c, auto k, auto v) { c.experiment.layers = parse_positive(k, v); }},
      {"n_per_task",
       [](RunConfig& c, auto k, auto v) { c.experiment.n_per_task = parse_positive(k, v); }},
      {"overlap_angle",
       [](RunConfig& c, auto k, auto v) {
         try {
           c.experiment.overlap_angle = parse_angle(v);
         } catch (const ConfigError& e) {
           bad_value(k, v, e.what());
         }
       }},
      {"noise_sigma",
       [](RunConfig& c, auto k, auto v) {
         const double s = parse_real(k, v);
         if (s < 0.0) bad_value(k, v, "must be >= 0");
         c.experiment.noise_sigma = s;
       }},
      {"spectrum_decay",
       [](RunConfig& c, auto k, auto v) {
         const double d = parse_real(k, v);
         if (!(d > 0.0 && d <= 1.0)) bad_value(k, v, "must lie in (0, 1]");
         c.experiment.spectrum_decay = d;
       }},
      {"forge",
       [](RunConfig& c, auto k, auto v) {
         c.experiment.forge = parse_enum(k, v, parse_forge_mode);
       }},
      {"learning_rate",
       [](RunConfig& c, auto k, auto v) {
         const double lr = parse_real(k, v);
         if (!(lr > 0.0)) bad_value(k, v, "must be positive");
         c.experiment.trainer.learning_rate = lr;
       }},
      {"steps",
       [](RunConfig& c, auto k, auto v) {
         c.experiment.trainer.steps = parse_integer<std::size_t>(k, v);
       }},
      {"batch_size",
       [](RunConfig& c, auto k, auto v) {
         c.experiment.trainer.batch_size = parse_integer<std::size_t>(k, v);
       }},
      {"train_samples",
       [](RunConfig& c, auto k, auto v) {
         c.experiment.trainer.train_samples = parse_positive(k, v);
       }},
      {"threads",
       [](RunConfig& c, auto k, auto v) {
         c.experiment.threads = parse_integer<std::size_t>(k, v);
       }},
      {"layer", [](RunConfig& c, auto k, auto v) { c.layer = parse_integer<std::size_t>(k, v); }},
  };
  return table;
}

const Setter* find_setter(std::string_view key) {
  for (const auto& [name, fn] : setters()) {
    if (name == key) return &fn;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& entry : setters()) out.push_back(entry.first);
    return out;
  }();
  return keys;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  const Setter* fn = find_setter(key);
  if (fn == nullptr) throw ConfigError(fmt::format("unknown config key '{}'", key));
  (*fn)(cfg, key, trim(value));
}

double parse_angle(std::string_view text) {
  const std::string_view s = trim(text);
  const auto pi_pos = s.find("pi");
  double value = 0.0;
  if (pi_pos == std::string_view::npos) {
    value = parse_real("overlap_angle", s);
  } else {
    double factor = 1.0, divisor = 1.0;
    const std::string_view head = trim(s.substr(0, pi_pos));
    const std::string_view tail = trim(s.substr(pi_pos + 2));
    if (!head.empty()) {
      if (head.back() != '*') throw ConfigError("malformed angle '" + std::string(s) + "'");
      factor = parse_real("overlap_angle", trim(head.substr(0, head.size() - 1)));
    }
    if (!tail.empty()) {
      if (tail.front() != '/') throw ConfigError("malformed angle '" + std::string(s) + "'");
      divisor = parse_real("overlap_angle", trim(tail.substr(1)));
      if (divisor == 0.0) throw ConfigError("angle divides by zero");
    }
    value = factor * std::numbers::pi / divisor;
  }
  if (!(value >= 0.0 && value <= std::numbers::pi / 2 + 1e-12)) {
    throw ConfigError("angle " + std::string(s) + " is outside [0, pi/2]");
  }
  return value;
}

RunConfig parse_config_text(std::string_view text, RunConfig base) {
  std::vector<std::string> unknown;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected key=value, got '{}'", line_no, line));
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    if (find_setter(key) == nullptr) {
      unknown.push_back(key);
      continue;
    }
    if (const auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(fmt::format("line {}: key '{}' already set on line {}", line_no, key,
                                    it->second));
    }
    seen.emplace(key, line_no);
    apply_setting(base, key, line.substr(eq + 1));
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(fmt::format("unknown config key{}: {}", unknown.size() > 1 ? "s" : "", list));
  }
  return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), std::move(base));
}

std::string dump_config(const RunConfig& cfg) {
  const ExperimentConfig& e = cfg.experiment;
  std::string ranks;
  for (std::size_t r : e.ranks) ranks += (ranks.empty() ? "" : ",") + std::to_string(r);
  return fmt::format(
      "router={}\nk={}\nmerge={}\nweighting={}\ntemperature={}\nseed={}\nout_dir={}\n"
      "ranks={}\ntasks={}\nd_in={}\nd_out={}\ntask_dim={}\nrank={}\nlayers={}\n"
      "n_per_task={}\noverlap_angle={}\nnoise_sigma={}\nspectrum_decay={}\nforge={}\n"
      "learning_rate={}\nsteps={}\nbatch_size={}\ntrain_samples={}\nthreads={}\nlayer={}\n",
      to_string(e.routing.router), e.routing.k, to_string(e.routing.strategy.kind),
      to_string(e.routing.strategy.weighting), e.routing.strategy.temperature, e.seed, cfg.out_dir,
      ranks, e.tasks, e.d_in, e.d_out, e.task_dim, e.rank, e.layers, e.n_per_task,
      e.overlap_angle, e.noise_sigma, e.spectrum_decay, to_string(e.forge),
      e.trainer.learning_rate, e.trainer.steps, e.trainer.batch_size, e.trainer.train_samples,
      e.threads, cfg.layer);
}

}  // namespace sr
