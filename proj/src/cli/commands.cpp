// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/cli/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sr/bundle.hpp"
#include "sr/merge.hpp"
#include "sr/synth/experiment.hpp"

namespace sr {

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitSemantic;
  }
}

// Writes via a sibling temp file so a failed run leaves no partial output.
void write_text(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f << text;
    if (!f) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move output to '" + path.string() + "': " + ec.message());
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<Vector> read_vector_csv(const std::filesystem::path& path, std::size_t width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vector file '" + path.string() + "'");
  std::vector<Vector> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      std::string_view item(line.data() + start,
                            (comma == std::string::npos ? line.size() : comma) - start);
      while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.remove_prefix(1);
      while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.remove_suffix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() ||
          !std::isfinite(v)) {
        throw ParseError(fmt::format("{}:{}: '{}' is not a finite number", path.string(),
                                     line_no, item));
      }
      values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (values.size() != width) {
      throw ParseError(fmt::format("{}:{}: {} values, expected d_in={}", path.string(), line_no,
                                   values.size(), width));
    }
    tokens.emplace_back(std::move(values));
  }
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return tokens;
}

int cmd_align(const std::filesystem::path& in_path, const std::filesystem::path& out_path,
              const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const AdapterLibrary lib = load_bundle(in_path);
    if (lib.mode != LibraryMode::raw) {
      throw ValidationError("mode mismatch: '" + in_path.string() +
                            "' is already aligned; align expects a raw bundle");
    }
    const AdapterLibrary aligned = align_library(lib, cfg.experiment.threads);
    auto tmp = out_path;
    tmp += ".tmp";
    save_bundle(aligned, tmp);
    std::error_code ec;
    std::filesystem::rename(tmp, out_path, ec);
    if (ec) throw IoError("cannot move output to '" + out_path.string() + "': " + ec.message());

    fmt::print(out, "layer_id,experts,rank,sigma_max,sigma_min,mean_sigma1\n");
    for (const auto& layer : aligned.layers) {
      double smax = 0.0, smin = std::numeric_limits<double>::infinity(), sum1 = 0.0;
      std::size_t rank = 0;
      for (const auto& ex : layer.aligned) {
        rank = std::max(rank, ex.rank());
        for (double s : ex.singular_values) {
          smax = std::max(smax, s);
          smin = std::min(smin, s);
        }
        if (!ex.singular_values.empty()) sum1 += ex.singular_values.front();
      }
      if (layer.aligned.empty()) smin = 0.0;
      const double mean1 =
          layer.aligned.empty() ? 0.0 : sum1 / static_cast<double>(layer.aligned.size());
      fmt::print(out, "{},{},{},{},{},{}\n", layer.layer_id, layer.aligned.size(), rank,
                 format_number(smax), format_number(smin), format_number(mean1));
    }
    fmt::print(err, "wrote {}\n", out_path.string());
  });
}

int cmd_route(const std::filesystem::path& bundle, const std::filesystem::path& vector_file,
              const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    AdapterLibrary lib = load_bundle(bundle);
    if (lib.mode == LibraryMode::raw) lib = align_library(lib, cfg.experiment.threads);
    if (cfg.layer >= lib.layers.size()) {
      throw ParameterError(fmt::format("layer {} requested, bundle has {} layers", cfg.layer,
                                       lib.layers.size()));
    }
    const LibraryLayer& layer = lib.layers[cfg.layer];
    const std::vector<Vector> tokens = read_vector_csv(vector_file, layer.d_in);

    RoutingConfig routing = cfg.experiment.routing;
    const std::size_t count = layer.aligned.size();
    if (routing.k > count) {
      fmt::print(err, "note: k={} exceeds the {} experts of layer '{}'; using k={}\n", routing.k,
                 count, layer.layer_id, count);
      routing.k = count;
    }
    const AdaptedLayer adapted =
        make_adapted_layer(Matrix(layer.d_out, layer.d_in), layer, routing);

    std::string text = "token,layer_id";
    for (std::size_t t = 0; t < count; ++t) text += fmt::format(",score_{}", t);
    text += ",selected,weights\n";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const LayerRoute r = route_token(adapted, tokens[i]);
      text += fmt::format("{},{}", i, layer.layer_id);
      for (double s : r.scores.scores) text += "," + format_number(s);
      std::vector<std::string> sel, w;
      for (std::size_t t : r.decision.selected) sel.push_back(std::to_string(t));
      for (double v : r.decision.weights) w.push_back(format_number(v));
      text += "," + join(sel, ";") + "," + join(w, ";") + "\n";
    }
    out << text;
  });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig& e = cfg.experiment;
    validate_experiment(e);
    const auto start = std::chrono::steady_clock::now();

    const SyntheticSetup setup = build_synthetic(e, e.rank);
    const RoutingMetrics metrics = eval_routing_accuracy(setup.aligned, setup.tasks, e.routing.router,
                                                         e.routing.k, e.n_per_task, e.seed,
                                                         e.threads);
    fmt::print(err, "routing accuracy done ({:.2f} s)\n", elapsed_seconds(start));
    const std::vector<SweepRow> sweep = run_rank_sweep(e);
    fmt::print(err, "rank sweep done ({:.2f} s)\n", elapsed_seconds(start));
    const SimilarityMatrix sim = adapter_cosine_matrix(setup.raw);
    const OutputErrorStats oe =
        eval_output_error(setup, e.routing, std::min<std::size_t>(e.n_per_task, 200), e.seed,
                          e.threads);

    const std::filesystem::path dir = cfg.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    write_text(dir / "routing_accuracy.csv", routing_accuracy_csv({metrics}));
    write_text(dir / "rank_sweep.csv", rank_sweep_csv(sweep));
    write_text(dir / "similarity.csv", similarity_csv(sim));

    std::string s;
    s += fmt::format("config: tasks={} d_in={} d_out={} task_dim={} rank={} layers={} "
                     "n_per_task={} overlap_angle={} noise_sigma={} forge={} seed={}\n",
                     e.tasks, e.d_in, e.d_out, e.task_dim, e.rank, e.layers, e.n_per_task,
                     format_number(e.overlap_angle), format_number(e.noise_sigma),
                     to_string(e.forge), e.seed);
    s += fmt::format("\nrouting accuracy (router={}, k={})\n", to_string(metrics.router), metrics.k);
    s += fmt::format("{:<10} {:>8} {:>8}\n", "task", "top1", "topk");
    for (const auto& m : metrics.per_task) {
      s += fmt::format("{:<10} {:>8.4f} {:>8.4f}\n", m.task_id, m.top1, m.topk);
    }
    s += fmt::format("{:<10} {:>8.4f} {:>8.4f}\n", "average", metrics.mean_top1, metrics.mean_topk);
    s += fmt::format("random baseline (k/T): {:.3f}%\n", 100.0 * metrics.random_baseline);

    s += "\nrank sweep (mean score ratio, std)\n";
    s += fmt::format("{:>6} {:>18} {:>18}\n", "rank", "arrow", "spectr");
    for (std::size_t i = 0; i + 1 < sweep.size(); i += 2) {
      s += fmt::format("{:>6} {:>9.4f} ({:.4f}) {:>9.4f} ({:.4f})\n", sweep[i].rank,
                       sweep[i].stats.mean, sweep[i].stats.std, sweep[i + 1].stats.mean,
                       sweep[i + 1].stats.std);
    }

    s += fmt::format("\nadapter similarity: mean off-diagonal cosine {:.4f}\n",
                     sim.overall_off_diagonal());
    s += fmt::format("output error vs own expert (merge={}, weighting={}): {:.4f} over {} inputs\n",
                     to_string(e.routing.strategy.kind), to_string(e.routing.strategy.weighting),
                     oe.mean_relative_error, oe.n);
    s += fmt::format("\nwrote {}, {}, {}\n", (dir / "routing_accuracy.csv").string(),
                     (dir / "rank_sweep.csv").string(), (dir / "similarity.csv").string());
    out << s;
    fmt::print(err, "total {:.2f} s\n", elapsed_seconds(start));
  });
}

int cmd_inspect(const std::filesystem::path& bundle, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BundleHeader h = read_bundle_header(bundle);
    std::string s = h.header.dump(2) + "\n";
    s += fmt::format("header_bytes: {}\n", h.header_bytes);
    s += fmt::format("tensor_count: {}\n", h.tensor_count);
    s += fmt::format("payload_bytes: {}\n", h.payload_bytes);
    s += fmt::format("layers: {}\n", h.layer_count);
    s += fmt::format("experts_per_layer: {}\n", h.experts_per_layer);
    out << s;
  });
}

}  // namespace sr
