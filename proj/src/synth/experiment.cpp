// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/synth/experiment.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "sr/errors.hpp"
#include "sr/parallel.hpp"
#include "sr/random.hpp"

namespace sr {

namespace {

std::string layer_name(std::size_t l) { return "layer_" + std::to_string(l); }

void check_rank(std::size_t r, const ExperimentConfig& cfg) {
  if (r == 0 || r > cfg.d_in || r > cfg.d_out) {
    throw ParameterError("rank " + std::to_string(r) + " must lie in [1, min(d_in, d_out)]");
  }
}

}  // namespace

void validate_experiment(const ExperimentConfig& cfg) {
  if (cfg.tasks == 0) throw ParameterError("tasks must be positive");
  if (cfg.d_in == 0 || cfg.d_out == 0) throw ParameterError("dimensions must be positive");
  if (cfg.task_dim == 0 || cfg.task_dim > cfg.d_in) {
    throw ParameterError("task_dim must lie in [1, d_in]");
  }
  {
    // same block-fit rule as gen_tasks, checked early for a clearer message
    const bool orthogonal = std::abs(cfg.overlap_angle - std::numbers::pi / 2) <= 1e-12;
    const std::size_t blocks = cfg.tasks + (orthogonal ? 0 : 1);
    if (blocks * cfg.task_dim > cfg.d_in) {
      throw ParameterError(fmt::format("{} tasks of dimension {} need d_in >= {}, got {}", cfg.tasks,
                                       cfg.task_dim, blocks * cfg.task_dim, cfg.d_in));
    }
  }
  if (cfg.layers == 0) throw ParameterError("layers must be positive");
  if (cfg.layers > 1 && cfg.d_in != cfg.d_out) {
    throw ParameterError("stacked layers need d_in == d_out");
  }
  if (cfg.n_per_task == 0) throw ParameterError("n_per_task must be positive");
  check_rank(cfg.rank, cfg);
  if (cfg.ranks.empty()) throw ParameterError("ranks must not be empty");
  for (std::size_t r : cfg.ranks) check_rank(r, cfg);
  if (cfg.routing.k == 0 || cfg.routing.k > cfg.tasks) {
    throw ParameterError("k=" + std::to_string(cfg.routing.k) + " must lie in [1, tasks=" +
                         std::to_string(cfg.tasks) + "]");
  }
  if (!(cfg.routing.strategy.temperature > 0.0) ||
      !std::isfinite(cfg.routing.strategy.temperature)) {
    throw ParameterError("temperature must be positive");
  }
  if (!(cfg.spectrum_decay > 0.0 && cfg.spectrum_decay <= 1.0)) {
    throw ParameterError("spectrum_decay must lie in (0, 1]");
  }
  if (!(cfg.noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be >= 0");
}

SyntheticSetup build_synthetic(const ExperimentConfig& cfg, std::size_t rank) {
  validate_experiment(cfg);
  check_rank(rank, cfg);

  SyntheticSetup out;
  out.tasks = gen_tasks(cfg.tasks, cfg.d_in, cfg.task_dim, cfg.overlap_angle, cfg.seed,
                        cfg.noise_sigma);

  ExpertForgeConfig fcfg;
  fcfg.mode = cfg.forge;
  fcfg.rank = rank;
  fcfg.spectrum = geometric_spectrum(rank, cfg.spectrum_decay);
  fcfg.trainer = cfg.trainer;

  out.raw.mode = LibraryMode::raw;
  out.raw.layers.resize(cfg.layers);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    LibraryLayer& layer = out.raw.layers[l];
    layer.layer_id = layer_name(l);
    layer.d_in = cfg.d_in;
    layer.d_out = cfg.d_out;
    layer.raw.resize(cfg.tasks);
    Matrix frame;
    if (cfg.forge == ForgeMode::analytic) {
      frame = make_output_frame(cfg.d_out, cfg.d_out, derive_seed(cfg.seed, "frame", l));
    }
    parallel_for(cfg.tasks, cfg.threads, [&](std::size_t t) {
      const std::uint64_t s = derive_seed(cfg.seed, "expert", l * cfg.tasks + t);
      layer.raw[t] = cfg.forge == ForgeMode::analytic
                         ? forge_expert_analytic(out.tasks[t], fcfg, frame, s, layer.layer_id)
                         : forge_expert_sgd(out.tasks[t], fcfg, cfg.d_out, s, layer.layer_id).adapter;
    });
    Rng rng = make_rng(cfg.seed, "base", l);
    out.base_weights.push_back(
        gaussian_matrix(cfg.d_out, cfg.d_in, rng, 1.0 / std::sqrt(static_cast<double>(cfg.d_in))));
  }
  out.aligned = align_library(out.raw, cfg.threads);
  return out;
}

std::vector<SweepRow> run_rank_sweep(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  std::vector<SweepRow> rows;
  for (std::size_t r : cfg.ranks) {
    const SyntheticSetup setup = build_synthetic(cfg, r);
    for (RouterKind router : {RouterKind::arrow, RouterKind::spectr}) {
      rows.push_back(SweepRow{r, router,
                              eval_score_ratio(setup.aligned, setup.tasks, router, cfg.n_per_task,
                                               cfg.seed, cfg.threads)});
    }
  }
  return rows;
}

OutputErrorStats eval_output_error(const SyntheticSetup& setup, const RoutingConfig& routing,
                                   std::size_t n_per_task, std::uint64_t seed,
                                   std::size_t threads) {
  if (setup.aligned.layers.empty() || setup.base_weights.empty()) {
    throw ParameterError("setup has no layers");
  }
  const AdaptedLayer layer =
      make_adapted_layer(setup.base_weights.front(), setup.aligned.layers.front(), routing);
  const auto& raw = setup.raw.layers.front().raw;
  if (raw.size() != setup.tasks.size()) throw ParameterError("expert count does not match tasks");

  std::vector<double> sums(setup.tasks.size(), 0.0);
  std::vector<std::size_t> counts(setup.tasks.size(), 0);
  parallel_for(setup.tasks.size(), threads, [&](std::size_t t) {
    for (const Vector& x :
         sample_inputs(setup.tasks[t], n_per_task, derive_seed(seed, "output-error", t))) {
      const Vector delta = matvec(raw[t].b, matvec(raw[t].a, x));
      const double scale = norm2(delta);
      if (!(scale > 0.0)) continue;
      const Vector truth = matvec(layer.w, x) + delta;
      const Vector routed = forward_layer(layer, x).output;
      sums[t] += norm2(routed - truth) / scale;
      ++counts[t];
    }
  });
  OutputErrorStats out;
  double total = 0.0;
  for (std::size_t t = 0; t < sums.size(); ++t) {
    total += sums[t];
    out.n += counts[t];
  }
  if (out.n > 0) out.mean_relative_error = total / static_cast<double>(out.n);
  return out;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  return fmt::format("{:.6g}", v);
}

std::string routing_accuracy_csv(const std::vector<RoutingMetrics>& runs) {
  std::string out = "task_id,router,k,top1,topk,n\n";
  for (const auto& run : runs) {
    for (const auto& m : run.per_task) {
      out += fmt::format("{},{},{},{},{},{}\n", m.task_id, to_string(run.router), run.k,
                         format_number(m.top1), format_number(m.topk), m.n);
    }
  }
  return out;
}

std::string rank_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "rank,router,mean_ratio,std_ratio,n\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.rank, to_string(r.router),
                       format_number(r.stats.mean), format_number(r.stats.std), r.stats.n);
  }
  return out;
}

std::string similarity_csv(const SimilarityMatrix& sim) {
  std::string out = "task_i,task_j,cosine\n";
  const std::size_t count = sim.expert_ids.size();
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      out += fmt::format("{},{},{}\n", sim.expert_ids[i], sim.expert_ids[j],
                         format_number(sim.cosine(i, j)));
    }
  }
  return out;
}

}  // namespace sr
