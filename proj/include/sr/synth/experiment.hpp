// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic experiments: library construction, rank sweep, CSV writers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sr/adapter.hpp"
#include "sr/merge.hpp"
#include "sr/synth/eval.hpp"
#include "sr/synth/forge.hpp"
#include "sr/synth/tasks.hpp"

namespace sr {

struct ExperimentConfig {
  std::size_t tasks = 9;
  std::size_t d_in = 64;
  std::size_t d_out = 64;
  std::size_t task_dim = 4;
  std::size_t rank = 8;
  std::size_t layers = 1;
  std::size_t n_per_task = 1000;
  double overlap_angle = std::numbers::pi / 4;
  double noise_sigma = 0.0;
  double spectrum_decay = 1.0;  // 1 = flat
  ForgeMode forge = ForgeMode::analytic;
  TrainerConfig trainer;
  RoutingConfig routing;
  std::vector<std::size_t> ranks = {1, 2, 4, 8, 16};
  std::uint64_t seed = 7;
  std::size_t threads = 1;
};

// Throws ParameterError on inconsistent settings.
void validate_experiment(const ExperimentConfig& cfg);

struct SyntheticSetup {
  std::vector<TaskSpec> tasks;
  AdapterLibrary raw;
  AdapterLibrary aligned;
  std::vector<Matrix> base_weights;  // one per layer
};

// Tasks, base weights and evaluation inputs depend only on the seed, so every
// rank of a sweep sees the same tasks and samples.
SyntheticSetup build_synthetic(const ExperimentConfig& cfg, std::size_t rank);

struct SweepRow {
  std::size_t rank = 0;
  RouterKind router = RouterKind::spectr;
  ScoreRatioStats stats;
};

// Arrow and SpectR rows for every rank in cfg.ranks, in that order.
std::vector<SweepRow> run_rank_sweep(const ExperimentConfig& cfg);

// Mean relative error ||y_routed - y_truth|| / ||B_t A_t x|| on layer 0, where
// y_truth applies only the task's own expert.
struct OutputErrorStats {
  double mean_relative_error = 0.0;
  std::size_t n = 0;
};

OutputErrorStats eval_output_error(const SyntheticSetup& setup, const RoutingConfig& routing,
                                   std::size_t n_per_task, std::uint64_t seed,
                                   std::size_t threads = 1);

// Number formatting: 6 significant digits, '.' decimal separator.
std::string format_number(double v);

std::string routing_accuracy_csv(const std::vector<RoutingMetrics>& runs);
std::string rank_sweep_csv(const std::vector<SweepRow>& rows);
std::string similarity_csv(const SimilarityMatrix& sim);

}  // namespace sr
