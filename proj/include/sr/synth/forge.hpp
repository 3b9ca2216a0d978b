// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Expert construction for synthetic tasks.
//
// Analytic experts have B * A = U diag(spectrum) V^T where V's leading
// min(r, m) columns are the task basis and any further columns are random
// directions orthogonal to it. U is an output frame shared by every expert of
// a layer, so similar tasks produce similar updates. The factors are mixed by
// a random orthogonal gauge G (B = U diag(s) G, A = G^T V^T), as trained
// factors would be.
//
// SGD experts are trained on a least-squares regression of a random linear
// map restricted to task inputs, starting from B = 0.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sr/adapter.hpp"
#include "sr/synth/tasks.hpp"
#include "sr/tensor.hpp"

namespace sr {

enum class ForgeMode { analytic, sgd };

const char* to_string(ForgeMode mode) noexcept;
ForgeMode parse_forge_mode(const std::string& name);

struct TrainerConfig {
  double learning_rate = 1e-4;
  std::size_t steps = 1000;
  std::size_t batch_size = 8;  // 0 or >= train_samples means full batch
  std::size_t train_samples = 256;
  double divergence_threshold = 1e6;
};

struct ExpertForgeConfig {
  ForgeMode mode = ForgeMode::analytic;
  std::size_t rank = 8;
  std::vector<double> spectrum;  // analytic: rank positive values, non-increasing
  TrainerConfig trainer;
};

// decay^i for i in [0, rank); decay = 1 is a flat spectrum.
std::vector<double> geometric_spectrum(std::size_t rank, double decay = 1.0);

// d_out x cols random orthonormal frame.
Matrix make_output_frame(std::size_t d_out, std::size_t cols, std::uint64_t seed);

LoraAdapter forge_expert_analytic(const TaskSpec& task, const ExpertForgeConfig& cfg,
                                  const Matrix& output_frame, std::uint64_t seed,
                                  const std::string& layer_id = "layer_0");

// Rows of `inputs` are samples; targets = inputs * map^T.
struct RegressionProblem {
  Matrix inputs;   // n x d_in
  Matrix targets;  // n x d_out
};

RegressionProblem make_regression_problem(const TaskSpec& task, std::size_t d_out,
                                          std::size_t n, std::uint64_t seed);

// 1/(2n) * sum ||B A x_i - y_i||^2 over `rows` (all rows when empty).
double lora_loss(const RegressionProblem& p, const Matrix& b, const Matrix& a,
                 std::span<const std::size_t> rows = {});

struct LoraGradient {
  Matrix b;
  Matrix a;
};

LoraGradient lora_gradient(const RegressionProblem& p, const Matrix& b, const Matrix& a,
                           std::span<const std::size_t> rows = {});

struct TrainingResult {
  LoraAdapter adapter;
  std::vector<double> loss_history;  // full-data loss, steps + 1 entries
};

// Throws TrainingError (carrying the loss trace) if the loss exceeds the
// divergence threshold or becomes non-finite.
TrainingResult forge_expert_sgd(const TaskSpec& task, const ExpertForgeConfig& cfg,
                                std::size_t d_out, std::uint64_t seed,
                                const std::string& layer_id = "layer_0");

}  // namespace sr
