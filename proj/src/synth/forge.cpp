// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/synth/forge.hpp"

#include <cmath>
#include <numeric>

#include "sr/errors.hpp"
#include "sr/linalg.hpp"
#include "sr/random.hpp"

namespace sr {

namespace {

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
  if (rows.empty()) return m;
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m.rows()) throw ShapeError("row index out of range");
    const auto src = m.row(rows[i]);
    auto dst = out.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

void check_problem(const RegressionProblem& p, const Matrix& b, const Matrix& a) {
  if (p.inputs.rows() != p.targets.rows() || p.inputs.rows() == 0) {
    throw ShapeError("regression problem: inputs and targets disagree on sample count");
  }
  if (a.cols() != p.inputs.cols() || b.rows() != p.targets.cols() || b.cols() != a.rows()) {
    throw ShapeError("regression problem: factor shapes do not match the data");
  }
}

// Residuals E = X A^T B^T - Y plus the hidden H = X A^T.
struct Residual {
  Matrix hidden;
  Matrix error;
};

Residual residual(const Matrix& x, const Matrix& y, const Matrix& b, const Matrix& a) {
  Matrix h = matmul_nt(x, a);
  Matrix e = matmul_nt(h, b) - y;
  return {std::move(h), std::move(e)};
}

}  // namespace

const char* to_string(ForgeMode mode) noexcept {
  return mode == ForgeMode::analytic ? "analytic" : "sgd";
}

ForgeMode parse_forge_mode(const std::string& name) {
  if (name == "analytic") return ForgeMode::analytic;
  if (name == "sgd") return ForgeMode::sgd;
  throw ParameterError("unknown forge mode '" + name + "' (expected analytic or sgd)");
}

std::vector<double> geometric_spectrum(std::size_t rank, double decay) {
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw ParameterError("spectrum decay must lie in (0, 1]");
  }
  std::vector<double> s(rank);
  double v = 1.0;
  for (auto& x : s) {
    x = v;
    v *= decay;
  }
  return s;
}

Matrix make_output_frame(std::size_t d_out, std::size_t cols, std::uint64_t seed) {
  if (cols == 0 || cols > d_out) throw ParameterError("output frame needs 1 <= cols <= d_out");
  Rng rng(seed);
  return random_orthonormal(d_out, cols, rng);
}

LoraAdapter forge_expert_analytic(const TaskSpec& task, const ExpertForgeConfig& cfg,
                                  const Matrix& output_frame, std::uint64_t seed,
                                  const std::string& layer_id) {
  const std::size_t r = cfg.rank;
  const std::size_t d_in = task.d_in();
  const std::size_t m = task.dim();
  if (r == 0) throw ParameterError("rank must be positive");
  if (r > d_in) throw ParameterError("rank exceeds the input dimension");
  if (output_frame.cols() < r) {
    throw ParameterError("output frame has " + std::to_string(output_frame.cols()) +
                         " columns, rank " + std::to_string(r) + " requested");
  }
  if (cfg.spectrum.size() != r) {
    throw ParameterError("spectrum has " + std::to_string(cfg.spectrum.size()) +
                         " values for rank " + std::to_string(r));
  }
  for (std::size_t i = 0; i < r; ++i) {
    const double s = cfg.spectrum[i];
    if (!std::isfinite(s) || s <= 0.0) throw ParameterError("spectrum values must be positive");
    if (i > 0 && s > cfg.spectrum[i - 1]) {
      throw ParameterError("spectrum must be non-increasing");
    }
  }

  Rng rng(seed);

  // Input directions: task basis first, then random directions orthogonal to it.
  Matrix v(d_in, r);
  const std::size_t own = std::min(r, m);
  for (std::size_t j = 0; j < own; ++j) v.set_column(j, task.basis.column(j).values());
  if (r > m) {
    Matrix g = gaussian_matrix(d_in, r - m, rng);
    for (int pass = 0; pass < 2; ++pass) {
      g = g - matmul(task.basis, matmul_tn(task.basis, g));
    }
    const Matrix pad = thin_qr(g).q;
    for (std::size_t j = 0; j < r - m; ++j) v.set_column(m + j, pad.column(j).values());
  }

  Matrix us = output_frame.column_block(0, r);
  for (std::size_t i = 0; i < us.rows(); ++i) {
    for (std::size_t j = 0; j < r; ++j) us(i, j) *= cfg.spectrum[j];
  }
  const Matrix gauge = random_orthonormal(r, r, rng);
  return LoraAdapter{task.task_id, layer_id, matmul(us, gauge), matmul(v, gauge).transpose()};
}

RegressionProblem make_regression_problem(const TaskSpec& task, std::size_t d_out,
                                          std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ParameterError("regression problem needs at least one sample");
  if (d_out == 0) throw ParameterError("output dimension must be positive");
  Rng rng = make_rng(seed, "target-map");
  const Matrix map =
      gaussian_matrix(d_out, task.d_in(), rng, 1.0 / std::sqrt(static_cast<double>(task.d_in())));
  const auto xs = sample_inputs(task, n, derive_seed(seed, "train-inputs"));
  Matrix inputs(n, task.d_in());
  for (std::size_t i = 0; i < n; ++i) {
    auto row = inputs.row(i);
    std::copy(xs[i].begin(), xs[i].end(), row.begin());
  }
  Matrix targets = matmul_nt(inputs, map);
  return {std::move(inputs), std::move(targets)};
}

double lora_loss(const RegressionProblem& p, const Matrix& b, const Matrix& a,
                 std::span<const std::size_t> rows) {
  check_problem(p, b, a);
  const Matrix x = select_rows(p.inputs, rows);
  const Matrix y = select_rows(p.targets, rows);
  const Residual res = residual(x, y, b, a);
  const double f = frobenius_norm(res.error);
  return 0.5 * f * f / static_cast<double>(x.rows());
}

LoraGradient lora_gradient(const RegressionProblem& p, const Matrix& b, const Matrix& a,
                           std::span<const std::size_t> rows) {
  check_problem(p, b, a);
  const Matrix x = select_rows(p.inputs, rows);
  const Matrix y = select_rows(p.targets, rows);
  const Residual res = residual(x, y, b, a);
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  // dL/dB = E^T H / n,  dL/dA = (E B)^T X / n
  return {inv_n * matmul_tn(res.error, res.hidden), inv_n * matmul_tn(matmul(res.error, b), x)};
}

TrainingResult forge_expert_sgd(const TaskSpec& task, const ExpertForgeConfig& cfg,
                                std::size_t d_out, std::uint64_t seed,
                                const std::string& layer_id) {
  const TrainerConfig& tc = cfg.trainer;
  const std::size_t r = cfg.rank;
  if (r == 0) throw ParameterError("rank must be positive");
  if (!(tc.learning_rate > 0.0) || !std::isfinite(tc.learning_rate)) {
    throw ParameterError("learning rate must be positive");
  }
  if (tc.train_samples == 0) throw ParameterError("train_samples must be positive");

  const RegressionProblem problem =
      make_regression_problem(task, d_out, tc.train_samples, derive_seed(seed, "problem"));
  Rng rng = make_rng(seed, "sgd");
  Matrix b(d_out, r);
  Matrix a =
      gaussian_matrix(r, task.d_in(), rng, 1.0 / std::sqrt(static_cast<double>(task.d_in())));

  const bool full_batch = tc.batch_size == 0 || tc.batch_size >= tc.train_samples;
  std::vector<std::size_t> batch(full_batch ? 0 : tc.batch_size);
  std::uniform_int_distribution<std::size_t> pick(0, tc.train_samples - 1);

  std::vector<double> history;
  history.reserve(tc.steps + 1);
  auto record = [&](std::size_t step) {
    const double loss = lora_loss(problem, b, a);
    history.push_back(loss);
    if (!std::isfinite(loss) || loss > tc.divergence_threshold) {
      throw TrainingError("training diverged at step " + std::to_string(step) + " (loss " +
                              std::to_string(loss) + "); lower the learning rate",
                          history);
    }
  };

  record(0);
  for (std::size_t step = 1; step <= tc.steps; ++step) {
    for (auto& i : batch) i = pick(rng);
    const LoraGradient g = lora_gradient(problem, b, a, batch);
    b = b - tc.learning_rate * g.b;
    a = a - tc.learning_rate * g.a;
    record(step);
  }
  return {LoraAdapter{task.task_id, layer_id, std::move(b), std::move(a)}, std::move(history)};
}

}  // namespace sr
