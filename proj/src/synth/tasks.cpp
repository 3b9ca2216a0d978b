// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/synth/tasks.hpp"

#include <cmath>
#include <string>

#include "sr/errors.hpp"
#include "sr/random.hpp"

namespace sr {

namespace {

constexpr double kOrthogonalAngleTolerance = 1e-12;

}  // namespace

std::vector<TaskSpec> gen_tasks(std::size_t count, std::size_t d_in, std::size_t m,
                                double overlap_angle, std::uint64_t seed, double noise_sigma) {
  if (count == 0) throw ParameterError("gen_tasks: need at least one task");
  if (m == 0 || m > d_in) throw ParameterError("gen_tasks: task dimension must be in [1, d_in]");
  if (!(overlap_angle >= 0.0 && overlap_angle <= std::numbers::pi / 2 + kOrthogonalAngleTolerance)) {
    throw ParameterError("gen_tasks: overlap angle must lie in [0, pi/2]");
  }
  if (!(noise_sigma >= 0.0)) throw ParameterError("gen_tasks: noise sigma must be >= 0");

  const bool orthogonal =
      std::abs(overlap_angle - std::numbers::pi / 2) <= kOrthogonalAngleTolerance;
  const std::size_t blocks = orthogonal ? count : count + 1;
  if (blocks * m > d_in) {
    throw ParameterError("gen_tasks: " + std::to_string(blocks) + " blocks of dimension " +
                         std::to_string(m) + " do not fit in d_in=" + std::to_string(d_in));
  }

  Rng rng = make_rng(seed, "tasks");
  const Matrix q = random_orthonormal(d_in, blocks * m, rng);
  const double c = std::cos(overlap_angle);
  const double s = std::sin(overlap_angle);

  std::vector<TaskSpec> tasks;
  tasks.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    Matrix basis = q.column_block(t * m, m);
    if (!orthogonal) {
      const Matrix shared = q.column_block(count * m, m);
      basis = c * shared + s * basis;
    }
    tasks.push_back(TaskSpec{"task_" + std::to_string(t), t, std::move(basis), overlap_angle,
                             noise_sigma, derive_seed(seed, "task", t)});
  }
  return tasks;
}

std::vector<Vector> sample_inputs(const TaskSpec& task, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = task.d_in();
  const std::size_t m = task.dim();
  std::vector<Vector> out;
  out.reserve(n);
  Vector z(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : z) v = normal(rng);
    Vector x = matvec(task.basis, z);
    if (task.noise_sigma > 0.0) {
      for (std::size_t j = 0; j < d; ++j) x[j] += task.noise_sigma * normal(rng);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace sr
