// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic tasks: each task owns an m-dimensional input subspace. Task bases
// are cos(angle) * C + sin(angle) * P_t, where C is one shared block and P_t a
// private block of a random orthogonal matrix, so
//
//   basis_s^T basis_t = cos(angle)^2 * I   (s != t).
//
// angle = pi/2 gives mutually orthogonal tasks, angle = 0 one shared subspace.

#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sr/tensor.hpp"

namespace sr {

struct TaskSpec {
  std::string task_id;
  std::size_t index = 0;
  Matrix basis;  // d_in x m, orthonormal columns
  double overlap_angle = std::numbers::pi / 2;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  std::size_t d_in() const noexcept { return basis.rows(); }
  std::size_t dim() const noexcept { return basis.cols(); }
};

// Throws ParameterError when the blocks do not fit: T*m <= d_in at angle pi/2,
// (T+1)*m <= d_in otherwise; angle must lie in [0, pi/2].
std::vector<TaskSpec> gen_tasks(std::size_t count, std::size_t d_in, std::size_t m,
                                double overlap_angle, std::uint64_t seed,
                                double noise_sigma = 0.0);

// x = basis * z + eps, z ~ N(0, I_m), eps ~ N(0, noise_sigma^2 I).
std::vector<Vector> sample_inputs(const TaskSpec& task, std::size_t n, std::uint64_t seed);

}  // namespace sr
