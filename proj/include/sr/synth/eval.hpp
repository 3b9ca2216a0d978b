// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Routing and similarity metrics on a synthetic library whose expert t was
// built for task t.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sr/adapter.hpp"
#include "sr/router.hpp"
#include "sr/synth/tasks.hpp"
#include "sr/tensor.hpp"

namespace sr {

struct TaskRoutingMetrics {
  std::string task_id;
  std::size_t n = 0;           // routed (sample, layer) pairs
  double top1 = 0.0;
  double topk = 0.0;
  double mean_score_ratio = 0.0;
  std::size_t ratio_samples = 0;
  std::size_t ratio_excluded = 0;  // all-zero score vectors
};

struct RoutingMetrics {
  RouterKind router = RouterKind::spectr;
  std::size_t k = 0;
  std::vector<TaskRoutingMetrics> per_task;
  double mean_top1 = 0.0;
  double mean_topk = 0.0;
  double random_baseline = 0.0;  // k / T
};

// Every layer of the aligned library is scored on n_per_task inputs per task.
// Requires one expert per task in task order.
RoutingMetrics eval_routing_accuracy(const AdapterLibrary& lib, std::span<const TaskSpec> tasks,
                                     RouterKind router, std::size_t k, std::size_t n_per_task,
                                     std::uint64_t seed, std::size_t threads = 1);

// Ratio of the true expert's score to the largest score, pooled over tasks,
// samples and layers.
struct ScoreRatioStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
  std::size_t excluded = 0;
};

ScoreRatioStats eval_score_ratio(const AdapterLibrary& lib, std::span<const TaskSpec> tasks,
                                 RouterKind router, std::size_t n_per_task, std::uint64_t seed,
                                 std::size_t threads = 1);

// Frobenius cosine of the expert products B_i A_i, averaged over layers.
struct SimilarityMatrix {
  std::vector<std::string> expert_ids;
  Matrix cosine;                        // T x T, symmetric, unit diagonal
  std::vector<double> mean_off_diagonal;  // per expert

  double overall_off_diagonal() const;
};

// <B_i A_i, B_j A_j>_F computed without forming the products.
double product_inner(const Matrix& bi, const Matrix& ai, const Matrix& bj, const Matrix& aj);

// Throws UndefinedSimilarityError if some expert's product is zero.
SimilarityMatrix adapter_cosine_matrix(const AdapterLibrary& lib);

}  // namespace sr
