// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/synth/eval.hpp"

#include <algorithm>
#include <cmath>

#include "sr/errors.hpp"
#include "sr/parallel.hpp"
#include "sr/random.hpp"

namespace sr {

namespace {

struct LayerRouter {
  const LibraryLayer* layer = nullptr;
  ArrowPrototypeMatrix prototypes;
};

std::vector<LayerRouter> prepare(const AdapterLibrary& lib, std::span<const TaskSpec> tasks,
                                 RouterKind router) {
  if (lib.mode != LibraryMode::aligned) {
    throw ValidationError("routing evaluation needs an aligned library");
  }
  if (lib.layers.empty()) throw ParameterError("library has no layers");
  if (tasks.empty()) throw ParameterError("no tasks to evaluate");
  if (lib.expert_count() != tasks.size()) {
    throw ParameterError("library has " + std::to_string(lib.expert_count()) + " experts for " +
                         std::to_string(tasks.size()) + " tasks");
  }
  std::vector<LayerRouter> out;
  for (const auto& layer : lib.layers) {
    for (const auto& task : tasks) {
      if (task.d_in() != layer.d_in) {
        throw ShapeError("task '" + task.task_id + "' has dimension " +
                         std::to_string(task.d_in()) + ", layer '" + layer.layer_id +
                         "' expects " + std::to_string(layer.d_in));
      }
    }
    LayerRouter lr{&layer, {}};
    if (router == RouterKind::arrow) lr.prototypes = arrow_prototypes(layer.aligned);
    out.push_back(std::move(lr));
  }
  return out;
}

RoutingScores score(const LayerRouter& lr, RouterKind router, const Vector& x) {
  switch (router) {
    case RouterKind::arrow:
      return arrow_scores(lr.prototypes, x);
    case RouterKind::spectr:
      return spectr_scores(lr.layer->aligned, x).scores;
    case RouterKind::mu:
      break;
  }
  return mu_scores(lr.layer->aligned.size());
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t task) {
  return derive_seed(seed, "eval-inputs", task);
}

}  // namespace

RoutingMetrics eval_routing_accuracy(const AdapterLibrary& lib, std::span<const TaskSpec> tasks,
                                     RouterKind router, std::size_t k, std::size_t n_per_task,
                                     std::uint64_t seed, std::size_t threads) {
  const auto routers = prepare(lib, tasks, router);
  const std::size_t count = tasks.size();
  if (k == 0 || k > count) {
    throw ParameterError("k=" + std::to_string(k) + " must lie in [1, " + std::to_string(count) +
                         "]");
  }
  if (n_per_task == 0) throw ParameterError("n_per_task must be positive");

  RoutingMetrics out;
  out.router = router;
  out.k = k;
  out.random_baseline = static_cast<double>(k) / static_cast<double>(count);
  out.per_task.resize(count);

  parallel_for(count, threads, [&](std::size_t t) {
    TaskRoutingMetrics m;
    m.task_id = tasks[t].task_id;
    std::size_t hits1 = 0, hitsk = 0;
    double ratio_sum = 0.0;
    for (const Vector& x : sample_inputs(tasks[t], n_per_task, sample_seed(seed, t))) {
      for (const auto& lr : routers) {
        const RoutingScores s = score(lr, router, x);
        if (top_k(s, 1).contains(t)) ++hits1;
        if (top_k(s, k).contains(t)) ++hitsk;
        ++m.n;
        const double best = *std::max_element(s.scores.begin(), s.scores.end());
        if (best > 0.0) {
          ratio_sum += s.scores[t] / best;
          ++m.ratio_samples;
        } else {
          ++m.ratio_excluded;
        }
      }
    }
    m.top1 = static_cast<double>(hits1) / static_cast<double>(m.n);
    m.topk = static_cast<double>(hitsk) / static_cast<double>(m.n);
    m.mean_score_ratio = m.ratio_samples ? ratio_sum / static_cast<double>(m.ratio_samples) : 0.0;
    out.per_task[t] = std::move(m);
  });

  for (const auto& m : out.per_task) {
    out.mean_top1 += m.top1;
    out.mean_topk += m.topk;
  }
  out.mean_top1 /= static_cast<double>(count);
  out.mean_topk /= static_cast<double>(count);
  return out;
}

ScoreRatioStats eval_score_ratio(const AdapterLibrary& lib, std::span<const TaskSpec> tasks,
                                 RouterKind router, std::size_t n_per_task, std::uint64_t seed,
                                 std::size_t threads) {
  const auto routers = prepare(lib, tasks, router);
  if (n_per_task == 0) throw ParameterError("n_per_task must be positive");

  std::vector<std::vector<double>> ratios(tasks.size());
  std::vector<std::size_t> excluded(tasks.size(), 0);
  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    for (const Vector& x : sample_inputs(tasks[t], n_per_task, sample_seed(seed, t))) {
      for (const auto& lr : routers) {
        const RoutingScores s = score(lr, router, x);
        const double best = *std::max_element(s.scores.begin(), s.scores.end());
        if (best > 0.0) {
          ratios[t].push_back(s.scores[t] / best);
        } else {
          ++excluded[t];
        }
      }
    }
  });

  ScoreRatioStats out;
  double sum = 0.0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    out.excluded += excluded[t];
    out.n += ratios[t].size();
    for (double r : ratios[t]) sum += r;
  }
  if (out.n == 0) return out;
  out.mean = sum / static_cast<double>(out.n);
  double sq = 0.0;
  for (const auto& rs : ratios) {
    for (double r : rs) sq += (r - out.mean) * (r - out.mean);
  }
  out.std = std::sqrt(sq / static_cast<double>(out.n));
  return out;
}

double product_inner(const Matrix& bi, const Matrix& ai, const Matrix& bj, const Matrix& aj) {
  if (bi.rows() != bj.rows() || ai.cols() != aj.cols() || bi.cols() != ai.rows() ||
      bj.cols() != aj.rows()) {
    throw ShapeError("product_inner: incompatible factor shapes");
  }
  // tr(A_i^T B_i^T B_j A_j) = sum (B_i^T B_j) .* (A_i A_j^T)
  const Matrix bb = matmul_tn(bi, bj);
  const Matrix aa = matmul_nt(ai, aj);
  return dot(bb.values(), aa.values());
}

double SimilarityMatrix::overall_off_diagonal() const {
  if (mean_off_diagonal.empty()) return 0.0;
  double s = 0.0;
  for (double v : mean_off_diagonal) s += v;
  return s / static_cast<double>(mean_off_diagonal.size());
}

SimilarityMatrix adapter_cosine_matrix(const AdapterLibrary& lib) {
  const std::size_t count = lib.expert_count();
  if (lib.layers.empty() || count == 0) throw ParameterError("library has no experts");
  SimilarityMatrix out;
  out.expert_ids = lib.expert_ids();
  out.cosine = Matrix(count, count);

  struct Factors {
    const Matrix* b;
    const Matrix* a;
  };
  for (const auto& layer : lib.layers) {
    std::vector<Factors> f;
    for (std::size_t t = 0; t < count; ++t) {
      if (lib.mode == LibraryMode::aligned) {
        f.push_back({&layer.aligned.at(t).b_star, &layer.aligned.at(t).a_star});
      } else {
        f.push_back({&layer.raw.at(t).b, &layer.raw.at(t).a});
      }
    }
    std::vector<double> norms(count);
    for (std::size_t t = 0; t < count; ++t) {
      const double sq = product_inner(*f[t].b, *f[t].a, *f[t].b, *f[t].a);
      if (!(sq > 0.0)) {
        throw UndefinedSimilarityError("expert '" + layer.expert_id(lib.mode, t) +
                                       "' in layer '" + layer.layer_id +
                                       "' has a zero update; cosine is undefined");
      }
      norms[t] = std::sqrt(sq);
    }
    for (std::size_t i = 0; i < count; ++i) {
      out.cosine(i, i) += 1.0;
      for (std::size_t j = i + 1; j < count; ++j) {
        double c = product_inner(*f[i].b, *f[i].a, *f[j].b, *f[j].a) / (norms[i] * norms[j]);
        c = std::clamp(c, -1.0, 1.0);
        out.cosine(i, j) += c;
        out.cosine(j, i) += c;
      }
    }
  }
  const double inv_layers = 1.0 / static_cast<double>(lib.layers.size());
  for (double& v : out.cosine.values()) v *= inv_layers;

  out.mean_off_diagonal.assign(count, 0.0);
  if (count > 1) {
    for (std::size_t i = 0; i < count; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        if (j != i) s += out.cosine(i, j);
      }
      out.mean_off_diagonal[i] = s / static_cast<double>(count - 1);
    }
  }
  return out;
}

}  // namespace sr
