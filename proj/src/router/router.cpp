// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sr/errors.hpp"

namespace sr {

const char* to_string(RouterKind kind) noexcept {
  switch (kind) {
    case RouterKind::mu: return "mu";
    case RouterKind::arrow: return "arrow";
    case RouterKind::spectr: return "spectr";
  }
  return "unknown";
}

RouterKind parse_router_kind(const std::string& name) {
  if (name == "mu") return RouterKind::mu;
  if (name == "arrow") return RouterKind::arrow;
  if (name == "spectr") return RouterKind::spectr;
  throw ParameterError("unknown router '" + name + "' (expected mu, arrow or spectr)");
}

bool RoutingDecision::contains(std::size_t expert) const {
  return std::binary_search(selected.begin(), selected.end(), expert);
}

ArrowPrototypeMatrix arrow_prototypes(std::span<const AlignedAdapter> experts) {
  if (experts.empty()) throw ShapeError("arrow_prototypes: no experts");
  const std::size_t d_in = experts.front().d_in();
  ArrowPrototypeMatrix out{experts.front().layer_id, Matrix(experts.size(), d_in), {}};
  for (std::size_t t = 0; t < experts.size(); ++t) {
    const auto& ex = experts[t];
    if (ex.d_in() != d_in) throw ShapeError("arrow_prototypes: experts disagree on d_in");
    // Row 0 of A* is s_1 * v_1^T.
    auto top = ex.a_star.row(0);
    const double n = norm2(top);
    if (n == 0.0) {
      out.warnings.push_back("expert '" + ex.expert_id +
                             "' has zero top singular value; prototype left at zero");
      continue;
    }
    auto dst = out.prototypes.row(t);
    for (std::size_t j = 0; j < d_in; ++j) dst[j] = top[j] / n;
  }
  return out;
}

RoutingScores arrow_scores(const ArrowPrototypeMatrix& p, const Vector& x) {
  if (x.dim() != p.prototypes.cols()) {
    throw ShapeError("arrow_scores: input dim " + std::to_string(x.dim()) + ", prototypes have " +
                     std::to_string(p.prototypes.cols()));
  }
  RoutingScores out{p.layer_id, 0, std::vector<double>(p.prototypes.rows())};
  for (std::size_t t = 0; t < p.prototypes.rows(); ++t) {
    out.scores[t] = std::abs(dot(p.prototypes.row(t), x.values()));
  }
  return out;
}

Vector spectr_hidden(const AlignedAdapter& expert, const Vector& x) {
  if (x.dim() != expert.d_in()) {
    throw ShapeError("spectr_hidden: input dim " + std::to_string(x.dim()) + ", expert '" +
                     expert.expert_id + "' expects " + std::to_string(expert.d_in()));
  }
  return matvec(expert.a_star, x);
}

SpectralScores spectr_scores(std::span<const AlignedAdapter> experts, const Vector& x) {
  SpectralScores out;
  out.scores.layer_id = experts.empty() ? std::string() : experts.front().layer_id;
  out.scores.scores.reserve(experts.size());
  out.hidden.reserve(experts.size());
  for (const auto& ex : experts) {
    Vector h = spectr_hidden(ex, x);
    out.scores.scores.push_back(norm2(h));
    out.hidden.push_back(std::move(h));
  }
  return out;
}

RoutingScores mu_scores(std::size_t expert_count) {
  return RoutingScores{{}, 0, std::vector<double>(expert_count, 1.0)};
}

RoutingDecision top_k(const RoutingScores& scores, std::size_t k) {
  const std::size_t n = scores.scores.size();
  if (k == 0 || k > n) {
    throw ParameterError("top_k: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) +
                         "]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores.scores[a] > scores.scores[b];
  });
  RoutingDecision d;
  d.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(d.selected.begin(), d.selected.end());
  d.weights.assign(k, 1.0 / static_cast<double>(k));
  return d;
}

RoutingDecision mu_weights(std::size_t expert_count) {
  if (expert_count == 0) throw ParameterError("mu_weights: no experts");
  RoutingDecision d;
  d.selected.resize(expert_count);
  std::iota(d.selected.begin(), d.selected.end(), 0);
  d.weights.assign(expert_count, 1.0 / static_cast<double>(expert_count));
  return d;
}

RoutingDecision softmax_weights(const RoutingDecision& decision, const RoutingScores& scores,
                                double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ParameterError("softmax temperature must be a positive finite number");
  }
  RoutingDecision out = decision;
  if (decision.selected.empty()) return out;
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t t : decision.selected) {
    if (t >= scores.scores.size()) throw ShapeError("softmax_weights: expert index out of range");
    max_logit = std::max(max_logit, scores.scores[t] / temperature);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < decision.selected.size(); ++i) {
    out.weights[i] = std::exp(scores.scores[decision.selected[i]] / temperature - max_logit);
    total += out.weights[i];
  }
  for (double& w : out.weights) w /= total;
  return out;
}

HiddenSet select_hidden(const std::vector<Vector>& all_hidden, const RoutingDecision& decision) {
  HiddenSet out;
  out.reserve(decision.selected.size());
  for (std::size_t t : decision.selected) out.push_back(all_hidden.at(t));
  return out;
}

HiddenSet compute_hidden(std::span<const AlignedAdapter> experts, const Vector& x,
                         const RoutingDecision& decision) {
  HiddenSet out;
  out.reserve(decision.selected.size());
  for (std::size_t t : decision.selected) {
    if (t >= experts.size()) throw ShapeError("compute_hidden: expert index out of range");
    out.push_back(spectr_hidden(experts[t], x));
  }
  return out;
}

}  // namespace sr
