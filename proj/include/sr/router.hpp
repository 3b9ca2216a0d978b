// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Per-token expert scoring and selection over one layer of aligned adapters.
//
//   arrow:  score_t = |v_t . x|, v_t the unit top right singular vector
//   spectr: score_t = ||A*_t x||_2, using every singular direction
//   mu:     no selection, all experts with weight 1/T
//
// Scores are raw; adapters with large singular values score high. No
// per-expert normalization is applied.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sr/adapter.hpp"
#include "sr/tensor.hpp"

namespace sr {

enum class RouterKind { mu, arrow, spectr };

const char* to_string(RouterKind kind) noexcept;
// Throws ParameterError for anything but "mu", "arrow", "spectr".
RouterKind parse_router_kind(const std::string& name);

inline constexpr std::size_t kDefaultTopK = 4;

struct ArrowPrototypeMatrix {
  std::string layer_id;
  Matrix prototypes;                       // T x d_in, unit rows (zero for degenerate experts)
  std::vector<std::string> warnings;       // one per degenerate expert
};

struct RoutingScores {
  std::string layer_id;
  std::size_t token_index = 0;
  std::vector<double> scores;  // one per expert, finite and >= 0
};

struct RoutingDecision {
  std::vector<std::size_t> selected;  // ascending expert indices
  std::vector<double> weights;        // aligned with `selected`, sums to 1

  std::size_t k() const noexcept { return selected.size(); }
  bool contains(std::size_t expert) const;
};

// h_t = A*_t x for each selected expert, aligned with RoutingDecision::selected.
using HiddenSet = std::vector<Vector>;

struct SpectralScores {
  RoutingScores scores;
  std::vector<Vector> hidden;  // h_t for every expert, reused by the merge step
};

ArrowPrototypeMatrix arrow_prototypes(std::span<const AlignedAdapter> experts);
RoutingScores arrow_scores(const ArrowPrototypeMatrix& p, const Vector& x);

Vector spectr_hidden(const AlignedAdapter& expert, const Vector& x);
SpectralScores spectr_scores(std::span<const AlignedAdapter> experts, const Vector& x);

// Constant score 1 for every expert; keeps traces uniform across routers.
RoutingScores mu_scores(std::size_t expert_count);

// k largest scores, ties to the lower index, uniform weights 1/k.
RoutingDecision top_k(const RoutingScores& scores, std::size_t k);
RoutingDecision mu_weights(std::size_t expert_count);

// Reweights the selected experts by softmax(score / temperature).
RoutingDecision softmax_weights(const RoutingDecision& decision, const RoutingScores& scores,
                                double temperature);

HiddenSet select_hidden(const std::vector<Vector>& all_hidden, const RoutingDecision& decision);
HiddenSet compute_hidden(std::span<const AlignedAdapter> experts, const Vector& x,
                         const RoutingDecision& decision);

}  // namespace sr
