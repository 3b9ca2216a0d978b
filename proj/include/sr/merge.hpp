// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Merging the selected experts into a layer output.
//
//   two_step:  x* = W x + (sum_i w_i B*_i) (sum_i w_i h_i)
//   fused:     x* = W x + sum_i w_i B*_i h_i
//
// The two-step form needs every selected expert to share one rank and one
// ordering of the rank dimension. The fused form needs neither.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sr/adapter.hpp"
#include "sr/router.hpp"
#include "sr/tensor.hpp"

namespace sr {

enum class MergeKind { two_step, fused };
enum class Weighting { uniform, softmax };

const char* to_string(MergeKind kind) noexcept;
const char* to_string(Weighting weighting) noexcept;
MergeKind parse_merge_kind(const std::string& name);
Weighting parse_weighting(const std::string& name);

struct MergeStrategy {
  MergeKind kind = MergeKind::two_step;
  Weighting weighting = Weighting::uniform;
  double temperature = 1.0;
};

struct RoutingConfig {
  RouterKind router = RouterKind::spectr;
  std::size_t k = kDefaultTopK;
  MergeStrategy strategy;
};

struct AdaptedLayer {
  std::string layer_id;
  Matrix w;                              // d_out x d_in base weights
  std::vector<AlignedAdapter> experts;   // expert t at position t
  ArrowPrototypeMatrix prototypes;       // empty when there are no experts
  RoutingConfig routing;
};

// Copies one aligned library layer next to its base weights.
AdaptedLayer make_adapted_layer(Matrix w, const LibraryLayer& layer, const RoutingConfig& routing);

// sum_i w_i h_i. Throws RankMismatchError when the h_i differ in length.
Vector merge_hidden(const HiddenSet& hidden, std::span<const double> weights);
// sum_i w_i B*_i over decision.selected.
Matrix merge_b(std::span<const AlignedAdapter> experts, const RoutingDecision& decision);

Vector forward_two_step(const AdaptedLayer& layer, const Vector& x,
                        const RoutingDecision& decision, const HiddenSet& hidden);
Vector forward_fused(const AdaptedLayer& layer, const Vector& x, const RoutingDecision& decision,
                     const HiddenSet& hidden);

struct LayerRoute {
  RoutingScores scores;
  RoutingDecision decision;
  HiddenSet hidden;
};

// Scores, selects and weights experts for one token per the layer's config.
LayerRoute route_token(const AdaptedLayer& layer, const Vector& x);

struct LayerStep {
  Vector output;
  RoutingScores scores;
  RoutingDecision decision;
};

LayerStep forward_layer(const AdaptedLayer& layer, const Vector& x);

struct ModelRun {
  std::vector<Vector> outputs;                        // one per token
  std::vector<std::vector<LayerStep>> trace;          // [token][layer]; outputs are pre-tanh
};

// Applies the layers in order with tanh between consecutive layers. Tokens are
// independent and may be processed on `threads` workers; results are stored
// by token index.
ModelRun run_model(std::span<const AdaptedLayer> layers, std::span<const Vector> tokens,
                   std::size_t threads = 1);

}  // namespace sr
