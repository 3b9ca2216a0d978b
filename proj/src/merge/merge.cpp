// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/merge.hpp"

#include <cmath>

#include "sr/errors.hpp"
#include "sr/parallel.hpp"

namespace sr {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

void check_weights(std::span<const double> weights, std::size_t expected, const char* op) {
  if (weights.size() != expected) {
    throw ShapeError(std::string(op) + ": " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(expected) + " experts");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ParameterError(std::string(op) + ": weights must be non-negative");
    total += w;
  }
  if (expected > 0 && std::abs(total - 1.0) > kWeightSumTolerance) {
    throw ParameterError(std::string(op) + ": weights sum to " + std::to_string(total));
  }
}

}  // namespace

const char* to_string(MergeKind kind) noexcept {
  return kind == MergeKind::two_step ? "two_step" : "fused";
}

const char* to_string(Weighting weighting) noexcept {
  return weighting == Weighting::uniform ? "uniform" : "softmax";
}

MergeKind parse_merge_kind(const std::string& name) {
  if (name == "two_step") return MergeKind::two_step;
  if (name == "fused") return MergeKind::fused;
  throw ParameterError("unknown merge '" + name + "' (expected two_step or fused)");
}

Weighting parse_weighting(const std::string& name) {
  if (name == "uniform") return Weighting::uniform;
  if (name == "softmax") return Weighting::softmax;
  throw ParameterError("unknown weighting '" + name + "' (expected uniform or softmax)");
}

AdaptedLayer make_adapted_layer(Matrix w, const LibraryLayer& layer, const RoutingConfig& routing) {
  if (w.rows() != layer.d_out || w.cols() != layer.d_in) {
    throw ShapeError("layer '" + layer.layer_id + "': base weights are " +
                     std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                     ", adapters expect " + std::to_string(layer.d_out) + "x" +
                     std::to_string(layer.d_in));
  }
  if (!layer.raw.empty()) {
    throw ValidationError("layer '" + layer.layer_id + "' holds raw adapters; align it first");
  }
  AdaptedLayer out{layer.layer_id, std::move(w), layer.aligned, {}, routing};
  for (const auto& ex : out.experts) {
    if (ex.d_in() != layer.d_in || ex.d_out() != layer.d_out) {
      throw ShapeError("layer '" + layer.layer_id + "': expert '" + ex.expert_id +
                       "' does not match the base weights");
    }
  }
  if (!out.experts.empty()) out.prototypes = arrow_prototypes(out.experts);
  return out;
}

Vector merge_hidden(const HiddenSet& hidden, std::span<const double> weights) {
  check_weights(weights, hidden.size(), "merge_hidden");
  if (hidden.empty()) return Vector();
  const std::size_t r = hidden.front().dim();
  Vector out(r);
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (hidden[i].dim() != r) {
      throw RankMismatchError("two-step merge needs equal ranks, got " + std::to_string(r) +
                              " and " + std::to_string(hidden[i].dim()) +
                              "; use the fused merge for mixed-rank experts");
    }
    for (std::size_t j = 0; j < r; ++j) out[j] += weights[i] * hidden[i][j];
  }
  return out;
}

Matrix merge_b(std::span<const AlignedAdapter> experts, const RoutingDecision& decision) {
  check_weights(decision.weights, decision.selected.size(), "merge_b");
  if (decision.selected.empty()) return Matrix();
  if (decision.selected.front() >= experts.size()) {
    throw ShapeError("merge_b: expert index out of range");
  }
  const AlignedAdapter& first = experts[decision.selected.front()];
  Matrix out(first.b_star.rows(), first.b_star.cols());
  for (std::size_t i = 0; i < decision.selected.size(); ++i) {
    const std::size_t t = decision.selected[i];
    if (t >= experts.size()) throw ShapeError("merge_b: expert index out of range");
    const Matrix& b = experts[t].b_star;
    if (b.rows() != out.rows() || b.cols() != out.cols()) {
      throw ShapeError("merge_b: expert '" + experts[t].expert_id + "' has B* of shape " +
                       std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                       ", expected " + std::to_string(out.rows()) + "x" +
                       std::to_string(out.cols()));
    }
    auto dst = out.values();
    auto src = b.values();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += decision.weights[i] * src[j];
  }
  return out;
}

Vector forward_two_step(const AdaptedLayer& layer, const Vector& x,
                        const RoutingDecision& decision, const HiddenSet& hidden) {
  Vector y = matvec(layer.w, x);
  if (decision.selected.empty()) return y;
  if (hidden.size() != decision.selected.size()) {
    throw ShapeError("forward_two_step: hidden set does not match the decision");
  }
  const Vector h = merge_hidden(hidden, decision.weights);
  const Matrix b = merge_b(layer.experts, decision);
  y += matvec(b, h);
  return y;
}

Vector forward_fused(const AdaptedLayer& layer, const Vector& x, const RoutingDecision& decision,
                     const HiddenSet& hidden) {
  Vector y = matvec(layer.w, x);
  if (hidden.size() != decision.selected.size()) {
    throw ShapeError("forward_fused: hidden set does not match the decision");
  }
  check_weights(decision.weights, decision.selected.size(), "forward_fused");
  for (std::size_t i = 0; i < decision.selected.size(); ++i) {
    const std::size_t t = decision.selected[i];
    if (t >= layer.experts.size()) throw ShapeError("forward_fused: expert index out of range");
    const Vector contribution = matvec(layer.experts[t].b_star, hidden[i]);
    if (contribution.dim() != y.dim()) throw ShapeError("forward_fused: output dimension mismatch");
    for (std::size_t j = 0; j < y.dim(); ++j) y[j] += decision.weights[i] * contribution[j];
  }
  return y;
}

LayerRoute route_token(const AdaptedLayer& layer, const Vector& x) {
  LayerRoute out;
  const std::size_t count = layer.experts.size();
  if (count == 0) {
    out.scores.layer_id = layer.layer_id;
    return out;
  }
  const RoutingConfig& cfg = layer.routing;
  switch (cfg.router) {
    case RouterKind::spectr: {
      SpectralScores s = spectr_scores(layer.experts, x);
      out.scores = std::move(s.scores);
      out.decision = top_k(out.scores, cfg.k);
      out.hidden = select_hidden(s.hidden, out.decision);
      break;
    }
    case RouterKind::arrow:
      out.scores = arrow_scores(layer.prototypes, x);
      out.decision = top_k(out.scores, cfg.k);
      out.hidden = compute_hidden(layer.experts, x, out.decision);
      break;
    case RouterKind::mu:
      if (x.dim() != layer.w.cols()) throw ShapeError("route_token: input dimension mismatch");
      out.scores = mu_scores(count);
      out.decision = mu_weights(count);
      out.hidden = compute_hidden(layer.experts, x, out.decision);
      break;
  }
  out.scores.layer_id = layer.layer_id;
  if (cfg.strategy.weighting == Weighting::softmax) {
    out.decision = softmax_weights(out.decision, out.scores, cfg.strategy.temperature);
  }
  return out;
}

LayerStep forward_layer(const AdaptedLayer& layer, const Vector& x) {
  LayerRoute route = route_token(layer, x);
  Vector y = layer.routing.strategy.kind == MergeKind::two_step
                 ? forward_two_step(layer, x, route.decision, route.hidden)
                 : forward_fused(layer, x, route.decision, route.hidden);
  return LayerStep{std::move(y), std::move(route.scores), std::move(route.decision)};
}

ModelRun run_model(std::span<const AdaptedLayer> layers, std::span<const Vector> tokens,
                   std::size_t threads) {
  for (std::size_t l = 1; l < layers.size(); ++l) {
    if (layers[l].w.cols() != layers[l - 1].w.rows()) {
      throw ShapeError("layer '" + layers[l].layer_id + "' expects input dim " +
                       std::to_string(layers[l].w.cols()) + " but layer '" +
                       layers[l - 1].layer_id + "' produces " +
                       std::to_string(layers[l - 1].w.rows()));
    }
  }
  for (const auto& tok : tokens) {
    if (!layers.empty() && tok.dim() != layers.front().w.cols()) {
      throw ShapeError("token dimension " + std::to_string(tok.dim()) + " does not match layer '" +
                       layers.front().layer_id + "'");
    }
  }

  ModelRun run;
  run.outputs.resize(tokens.size());
  run.trace.resize(tokens.size());
  parallel_for(tokens.size(), threads, [&](std::size_t i) {
    Vector x = tokens[i];
    auto& trace = run.trace[i];
    trace.reserve(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (l > 0) {
        for (double& v : x) v = std::tanh(v);
      }
      LayerStep step = forward_layer(layers[l], x);
      step.scores.token_index = i;
      x = step.output;
      trace.push_back(std::move(step));
    }
    run.outputs[i] = std::move(x);
  });
  return run;
}

}  // namespace sr
