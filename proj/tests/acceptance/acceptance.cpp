// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails. Oracles come from tests/support, not from the library.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sr/adapter.hpp"
#include "sr/bundle.hpp"
#include "sr/errors.hpp"
#include "sr/linalg.hpp"
#include "sr/merge.hpp"
#include "sr/random.hpp"
#include "sr/router.hpp"
#include "sr/synth/experiment.hpp"
#include "sr/synth/forge.hpp"

namespace fs = std::filesystem;
using sr::Matrix;
using sr::Vector;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

// ---- 1 ----------------------------------------------------------------------

Outcome svd_correctness() {
  const std::size_t dims[] = {32, 64, 128};
  const std::size_t ranks[] = {1, 4, 8, 16};
  sr::Rng rng(101);
  double worst_rec = 0, worst_sv = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d_out = dims[rng() % 3];
    const std::size_t d_in = dims[rng() % 3];
    const std::size_t r = ranks[rng() % 4];
    const Matrix b = sr::gaussian_matrix(d_out, r, rng);
    const Matrix a = sr::gaussian_matrix(r, d_in, rng);
    const auto f = sr::svd_lowrank(b, a);
    const Matrix product = oracle::matmul(b, a);
    Matrix us = f.u;
    for (std::size_t i = 0; i < us.rows(); ++i) {
      for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= f.s[j];
    }
    const Matrix rec = oracle::matmul(us, oracle::transpose(f.v));
    const Matrix diff = rec - product;
    worst_rec = std::max(worst_rec, oracle::frobenius(diff) / oracle::frobenius(product));
    const auto want = oracle::gram_singular_values(b, a, r);
    for (std::size_t i = 0; i < r; ++i) worst_sv = std::max(worst_sv, std::abs(f.s[i] - want[i]));
  }
  const bool ok = worst_rec <= 1e-10 && worst_sv <= 1e-8;
  return {ok, fmt::format("max rel reconstruction {:.2e} (<= 1e-10), max |s - oracle| {:.2e} (<= 1e-8)",
                          worst_rec, worst_sv)};
}

// ---- 2 ----------------------------------------------------------------------

Outcome alignment_transparency() {
  const std::size_t shapes[][3] = {{32, 32, 1}, {64, 32, 4}, {32, 128, 8}, {128, 64, 16},
                                   {64, 64, 8}, {128, 128, 4}};
  double worst = 0;
  std::size_t inputs = 0;
  for (std::size_t s = 0; s < std::size(shapes); ++s) {
    const auto [d_out, d_in, r] = shapes[s];
    const auto ad = fixture::random_lora(d_out, d_in, r, 200 + s);
    const auto al = sr::align(ad);
    sr::Rng rng(300 + s);
    const Matrix w = sr::gaussian_matrix(d_out, d_in, rng);
    for (int i = 0; i < 1000; ++i, ++inputs) {
      const Vector x = sr::gaussian_vector(d_in, rng);
      const Vector wx = sr::matvec(w, x);
      const Vector raw = wx + sr::matvec(ad.b, sr::matvec(ad.a, x));
      const Vector aligned = wx + sr::matvec(al.b_star, sr::matvec(al.a_star, x));
      worst = std::max(worst, sr::max_abs_diff(raw, aligned));
    }
  }
  return {worst <= 1e-9, fmt::format("{} adapters x 1000 inputs, max |diff| {:.2e} (<= 1e-9)",
                                     std::size(shapes), worst)};
}

// ---- 3 ----------------------------------------------------------------------

Outcome argmax_property() {
  std::size_t violations = 0, adapters = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  sr::Rng rng(400);
  while (adapters < 20) {
    const std::size_t d_in = adapters % 2 ? 64 : 32;
    const std::size_t r = adapters % 3 == 0 ? 4 : 8;
    const Matrix b = sr::gaussian_matrix(24, r, rng);
    const Matrix a = sr::gaussian_matrix(r, d_in, rng);
    const auto f = sr::svd_lowrank(b, a);
    if (!(f.s[0] - f.s[1] > 1e-6 * f.s[0])) continue;  // need a strict gap
    ++adapters;
    auto score = [&](const Vector& x) { return sr::norm2(sr::matvec(b, sr::matvec(a, x))); };
    const double top = score(f.v.column(0));
    for (int i = 0; i < 10000; ++i) {
      const double other = score(sr::random_unit_vector(d_in, rng));
      min_margin = std::min(min_margin, top - other);
      if (other > top + 1e-9) ++violations;
    }
  }
  return {violations == 0, fmt::format("20 adapters x 10000 unit vectors, {} violations, min margin {:.3g}",
                                       violations, min_margin)};
}

// ---- 4 ----------------------------------------------------------------------

Outcome rank_one_equivalence() {
  const std::size_t experts = 9, d = 32, k = 4;
  sr::Rng rng(500);
  std::vector<sr::AlignedAdapter> aligned;
  for (std::size_t t = 0; t < experts; ++t) {
    // B A = u v^T with unit u, v: top singular value exactly 1. Gauge c splits it.
    const Vector u = sr::random_unit_vector(d, rng);
    const Vector v = sr::random_unit_vector(d, rng);
    const double c = 0.25 + static_cast<double>(t);
    sr::LoraAdapter ad{"e" + std::to_string(t), "l0", Matrix(d, 1, (c * u).raw()),
                       Matrix(1, d, ((1.0 / c) * v).raw())};
    aligned.push_back(sr::align(ad));
  }
  const auto protos = sr::arrow_prototypes(aligned);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vector x = sr::gaussian_vector(d, rng);
    const auto arrow = sr::top_k(sr::arrow_scores(protos, x), k);
    const auto spectr = sr::top_k(sr::spectr_scores(aligned, x).scores, k);
    if (arrow.selected != spectr.selected) ++mismatches;
  }
  return {mismatches == 0, fmt::format("9 rank-1 experts, k=4, 1000 inputs, {} set mismatches", mismatches)};
}

// ---- 5 ----------------------------------------------------------------------

Outcome routing_accuracy() {
  const sr::ExperimentConfig cfg;  // T=9, d=64, m=4, rank 8, flat, noise 0, k=4
  const auto setup = sr::build_synthetic(cfg, cfg.rank);
  const auto spectr = sr::eval_routing_accuracy(setup.aligned, setup.tasks, sr::RouterKind::spectr,
                                                cfg.routing.k, cfg.n_per_task, cfg.seed);
  const auto arrow = sr::eval_routing_accuracy(setup.aligned, setup.tasks, sr::RouterKind::arrow,
                                               cfg.routing.k, cfg.n_per_task, cfg.seed);
  const std::string baseline = fmt::format("{:.3f}", 100.0 * spectr.random_baseline);
  const bool ok = spectr.mean_top1 >= 0.99 && arrow.mean_top1 <= spectr.mean_top1 - 0.20 &&
                  spectr.random_baseline == 4.0 / 9.0 && arrow.random_baseline == 4.0 / 9.0 &&
                  baseline == "44.444";
  return {ok, fmt::format("SpectR top-1 {:.4f} (>= 0.99), Arrow top-1 {:.4f} (<= SpectR - 0.20), "
                          "random baseline {}%",
                          spectr.mean_top1, arrow.mean_top1, baseline)};
}

// ---- 6 ----------------------------------------------------------------------

Outcome rank_sweep() {
  const sr::ExperimentConfig cfg;
  const auto rows = sr::run_rank_sweep(cfg);
  if (rows.size() != 10) return fail("expected 10 sweep rows");
  bool ok = true;
  std::string table;
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    const auto& a = rows[i];
    const auto& s = rows[i + 1];
    if (a.router != sr::RouterKind::arrow || s.router != sr::RouterKind::spectr || a.rank != s.rank) {
      return fail("unexpected sweep row order");
    }
    if (a.rank >= 2 && s.stats.mean < a.stats.mean) ok = false;
    table += fmt::format(" r{}:{:.3f}/{:.3f}", a.rank, a.stats.mean, s.stats.mean);
  }
  const double drop = rows[0].stats.mean - rows[8].stats.mean;
  if (rows[0].rank != 1 || rows[8].rank != 16 || drop < 0.1) ok = false;
  return {ok, fmt::format("arrow/spectr mean ratio{}; Arrow drop r1->r16 {:.3f} (>= 0.1)", table, drop)};
}

// ---- 7 ----------------------------------------------------------------------

sr::RoutingConfig routing(sr::RouterKind router, std::size_t k, sr::MergeKind kind) {
  sr::RoutingConfig c;
  c.router = router;
  c.k = k;
  c.strategy.kind = kind;
  return c;
}

Outcome merge_identities() {
  const std::size_t d = 16, experts = 5, r = 4;
  sr::Rng rng(700);
  sr::LibraryLayer layer;
  layer.layer_id = "l0";
  layer.d_in = layer.d_out = d;
  std::vector<sr::LoraAdapter> raw;
  for (std::size_t t = 0; t < experts; ++t) {
    raw.push_back(fixture::random_lora(d, d, r, 710 + t, "e" + std::to_string(t)));
    layer.aligned.push_back(sr::align(raw.back()));
  }
  const Matrix w = sr::gaussian_matrix(d, d, rng);

  // k = 1: two-step, fused and the exact single-expert LoRA output agree
  const auto two = sr::make_adapted_layer(w, layer, routing(sr::RouterKind::spectr, 1, sr::MergeKind::two_step));
  const auto fused = sr::make_adapted_layer(w, layer, routing(sr::RouterKind::spectr, 1, sr::MergeKind::fused));
  double k1 = 0;
  for (int i = 0; i < 100; ++i) {
    const Vector x = sr::gaussian_vector(d, rng);
    const auto s2 = sr::forward_layer(two, x);
    const auto sf = sr::forward_layer(fused, x);
    const auto& ad = raw[s2.decision.selected.at(0)];
    const Matrix xm(d, 1, x.raw());
    const Matrix delta = oracle::matmul(ad.b, oracle::matmul(ad.a, xm));
    Vector exact = sr::matvec(w, x);
    for (std::size_t p = 0; p < d; ++p) exact[p] += delta(p, 0);
    k1 = std::max({k1, sr::max_abs_diff(s2.output, exact), sr::max_abs_diff(sf.output, exact)});
  }

  // remix every expert's rank axes by a random orthogonal Q_t
  auto remixed = layer;
  for (std::size_t t = 0; t < experts; ++t) {
    const Matrix q = sr::random_orthonormal(r, r, rng);
    auto& ex = remixed.aligned[t];
    ex.b_star = sr::matmul(ex.b_star, q);
    ex.a_star = sr::matmul_tn(q, ex.a_star);
  }
  double fused_change = 0, two_step_change = 0;
  for (auto router : {sr::RouterKind::mu, sr::RouterKind::spectr}) {
    const auto f0 = sr::make_adapted_layer(w, layer, routing(router, 3, sr::MergeKind::fused));
    const auto f1 = sr::make_adapted_layer(w, remixed, routing(router, 3, sr::MergeKind::fused));
    const auto t0 = sr::make_adapted_layer(w, layer, routing(router, 3, sr::MergeKind::two_step));
    const auto t1 = sr::make_adapted_layer(w, remixed, routing(router, 3, sr::MergeKind::two_step));
    for (int i = 0; i < 100; ++i) {
      const Vector x = sr::gaussian_vector(d, rng);
      fused_change = std::max(fused_change, sr::max_abs_diff(sr::forward_layer(f0, x).output,
                                                             sr::forward_layer(f1, x).output));
      two_step_change = std::max(two_step_change, sr::max_abs_diff(sr::forward_layer(t0, x).output,
                                                                   sr::forward_layer(t1, x).output));
    }
  }

  // mixed ranks {2, 4, 8} under the fused merge
  bool mixed_ok = true;
  double mixed_err = 0;
  try {
    sr::LibraryLayer mixed;
    mixed.layer_id = "mixed";
    mixed.d_in = mixed.d_out = d;
    std::vector<sr::LoraAdapter> mraw;
    for (std::size_t t = 0; t < 3; ++t) {
      mraw.push_back(fixture::random_lora(d, d, std::size_t{2} << t, 760 + t, "m" + std::to_string(t)));
      mixed.aligned.push_back(sr::align(mraw.back()));
    }
    const auto ml = sr::make_adapted_layer(w, mixed, routing(sr::RouterKind::mu, 3, sr::MergeKind::fused));
    Matrix premerged = w;
    for (const auto& ad : mraw) premerged += (1.0 / 3.0) * oracle::matmul(ad.b, ad.a);
    for (int i = 0; i < 20; ++i) {
      const Vector x = sr::gaussian_vector(d, rng);
      mixed_err = std::max(mixed_err, sr::max_abs_diff(sr::forward_layer(ml, x).output,
                                                       sr::matvec(premerged, x)));
    }
  } catch (const std::exception&) {
    mixed_ok = false;
  }

  const bool ok = k1 <= 1e-10 && fused_change <= 1e-10 && two_step_change > 1e-3 && mixed_ok &&
                  mixed_err <= 1e-10;
  return {ok, fmt::format("k=1 max diff {:.2e}; fused remix change {:.2e} (<= 1e-10); two-step remix "
                          "change {:.3g} (> 1e-3); mixed ranks {} (err {:.2e})",
                          k1, fused_change, two_step_change, mixed_ok ? "ok" : "raised", mixed_err)};
}

// ---- 8 ----------------------------------------------------------------------

Outcome mu_equivalence() {
  const std::size_t d_in = 20, d_out = 12, experts = 7;
  sr::Rng rng(800);
  sr::LibraryLayer layer;
  layer.layer_id = "l0";
  layer.d_in = d_in;
  layer.d_out = d_out;
  std::vector<sr::LoraAdapter> raw;
  for (std::size_t t = 0; t < experts; ++t) {
    raw.push_back(fixture::random_lora(d_out, d_in, 3 + t % 3, 810 + t, "e" + std::to_string(t)));
    layer.aligned.push_back(sr::align(raw.back()));
  }
  const Matrix w = sr::gaussian_matrix(d_out, d_in, rng);
  const auto adapted = sr::make_adapted_layer(w, layer, routing(sr::RouterKind::mu, 1, sr::MergeKind::fused));
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Vector x = sr::gaussian_vector(d_in, rng);
    const Matrix xm(d_in, 1, x.raw());
    Vector want = sr::matvec(w, x);
    for (const auto& ad : raw) {
      const Matrix delta = oracle::matmul(ad.b, oracle::matmul(ad.a, xm));
      for (std::size_t p = 0; p < d_out; ++p) want[p] += delta(p, 0) / static_cast<double>(experts);
    }
    worst = std::max(worst, sr::max_abs_diff(sr::forward_layer(adapted, x).output, want));
  }
  return {worst <= 1e-9, fmt::format("T=7 mixed ranks, 100 inputs, max diff {:.2e} (<= 1e-9)", worst)};
}

// ---- 9 ----------------------------------------------------------------------

Outcome trainer_checks() {
  // gradient vs central differences on a 4x4 problem
  const auto task = sr::gen_tasks(1, 4, 4, kPi / 2, 900)[0];
  const auto p = sr::make_regression_problem(task, 4, 32, 901);
  sr::Rng rng(902);
  Matrix b = sr::gaussian_matrix(4, 2, rng);
  Matrix a = sr::gaussian_matrix(2, 4, rng);
  const auto g = sr::lora_gradient(p, b, a);
  const double h = 1e-6;
  double worst_rel = 0;
  auto check = [&](Matrix& param, const Matrix& grad) {
    for (std::size_t i = 0; i < param.values().size(); ++i) {
      const double keep = param.values()[i];
      param.values()[i] = keep + h;
      const double up = sr::lora_loss(p, b, a);
      param.values()[i] = keep - h;
      const double down = sr::lora_loss(p, b, a);
      param.values()[i] = keep;
      const double fd = (up - down) / (2 * h);
      const double an = grad.values()[i];
      worst_rel = std::max(worst_rel, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8}));
    }
  };
  check(b, g.b);
  check(a, g.a);

  // full-batch descent at lr 1e-4 on the default synthetic task
  const sr::ExperimentConfig cfg;
  const auto tasks = sr::gen_tasks(cfg.tasks, cfg.d_in, cfg.task_dim, cfg.overlap_angle, cfg.seed);
  sr::ExpertForgeConfig fc;
  fc.mode = sr::ForgeMode::sgd;
  fc.rank = cfg.rank;
  fc.trainer.learning_rate = 1e-4;
  fc.trainer.steps = 200;
  fc.trainer.batch_size = 0;
  const auto res = sr::forge_expert_sgd(tasks[0], fc, cfg.d_out, 903);
  std::size_t increases = 0;
  for (std::size_t i = 1; i < res.loss_history.size(); ++i) {
    if (res.loss_history[i] > res.loss_history[i - 1]) ++increases;
  }
  const bool ok = worst_rel <= 1e-4 && increases == 0 && res.loss_history.size() == 201 &&
                  res.loss_history.back() < res.loss_history.front();
  return {ok, fmt::format("grad rel err {:.2e} (<= 1e-4); 200 steps lr 1e-4: {} increases, loss {:.6g} -> {:.6g}",
                          worst_rel, increases, res.loss_history.front(), res.loss_history.back())};
}

// ---- 10 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_salb(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string("\"") + SALB_BINARY + "\" " + args + " >\"" +
                          stdout_file.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome serialization() {
  const auto lib = fixture::random_library(4, 9, 24, 20, 8, 1000);
  const auto bytes = sr::encode_bundle(lib);
  const auto back = sr::decode_bundle(bytes);
  bool exact = sr::encode_bundle(back) == bytes && back.mode == lib.mode &&
               back.layers.size() == 4;
  for (std::size_t l = 0; exact && l < 4; ++l) {
    for (std::size_t t = 0; t < 9; ++t) {
      const auto& x = lib.layers[l].raw[t];
      const auto& y = back.layers[l].raw[t];
      exact = exact && x.expert_id == y.expert_id && y.rank() == 8;
      for (std::size_t i = 0; exact && i < x.b.values().size(); ++i) {
        exact = static_cast<double>(static_cast<float>(x.b.values()[i])) == y.b.values()[i];
      }
      for (std::size_t i = 0; exact && i < x.a.values().size(); ++i) {
        exact = static_cast<double>(static_cast<float>(x.a.values()[i])) == y.a.values()[i];
      }
    }
  }
  // aligned libraries too
  const auto aligned = sr::align_library(lib);
  const auto abytes = sr::encode_bundle(aligned);
  exact = exact && sr::encode_bundle(sr::decode_bundle(abytes)) == abytes;

  const fs::path dir = fs::temp_directory_path() / "sr_acceptance_10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string good(bytes.begin(), bytes.end());
  std::string bad_magic = good;
  bad_magic[1] = 'X';
  std::ofstream(dir / "magic.salb", std::ios::binary) << bad_magic;
  std::ofstream(dir / "short.salb", std::ios::binary) << good.substr(0, good.size() / 2);
  {
    std::ofstream csv(dir / "x.csv");
    for (std::size_t i = 0; i < 20; ++i) csv << (i ? ",1" : "1");
    csv << "\n";
  }

  std::vector<std::string> problems;
  for (const char* name : {"magic.salb", "short.salb"}) {
    const fs::path in = dir / name;
    const fs::path out = dir / (std::string(name) + ".aligned");
    const int code = run_salb("align \"" + in.string() + "\" \"" + out.string() + "\"", dir / "stdout");
    if (code != 2) problems.push_back(fmt::format("align {} exit {}", name, code));
    if (fs::exists(out) || fs::exists(out.string() + ".tmp")) problems.push_back(fmt::format("align {} left output", name));
    if (!slurp(dir / "stdout").empty()) problems.push_back(fmt::format("align {} printed results", name));
    const int rc = run_salb("route \"" + in.string() + "\" \"" + (dir / "x.csv").string() + "\"", dir / "stdout");
    if (rc != 2) problems.push_back(fmt::format("route {} exit {}", name, rc));
    if (!slurp(dir / "stdout").empty()) problems.push_back(fmt::format("route {} printed results", name));
  }
  fs::remove_all(dir);

  std::string detail = fmt::format("4x9 rank-8 round trip {}; corrupt/truncated: ",
                                   exact ? "bit-exact" : "MISMATCH");
  if (problems.empty()) {
    detail += "exit 2, no output";
  } else {
    for (const auto& p : problems) detail += p + "; ";
  }
  return {exact && problems.empty(), detail};
}

// ---- 11 ---------------------------------------------------------------------

Outcome similarity_confound() {
  const double angles[] = {kPi / 2, 3 * kPi / 8, kPi / 4, kPi / 8};
  std::vector<double> gaps, top1;
  for (double angle : angles) {
    sr::ExperimentConfig cfg;
    cfg.overlap_angle = angle;
    const auto setup = sr::build_synthetic(cfg, cfg.rank);
    const auto sim = sr::adapter_cosine_matrix(setup.raw);
    gaps.push_back(1.0 - sim.overall_off_diagonal());
    top1.push_back(sr::eval_routing_accuracy(setup.aligned, setup.tasks, sr::RouterKind::spectr,
                                             cfg.routing.k, cfg.n_per_task, cfg.seed)
                       .mean_top1);
  }
  bool ok = true;
  std::string detail = "angle/gap/top1:";
  const char* names[] = {"pi/2", "3pi/8", "pi/4", "pi/8"};
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (i > 0 && !(gaps[i] < gaps[i - 1])) ok = false;
    if (i > 0 && top1[i] > top1[i - 1]) ok = false;
    detail += fmt::format(" {} {:.4f}/{:.4f}", names[i], gaps[i], top1[i]);
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 = no stated limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "svd correctness", 5, svd_correctness},
      {2, "alignment transparency", 0, alignment_transparency},
      {3, "top singular vector argmax", 0, argmax_property},
      {4, "rank-1 router equivalence", 0, rank_one_equivalence},
      {5, "routing accuracy (synthetic)", 60, routing_accuracy},
      {6, "rank sweep", 120, rank_sweep},
      {7, "merge identities", 0, merge_identities},
      {8, "mu-routing equivalence", 0, mu_equivalence},
      {9, "trainer checks", 0, trainer_checks},
      {10, "serialization", 0, serialization},
      {11, "similarity confound", 0, similarity_confound},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += fmt::format("; runtime over {} s limit", c.limit_seconds);
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %-30s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
