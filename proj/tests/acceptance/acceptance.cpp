// Copyright 2026 The diskpca Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one pass/fail line per criterion. Tolerances and seed
// counts are fixed below. Usage: diskpca_acceptance [criterion ...]

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "diskpca/dataset.hpp"
#include "diskpca/diskpca.hpp"
#include "diskpca/eval.hpp"
#include "diskpca/random.hpp"
#include "diskpca/sketch.hpp"

namespace {

using namespace diskpca;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

double trace_of(const KernelSpec& spec, const ColumnMatrix& a) { return kernel_diagonal(spec, a).sum(); }

ColumnMatrix low_rank_data(Index n, Index d, Index rank, double noise, std::uint64_t seed) {
  SyntheticSpec s;
  s.kind = SyntheticKind::kLowRankPlusNoise;
  s.n = n;
  s.d = d;
  s.k_true = rank;
  s.noise = noise;
  s.seed = seed;
  return gen_synthetic(s).data;
}

SyntheticData clustered_data(std::uint64_t seed) {
  SyntheticSpec s;
  s.kind = SyntheticKind::kClustered;
  s.n = 1000;
  s.d = 10;
  s.k_true = 10;
  s.noise = 1.0;
  s.separation = 30.0;
  s.imbalance = 2.0;
  s.seed = seed;
  return gen_synthetic(s);
}

// 1. Batch oracle: subspace error of batch_kpca equals the eigenvalue tail.
Outcome batch_oracle() {
  constexpr int kInstances = 20;
  constexpr double kRelTol = 1e-6;
  constexpr double kMaxSeconds = 10.0;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    const Index n = 40 + 20 * i;
    const Index k = 1 + i % 10;
    const ColumnMatrix a = low_rank_data(n, 8, 6, 0.3, lane(1, "acc1", i));
    KernelSpec spec;
    switch (i % 3) {
      case 0: spec = GaussianKernel{median_bandwidth(a, 1.0, 7)}; break;
      case 1: spec = PolynomialKernel{2}; break;
      default: spec = ArcCosKernel{1}; break;
    }
    const Matrix kaa = gram(spec, a);
    // Independent route to the spectrum: singular values of the PSD Gram.
    const Vector sv = Eigen::BDCSVD<Matrix>(kaa).singularValues();
    const double tail = sv.tail(n - k).sum();
    const auto res = batch_kpca(spec, a, k);
    const double err = subspace_error(spec, a, res.solution);
    const double rel = std::abs(err - tail) / std::max(tail, 1e-12 * sv(0));
    worst = std::max(worst, rel);
  }
  const double secs = seconds_since(start);
  return {worst <= kRelTol && secs < kMaxSeconds,
          fmt("max rel deviation %.2e (tol %.0e), %.1f s (limit %.0f s)", worst, kRelTol, secs, kMaxSeconds)};
}

// 2. disKPCA within 1.15 x optimum + 0.02 tr(K) on 90 of 100 seeds.
Outcome approximation_gaussian() {
  constexpr int kSeeds = 100;
  constexpr int kRequired = 90;
  constexpr double kRel = 1.15;
  constexpr double kAdd = 0.02;
  constexpr double kMaxSeconds = 300.0;
  const auto start = std::chrono::steady_clock::now();
  const ColumnMatrix a = low_rank_data(2000, 20, 10, 0.1, 2026);
  const KernelSpec spec = GaussianKernel{median_bandwidth(a, 0.2, 11)};
  const double opt = batch_kpca(spec, a, 10).opt_error;
  const double bound = kRel * opt + kAdd * trace_of(spec, a);
  Cluster cluster(a, partition_powerlaw(a.cols(), 5, 2.0, 3));
  DisKpcaParams params;
  params.n_adapt = 200;
  int ok = 0;
  double worst_ratio = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    const auto res = dis_kpca(cluster, spec, 10, 0.25, params, lane(2, "acc2", s));
    const double err = subspace_error(spec, a, res.solution);
    worst_ratio = std::max(worst_ratio, err / opt);
    if (err <= bound) ++ok;
  }
  const double secs = seconds_since(start);
  return {ok >= kRequired && secs < kMaxSeconds,
          fmt("%.0f/100 seeds within bound (need %.0f), worst err/opt %.4f, %.0f s", ok, kRequired,
              worst_ratio, secs)};
}

// 3. Polynomial kernel on data of exact feature rank k.
Outcome polynomial_exact() {
  constexpr int kSeeds = 100;
  constexpr int kRequired = 90;
  constexpr double kFrac = 0.05;
  // Points in a 4-dimensional subspace: degree-2 features span 10 dims.
  const ColumnMatrix a = low_rank_data(1000, 20, 4, 0.0, 2027);
  const KernelSpec spec = PolynomialKernel{2};
  const double tr = trace_of(spec, a);
  Cluster cluster(a, partition_powerlaw(a.cols(), 5, 2.0, 5));
  DisKpcaParams params;
  params.n_adapt = 50;
  int ok = 0;
  double worst = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    const auto res = dis_kpca(cluster, spec, 10, 0.25, params, lane(3, "acc3", s));
    const double frac = subspace_error(spec, a, res.solution) / tr;
    worst = std::max(worst, frac);
    if (frac <= kFrac) ++ok;
  }
  return {ok >= kRequired, fmt("%.0f/100 seeds with err <= %.2f tr(K) (need %.0f), worst %.2e tr(K)", ok,
                               kFrac, kRequired, worst)};
}

// 4. Distributed leverage scores within [0.5, 1.5] of exact ones.
Outcome leverage_bracket() {
  constexpr int kSeeds = 20;
  constexpr double kFraction = 0.95;
  constexpr double kMaxSeconds = 30.0;
  constexpr Index kT = 8;
  constexpr Index kN = 60;
  constexpr int kS = 3;
  // Default p. Every worker holds n_i = 20 < p columns, so its right sketch
  // is the identity.
  const Index kP = DisKpcaParams{}.leverage_sketch_dim;
  const auto start = std::chrono::steady_clock::now();
  Index inside = 0;
  Index total = 0;
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(lane(4, "acc4-data", s));
    Matrix e(kT, kN);
    for (Index j = 0; j < kN; ++j) {
      for (Index i = 0; i < kT; ++i) e(i, j) = rng.normal();
    }
    // Exact scores: squared row norms of V from a full SVD.
    const Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeThinV);
    const Vector exact = svd.matrixV().rowwise().squaredNorm();

    Cluster cluster(ColumnMatrix(e), partition_powerlaw(kN, kS, 0.0, lane(4, "acc4-part", s)));
    for (int w = 0; w < kS; ++w) {
      cluster.worker_state(w).put("embedded", cluster.worker_data(w).to_dense());
    }
    const auto scores = dis_leverage_scores(cluster, "embedded", kP, lane(4, "acc4", s));
    for (int w = 0; w < kS; ++w) {
      const auto& idx = cluster.worker_indices(w);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const double ratio = scores.per_worker[w](static_cast<Index>(j)) / exact(idx[j]);
        if (ratio >= 0.5 && ratio <= 1.5) ++inside;
        ++total;
      }
    }
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(total);
  const double secs = seconds_since(start);
  return {frac >= kFraction && secs < kMaxSeconds,
          fmt("%.4f of columns in bracket (need %.2f), p = %.0f >= n_i, %.1f s", frac, kFraction,
              static_cast<double>(kP), secs)};
}

// 5. Total words are affine in the worker count. Every worker holds more
// than max(p, w) columns, so no sketch degenerates to the identity.
Outcome communication_linear() {
  constexpr double kMaxRelResidual = 0.05;
  const ColumnMatrix a = low_rank_data(6400, 20, 10, 0.1, 2028);
  const KernelSpec spec = GaussianKernel{median_bandwidth(a, 0.2, 13)};
  DisKpcaParams params;
  params.n_adapt = 200;
  const std::vector<int> workers = {2, 4, 8, 16};
  std::vector<double> words;
  for (int s : workers) {
    Cluster cluster(a, partition_powerlaw(a.cols(), s, 0.0, 17));
    words.push_back(static_cast<double>(dis_kpca(cluster, spec, 10, 0.25, params, 19).ledger.total_words()));
  }
  Matrix x(4, 2);
  Vector y(4);
  for (int i = 0; i < 4; ++i) {
    x(i, 0) = workers[i];
    x(i, 1) = 1.0;
    y(i) = words[i];
  }
  const Vector coef = x.colPivHouseholderQr().solve(y);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(x.row(i).dot(coef) - y(i)) / y(i));
  return {worst < kMaxRelResidual,
          fmt("words = %.0f s + %.0f, max rel residual %.4f (limit %.2f)", coef(0), coef(1), worst, kMaxRelResidual)};
}

struct MonteCarlo {
  double mean = 0.0;
  double se = 0.0;
};

MonteCarlo monte_carlo(int seeds, const std::function<double(std::uint64_t)>& draw) {
  double sum = 0.0;
  double sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const double v = draw(static_cast<std::uint64_t>(s));
    sum += v;
    sq += v * v;
  }
  const double mean = sum / seeds;
  const double var = (sq - seeds * mean * mean) / (seeds - 1);
  return {mean, std::sqrt(std::max(var, 0.0) / seeds)};
}

// 6. TensorSketch and RFF inner products are unbiased.
Outcome sketch_statistics() {
  constexpr int kSeeds = 500;
  constexpr double kRel = 0.05;
  constexpr double kBand = 3.0;
  Rng rng(6);
  Matrix xy(10, 2);
  for (Index i = 0; i < 10; ++i) {
    const double common = rng.normal();
    xy(i, 0) = common + 0.5 * rng.normal();
    xy(i, 1) = common + 0.5 * rng.normal();
  }
  xy /= std::sqrt(10.0);
  const ColumnMatrix pts(xy);
  std::ostringstream detail;
  bool pass = true;
  auto check = [&](const char* name, double exact, const MonteCarlo& mc) {
    const double dev = std::abs(mc.mean - exact);
    const bool ok = dev <= kRel * std::abs(exact) && dev <= kBand * mc.se;
    pass = pass && ok;
    detail << name << fmt(" mean %.4f exact %.4f (se %.4f)", mc.mean, exact, mc.se) << (ok ? "" : " FAILED") << "; ";
  };
  const auto ts = monte_carlo(kSeeds, [&](std::uint64_t s) {
    const Matrix e = tensorsketch_apply(2, 512, lane(61, "ts", s), pts).to_dense();
    return e.col(0).dot(e.col(1));
  });
  check("TensorSketch", kernel_eval(PolynomialKernel{2}, pts, 0, pts, 1), ts);
  const double sigma = 1.0;
  const auto rff = monte_carlo(kSeeds, [&](std::uint64_t s) {
    const Matrix e = rff_apply(2000, sigma, lane(62, "rff", s), pts).to_dense();
    return e.col(0).dot(e.col(1));
  });
  check("RFF", kernel_eval(GaussianKernel{sigma}, pts, 0, pts, 1), rff);
  return {pass, detail.str()};
}

bool same_solution(const KpcaSolution& a, const KpcaSolution& b) {
  if (a.k != b.k || a.global_indices != b.global_indices || !a.points.identical(b.points)) return false;
  if (a.coeffs.rows() != b.coeffs.rows() || a.coeffs.cols() != b.coeffs.cols()) return false;
  return ColumnMatrix(a.coeffs).identical(ColumnMatrix(b.coeffs));
}

// 7. One worker equals the centralized pipeline; reruns are byte-identical.
Outcome determinism() {
  const ColumnMatrix a = low_rank_data(600, 12, 6, 0.1, 2029);
  const KernelSpec spec = GaussianKernel{median_bandwidth(a, 0.2, 23)};
  DisKpcaParams params;
  params.n_adapt = 60;
  Cluster single(a, partition_powerlaw(a.cols(), 1, 2.0, 29));
  const auto dist = dis_kpca(single, spec, 5, 0.25, params, 31);
  const auto central = kpca_centralized(a, spec, 5, 0.25, params, 31);
  const bool single_ok = same_solution(dist.solution, central);

  auto run = [&](bool parallel) {
    Cluster c(a, partition_powerlaw(a.cols(), 5, 2.0, 37));
    c.set_parallel(parallel);
    const auto r = dis_kpca(c, spec, 5, 0.25, params, 41);
    ExperimentRecord rec;
    rec.method = "diskpca";
    rec.subspace_error = subspace_error(spec, a, r.solution);
    rec.total_words = r.ledger.total_words();
    return std::make_pair(r, rec.to_json(false) + r.ledger.to_jsonl());
  };
  const auto [r1, out1] = run(false);
  const auto [r2, out2] = run(false);
  const auto [r3, out3] = run(true);
  const bool rerun_ok = out1 == out2 && same_solution(r1.solution, r2.solution);
  const bool parallel_ok = out1 == out3 && same_solution(r1.solution, r3.solution);
  std::string detail = std::string("single-worker vs centralized ") + (single_ok ? "identical" : "DIFFER") +
                       ", rerun " + (rerun_ok ? "identical" : "DIFFER") + ", parallel " +
                       (parallel_ok ? "identical" : "DIFFER");
  return {single_ok && rerun_ok && parallel_ok, detail};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// 8. Median error does not increase along the n_adapt sweep.
Outcome monotone_sweep() {
  constexpr int kSeeds = 50;
  const ColumnMatrix a = low_rank_data(1000, 20, 10, 0.1, 2030);
  const KernelSpec spec = GaussianKernel{median_bandwidth(a, 0.2, 43)};
  Cluster cluster(a, partition_powerlaw(a.cols(), 5, 2.0, 47));
  DisKpcaParams params;
  std::vector<double> medians;
  for (Index n_adapt : default_sweep()) {
    params.n_adapt = n_adapt;
    std::vector<double> errs;
    for (int s = 0; s < kSeeds; ++s) {
      errs.push_back(subspace_error(spec, a, dis_kpca(cluster, spec, 10, 0.25, params, lane(8, "acc8", s)).solution));
    }
    medians.push_back(median(errs));
  }
  bool ok = true;
  for (std::size_t i = 1; i < medians.size(); ++i) ok = ok && medians[i] <= medians[i - 1];
  return {ok, fmt("medians %.3f, %.3f, %.3f, %.3f", medians[0], medians[1], medians[2], medians[3])};
}

// 9. disKPCA beats uniform+disLR on clustered data.
Outcome head_to_head() {
  constexpr int kSeeds = 100;
  constexpr int kRequired = 80;
  constexpr Index kAdapt = 50;
  const SyntheticData data = clustered_data(2031);
  const ColumnMatrix& a = data.data;
  const KernelSpec spec = GaussianKernel{median_bandwidth(a, 0.2, 53)};
  Cluster cluster(a, partition_powerlaw(a.cols(), 5, 2.0, 59));
  DisKpcaParams params;
  params.n_adapt = kAdapt;
  int wins = 0;
  double ours = 0.0;
  double theirs = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    const std::uint64_t seed = lane(9, "acc9", s);
    const double e1 = subspace_error(spec, a, dis_kpca(cluster, spec, 10, 0.25, params, seed).solution);
    const double e2 = subspace_error(
        spec, a, baseline_uniform_dislr(cluster, spec, 10, kAdapt, params.width, 0.25, seed).solution);
    ours += e1 / kSeeds;
    theirs += e2 / kSeeds;
    if (e1 < e2) ++wins;
  }
  return {wins >= kRequired, fmt("disKPCA wins %.0f/100 (need %.0f), mean err %.2f vs %.2f", wins, kRequired,
                                 ours, theirs)};
}

// 10. Lloyd is monotone; separable blobs are recovered exactly.
Outcome spectral_clustering() {
  constexpr int kSeeds = 100;
  int recovered = 0;
  bool monotone = true;
  for (int s = 0; s < kSeeds; ++s) {
    SyntheticSpec gs;
    gs.kind = SyntheticKind::kClustered;
    gs.n = 200;
    gs.d = 5;
    gs.k_true = 4;
    gs.noise = 0.05;
    gs.separation = 20.0;
    gs.seed = lane(10, "acc10-data", s);
    const SyntheticData data = gen_synthetic(gs);
    const KernelSpec spec = GaussianKernel{median_bandwidth(data.data, 1.0, 3)};
    Cluster cluster(data.data, partition_powerlaw(gs.n, 4, 2.0, lane(10, "acc10-part", s)));
    DisKpcaParams params;
    params.n_adapt = 20;
    const auto res = spectral_cluster(cluster, spec, 4, 0.25, params, 100, lane(10, "acc10", s));
    for (std::size_t i = 1; i < res.history.size(); ++i) monotone = monotone && res.history[i] <= res.history[i - 1];
    // Recovery up to relabeling: a bijection between labels and clusters.
    std::set<std::pair<int, int>> pairs;
    for (std::size_t j = 0; j < data.labels.size(); ++j) pairs.insert({data.labels[j], res.assignments[j]});
    std::set<int> firsts;
    std::set<int> seconds;
    for (const auto& [l, c] : pairs) {
      firsts.insert(l);
      seconds.insert(c);
    }
    if (pairs.size() == 4 && firsts.size() == 4 && seconds.size() == 4) ++recovered;
  }
  return {monotone && recovered == kSeeds, std::string("objective nonincreasing: ") + (monotone ? "yes" : "NO") +
                                                fmt("; recovered %.0f/100", recovered)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"batch-oracle optimality", batch_oracle},
      {"disKPCA approximation (Gaussian)", approximation_gaussian},
      {"polynomial exactness", polynomial_exact},
      {"leverage bracket", leverage_bracket},
      {"communication linear in s", communication_linear},
      {"sketch statistics", sketch_statistics},
      {"single-worker equivalence and determinism", determinism},
      {"error monotone in n_adapt", monotone_sweep},
      {"head-to-head vs uniform+disLR", head_to_head},
      {"spectral clustering", spectral_clustering},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failed;
    std::printf("[%s] criterion %d: %s: %s\n", out.pass ? "PASS" : "FAIL", id, criteria[i].first, out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
