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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diskpca/kernels.hpp"
#include "diskpca/matrix.hpp"
#include "diskpca/simnet.hpp"
#include "diskpca/sketch.hpp"

namespace diskpca {

// ---------------------------------------------------------------------------
// Distributed leverage scores

struct LeverageScores {
  /// per_worker[i][j]: approximate leverage score of local column j on
  /// worker i.
  std::vector<Vector> per_worker;
  double global_sum = 0.0;
  /// Rank kept when factorizing the stacked sketches.
  Index rank = 0;
  std::vector<std::string> notes;
};

// Worker- and master-side steps, shared by the distributed protocol and the
// centralized reference pipeline.
namespace leverage_steps {

/// E^i·T^i with a per-worker Gaussian right sketch of p columns.
Matrix worker_sketch(const Matrix& embedded, Index p, std::uint64_t seed, int worker);
/// QR-factorizes [E¹T¹, …, EˢTˢ]ᵀ and returns its triangular factor Z.
TriangularFactor master_factor(const std::vector<Matrix>& sketches);
/// ℓ̃_j = ‖((Zᵀ)⁻¹E^i)(:, j)‖².
Vector worker_scores(const Matrix& embedded, const TriangularFactor& z);

}  // namespace leverage_steps

/// Each worker reads its embedded data from state key `embedded_key`
/// (a Matrix) and leaves its scores under "leverage".
LeverageScores dis_leverage_scores(Cluster& cluster, const std::string& embedded_key, Index p,
                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Representative sampling

struct RepresentativeSet {
  PointSet leverage_points;  // P
  PointSet adaptive_points;  // Ỹ, disjoint from P
  PointSet points;           // Y = P ∪ Ỹ, P first
  Index leverage_draws = 0;
  Index adaptive_draws = 0;
  std::vector<std::string> notes;
};

namespace sampling_steps {

/// Draws `count` local columns with replacement proportional to `weights`
/// and returns the distinct ones in first-draw order.
std::vector<Index> worker_draw(std::span<const double> weights, Index count, std::uint64_t seed,
                               const char* stage, int worker);
/// Per-worker draw counts, multinomial over the per-worker weight sums.
std::vector<Index> master_allocate(std::span<const double> worker_sums, Index draws,
                                   std::uint64_t seed, const char* stage);
/// Union of per-worker point sets ordered by global index.
PointSet merge_points(const std::vector<PointSet>& parts, Index dim);
PointSet concat_points(const PointSet& a, const PointSet& b, Index dim);
PointSet local_points(const ColumnMatrix& data, const std::vector<Index>& global,
                      const std::vector<Index>& local);

}  // namespace sampling_steps

/// Workers read scores from state key "leverage". Stage 1 samples n_lev
/// points by leverage; stage 2 samples n_adapt points by squared feature-
/// space distance to span φ(P). Y is broadcast to every worker as "Y".
RepresentativeSet rep_sample(Cluster& cluster, const KernelSpec& spec, Index n_lev, Index n_adapt,
                             std::uint64_t seed, double rank_tol = kDefaultRankTolerance);

// ---------------------------------------------------------------------------
// Low-rank fit in the span of the representatives

/// How the right-sketch width w of the projected data is chosen.
struct WidthRule {
  enum class Kind { kEqualY, kAbsolute, kScaledByEps };
  Kind kind = Kind::kEqualY;
  Index absolute = 0;
  /// Resolves against |Y| (and ε for kScaledByEps: ⌈|Y|/ε²⌉).
  Index resolve(Index y_size, double eps) const;
};

struct LowRankResult {
  KpcaSolution solution;
  Index width = 0;
  std::vector<std::string> notes;
};

namespace low_rank_steps {

/// Top-k left singular vectors of the concatenated sketches.
Matrix master_top_vectors(const std::vector<Matrix>& sketches, Index k);
/// C = R⁻¹W over the retained points of the basis.
KpcaSolution solution_from(const SpanBasis& basis, const PointSet& y, const Matrix& w);

}  // namespace low_rank_steps

/// Workers read Y from their inbox ("Y") and the master from its state
/// ("Y"). Returns the rank-k solution held by the master.
LowRankResult dis_low_rank(Cluster& cluster, const KernelSpec& spec, Index k, Index w,
                           std::uint64_t seed, double rank_tol = kDefaultRankTolerance);

// ---------------------------------------------------------------------------
// Full pipeline and baselines

struct DisKpcaParams {
  /// Embedding constants; t defaults to max(4k, 50) in the pipeline.
  EmbeddingConfig embedding;
  /// Accuracy of the step-1 embedding.
  double embedding_eps = 0.25;
  /// Column count p of the leverage-score sketch.
  Index leverage_sketch_dim = 250;
  /// n_lev = ⌈leverage_factor·k·ln(k+1)⌉ unless set.
  std::optional<Index> n_lev;
  double leverage_factor = 5.0;
  /// Adaptive samples; defaults to ⌈2k/ε⌉ when unset.
  std::optional<Index> n_adapt;
  WidthRule width;
  double rank_tol = kDefaultRankTolerance;
};

Index resolve_n_lev(const DisKpcaParams& params, Index k);
Index resolve_n_adapt(const DisKpcaParams& params, Index k, double eps);
Index resolve_embedding_dim(const DisKpcaParams& params, Index k);

struct DisKpcaResult {
  KpcaSolution solution;
  CommLedger ledger;
  LeverageScores scores;
  RepresentativeSet representatives;
  Index embedding_dim = 0;
  Index width = 0;
  std::vector<std::string> notes;
};

DisKpcaResult dis_kpca(Cluster& cluster, const KernelSpec& spec, Index k, double eps,
                       const DisKpcaParams& params, std::uint64_t seed);

/// The same stages run in one process without the simulated network,
/// using worker 0's seed lanes. Matches dis_kpca on a one-worker cluster
/// bit for bit.
KpcaSolution kpca_centralized(const ColumnMatrix& a, const KernelSpec& spec, Index k, double eps,
                              const DisKpcaParams& params, std::uint64_t seed);

struct BaselineResult {
  KpcaSolution solution;
  CommLedger ledger;
  std::vector<std::string> notes;
};

/// Y drawn uniformly without replacement over all columns, then the
/// distributed low-rank fit.
BaselineResult baseline_uniform_dislr(Cluster& cluster, const KernelSpec& spec, Index k,
                                      Index n_samples, const WidthRule& width, double eps,
                                      std::uint64_t seed,
                                      double rank_tol = kDefaultRankTolerance);

/// Uniform columns pulled to the master, then batch KPCA on them.
BaselineResult baseline_uniform_batch(Cluster& cluster, const KernelSpec& spec, Index k,
                                      Index n_samples, std::uint64_t seed);

struct BatchKpcaResult {
  KpcaSolution solution;
  double opt_error = 0.0;
  Vector eigenvalues;  // nonincreasing
};

/// Eigendecomposition of K_AA: C = V_k·Λ_k^{-1/2}, opt_error = Σ_{i>k} λ_i.
/// k is clamped to the numerical rank.
BatchKpcaResult batch_kpca(const KernelSpec& spec, const ColumnMatrix& a, Index k);

}  // namespace diskpca
