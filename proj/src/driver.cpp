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

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "diskpca/diskpca.hpp"
#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

namespace {

void check_common(const KernelSpec& spec, Index k, double eps) {
  validate(spec);
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (!(eps > 0.0) || eps > 1.0) throw ArgumentError("eps must be in (0, 1]");
}

EmbeddingConfig pipeline_embedding(const DisKpcaParams& params, Index k) {
  EmbeddingConfig cfg = params.embedding;
  cfg.t = resolve_embedding_dim(params, k);
  return cfg;
}

// Uniform sample without replacement over all columns: the master draws
// global positions against the worker sizes, workers draw their share
// locally. The gathered points are stored at the master under "Y".
PointSet gather_uniform(Cluster& cluster, Index n_samples, std::uint64_t seed, bool broadcast) {
  cluster.run_round(
      "uniform-sizes",
      [&](WorkerContext& w) { w.send("size", static_cast<double>(w.local_data().cols())); },
      [&](MasterContext& m) {
        std::vector<Index> sizes;
        for (const Message* msg : m.messages("size")) {
          sizes.push_back(static_cast<Index>(std::llround(std::get<double>(msg->payload))));
        }
        Index n = 0;
        for (Index s : sizes) n += s;
        Rng rng(lane(seed, "uniform-alloc"));
        std::vector<Index> counts(sizes.size(), 0);
        for (std::size_t pos : rng.sample_without_replacement(static_cast<std::size_t>(n),
                                                              static_cast<std::size_t>(n_samples))) {
          auto at = static_cast<Index>(pos);
          std::size_t w = 0;
          while (at >= sizes[w]) at -= sizes[w++];
          ++counts[w];
        }
        for (int w = 0; w < m.num_workers(); ++w) {
          m.send(w, "uniform-count", static_cast<double>(counts[static_cast<std::size_t>(w)]));
        }
      });

  const Index dim = cluster.dim();
  cluster.run_round(
      "uniform-sample",
      [&](WorkerContext& w) {
        const auto count = static_cast<std::size_t>(std::llround(std::get<double>(w.received("uniform-count"))));
        if (count == 0) return;
        Rng rng(lane(seed, "uniform-sample", static_cast<std::uint64_t>(w.id())));
        std::vector<Index> picked;
        for (std::size_t j : rng.sample_without_replacement(static_cast<std::size_t>(w.local_data().cols()), count)) {
          picked.push_back(static_cast<Index>(j));
        }
        w.send("uniform-part", sampling_steps::local_points(w.local_data(), w.global_indices(), picked));
      },
      [&](MasterContext& m) {
        std::vector<PointSet> parts;
        for (const Message* msg : m.messages("uniform-part")) parts.push_back(std::get<PointSet>(msg->payload));
        PointSet y = sampling_steps::merge_points(parts, dim);
        if (broadcast) m.broadcast("Y", y);
        m.state().put("Y", std::move(y));
      });
  return cluster.master_state().get<PointSet>("Y");
}

Index clamp_samples(Index n_samples, Index n, std::vector<std::string>& notes) {
  if (n_samples < 1) throw ArgumentError("n_samples must be >= 1");
  if (n_samples > n) {
    notes.push_back("n_samples " + std::to_string(n_samples) + " exceeds n = " + std::to_string(n) +
                    "; clamped");
    return n;
  }
  return n_samples;
}

}  // namespace

Index resolve_n_lev(const DisKpcaParams& params, Index k) {
  if (params.n_lev) {
    if (*params.n_lev < 1) throw ArgumentError("n_lev must be >= 1");
    return *params.n_lev;
  }
  return static_cast<Index>(
      std::ceil(params.leverage_factor * static_cast<double>(k) * std::log(static_cast<double>(k) + 1.0)));
}

Index resolve_n_adapt(const DisKpcaParams& params, Index k, double eps) {
  if (params.n_adapt) {
    if (*params.n_adapt < 1) throw ArgumentError("n_adapt must be >= 1");
    return *params.n_adapt;
  }
  return static_cast<Index>(std::ceil(2.0 * static_cast<double>(k) / eps));
}

Index resolve_embedding_dim(const DisKpcaParams& params, Index k) {
  return params.embedding.t.value_or(std::max<Index>(4 * k, 50));
}

DisKpcaResult dis_kpca(Cluster& cluster, const KernelSpec& spec, Index k, double eps,
                       const DisKpcaParams& params, std::uint64_t seed) {
  check_common(spec, k, eps);
  DisKpcaResult out;
  const std::size_t first_round = cluster.ledger().rounds().size();
  const SketchOp op = make_good_embedding(spec, k, params.embedding_eps, cluster.dim(),
                                          pipeline_embedding(params, k), lane(seed, "embedding"),
                                          &out.notes);
  out.embedding_dim = op.output_dim();

  cluster.run_round("embed", [&](WorkerContext& w) {
    w.state().put("embedded", op.apply(w.local_data()).dense());
  });
  out.scores = dis_leverage_scores(cluster, "embedded", params.leverage_sketch_dim, lane(seed, "disls"));
  out.representatives = rep_sample(cluster, spec, resolve_n_lev(params, k),
                                   resolve_n_adapt(params, k, eps), lane(seed, "repsample"),
                                   params.rank_tol);
  out.width = params.width.resolve(static_cast<Index>(out.representatives.points.global_indices.size()), eps);
  LowRankResult lr = dis_low_rank(cluster, spec, k, out.width, lane(seed, "dislr"), params.rank_tol);
  out.solution = std::move(lr.solution);

  for (auto* src : {&out.scores.notes, &out.representatives.notes, &lr.notes}) {
    out.notes.insert(out.notes.end(), src->begin(), src->end());
  }
  out.ledger = cluster.ledger().since(first_round);
  return out;
}

KpcaSolution kpca_centralized(const ColumnMatrix& a, const KernelSpec& spec, Index k, double eps,
                              const DisKpcaParams& params, std::uint64_t seed) {
  check_common(spec, k, eps);
  using namespace sampling_steps;
  constexpr int kWorker = 0;
  const Index dim = a.rows();
  std::vector<Index> global(static_cast<std::size_t>(a.cols()));
  for (Index j = 0; j < a.cols(); ++j) global[static_cast<std::size_t>(j)] = j;

  const SketchOp op = make_good_embedding(spec, k, params.embedding_eps, dim,
                                          pipeline_embedding(params, k), lane(seed, "embedding"));
  const Matrix e = op.apply(a).dense();
  if (params.leverage_sketch_dim < e.rows()) throw ArgumentError("p must be >= t");

  const std::uint64_t ls_seed = lane(seed, "disls");
  const TriangularFactor z = leverage_steps::master_factor(
      {leverage_steps::worker_sketch(e, params.leverage_sketch_dim, ls_seed, kWorker)});
  const Vector scores = leverage_steps::worker_scores(e, z);

  const std::uint64_t rs_seed = lane(seed, "repsample");
  const Index n_lev = resolve_n_lev(params, k);
  const auto lev_picked = worker_draw(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                                      n_lev, rs_seed, "leverage", kWorker);
  const PointSet p = merge_points({local_points(a, global, lev_picked)}, dim);

  const SpanBasis p_basis = build_span_basis(spec, p.columns, params.rank_tol);
  Vector r = residual_sq_distances(p_basis, spec, a);
  for (Index g : p.global_indices) r(g) = 0.0;
  PointSet ytilde;
  ytilde.columns = ColumnMatrix(Matrix(dim, 0));
  if (r.sum() > 0.0) {
    const auto picked = worker_draw(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())),
                                    resolve_n_adapt(params, k, eps), rs_seed, "adaptive", kWorker);
    ytilde = merge_points({local_points(a, global, picked)}, dim);
  }
  const PointSet y = concat_points(p, ytilde, dim);

  const Index w = params.width.resolve(static_cast<Index>(y.global_indices.size()), eps);
  const std::uint64_t lr_seed = lane(seed, "dislr");
  const SpanBasis basis = build_span_basis(spec, y.columns, params.rank_tol);
  const Matrix pi = project_coeffs(basis, spec, a);
  const Matrix sketched = right_sketch(pi, w, lane(lr_seed, "dislr-right-sketch", kWorker));
  const Matrix top = low_rank_steps::master_top_vectors({sketched}, std::min(k, basis.rank()));
  return low_rank_steps::solution_from(basis, y, top);
}

BaselineResult baseline_uniform_dislr(Cluster& cluster, const KernelSpec& spec, Index k,
                                      Index n_samples, const WidthRule& width, double eps,
                                      std::uint64_t seed, double rank_tol) {
  check_common(spec, k, eps);
  BaselineResult out;
  const std::size_t first_round = cluster.ledger().rounds().size();
  n_samples = clamp_samples(n_samples, cluster.total_points(), out.notes);
  const PointSet y = gather_uniform(cluster, n_samples, lane(seed, "uniform"), true);
  const Index w = width.resolve(static_cast<Index>(y.global_indices.size()), eps);
  LowRankResult lr = dis_low_rank(cluster, spec, k, w, lane(seed, "dislr"), rank_tol);
  out.solution = std::move(lr.solution);
  out.notes.insert(out.notes.end(), lr.notes.begin(), lr.notes.end());
  out.ledger = cluster.ledger().since(first_round);
  return out;
}

BaselineResult baseline_uniform_batch(Cluster& cluster, const KernelSpec& spec, Index k,
                                      Index n_samples, std::uint64_t seed) {
  check_common(spec, k, 1.0);
  BaselineResult out;
  const std::size_t first_round = cluster.ledger().rounds().size();
  n_samples = clamp_samples(n_samples, cluster.total_points(), out.notes);
  const PointSet y = gather_uniform(cluster, n_samples, lane(seed, "uniform"), false);
  BatchKpcaResult batch = batch_kpca(spec, y.columns, k);
  out.solution = std::move(batch.solution);
  out.solution.global_indices = y.global_indices;
  if (out.solution.k < k) out.notes.push_back("baseline_uniform_batch: k clamped to sample rank");
  out.ledger = cluster.ledger().since(first_round);
  return out;
}

BatchKpcaResult batch_kpca(const KernelSpec& spec, const ColumnMatrix& a, Index k) {
  if (k < 1) throw ArgumentError("batch_kpca: k must be >= 1");
  if (a.cols() == 0) throw ArgumentError("batch_kpca: no points");
  const Matrix kaa = gram(spec, a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(kaa);
  if (eig.info() != Eigen::Success) throw NumericalError("batch_kpca: eigendecomposition failed");
  const Index n = kaa.rows();
  BatchKpcaResult out;
  out.eigenvalues = eig.eigenvalues().reverse();
  Matrix vecs = eig.eigenvectors().rowwise().reverse();
  const double top = out.eigenvalues(0);
  if (!(top > 0.0)) throw NumericalError("batch_kpca: kernel matrix is numerically zero");
  Index rank = 0;
  while (rank < n && out.eigenvalues(rank) > 1e-9 * top) ++rank;
  const Index kk = std::min(k, rank);

  Matrix v = vecs.leftCols(kk);
  normalize_signs(v);
  out.solution.points = a;
  out.solution.coeffs = v * out.eigenvalues.head(kk).cwiseSqrt().cwiseInverse().asDiagonal();
  out.solution.k = kk;
  for (Index j = 0; j < a.cols(); ++j) out.solution.global_indices.push_back(j);
  for (Index i = kk; i < n; ++i) out.opt_error += std::max(out.eigenvalues(i), 0.0);
  return out;
}

}  // namespace diskpca
