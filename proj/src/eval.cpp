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

#include "diskpca/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

std::string method_name(Method method) {
  switch (method) {
    case Method::kDisKpca:
      return "diskpca";
    case Method::kUniformDisLR:
      return "uniform+dislr";
    case Method::kUniformBatch:
      return "uniform+batch";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "diskpca" || name == "kpca") return Method::kDisKpca;
  if (name == "uniform+dislr" || name == "baseline-dislr") return Method::kUniformDisLR;
  if (name == "uniform+batch" || name == "baseline-batch") return Method::kUniformBatch;
  throw ArgumentError("unknown method '" + name + "'");
}

std::string ExperimentRecord::to_json(bool include_wall_time) const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["k"] = k;
  j["eps"] = eps;
  j["n_lev"] = n_lev;
  j["n_adapt"] = n_adapt;
  j["t"] = t;
  j["p"] = p;
  j["w"] = w;
  j["m"] = m;
  j["y_size"] = y_size;
  j["seed"] = seed;
  j["subspace_error"] = subspace_error;
  j["opt_error"] = opt_error ? nlohmann::ordered_json(*opt_error) : nlohmann::ordered_json(nullptr);
  j["total_words"] = total_words;
  if (include_wall_time) j["wall_time"] = wall_time;
  return j.dump();
}

ExperimentRecord run_method(Cluster& cluster, const ColumnMatrix& data, const KernelSpec& spec,
                            Method method, Index k, double eps, const DisKpcaParams& params,
                            Index n_adapt, std::uint64_t seed, std::optional<double> opt_error) {
  ExperimentRecord rec;
  rec.method = method_name(method);
  rec.k = k;
  rec.eps = eps;
  rec.n_adapt = n_adapt;
  rec.seed = seed;
  rec.opt_error = opt_error;
  const auto start = std::chrono::steady_clock::now();
  KpcaSolution sol;
  switch (method) {
    case Method::kDisKpca: {
      DisKpcaParams run_params = params;
      run_params.n_adapt = n_adapt;
      DisKpcaResult r = dis_kpca(cluster, spec, k, eps, run_params, seed);
      rec.n_lev = resolve_n_lev(params, k);
      rec.t = r.embedding_dim;
      rec.p = params.leverage_sketch_dim;
      rec.w = r.width;
      rec.m = std::holds_alternative<PolynomialKernel>(spec) ? 0 : params.embedding.random_features;
      rec.y_size = static_cast<Index>(r.representatives.points.global_indices.size());
      rec.total_words = r.ledger.total_words();
      sol = std::move(r.solution);
      break;
    }
    case Method::kUniformDisLR: {
      BaselineResult r = baseline_uniform_dislr(cluster, spec, k, n_adapt, params.width, eps, seed,
                                                params.rank_tol);
      rec.y_size = std::min(n_adapt, cluster.total_points());
      rec.w = params.width.resolve(rec.y_size, eps);
      rec.total_words = r.ledger.total_words();
      sol = std::move(r.solution);
      break;
    }
    case Method::kUniformBatch: {
      BaselineResult r = baseline_uniform_batch(cluster, spec, k, n_adapt, seed);
      rec.y_size = std::min(n_adapt, cluster.total_points());
      rec.total_words = r.ledger.total_words();
      sol = std::move(r.solution);
      break;
    }
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.subspace_error = subspace_error(spec, data, sol);
  return rec;
}

std::vector<Index> default_sweep() { return {50, 100, 200, 400}; }

std::vector<CurvePoint> error_curve(Cluster& cluster, const KernelSpec& spec, Method method, Index k,
                                    double eps, const DisKpcaParams& params,
                                    const std::vector<Index>& sweep, int repeats,
                                    std::uint64_t seed, std::optional<double> opt_error) {
  if (repeats < 1) throw ArgumentError("error_curve: repeats must be >= 1");
  const ColumnMatrix data = cluster.gather_all();
  std::vector<CurvePoint> out;
  for (Index n_adapt : sweep) {
    CurvePoint pt;
    pt.method = method_name(method);
    pt.n_adapt = n_adapt;
    for (int r = 0; r < repeats; ++r) {
      const std::uint64_t run_seed = lane(seed, "repeat", static_cast<std::uint64_t>(r));
      pt.runs.push_back(run_method(cluster, data, spec, method, k, eps, params, n_adapt, run_seed, opt_error));
    }
    double err = 0.0;
    double words = 0.0;
    for (const auto& rec : pt.runs) {
      err += rec.subspace_error;
      words += static_cast<double>(rec.total_words);
    }
    pt.err_mean = err / repeats;
    pt.words_mean = words / repeats;
    double var = 0.0;
    for (const auto& rec : pt.runs) var += (rec.subspace_error - pt.err_mean) * (rec.subspace_error - pt.err_mean);
    pt.err_std = repeats > 1 ? std::sqrt(var / (repeats - 1)) : 0.0;
    out.push_back(std::move(pt));
  }
  return out;
}

std::string curves_to_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream os;
  os.precision(17);
  os << "method,words,err_mean,err_std\n";
  for (const auto& p : points) {
    os << p.method << ',' << p.words_mean << ',' << p.err_mean << ',' << p.err_std << '\n';
  }
  return os.str();
}

namespace {

double sq_dist(const Matrix& a, Index i, const Matrix& b, Index j) {
  return (a.col(i) - b.col(j)).squaredNorm();
}

}  // namespace

KmeansResult lloyd_kmeans(const Matrix& points, int clusters, int max_iters, std::uint64_t seed) {
  const Index n = points.cols();
  if (clusters < 1) throw ArgumentError("lloyd_kmeans: need at least one cluster");
  if (n < clusters) throw ArgumentError("lloyd_kmeans: fewer points than clusters");
  if (max_iters < 1) throw ArgumentError("lloyd_kmeans: max_iters must be >= 1");

  KmeansResult out;
  out.centers.resize(points.rows(), clusters);
  Rng rng(lane(seed, "kmeans-init"));
  out.centers.col(0) = points.col(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector nearest(n);
  for (Index j = 0; j < n; ++j) nearest(j) = sq_dist(points, j, out.centers, 0);
  for (int c = 1; c < clusters; ++c) {
    Index far = 0;
    nearest.maxCoeff(&far);
    out.centers.col(c) = points.col(far);
    for (Index j = 0; j < n; ++j) nearest(j) = std::min(nearest(j), sq_dist(points, j, out.centers, c));
  }

  out.assignments.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double total = 0.0;
    Vector own(n);
    for (Index j = 0; j < n; ++j) {
      int& a = out.assignments[static_cast<std::size_t>(j)];
      int best = a;
      double best_d = a >= 0 ? sq_dist(points, j, out.centers, a) : std::numeric_limits<double>::infinity();
      for (int c = 0; c < clusters; ++c) {
        const double d = sq_dist(points, j, out.centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (best != a) {
        a = best;
        changed = true;
      }
      own(j) = best_d;
      total += best_d;
    }
    out.history.push_back(total / static_cast<double>(n));
    out.iterations = iter + 1;
    if (!changed) break;

    Matrix sums = Matrix::Zero(points.rows(), clusters);
    std::vector<Index> counts(static_cast<std::size_t>(clusters), 0);
    for (Index j = 0; j < n; ++j) {
      const int a = out.assignments[static_cast<std::size_t>(j)];
      sums.col(a) += points.col(j);
      ++counts[static_cast<std::size_t>(a)];
    }
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    for (int c = 0; c < clusters; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        out.centers.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move its center to the point farthest from its own
      // center.
      Index far = -1;
      for (Index j = 0; j < n; ++j) {
        if (taken[static_cast<std::size_t>(j)]) continue;
        if (far < 0 || own(j) > own(far)) far = j;
      }
      taken[static_cast<std::size_t>(far)] = 1;
      out.centers.col(c) = points.col(far);
    }
  }
  return out;
}

double feature_space_objective(const Matrix& coords, const Vector& residuals,
                               const std::vector<int>& assignments, const Matrix& centers) {
  const Index n = coords.cols();
  if (residuals.size() != n || static_cast<Index>(assignments.size()) != n) {
    throw DimensionError("feature_space_objective: inconsistent sizes");
  }
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    total += sq_dist(coords, j, centers, assignments[static_cast<std::size_t>(j)]) + residuals(j);
  }
  return total / static_cast<double>(n);
}

SpectralResult spectral_cluster(Cluster& cluster, const KernelSpec& spec, Index k, double eps,
                                const DisKpcaParams& params, int kmeans_iters, std::uint64_t seed,
                                Method features) {
  if (k < 2) throw ArgumentError("spectral_cluster: k must be >= 2");
  SpectralResult out;
  const std::size_t first_round = cluster.ledger().rounds().size();
  switch (features) {
    case Method::kDisKpca:
      out.solution = dis_kpca(cluster, spec, k, eps, params, lane(seed, "kpca")).solution;
      break;
    case Method::kUniformDisLR:
      out.solution = baseline_uniform_dislr(cluster, spec, k, resolve_n_adapt(params, k, eps),
                                            params.width, eps, lane(seed, "kpca"), params.rank_tol)
                         .solution;
      break;
    case Method::kUniformBatch:
      throw ArgumentError("spectral_cluster: uniform+batch features are not distributed to workers");
  }

  // Workers hold Y and W; each forms L = QW and projects its own points.
  const double rank_tol = params.rank_tol;
  cluster.run_round(
      "cluster-project",
      [&](WorkerContext& w) {
        const auto& y = std::get<PointSet>(w.received("Y"));
        const auto& top = std::get<Matrix>(w.received("W"));
        const SpanBasis basis = build_span_basis(spec, y.columns, rank_tol);
        const KpcaSolution sol = low_rank_steps::solution_from(basis, y, top);
        const Matrix coords = sol.coeffs.transpose() * gram(spec, sol.points, w.local_data());
        const Vector residual =
            (kernel_diagonal(spec, w.local_data()) - coords.colwise().squaredNorm().transpose()).cwiseMax(0.0);
        w.send("coords", coords);
        w.send("residual-sum", residual.sum());
      },
      [&](MasterContext& m) {
        std::vector<Matrix> parts;
        double residual_total = 0.0;
        for (const Message* msg : m.messages("coords")) parts.push_back(std::get<Matrix>(msg->payload));
        for (const Message* msg : m.messages("residual-sum")) residual_total += std::get<double>(msg->payload);
        Index n = 0;
        for (const auto& p : parts) n += p.cols();
        Matrix all(parts.front().rows(), n);
        Index at = 0;
        std::vector<Index> sizes;
        for (const auto& p : parts) {
          all.middleCols(at, p.cols()) = p;
          at += p.cols();
          sizes.push_back(p.cols());
        }
        m.state().put("cluster-coords", std::move(all));
        m.state().put("cluster-sizes", std::move(sizes));
        m.state().put("cluster-residual", residual_total);
      });

  auto& ms = cluster.master_state();
  const auto& coords = ms.get<Matrix>("cluster-coords");
  const auto clusters = static_cast<int>(k);
  KmeansResult km = lloyd_kmeans(coords, clusters, kmeans_iters, lane(seed, "kmeans"));
  out.history = km.history;
  out.projected_objective = km.history.back();
  // Per-point residuals are summed at the workers; the objective needs only
  // their mean.
  out.objective = out.projected_objective +
                  ms.get<double>("cluster-residual") / static_cast<double>(coords.cols());

  out.assignments.assign(static_cast<std::size_t>(cluster.total_points()), -1);
  Index at = 0;
  for (int w = 0; w < cluster.size(); ++w) {
    for (Index g : cluster.worker_indices(w)) {
      out.assignments[static_cast<std::size_t>(g)] = km.assignments[static_cast<std::size_t>(at++)];
    }
  }
  out.ledger = cluster.ledger().since(first_round);
  return out;
}

}  // namespace diskpca
