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

#include "diskpca/diskpca.hpp"

namespace diskpca {

enum class Method { kDisKpca, kUniformDisLR, kUniformBatch };

std::string method_name(Method method);
/// Accepts "diskpca", "uniform+dislr", "uniform+batch" (and the CLI
/// spellings "baseline-dislr", "baseline-batch").
Method parse_method(const std::string& name);

struct ExperimentRecord {
  std::string method;
  Index k = 0;
  double eps = 0.0;
  Index n_lev = 0;
  Index n_adapt = 0;
  Index t = 0;
  Index p = 0;
  Index w = 0;
  Index m = 0;
  Index y_size = 0;
  std::uint64_t seed = 0;
  double subspace_error = 0.0;
  std::optional<double> opt_error;
  Index total_words = 0;
  double wall_time = 0.0;  // seconds

  /// Single-line JSON object.
  std::string to_json(bool include_wall_time = true) const;
};

/// One run of `method` with n_adapt adaptive samples (uniform methods draw
/// n_adapt points), evaluated on the full data set.
ExperimentRecord run_method(Cluster& cluster, const ColumnMatrix& data, const KernelSpec& spec,
                            Method method, Index k, double eps, const DisKpcaParams& params,
                            Index n_adapt, std::uint64_t seed,
                            std::optional<double> opt_error = std::nullopt);

struct CurvePoint {
  std::string method;
  Index n_adapt = 0;
  double err_mean = 0.0;
  double err_std = 0.0;
  double words_mean = 0.0;
  std::vector<ExperimentRecord> runs;
};

/// Default sweep of adaptive sample counts.
std::vector<Index> default_sweep();

/// Mean and standard deviation of the error and word counts over `repeats`
/// seeded runs per sweep point.
std::vector<CurvePoint> error_curve(Cluster& cluster, const KernelSpec& spec, Method method, Index k,
                                    double eps, const DisKpcaParams& params,
                                    const std::vector<Index>& sweep, int repeats,
                                    std::uint64_t seed,
                                    std::optional<double> opt_error = std::nullopt);

/// Columns: method, words, err_mean, err_std.
std::string curves_to_csv(const std::vector<CurvePoint>& points);

// ---------------------------------------------------------------------------
// Spectral clustering on KPCA coordinates

struct KmeansResult {
  std::vector<int> assignments;
  Matrix centers;  // dim × clusters
  /// Mean squared distance to the assigned center after every assignment
  /// step; nonincreasing.
  std::vector<double> history;
  int iterations = 0;
};

/// Lloyd's algorithm on the columns of `points` with greedy farthest-point
/// initialization. An emptied cluster is re-seeded at the point farthest
/// from its current center.
KmeansResult lloyd_kmeans(const Matrix& points, int clusters, int max_iters, std::uint64_t seed);

/// Feature-space k-means objective: mean over points of
/// ‖proj_j − center‖² + r_j, where r_j is the residual outside the subspace.
double feature_space_objective(const Matrix& coords, const Vector& residuals,
                               const std::vector<int>& assignments, const Matrix& centers);

struct SpectralResult {
  std::vector<int> assignments;  // global column order
  double objective = 0.0;        // includes residuals
  double projected_objective = 0.0;
  std::vector<double> history;
  KpcaSolution solution;
  CommLedger ledger;
};

/// KPCA (disKPCA or uniform+disLR features), local projection on every
/// worker, coordinates gathered at the master (k words per point) and
/// Lloyd's algorithm there.
SpectralResult spectral_cluster(Cluster& cluster, const KernelSpec& spec, Index k, double eps,
                                const DisKpcaParams& params, int kmeans_iters, std::uint64_t seed,
                                Method features = Method::kDisKpca);

}  // namespace diskpca
