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

#include <doctest.h>

#include <set>

#include "diskpca/dataset.hpp"
#include "diskpca/errors.hpp"
#include "diskpca/eval.hpp"
#include "diskpca/random.hpp"
#include "test_util.hpp"

using namespace diskpca;
using diskpca::testing::random_matrix;

namespace {

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("method names round-trip") {
  for (Method m : {Method::kDisKpca, Method::kUniformDisLR, Method::kUniformBatch}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK(parse_method("kpca") == Method::kDisKpca);
  CHECK(parse_method("baseline-dislr") == Method::kUniformDisLR);
  CHECK(parse_method("baseline-batch") == Method::kUniformBatch);
  CHECK_THROWS_AS(parse_method("pca"), ArgumentError);
}

TEST_CASE("run_method: records match the ledger and reproduce exactly") {
  const ColumnMatrix a(random_matrix(4, 300, 1));
  const KernelSpec spec = GaussianKernel{2.0};
  Cluster c(a, partition_powerlaw(300, 3, 2.0, 2));
  DisKpcaParams params;
  for (Method m : {Method::kDisKpca, Method::kUniformDisLR, Method::kUniformBatch}) {
    const std::size_t before = c.ledger().rounds().size();
    const ExperimentRecord r1 = run_method(c, a, spec, m, 3, 0.5, params, 20, 3, 1.25);
    CHECK(r1.total_words == c.ledger().since(before).total_words());
    CHECK(r1.subspace_error >= 0.0);
    CHECK(r1.n_adapt == 20);
    const ExperimentRecord r2 = run_method(c, a, spec, m, 3, 0.5, params, 20, 3, 1.25);
    CHECK(r1.total_words == r2.total_words);
    CHECK(r1.to_json(false) == r2.to_json(false));
    CHECK(r1.to_json(false).find("\"opt_error\":1.25") != std::string::npos);
  }
  const ExperimentRecord no_opt = run_method(c, a, spec, Method::kUniformBatch, 3, 0.5, params, 20, 3);
  CHECK(no_opt.to_json().find("\"opt_error\":null") != std::string::npos);
  CHECK(no_opt.to_json(false).find("wall_time") == std::string::npos);
}

TEST_CASE("error_curve: one repeat has zero spread, words are exact") {
  const ColumnMatrix a(random_matrix(4, 200, 4));
  const KernelSpec spec = GaussianKernel{2.0};
  Cluster c(a, partition_powerlaw(200, 2, 1.0, 5));
  DisKpcaParams params;
  const auto single = error_curve(c, spec, Method::kDisKpca, 3, 0.5, params, {15}, 1, 6);
  REQUIRE(single.size() == 1);
  CHECK(single[0].err_std == 0.0);
  CHECK(single[0].runs.size() == 1);
  CHECK(single[0].err_mean == single[0].runs[0].subspace_error);
  CHECK(single[0].words_mean == static_cast<double>(single[0].runs[0].total_words));

  const auto curve = error_curve(c, spec, Method::kUniformDisLR, 3, 0.5, params, {10, 20, 40}, 3, 7);
  REQUIRE(curve.size() == 3);
  for (const CurvePoint& p : curve) {
    REQUIRE(p.runs.size() == 3);
    double mean = 0.0;
    for (const auto& r : p.runs) mean += r.subspace_error / 3.0;
    double var = 0.0;
    for (const auto& r : p.runs) var += (r.subspace_error - mean) * (r.subspace_error - mean) / 2.0;
    CHECK(p.err_mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(p.err_std == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  }
  const auto again = error_curve(c, spec, Method::kUniformDisLR, 3, 0.5, params, {10, 20, 40}, 3, 7);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].words_mean == again[i].words_mean);
    CHECK(curve[i].err_mean == again[i].err_mean);
  }
  CHECK(default_sweep() == std::vector<Index>{50, 100, 200, 400});
}

TEST_CASE("curves_to_csv header and rows") {
  CurvePoint p;
  p.method = "diskpca";
  p.words_mean = 1200;
  p.err_mean = 0.5;
  p.err_std = 0.25;
  const std::string csv = curves_to_csv({p});
  CHECK(csv.rfind("method,words,err_mean,err_std\n", 0) == 0);
  CHECK(csv.find("diskpca,1200,0.5,0.25") != std::string::npos);
}

TEST_CASE("lloyd: separated groups, monotone history") {
  Matrix pts(2, 60);
  const Matrix noise = 0.1 * random_matrix(2, 60, 8);
  for (Index j = 0; j < 60; ++j) pts.col(j) = Vector::Constant(2, 10.0 * static_cast<double>(j % 3)) + noise.col(j);
  const KmeansResult r = lloyd_kmeans(pts, 3, 100, 9);
  CHECK(nonincreasing(r.history));
  for (Index j = 3; j < 60; ++j) CHECK(r.assignments[static_cast<std::size_t>(j)] == r.assignments[static_cast<std::size_t>(j % 3)]);
  CHECK(std::set<int>(r.assignments.begin(), r.assignments.end()).size() == 3);

  const Matrix cloud = random_matrix(3, 300, 10);
  for (int s = 0; s < 20; ++s) {
    CHECK(nonincreasing(lloyd_kmeans(cloud, 7, 100, lane(11, "lloyd", s)).history));
  }
}

TEST_CASE("lloyd: more clusters than distinct points") {
  Matrix pts(1, 6);
  pts << 0.0, 0.0, 0.0, 5.0, 5.0, 5.0;
  const KmeansResult r = lloyd_kmeans(pts, 3, 50, 12);
  CHECK(r.assignments.size() == 6);
  for (int a : r.assignments) CHECK((a >= 0 && a < 3));
  REQUIRE(!r.history.empty());
  CHECK(r.history.back() == 0.0);
  CHECK_THROWS_AS(lloyd_kmeans(pts, 7, 50, 12), ArgumentError);
}

TEST_CASE("feature-space objective with one cluster") {
  const Matrix coords = random_matrix(3, 10, 13);
  Vector residuals(10);
  for (Index j = 0; j < 10; ++j) residuals(j) = 0.1 * static_cast<double>(j);
  const Matrix center = coords.rowwise().mean();
  const double expected = (coords.colwise() - center.col(0)).squaredNorm() / 10.0 + residuals.mean();
  CHECK(feature_space_objective(coords, residuals, std::vector<int>(10, 0), center) ==
        doctest::Approx(expected).epsilon(1e-12));
  const KmeansResult one = lloyd_kmeans(coords, 1, 10, 14);
  CHECK(one.centers.col(0).isApprox(center.col(0), 1e-12));
}

TEST_CASE("spectral_cluster: labels in global order, charged ledger") {
  SyntheticSpec gs;
  gs.kind = SyntheticKind::kClustered;
  gs.n = 120;
  gs.d = 4;
  gs.k_true = 3;
  gs.noise = 0.05;
  gs.separation = 20.0;
  gs.seed = 15;
  const SyntheticData data = gen_synthetic(gs);
  const KernelSpec spec = GaussianKernel{median_bandwidth(data.data, 1.0, 16)};
  Cluster c(data.data, partition_powerlaw(120, 3, 2.0, 17));
  DisKpcaParams params;
  params.n_adapt = 15;
  const SpectralResult r = spectral_cluster(c, spec, 3, 0.25, params, 100, 18);
  REQUIRE(r.assignments.size() == 120);
  std::set<std::pair<int, int>> pairs;
  for (std::size_t j = 0; j < 120; ++j) pairs.insert({data.labels[j], r.assignments[j]});
  CHECK(pairs.size() == 3);
  CHECK(nonincreasing(r.history));
  CHECK(r.objective >= r.projected_objective);
  CHECK(r.ledger.words_with_prefix("cluster") >= 3 * 120);
  CHECK_THROWS_AS(spectral_cluster(c, spec, 1, 0.25, params, 100, 18), ArgumentError);
  CHECK_THROWS(spectral_cluster(c, spec, 3, 0.25, params, 100, 18, Method::kUniformBatch));
}

}  // TEST_SUITE
