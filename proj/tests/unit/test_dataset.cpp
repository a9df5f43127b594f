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

#include <filesystem>

#include "diskpca/config.hpp"
#include "diskpca/dataset.hpp"
#include "diskpca/errors.hpp"
#include "test_util.hpp"

using namespace diskpca;
using diskpca::testing::random_matrix;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("sparse text: shape, labels, comments") {
  const ColumnMatrix a = parse_dataset("1:1.0 3:2.0\n2:1.0\n", DataFormat::kSparse);
  CHECK(a.is_sparse());
  CHECK(a.cols() == 2);
  CHECK(a.rows() == 3);
  CHECK(a.nnz() == 3);
  CHECK(a.column(0) == Vector{{1.0, 0.0, 2.0}});

  const ColumnMatrix b = parse_dataset("# dim=5\n+1 2:0.5\n\n# note\n-1\n", DataFormat::kSparse);
  CHECK(b.rows() == 5);
  CHECK(b.cols() == 2);
  CHECK(b.column(1).isZero());
}

TEST_CASE("sparse text: malformed input names the line") {
  CHECK_THROWS_AS(parse_dataset("", DataFormat::kSparse), DataError);
  CHECK_THROWS_AS(parse_dataset("# only a comment\n", DataFormat::kSparse), DataError);
  CHECK(error_of([] { parse_dataset("1:1\n2:x\n", DataFormat::kSparse); }).find("line 2") != std::string::npos);
  CHECK(error_of([] { parse_dataset("0:1\n", DataFormat::kSparse); }).find("line 1") != std::string::npos);
  // The header is a lower bound on the dimension.
  CHECK(parse_dataset("# dim=2\n3:1\n", DataFormat::kSparse).rows() == 3);
}

TEST_CASE("dense csv") {
  const ColumnMatrix a = parse_dataset("1,2,3\n4,5,6\n", DataFormat::kDenseCsv);
  CHECK(!a.is_sparse());
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 2);
  CHECK(a.column(1) == Vector{{4.0, 5.0, 6.0}});
  CHECK(error_of([] { parse_dataset("1,2,3\n4,5\n", DataFormat::kDenseCsv); }).find("line 2") != std::string::npos);
  CHECK_THROWS_AS(parse_dataset("\n", DataFormat::kDenseCsv), DataError);
}

TEST_CASE("formats by name and extension") {
  CHECK(format_from_path("x/data.csv") == DataFormat::kDenseCsv);
  CHECK(format_from_path("x/data.svm") == DataFormat::kSparse);
  CHECK(parse_format("csv") == DataFormat::kDenseCsv);
  CHECK_THROWS_AS(parse_format("parquet"), ArgumentError);
}

TEST_CASE("write then read is bit-identical") {
  Matrix dense = random_matrix(4, 9, 1);
  dense(2, 3) = 1e-300;
  dense(0, 0) = -0.1;
  const ColumnMatrix d(dense);
  CHECK(parse_dataset(format_dataset(d, DataFormat::kDenseCsv), DataFormat::kDenseCsv).identical(d));

  const ColumnMatrix s = ColumnMatrix::from_sparse_columns(
      7, {{{0, 0.1}, {6, 1.0 / 3.0}}, {}, {{3, -2.5e-17}}});
  const ColumnMatrix back = parse_dataset(format_dataset(s, DataFormat::kSparse), DataFormat::kSparse);
  CHECK(back.is_sparse());
  CHECK(back.identical(s));

  const auto path = std::filesystem::temp_directory_path() / "diskpca_roundtrip.svm";
  write_dataset(path.string(), s, DataFormat::kSparse);
  CHECK(load_dataset(path.string(), DataFormat::kSparse).identical(s));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_dataset("/nonexistent/diskpca.svm", DataFormat::kSparse), DataError);
}

TEST_CASE("synthetic: noiseless low-rank data has exactly k_true singular values") {
  SyntheticSpec gs;
  gs.n = 200;
  gs.d = 12;
  gs.k_true = 4;
  gs.noise = 0.0;
  gs.seed = 2;
  const Matrix a = gen_synthetic(gs).data.to_dense();
  const Vector sv = Eigen::BDCSVD<Matrix>(a).singularValues();
  CHECK(sv(3) > 1e-3 * sv(0));
  CHECK(sv(4) < 1e-12 * sv(0));
  CHECK(gen_synthetic(gs).data.identical(gen_synthetic(gs).data));
  gs.seed = 3;
  CHECK(!gen_synthetic(gs).data.identical(ColumnMatrix(a)));
  gs.k_true = 13;
  CHECK_THROWS_AS(gen_synthetic(gs), ArgumentError);
}

TEST_CASE("synthetic: clustered blobs are contiguous and imbalanced") {
  SyntheticSpec gs;
  gs.kind = SyntheticKind::kClustered;
  gs.n = 500;
  gs.d = 6;
  gs.k_true = 5;
  gs.imbalance = 2.0;
  gs.seed = 4;
  const SyntheticData data = gen_synthetic(gs);
  REQUIRE(data.labels.size() == 500);
  std::vector<int> sizes(5, 0);
  for (std::size_t j = 0; j < 500; ++j) {
    ++sizes[static_cast<std::size_t>(data.labels[j])];
    if (j > 0) CHECK(data.labels[j] >= data.labels[j - 1]);
  }
  for (int s : sizes) CHECK(s >= 1);
  CHECK(sizes[0] > sizes[4]);
  CHECK(parse_synthetic_kind("clustered") == SyntheticKind::kClustered);
}

TEST_CASE("sparse data stays sparse on the workers") {
  const ColumnMatrix a = parse_dataset("1:1 9:2\n2:1\n3:4\n4:1 5:1\n", DataFormat::kSparse);
  Cluster c(a, partition_powerlaw(4, 2, 0.0, 5));
  for (int w = 0; w < 2; ++w) CHECK(c.worker_data(w).is_sparse());
}

}  // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("defaults validate; each bad field is rejected") {
  Config c;
  CHECK_NOTHROW(validate(c));
  auto rejects = [](auto mutate) {
    Config bad;
    mutate(bad);
    CHECK_THROWS_AS(validate(bad), ArgumentError);
  };
  rejects([](Config& x) { x.kernel = "laplace"; });
  rejects([](Config& x) { x.k = 0; });
  rejects([](Config& x) { x.eps = 0.0; });
  rejects([](Config& x) { x.eps = 1.5; });
  rejects([](Config& x) { x.n_adapt = 0; });
  rejects([](Config& x) { x.s = 0; });
  rejects([](Config& x) { x.sweep.clear(); });
  rejects([](Config& x) { x.w = "wide"; });
}

TEST_CASE("width rule parsing") {
  CHECK(parse_width_rule("equal").kind == WidthRule::Kind::kEqualY);
  CHECK(parse_width_rule("eps").kind == WidthRule::Kind::kScaledByEps);
  const WidthRule w = parse_width_rule("37");
  CHECK(w.kind == WidthRule::Kind::kAbsolute);
  CHECK(w.absolute == 37);
  CHECK_THROWS_AS(parse_width_rule("0"), ArgumentError);
  CHECK_THROWS_AS(parse_width_rule("12x"), ArgumentError);
}

TEST_CASE("kernels, params and data from a config") {
  Config c;
  c.n = 100;
  c.d = 5;
  c.k_true = 3;
  const LoadedData data = load_data(c);
  CHECK(data.data.cols() == 100);
  CHECK(load_data(c).data.identical(data.data));
  c.bandwidth = 2.5;
  CHECK(std::get<GaussianKernel>(make_kernel(c, data.data)).bandwidth == 2.5);
  c.bandwidth = 0.0;
  CHECK(std::get<GaussianKernel>(make_kernel(c, data.data)).bandwidth > 0.0);
  c.kernel = "polynomial";
  c.degree = 3;
  CHECK(std::get<PolynomialKernel>(make_kernel(c, data.data)).degree == 3);
  c.n_lev = 0;
  c.n_adapt = 17;
  c.w = "eps";
  const DisKpcaParams p = make_params(c);
  CHECK(!p.n_lev.has_value());
  CHECK(p.n_adapt == 17);
  CHECK(p.width.kind == WidthRule::Kind::kScaledByEps);
  CHECK(make_partition(c, 100).sizes.size() == 5);
}

}  // TEST_SUITE
