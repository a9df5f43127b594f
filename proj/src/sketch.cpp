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

#include "diskpca/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(Index v, const char* what) {
  if (v < 1) throw ArgumentError(std::string(what) + " must be >= 1");
}

// Columns of a t×d counter-based Gaussian matrix, generated for the rows
// of the input that are actually touched.
Matrix gaussian_columns(std::uint64_t seed, Index t, Index d, double scale) {
  Matrix g(t, d);
  for (Index c = 0; c < d; ++c) {
    for (Index r = 0; r < t; ++r) {
      g(r, c) = scale * counter_normal(seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c));
    }
  }
  return g;
}

// Ωx for every column of x with Ω(i, r) = scale·N(0, 1) from the counter
// generator. Sparse inputs only generate the columns of Ω they touch.
Matrix random_projection(std::uint64_t seed, Index m, double scale, const ColumnMatrix& x) {
  if (!x.is_sparse()) return gaussian_columns(seed, m, x.rows(), scale) * x.dense();
  const auto& s = x.sparse();
  Matrix out = Matrix::Zero(m, x.cols());
  // Only rows holding a nonzero get their column of the projection.
  std::vector<Index> rows(s.innerIndexPtr(), s.innerIndexPtr() + s.nonZeros());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  Matrix omega(m, static_cast<Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    for (Index i = 0; i < m; ++i) {
      omega(i, static_cast<Index>(c)) =
          scale * counter_normal(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(rows[c]));
    }
  }
  for (Index j = 0; j < s.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(s, j); it; ++it) {
      const auto slot = std::lower_bound(rows.begin(), rows.end(), it.row()) - rows.begin();
      out.col(j).noalias() += it.value() * omega.col(slot);
    }
  }
  return out;
}

Index stage_output(const SketchStage& stage) {
  return std::visit(Overloaded{[](const CountSketchStage& s) { return s.t; },
                               [](const GaussianStage& s) { return s.t; },
                               [](const TensorSketchStage& s) { return s.t; },
                               [](const RffStage& s) { return s.m; },
                               [](const ArcCosStage& s) { return s.m; }},
                    stage);
}

ColumnMatrix apply_stage(const SketchStage& stage, const ColumnMatrix& m) {
  return std::visit(
      Overloaded{[&](const CountSketchStage& s) { return countsketch_apply(s.t, s.seed, m); },
                 [&](const GaussianStage& s) { return gaussian_apply(s.t, s.seed, m); },
                 [&](const TensorSketchStage& s) { return tensorsketch_apply(s.q, s.t, s.seed, m); },
                 [&](const RffStage& s) { return rff_apply(s.m, s.bandwidth, s.seed, m); },
                 [&](const ArcCosStage& s) {
                   return arccos_features_apply(s.m, s.degree, s.seed, m);
                 }},
      stage);
}

}  // namespace

SketchOp::SketchOp(Index input_dim, std::vector<SketchStage> stages)
    : input_dim_(input_dim), stages_(std::move(stages)) {
  for (const auto& s : stages_) require_positive(stage_output(s), "sketch stage dimension");
}

Index SketchOp::output_dim() const {
  return stages_.empty() ? input_dim_ : stage_output(stages_.back());
}

ColumnMatrix SketchOp::apply(const ColumnMatrix& m) const {
  if (m.rows() != input_dim_) {
    throw DimensionError("SketchOp::apply: operator expects " + std::to_string(input_dim_) +
                         " rows, got " + m.shape_string());
  }
  ColumnMatrix cur = m;
  for (const auto& s : stages_) cur = apply_stage(s, cur);
  return cur;
}

std::string SketchOp::describe() const {
  std::ostringstream os;
  os << "in=" << input_dim_;
  for (const auto& s : stages_) {
    std::visit(Overloaded{[&](const CountSketchStage& c) { os << " -> countsketch(" << c.t << ")"; },
                          [&](const GaussianStage& g) { os << " -> gaussian(" << g.t << ")"; },
                          [&](const TensorSketchStage& ts) {
                            os << " -> tensorsketch(q=" << ts.q << "," << ts.t << ")";
                          },
                          [&](const RffStage& r) { os << " -> rff(" << r.m << ")"; },
                          [&](const ArcCosStage& a) {
                            os << " -> arccos-rf(" << a.m << ",deg=" << a.degree << ")";
                          }},
               s);
  }
  return os.str();
}

std::pair<Index, int> countsketch_hash(Index t, std::uint64_t seed, Index row) {
  const std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(row));
  const auto bucket = static_cast<Index>(h % static_cast<std::uint64_t>(t));
  const int sign = (mix64(h) >> 63) != 0 ? -1 : 1;
  return {bucket, sign};
}

ColumnMatrix countsketch_apply(Index t, std::uint64_t seed, const ColumnMatrix& m) {
  require_positive(t, "countsketch t");
  Matrix out = Matrix::Zero(t, m.cols());
  if (m.is_sparse()) {
    const auto& s = m.sparse();
    for (Index j = 0; j < s.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(s, j); it; ++it) {
        const auto [b, sg] = countsketch_hash(t, seed, it.row());
        out(b, j) += sg * it.value();
      }
    }
  } else {
    std::vector<std::pair<Index, int>> hashes(static_cast<std::size_t>(m.rows()));
    for (Index r = 0; r < m.rows(); ++r) hashes[static_cast<std::size_t>(r)] = countsketch_hash(t, seed, r);
    const auto& d = m.dense();
    for (Index j = 0; j < d.cols(); ++j) {
      for (Index r = 0; r < d.rows(); ++r) {
        const auto [b, sg] = hashes[static_cast<std::size_t>(r)];
        out(b, j) += sg * d(r, j);
      }
    }
  }
  return ColumnMatrix(std::move(out));
}

ColumnMatrix gaussian_apply(Index t, std::uint64_t seed, const ColumnMatrix& m) {
  require_positive(t, "gaussian t");
  return ColumnMatrix(random_projection(seed, t, 1.0 / std::sqrt(static_cast<double>(t)), m));
}

std::uint64_t tensorsketch_subseed(std::uint64_t seed, int l) {
  return lane(seed, "tensorsketch", static_cast<std::uint64_t>(l));
}

ColumnMatrix tensorsketch_apply(int q, Index t, std::uint64_t seed, const ColumnMatrix& x) {
  if (q < 1) throw ArgumentError("tensorsketch q must be >= 1");
  require_positive(t, "tensorsketch t");
  ColumnMatrix first = countsketch_apply(t, tensorsketch_subseed(seed, 0), x);
  if (q == 1) return first;

  std::vector<Matrix> parts;
  parts.push_back(first.dense());
  for (int l = 1; l < q; ++l) parts.push_back(countsketch_apply(t, tensorsketch_subseed(seed, l), x).dense());

  // Index convolution of the q sketches: cyclic convolution of length t.
  Eigen::FFT<double> fft;
  Matrix out(t, x.cols());
  std::vector<double> buf(static_cast<std::size_t>(t));
  std::vector<std::complex<double>> acc;
  std::vector<std::complex<double>> spec;
  std::vector<double> back;
  for (Index j = 0; j < x.cols(); ++j) {
    for (int l = 0; l < q; ++l) {
      for (Index r = 0; r < t; ++r) buf[static_cast<std::size_t>(r)] = parts[static_cast<std::size_t>(l)](r, j);
      fft.fwd(spec, buf);
      if (l == 0) {
        acc = spec;
      } else {
        for (std::size_t f = 0; f < acc.size(); ++f) acc[f] *= spec[f];
      }
    }
    fft.inv(back, acc);
    for (Index r = 0; r < t; ++r) out(r, j) = back[static_cast<std::size_t>(r)];
  }
  return ColumnMatrix(std::move(out));
}

ColumnMatrix rff_apply(Index m, double bandwidth, std::uint64_t seed, const ColumnMatrix& x) {
  require_positive(m, "random feature count");
  if (!(bandwidth > 0.0)) throw ArgumentError("rff bandwidth must be positive");
  const std::uint64_t omega_seed = lane(seed, "rff-omega");
  const std::uint64_t phase_seed = lane(seed, "rff-phase");
  Matrix z = random_projection(omega_seed, m, 1.0 / bandwidth, x);
  const double scale = std::sqrt(2.0 / static_cast<double>(m));
  for (Index i = 0; i < m; ++i) {
    const double b = 2.0 * std::numbers::pi * counter_uniform(phase_seed, static_cast<std::uint64_t>(i), 0);
    for (Index j = 0; j < z.cols(); ++j) z(i, j) = scale * std::cos(z(i, j) + b);
  }
  return ColumnMatrix(std::move(z));
}

ColumnMatrix arccos_features_apply(Index m, int degree, std::uint64_t seed, const ColumnMatrix& x) {
  require_positive(m, "random feature count");
  if (degree < 0 || degree > 2) throw ArgumentError("arc-cos degree must be 0, 1 or 2");
  Matrix z = random_projection(lane(seed, "arccos-omega"), m, 1.0, x);
  const double scale = std::sqrt(2.0 / static_cast<double>(m));
  for (Index j = 0; j < z.cols(); ++j) {
    for (Index i = 0; i < m; ++i) {
      const double v = z(i, j);
      double f = 0.0;
      if (v > 0.0) f = degree == 0 ? 1.0 : (degree == 1 ? v : v * v);
      z(i, j) = scale * f;
    }
  }
  return ColumnMatrix(std::move(z));
}

Matrix right_sketch(const Matrix& m, Index p, std::uint64_t seed) {
  require_positive(p, "right sketch dimension");
  if (m.cols() <= p) return m;
  // T is n×p; Tᵀ is generated as a p×n Gaussian with entries N(0, 1/p).
  const Matrix tt = gaussian_columns(seed, p, m.cols(), 1.0 / std::sqrt(static_cast<double>(p)));
  return m * tt.transpose();
}

Index default_embedding_dim(Index k, double eps) {
  return std::max<Index>(4 * k, static_cast<Index>(std::ceil(2.0 * static_cast<double>(k) / eps)));
}

SketchOp make_good_embedding(const KernelSpec& spec, Index k, double eps, Index input_dim,
                             const EmbeddingConfig& config, std::uint64_t seed,
                             std::vector<std::string>* warnings) {
  if (k < 1) throw ArgumentError("good_embedding: k must be >= 1");
  if (!(eps > 0.0) || eps > 1.0) throw ArgumentError("good_embedding: eps must be in (0, 1]");
  validate(spec);
  const Index t = config.t.value_or(default_embedding_dim(k, eps));
  const auto k_over_eps = static_cast<Index>(std::ceil(static_cast<double>(k) / eps));
  std::vector<SketchStage> stages;

  if (const auto* poly = std::get_if<PolynomialKernel>(&spec)) {
    Index pow3 = 1;
    for (int i = 0; i < poly->degree; ++i) pow3 *= 3;
    const Index t1 = config.tensor_dim.value_or(pow3 * k * k + k_over_eps);
    stages.emplace_back(TensorSketchStage{poly->degree, t1, lane(seed, "embed-tensorsketch")});
  } else {
    const Index m = config.random_features;
    require_positive(m, "random feature count");
    if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
      stages.emplace_back(RffStage{m, g->bandwidth, lane(seed, "embed-rff")});
    } else {
      stages.emplace_back(ArcCosStage{m, std::get<ArcCosKernel>(spec).degree, lane(seed, "embed-arccos")});
    }
    if (m < 4 * t && warnings != nullptr) {
      warnings->push_back("random feature count " + std::to_string(m) +
                          " is small relative to embedding dimension " + std::to_string(t) +
                          "; expect a larger additive error");
    }
    const auto cs = static_cast<Index>(
        std::ceil(config.countsketch_factor * static_cast<double>(k_over_eps * k_over_eps)));
    if (config.countsketch_stage && cs < m && cs > t) {
      stages.emplace_back(CountSketchStage{cs, lane(seed, "embed-countsketch")});
    }
  }
  stages.emplace_back(GaussianStage{t, lane(seed, "embed-gaussian")});
  return SketchOp(input_dim, std::move(stages));
}

EmbeddedData good_embedding(const KernelSpec& spec, Index k, double eps,
                            const EmbeddingConfig& config, std::uint64_t seed,
                            const ColumnMatrix& a) {
  EmbeddedData out;
  out.op = make_good_embedding(spec, k, eps, a.rows(), config, seed, &out.warnings);
  out.E = out.op.apply(a);
  out.source_count = a.cols();
  return out;
}

}  // namespace diskpca
