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
#include <utility>
#include <variant>
#include <vector>

#include "diskpca/kernels.hpp"
#include "diskpca/matrix.hpp"

namespace diskpca {

struct CountSketchStage {
  Index t = 1;
  std::uint64_t seed = 0;
};

/// Dense i.i.d. N(0, 1/t) projection.
struct GaussianStage {
  Index t = 1;
  std::uint64_t seed = 0;
};

struct TensorSketchStage {
  int q = 1;
  Index t = 1;
  std::uint64_t seed = 0;
};

/// Random Fourier features for the Gaussian kernel with the given bandwidth.
struct RffStage {
  Index m = 1;
  double bandwidth = 1.0;
  std::uint64_t seed = 0;
};

/// Random features for the arc-cosine kernel.
struct ArcCosStage {
  Index m = 1;
  int degree = 1;
  std::uint64_t seed = 0;
};

using SketchStage =
    std::variant<CountSketchStage, GaussianStage, TensorSketchStage, RffStage, ArcCosStage>;

/// A seeded linear (or random-feature) map applied stage by stage, left to
/// right. Equal stages and seeds give bit-identical output.
class SketchOp {
 public:
  SketchOp() = default;
  SketchOp(Index input_dim, std::vector<SketchStage> stages);

  Index input_dim() const { return input_dim_; }
  Index output_dim() const;
  const std::vector<SketchStage>& stages() const { return stages_; }

  ColumnMatrix apply(const ColumnMatrix& m) const;
  std::string describe() const;

 private:
  Index input_dim_ = 0;
  std::vector<SketchStage> stages_;
};

// Individual stages. All return dense output.

/// Row hash of the implicit t×d CountSketch: (bucket, sign).
std::pair<Index, int> countsketch_hash(Index t, std::uint64_t seed, Index row);
ColumnMatrix countsketch_apply(Index t, std::uint64_t seed, const ColumnMatrix& m);
ColumnMatrix gaussian_apply(Index t, std::uint64_t seed, const ColumnMatrix& m);
/// Seed of the l-th CountSketch inside a TensorSketch.
std::uint64_t tensorsketch_subseed(std::uint64_t seed, int l);
ColumnMatrix tensorsketch_apply(int q, Index t, std::uint64_t seed, const ColumnMatrix& x);
ColumnMatrix rff_apply(Index m, double bandwidth, std::uint64_t seed, const ColumnMatrix& x);
ColumnMatrix arccos_features_apply(Index m, int degree, std::uint64_t seed, const ColumnMatrix& x);

/// M·T with T an n×p Gaussian sketch (entries N(0, 1/p)). When n ≤ p the
/// sketch would not compress, and M is returned unchanged.
Matrix right_sketch(const Matrix& m, Index p, std::uint64_t seed);

/// Constants of the good-embedding constructions. Unset fields take the
/// documented defaults.
struct EmbeddingConfig {
  /// Final embedding dimension; default max(4k, ⌈2k/ε⌉).
  std::optional<Index> t;
  /// TensorSketch dimension for polynomial kernels; default 3^q·k² + ⌈k/ε⌉.
  std::optional<Index> tensor_dim;
  /// Random features for shift-invariant and arc-cos kernels.
  Index random_features = 2000;
  /// Size multiplier of the optional CountSketch stage, ⌈c·(k/ε)²⌉. The
  /// stage is used only when it is smaller than the feature count.
  double countsketch_factor = 1.0;
  bool countsketch_stage = true;
};

Index default_embedding_dim(Index k, double eps);

struct EmbeddedData {
  ColumnMatrix E;
  SketchOp op;
  Index source_count = 0;
  std::vector<std::string> warnings;
};

/// Builds the embedding S for the kernel: TensorSketch then Gaussian for
/// polynomial kernels; random features, an optional CountSketch and a
/// Gaussian for the others.
SketchOp make_good_embedding(const KernelSpec& spec, Index k, double eps, Index input_dim,
                             const EmbeddingConfig& config, std::uint64_t seed,
                             std::vector<std::string>* warnings = nullptr);

EmbeddedData good_embedding(const KernelSpec& spec, Index k, double eps,
                            const EmbeddingConfig& config, std::uint64_t seed,
                            const ColumnMatrix& a);

}  // namespace diskpca
