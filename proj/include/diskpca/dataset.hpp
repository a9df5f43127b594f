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
#include <string>
#include <string_view>
#include <vector>

#include "diskpca/matrix.hpp"

namespace diskpca {

/// sparse: one point per line, "idx:val" pairs with 1-based indices and an
/// optional leading label token. dense-csv: one point per line, comma
/// separated. Lines starting with '#' are comments; "# dim=N" fixes the
/// dimension of a sparse file.
enum class DataFormat { kSparse, kDenseCsv };

DataFormat parse_format(const std::string& name);
/// ".csv" means dense-csv, anything else sparse.
DataFormat format_from_path(const std::string& path);

ColumnMatrix parse_dataset(std::string_view text, DataFormat format);
ColumnMatrix load_dataset(const std::string& path, DataFormat format);

/// Shortest round-trip decimal form, so write then load is bit-identical.
std::string format_dataset(const ColumnMatrix& data, DataFormat format);
void write_dataset(const std::string& path, const ColumnMatrix& data, DataFormat format);

enum class SyntheticKind { kLowRankPlusNoise, kClustered };

SyntheticKind parse_synthetic_kind(const std::string& name);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kLowRankPlusNoise;
  Index n = 1000;
  Index d = 20;
  Index k_true = 5;
  double noise = 0.1;
  /// Clustered: blob centers are separation·N(0, I/d); points add noise·N(0, I).
  double separation = 10.0;
  /// Clustered: blob j gets weight (j+1)^-imbalance.
  double imbalance = 0.0;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  ColumnMatrix data;
  /// Blob of every column (clustered), empty otherwise.
  std::vector<int> labels;
};

/// low-rank-plus-noise: A = B·C + noise·G with B (d×k_true), C (k_true×n)
/// and G standard Gaussian. clustered: k_true Gaussian blobs.
SyntheticData gen_synthetic(const SyntheticSpec& spec);

}  // namespace diskpca
