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
#include <vector>

#include "diskpca/dataset.hpp"
#include "diskpca/diskpca.hpp"
#include "diskpca/kernels.hpp"

namespace diskpca {

/// Settings shared by every CLI subcommand. Zero means "use the default
/// rule" for t, n_lev and bandwidth.
struct Config {
  std::string kernel = "gaussian";  // gaussian | polynomial | arccos
  int degree = 2;
  double bandwidth = 0.0;
  double bandwidth_factor = 0.2;
  Index k = 10;
  double eps = 0.25;
  Index t = 0;
  Index p = 250;
  std::string w = "equal";  // equal | eps | <count>
  Index m = 2000;
  Index n_lev = 0;
  Index n_adapt = 200;
  int s = 5;
  double partition_exponent = 0.0;
  std::uint64_t seed = 1;

  std::string data;  // empty: synthetic
  std::string format;  // empty: from the file extension
  std::string synthetic = "low-rank-plus-noise";
  Index n = 2000;
  Index d = 20;
  Index k_true = 10;
  double noise = 0.1;
  double separation = 10.0;
  double imbalance = 0.0;

  std::string output;  // empty: stdout
  std::string ledger;
  std::string csv;
  int repeats = 5;
  std::vector<Index> sweep = {50, 100, 200, 400};
  int kmeans_iters = 100;
  bool parallel = false;
};

/// Throws ArgumentError naming the first invalid field.
void validate(const Config& config);

struct LoadedData {
  ColumnMatrix data;
  std::vector<int> labels;
};

/// Reads config.data, or generates the configured synthetic set.
LoadedData load_data(const Config& config);

/// Median trick when bandwidth is 0.
KernelSpec make_kernel(const Config& config, const ColumnMatrix& data);
WidthRule parse_width_rule(const std::string& w);
DisKpcaParams make_params(const Config& config);
Partition make_partition(const Config& config, Index n);

}  // namespace diskpca
