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

#include "diskpca/config.hpp"

#include <charconv>

#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

void validate(const Config& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ArgumentError(what);
  };
  require(c.kernel == "gaussian" || c.kernel == "polynomial" || c.kernel == "arccos",
          "kernel must be gaussian, polynomial or arccos");
  require(c.k >= 1, "k must be >= 1");
  require(c.eps > 0.0 && c.eps <= 1.0, "eps must be in (0, 1]");
  require(c.t >= 0, "t must be >= 1 (0 for the default)");
  require(c.p >= 1, "p must be >= 1");
  require(c.m >= 1, "m must be >= 1");
  require(c.n_lev >= 0, "n_lev must be >= 1 (0 for the default)");
  require(c.n_adapt >= 1, "n_adapt must be >= 1");
  require(c.s >= 1, "s must be >= 1");
  require(c.partition_exponent >= 0.0, "partition_exponent must be >= 0");
  require(c.bandwidth >= 0.0, "bandwidth must be > 0 (0 for the median trick)");
  require(c.bandwidth_factor > 0.0, "bandwidth_factor must be > 0");
  require(c.repeats >= 1, "repeats must be >= 1");
  require(!c.sweep.empty(), "sweep must not be empty");
  for (Index v : c.sweep) require(v >= 1, "sweep entries must be >= 1");
  require(c.kmeans_iters >= 1, "kmeans_iters must be >= 1");
  parse_width_rule(c.w);
}

LoadedData load_data(const Config& c) {
  if (!c.data.empty()) {
    const DataFormat format = c.format.empty() ? format_from_path(c.data) : parse_format(c.format);
    return {load_dataset(c.data, format), {}};
  }
  SyntheticSpec spec;
  spec.kind = parse_synthetic_kind(c.synthetic);
  spec.n = c.n;
  spec.d = c.d;
  spec.k_true = c.k_true;
  spec.noise = c.noise;
  spec.separation = c.separation;
  spec.imbalance = c.imbalance;
  spec.seed = lane(c.seed, "data");
  SyntheticData gen = gen_synthetic(spec);
  return {std::move(gen.data), std::move(gen.labels)};
}

KernelSpec make_kernel(const Config& c, const ColumnMatrix& data) {
  KernelSpec spec;
  if (c.kernel == "polynomial") {
    spec = PolynomialKernel{c.degree};
  } else if (c.kernel == "arccos") {
    spec = ArcCosKernel{c.degree};
  } else {
    const double sigma =
        c.bandwidth > 0.0 ? c.bandwidth : median_bandwidth(data, c.bandwidth_factor, lane(c.seed, "bandwidth"));
    spec = GaussianKernel{sigma};
  }
  validate(spec);
  return spec;
}

WidthRule parse_width_rule(const std::string& w) {
  WidthRule rule;
  if (w == "equal") return rule;
  if (w == "eps") {
    rule.kind = WidthRule::Kind::kScaledByEps;
    return rule;
  }
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || ptr != w.data() + w.size() || v < 1) {
    throw ArgumentError("w must be 'equal', 'eps' or a positive count, got '" + w + "'");
  }
  rule.kind = WidthRule::Kind::kAbsolute;
  rule.absolute = static_cast<Index>(v);
  return rule;
}

DisKpcaParams make_params(const Config& c) {
  DisKpcaParams params;
  if (c.t > 0) params.embedding.t = c.t;
  params.embedding.random_features = c.m;
  params.leverage_sketch_dim = c.p;
  if (c.n_lev > 0) params.n_lev = c.n_lev;
  params.n_adapt = c.n_adapt;
  params.width = parse_width_rule(c.w);
  return params;
}

Partition make_partition(const Config& c, Index n) {
  return partition_powerlaw(n, c.s, c.partition_exponent, lane(c.seed, "partition"));
}

}  // namespace diskpca
