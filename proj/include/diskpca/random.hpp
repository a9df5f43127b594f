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
#include <span>
#include <string_view>
#include <vector>

namespace diskpca {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

/// Derives an independent seed for a named stream, optionally indexed
/// (worker id, repeat number, ...). All randomness in a run descends from a
/// single root seed through lanes.
std::uint64_t lane(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

/// Counter-based draws: a pure function of (seed, i, j).
double counter_uniform(std::uint64_t seed, std::uint64_t i, std::uint64_t j);
double counter_normal(std::uint64_t seed, std::uint64_t i, std::uint64_t j);

/// Small sequential generator (SplitMix64 stream) with portable
/// distributions, so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in (0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Index drawn proportionally to nonnegative weights. Throws when all
  /// weights are zero.
  std::size_t discrete(std::span<const double> weights);
  /// `draws` samples with replacement, returned as per-index counts.
  std::vector<std::size_t> multinomial(std::span<const double> weights, std::size_t draws);
  /// `count` distinct indices out of [0, n) in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

 private:
  std::uint64_t state_;
};

/// Cumulative-sum sampler reused for many draws from the same weights.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> weights);
  std::size_t operator()(Rng& rng) const;
  double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace diskpca
