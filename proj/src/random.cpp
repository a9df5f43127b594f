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

#include "diskpca/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "diskpca/errors.hpp"

namespace diskpca {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value + 0x632be59bd9b4e019ULL));
}

std::uint64_t lane(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  // FNV-1a over the label.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return hash_combine(hash_combine(seed, h), index);
}

namespace {

double to_open_unit(std::uint64_t bits) {
  // 53 random bits mapped to the open interval (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  return to_open_unit(hash_combine(hash_combine(seed, i), j));
}

double counter_normal(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  const std::uint64_t base = hash_combine(hash_combine(seed, i), j);
  const double u1 = to_open_unit(mix64(base));
  const double u2 = to_open_unit(mix64(base ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return to_open_unit(next()); }

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below: n must be positive");
  // Rejection sampling for an unbiased result.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

std::size_t Rng::discrete(std::span<const double> weights) {
  return DiscreteSampler(weights)(*this);
}

std::vector<std::size_t> Rng::multinomial(std::span<const double> weights, std::size_t draws) {
  std::vector<std::size_t> counts(weights.size(), 0);
  if (draws == 0) return counts;
  DiscreteSampler sampler(weights);
  for (std::size_t d = 0; d < draws; ++d) ++counts[sampler(*this)];
  return counts;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t count) {
  if (count > n) throw ArgumentError("sample_without_replacement: count exceeds population");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

DiscreteSampler::DiscreteSampler(std::span<const double> weights) {
  cumulative_.reserve(weights.size());
  double acc = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ArgumentError("DiscreteSampler: weights must be finite and nonnegative");
    }
    acc += w;
    cumulative_.push_back(acc);
  }
  if (!(acc > 0.0)) throw ArgumentError("DiscreteSampler: all weights are zero");
}

std::size_t DiscreteSampler::operator()(Rng& rng) const {
  const double target = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
  if (idx >= cumulative_.size()) idx = cumulative_.size() - 1;
  // Never land on a zero-weight entry (possible only at exact boundaries).
  while (idx > 0 && cumulative_[idx] == cumulative_[idx - 1]) --idx;
  return idx;
}

}  // namespace diskpca
