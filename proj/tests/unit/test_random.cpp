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

#include <algorithm>
#include <cmath>
#include <set>

#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

using namespace diskpca;

TEST_SUITE("random") {

TEST_CASE("lanes separate labels and indices") {
  CHECK(lane(1, "a") != lane(1, "b"));
  CHECK(lane(1, "a", 0) != lane(1, "a", 1));
  CHECK(lane(1, "a") != lane(2, "a"));
  CHECK(lane(5, "embed", 3) == lane(5, "embed", 3));
}

TEST_CASE("counter draws are pure functions of their coordinates") {
  CHECK(counter_uniform(3, 4, 5) == counter_uniform(3, 4, 5));
  CHECK(counter_normal(3, 4, 5) == counter_normal(3, 4, 5));
  CHECK(counter_uniform(3, 4, 5) != counter_uniform(3, 5, 4));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = counter_uniform(9, i, 0);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have unit variance") {
  Rng rng(11);
  double sum = 0.0;
  double sq = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    const double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / kDraws) < 0.01);
  CHECK(sq / kDraws == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("below stays in range and hits every value") {
  Rng rng(2);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("multinomial counts sum to the draw count and follow weights") {
  Rng rng(4);
  const std::vector<double> w = {1.0, 0.0, 3.0};
  const auto counts = rng.multinomial(w, 40000);
  CHECK(counts[0] + counts[1] + counts[2] == 40000);
  CHECK(counts[1] == 0);
  CHECK(static_cast<double>(counts[2]) / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("sampling without replacement gives distinct indices") {
  Rng rng(5);
  const auto s = rng.sample_without_replacement(50, 20);
  CHECK(s.size() == 20);
  CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 20);
  for (auto v : s) CHECK(v < 50);
  const auto all = rng.sample_without_replacement(10, 10);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 10);
}

TEST_CASE("discrete sampler rejects bad weights") {
  CHECK_THROWS_AS(DiscreteSampler(std::vector<double>{0.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(DiscreteSampler(std::vector<double>{1.0, -1.0}), ArgumentError);
  const std::vector<double> w = {0.0, 2.0, 0.0};
  DiscreteSampler sampler(w);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(sampler(rng) == 1);
}

}  // TEST_SUITE
