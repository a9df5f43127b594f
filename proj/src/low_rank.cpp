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

#include <cmath>
#include <string>

#include "diskpca/diskpca.hpp"
#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

Index WidthRule::resolve(Index y_size, double eps) const {
  switch (kind) {
    case Kind::kAbsolute:
      if (absolute < 1) throw ArgumentError("width rule: absolute width must be >= 1");
      return absolute;
    case Kind::kScaledByEps:
      return static_cast<Index>(std::ceil(static_cast<double>(y_size) / (eps * eps)));
    case Kind::kEqualY:
    default:
      return std::max<Index>(1, y_size);
  }
}

namespace low_rank_steps {

Matrix master_top_vectors(const std::vector<Matrix>& sketches, Index k) {
  if (sketches.empty()) throw ArgumentError("low rank: no sketches");
  const Index r = sketches.front().rows();
  Index cols = 0;
  for (const auto& s : sketches) cols += s.cols();
  Matrix joined(r, cols);
  Index at = 0;
  for (const auto& s : sketches) {
    joined.middleCols(at, s.cols()) = s;
    at += s.cols();
  }
  return truncated_svd(joined, k).U;
}

KpcaSolution solution_from(const SpanBasis& basis, const PointSet& y, const Matrix& w) {
  KpcaSolution sol;
  sol.points = basis.retained_points;
  for (Index j : basis.retained) sol.global_indices.push_back(y.global_indices[static_cast<std::size_t>(j)]);
  sol.coeffs = tri_solve(basis.factor, w, Transpose::kNo);
  sol.k = w.cols();
  return sol;
}

}  // namespace low_rank_steps

LowRankResult dis_low_rank(Cluster& cluster, const KernelSpec& spec, Index k, Index w,
                           std::uint64_t seed, double rank_tol) {
  if (k < 1) throw ArgumentError("dis_low_rank: k must be >= 1");
  if (w < 1) throw ArgumentError("dis_low_rank: sketch width must be >= 1");
  LowRankResult out;
  out.width = w;

  cluster.run_round(
      "dislr-sketch",
      [&](WorkerContext& wc) {
        const auto& y = std::get<PointSet>(wc.received("Y"));
        const SpanBasis basis = build_span_basis(spec, y.columns, rank_tol);
        const Matrix pi = project_coeffs(basis, spec, wc.local_data());
        wc.send("projected", right_sketch(pi, w, lane(seed, "dislr-right-sketch", static_cast<std::uint64_t>(wc.id()))));
      },
      [&](MasterContext& m) {
        const auto& y = m.state().get<PointSet>("Y");
        const SpanBasis basis = build_span_basis(spec, y.columns, rank_tol);
        Index kk = k;
        if (basis.rank() < kk) {
          m.state().put("lr-note", std::string("dis_low_rank: span of Y has rank ") +
                                       std::to_string(basis.rank()) + " < k = " + std::to_string(k) +
                                       "; k reduced");
          kk = basis.rank();
        }
        std::vector<Matrix> sketches;
        for (const Message* msg : m.messages("projected")) sketches.push_back(std::get<Matrix>(msg->payload));
        const Matrix top = low_rank_steps::master_top_vectors(sketches, kk);
        m.broadcast("W", top);
        m.state().put("solution", low_rank_steps::solution_from(basis, y, top));
      });

  auto& ms = cluster.master_state();
  out.solution = ms.get<KpcaSolution>("solution");
  if (ms.contains("lr-note")) {
    out.notes.push_back(ms.get<std::string>("lr-note"));
    ms.erase("lr-note");
  }
  if (out.solution.k < k && out.notes.empty()) {
    out.notes.push_back("dis_low_rank: sketched projections have rank " +
                        std::to_string(out.solution.k) + " < k");
  }
  return out;
}

}  // namespace diskpca
