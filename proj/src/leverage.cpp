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

#include <algorithm>
#include <string>

#include "diskpca/diskpca.hpp"
#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

namespace leverage_steps {

Matrix worker_sketch(const Matrix& embedded, Index p, std::uint64_t seed, int worker) {
  return right_sketch(embedded, p, lane(seed, "disls-right-sketch", static_cast<std::uint64_t>(worker)));
}

TriangularFactor master_factor(const std::vector<Matrix>& sketches) {
  if (sketches.empty()) throw ArgumentError("leverage: no sketches");
  const Index t = sketches.front().rows();
  Index cols = 0;
  for (const auto& s : sketches) {
    if (s.rows() != t) {
      throw DimensionError("leverage: embedded data disagree on row dimension (" +
                           std::to_string(s.rows()) + " vs " + std::to_string(t) + ")");
    }
    cols += s.cols();
  }
  Matrix stacked(t, cols);
  Index at = 0;
  for (const auto& s : sketches) {
    stacked.middleCols(at, s.cols()) = s;
    at += s.cols();
  }
  return qr_thin(stacked.transpose()).R;
}

Vector worker_scores(const Matrix& embedded, const TriangularFactor& z) {
  const Matrix basis = tri_solve(z, embedded, Transpose::kYes);
  return basis.colwise().squaredNorm().transpose();
}

}  // namespace leverage_steps

LeverageScores dis_leverage_scores(Cluster& cluster, const std::string& embedded_key, Index p,
                                   std::uint64_t seed) {
  const Index t = cluster.worker_state(0).get<Matrix>(embedded_key).rows();
  if (p < t) {
    throw ArgumentError("dis_leverage_scores: sketch width p = " + std::to_string(p) +
                        " is smaller than the embedding dimension t = " + std::to_string(t));
  }
  if (cluster.total_points() < t) {
    throw ArgumentError("dis_leverage_scores: need at least t = " + std::to_string(t) +
                        " points, have " + std::to_string(cluster.total_points()));
  }

  cluster.run_round(
      "disls-sketch",
      [&](WorkerContext& w) {
        const auto& e = w.state().get<Matrix>(embedded_key);
        w.send("sketch", leverage_steps::worker_sketch(e, p, seed, w.id()));
      },
      [&](MasterContext& m) {
        std::vector<Matrix> sketches;
        for (const Message* msg : m.messages("sketch")) sketches.push_back(std::get<Matrix>(msg->payload));
        TriangularFactor z = leverage_steps::master_factor(sketches);
        m.broadcast("Z", z.R);
        if (z.rank() < z.dim) {
          // Workers need the retained rows to pseudo-solve.
          m.broadcast("Z-pivots", z.pivots);
        }
        m.state().put("Z", std::move(z));
      });

  cluster.run_round(
      "disls-scores",
      [&](WorkerContext& w) {
        const auto& e = w.state().get<Matrix>(embedded_key);
        TriangularFactor z;
        z.R = std::get<Matrix>(w.received("Z"));
        z.dim = e.rows();
        if (z.R.rows() < z.dim) {
          z.pivots = std::get<std::vector<Index>>(w.received("Z-pivots"));
        } else {
          for (Index i = 0; i < z.dim; ++i) z.pivots.push_back(i);
        }
        Vector scores = leverage_steps::worker_scores(e, z);
        w.send("score-sum", scores.sum());
        w.state().put("leverage", std::move(scores));
      },
      [&](MasterContext& m) {
        std::vector<double> sums;
        for (const Message* msg : m.messages("score-sum")) sums.push_back(std::get<double>(msg->payload));
        m.state().put("leverage-sums", std::move(sums));
      });

  LeverageScores out;
  const auto& z = cluster.master_state().get<TriangularFactor>("Z");
  out.rank = z.rank();
  if (z.rank() < z.dim) {
    out.notes.push_back("leverage: stacked sketch is rank deficient (rank " +
                        std::to_string(z.rank()) + " of " + std::to_string(z.dim) +
                        "); scores pseudo-solved on the retained rows");
  }
  for (int i = 0; i < cluster.size(); ++i) {
    out.per_worker.push_back(cluster.worker_state(i).get<Vector>("leverage"));
    out.global_sum += out.per_worker.back().sum();
  }
  return out;
}

}  // namespace diskpca
