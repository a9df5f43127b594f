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
#include <numeric>
#include <set>
#include <string>

#include "diskpca/diskpca.hpp"
#include "diskpca/errors.hpp"
#include "diskpca/random.hpp"

namespace diskpca {

namespace sampling_steps {

std::vector<Index> worker_draw(std::span<const double> weights, Index count, std::uint64_t seed,
                               const char* stage, int worker) {
  std::vector<Index> out;
  if (count <= 0) return out;
  Rng rng(lane(seed, stage, static_cast<std::uint64_t>(worker)));
  DiscreteSampler sampler(weights);
  std::set<Index> seen;
  for (Index d = 0; d < count; ++d) {
    const auto j = static_cast<Index>(sampler(rng));
    if (seen.insert(j).second) out.push_back(j);
  }
  return out;
}

std::vector<Index> master_allocate(std::span<const double> worker_sums, Index draws,
                                   std::uint64_t seed, const char* stage) {
  std::vector<Index> out(worker_sums.size(), 0);
  if (draws <= 0) return out;
  Rng rng(lane(seed, stage, 0x6d6173746572ULL));
  const auto counts = rng.multinomial(worker_sums, static_cast<std::size_t>(draws));
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<Index>(counts[i]);
  return out;
}

PointSet local_points(const ColumnMatrix& data, const std::vector<Index>& global,
                      const std::vector<Index>& local) {
  PointSet ps;
  ps.columns = data.select_columns(local);
  for (Index j : local) ps.global_indices.push_back(global[static_cast<std::size_t>(j)]);
  return ps;
}

PointSet merge_points(const std::vector<PointSet>& parts, Index dim) {
  std::vector<ColumnMatrix> cols;
  std::vector<Index> global;
  for (const auto& p : parts) {
    if (p.global_indices.empty()) continue;
    cols.push_back(p.columns);
    global.insert(global.end(), p.global_indices.begin(), p.global_indices.end());
  }
  PointSet out;
  if (global.empty()) {
    out.columns = ColumnMatrix(Matrix(dim, 0));
    return out;
  }
  const ColumnMatrix stacked = ColumnMatrix::hconcat(cols);
  std::vector<Index> order(global.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return global[static_cast<std::size_t>(a)] < global[static_cast<std::size_t>(b)];
  });
  std::vector<Index> keep;
  for (Index pos : order) {
    const Index g = global[static_cast<std::size_t>(pos)];
    if (!out.global_indices.empty() && out.global_indices.back() == g) continue;
    out.global_indices.push_back(g);
    keep.push_back(pos);
  }
  out.columns = stacked.select_columns(keep);
  return out;
}

PointSet concat_points(const PointSet& a, const PointSet& b, Index dim) {
  PointSet out;
  out.global_indices = a.global_indices;
  out.global_indices.insert(out.global_indices.end(), b.global_indices.begin(), b.global_indices.end());
  std::vector<ColumnMatrix> parts;
  if (a.columns.cols() > 0) parts.push_back(a.columns);
  if (b.columns.cols() > 0) parts.push_back(b.columns);
  out.columns = parts.empty() ? ColumnMatrix(Matrix(dim, 0)) : ColumnMatrix::hconcat(parts);
  return out;
}

}  // namespace sampling_steps

namespace {

std::vector<double> collect_scalars(const MasterContext& m, const std::string& tag) {
  std::vector<double> out;
  for (const Message* msg : m.messages(tag)) out.push_back(std::get<double>(msg->payload));
  return out;
}

std::vector<PointSet> collect_points(const MasterContext& m, const std::string& tag) {
  std::vector<PointSet> out;
  for (const Message* msg : m.messages(tag)) out.push_back(std::get<PointSet>(msg->payload));
  return out;
}

Index received_count(const WorkerContext& w, const std::string& tag) {
  return static_cast<Index>(std::llround(std::get<double>(w.received(tag))));
}

}  // namespace

RepresentativeSet rep_sample(Cluster& cluster, const KernelSpec& spec, Index n_lev, Index n_adapt,
                             std::uint64_t seed, double rank_tol) {
  if (n_lev < 1 || n_adapt < 1) throw ArgumentError("rep_sample: sample counts must be >= 1");
  const Index dim = cluster.dim();
  using namespace sampling_steps;

  // Stage 1: leverage sampling. Score sums already sit at the master.
  cluster.run_round("repsample-leverage-alloc", {}, [&](MasterContext& m) {
    const auto& sums = m.state().get<std::vector<double>>("leverage-sums");
    const auto counts = master_allocate(sums, n_lev, seed, "leverage-alloc");
    for (int w = 0; w < m.num_workers(); ++w) {
      m.send(w, "leverage-count", static_cast<double>(counts[static_cast<std::size_t>(w)]));
    }
  });

  cluster.run_round(
      "repsample-leverage",
      [&](WorkerContext& w) {
        const Index count = received_count(w, "leverage-count");
        if (count == 0) return;
        const auto& scores = w.state().get<Vector>("leverage");
        const auto picked = worker_draw(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                                        count, seed, "leverage", w.id());
        w.send("P-part", local_points(w.local_data(), w.global_indices(), picked));
      },
      [&](MasterContext& m) {
        PointSet p = merge_points(collect_points(m, "P-part"), dim);
        m.broadcast("P", p);
        m.state().put("P", std::move(p));
      });

  // Stage 2: adaptive sampling on squared distances to span φ(P).
  cluster.run_round(
      "repsample-residuals",
      [&](WorkerContext& w) {
        const auto& p = std::get<PointSet>(w.received("P"));
        const SpanBasis basis = build_span_basis(spec, p.columns, rank_tol);
        Vector r = residual_sq_distances(basis, spec, w.local_data());
        const auto& global = w.global_indices();
        for (std::size_t j = 0; j < global.size(); ++j) {
          if (std::binary_search(p.global_indices.begin(), p.global_indices.end(), global[j])) {
            r(static_cast<Index>(j)) = 0.0;
          }
        }
        w.send("residual-sum", r.sum());
        w.state().put("residuals", std::move(r));
      },
      [&](MasterContext& m) {
        const auto sums = collect_scalars(m, "residual-sum");
        const double total = std::accumulate(sums.begin(), sums.end(), 0.0);
        std::vector<Index> counts(sums.size(), 0);
        if (total > 0.0) counts = master_allocate(sums, n_adapt, seed, "adaptive-alloc");
        m.state().put("adaptive-empty", !(total > 0.0));
        for (int w = 0; w < m.num_workers(); ++w) {
          m.send(w, "adaptive-count", static_cast<double>(counts[static_cast<std::size_t>(w)]));
        }
      });

  cluster.run_round(
      "repsample-adaptive",
      [&](WorkerContext& w) {
        const Index count = received_count(w, "adaptive-count");
        if (count == 0) return;
        const auto& r = w.state().get<Vector>("residuals");
        const auto picked = worker_draw(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())),
                                        count, seed, "adaptive", w.id());
        w.send("Ytilde-part", local_points(w.local_data(), w.global_indices(), picked));
      },
      [&](MasterContext& m) {
        PointSet ytilde = merge_points(collect_points(m, "Ytilde-part"), dim);
        PointSet y = concat_points(m.state().get<PointSet>("P"), ytilde, dim);
        m.broadcast("Y", y);
        m.state().put("Ytilde", std::move(ytilde));
        m.state().put("Y", std::move(y));
      });

  RepresentativeSet out;
  auto& ms = cluster.master_state();
  out.leverage_points = ms.get<PointSet>("P");
  out.adaptive_points = ms.get<PointSet>("Ytilde");
  out.points = ms.get<PointSet>("Y");
  out.leverage_draws = n_lev;
  out.adaptive_draws = ms.get<bool>("adaptive-empty") ? 0 : n_adapt;
  if (ms.get<bool>("adaptive-empty")) {
    out.notes.push_back("rep_sample: every point lies in span of P; no adaptive samples drawn");
  }
  return out;
}

}  // namespace diskpca
