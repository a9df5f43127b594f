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

#include "diskpca/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "diskpca/random.hpp"

namespace diskpca {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool all_finite(const ColumnMatrix& m) {
  if (m.is_sparse()) {
    const auto& s = m.sparse();
    return std::all_of(s.valuePtr(), s.valuePtr() + s.nonZeros(),
                       [](double v) { return std::isfinite(v); });
  }
  return m.dense().allFinite();
}

bool payload_finite(const Payload& p) {
  return std::visit(Overloaded{[](double v) { return std::isfinite(v); },
                               [](const Vector& v) { return v.allFinite(); },
                               [](const Matrix& m) { return m.allFinite(); },
                               [](const std::vector<Index>&) { return true; },
                               [](const PointSet& ps) { return all_finite(ps.columns); }},
                    p);
}

void check_payload(const Payload& p, const std::string& tag) {
  if (!payload_finite(p)) {
    throw CommError("poisoned message '" + tag + "': payload contains non-finite values");
  }
}

}  // namespace

Index word_count(const Payload& payload) {
  return std::visit(
      Overloaded{[](double) -> Index { return 1; },
                 [](const Vector& v) -> Index { return v.size(); },
                 [](const Matrix& m) -> Index { return m.size(); },
                 [](const std::vector<Index>& idx) -> Index { return static_cast<Index>(idx.size()); },
                 [](const PointSet& ps) -> Index {
                   const auto& c = ps.columns;
                   const Index body = c.is_sparse() ? 2 * c.nnz() : c.rows() * c.cols();
                   return static_cast<Index>(ps.global_indices.size()) + body;
                 }},
      payload);
}

Index CommLedger::total_up() const {
  Index s = 0;
  for (const auto& r : rounds_) s += std::accumulate(r.up_words.begin(), r.up_words.end(), Index{0});
  return s;
}

Index CommLedger::total_down() const {
  Index s = 0;
  for (const auto& r : rounds_) s += std::accumulate(r.down_words.begin(), r.down_words.end(), Index{0});
  return s;
}

Index CommLedger::words_with_prefix(std::string_view prefix) const {
  Index s = 0;
  for (const auto& r : rounds_) {
    if (std::string_view(r.label).substr(0, prefix.size()) != prefix) continue;
    s += std::accumulate(r.up_words.begin(), r.up_words.end(), Index{0});
    s += std::accumulate(r.down_words.begin(), r.down_words.end(), Index{0});
  }
  return s;
}

CommLedger CommLedger::since(std::size_t first) const {
  if (first >= rounds_.size()) return CommLedger();
  return CommLedger(std::vector<RoundRecord>(rounds_.begin() + static_cast<std::ptrdiff_t>(first),
                                             rounds_.end()));
}

std::string CommLedger::to_jsonl() const {
  std::string out;
  for (const auto& r : rounds_) {
    nlohmann::ordered_json j;
    j["label"] = r.label;
    j["up_words"] = r.up_words;
    j["down_words"] = r.down_words;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Partition partition_powerlaw(Index n, int s, double exponent, std::uint64_t seed) {
  if (s < 1) throw ArgumentError("partition_powerlaw: need at least one worker");
  if (n < s) {
    throw ArgumentError("partition_powerlaw: " + std::to_string(n) + " columns cannot cover " +
                        std::to_string(s) + " workers");
  }
  std::vector<double> share(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) share[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i + 1), -exponent);
  const double total = std::accumulate(share.begin(), share.end(), 0.0);

  Partition p;
  p.sizes.resize(static_cast<std::size_t>(s));
  Index assigned = 0;
  for (int i = 0; i < s; ++i) {
    const auto size = static_cast<Index>(std::llround(static_cast<double>(n) * share[static_cast<std::size_t>(i)] / total));
    p.sizes[static_cast<std::size_t>(i)] = std::max<Index>(1, size);
    assigned += p.sizes[static_cast<std::size_t>(i)];
  }
  // Fix the rounding on the largest share; if that would push it below one
  // column, take from the next largest instead.
  Index diff = n - assigned;
  for (int i = 0; i < s && diff != 0; ++i) {
    auto& sz = p.sizes[static_cast<std::size_t>(i)];
    const Index change = diff > 0 ? diff : std::max(diff, 1 - sz);
    sz += change;
    diff -= change;
  }

  Rng rng(lane(seed, "partition"));
  const auto order = rng.sample_without_replacement(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  p.assignment.assign(static_cast<std::size_t>(n), 0);
  std::size_t at = 0;
  for (int i = 0; i < s; ++i) {
    for (Index c = 0; c < p.sizes[static_cast<std::size_t>(i)]; ++c) p.assignment[order[at++]] = i;
  }
  return p;
}

int WorkerContext::num_workers() const { return cluster_.size(); }

const ColumnMatrix& WorkerContext::local_data() const {
  return cluster_.workers_[static_cast<std::size_t>(id_)].data;
}

const std::vector<Index>& WorkerContext::global_indices() const {
  return cluster_.workers_[static_cast<std::size_t>(id_)].global_indices;
}

void WorkerContext::send(std::string tag, Payload payload) {
  check_payload(payload, tag);
  outbox_.push_back(Message{id_, std::move(tag), std::move(payload)});
}

const Payload& WorkerContext::received(const std::string& tag) const {
  const auto& inbox = cluster_.workers_[static_cast<std::size_t>(id_)].inbox;
  auto it = inbox.find(tag);
  if (it == inbox.end()) {
    throw CommError("worker " + std::to_string(id_) + " has no message '" + tag + "'");
  }
  return it->second;
}

bool WorkerContext::has_received(const std::string& tag) const {
  return cluster_.workers_[static_cast<std::size_t>(id_)].inbox.count(tag) > 0;
}

NodeState& WorkerContext::state() { return cluster_.workers_[static_cast<std::size_t>(id_)].state; }

int MasterContext::num_workers() const { return cluster_.size(); }

std::vector<const Message*> MasterContext::messages(const std::string& tag) const {
  std::vector<const Message*> out;
  for (const auto& m : inbox_) {
    if (m.tag == tag) out.push_back(&m);
  }
  return out;
}

const Payload& MasterContext::from(int worker, const std::string& tag) const {
  for (const auto& m : inbox_) {
    if (m.from == worker && m.tag == tag) return m.payload;
  }
  throw CommError("master has no message '" + tag + "' from worker " + std::to_string(worker));
}

void MasterContext::broadcast(const std::string& tag, const Payload& payload) {
  check_payload(payload, tag);
  for (int w = 0; w < cluster_.size(); ++w) outbox_.emplace_back(w, Message{-1, tag, payload});
}

void MasterContext::send(int worker, std::string tag, Payload payload) {
  if (worker < 0 || worker >= cluster_.size()) {
    throw CommError("master: no worker " + std::to_string(worker));
  }
  check_payload(payload, tag);
  outbox_.emplace_back(worker, Message{-1, std::move(tag), std::move(payload)});
}

NodeState& MasterContext::state() { return cluster_.master_state_; }

Cluster::Cluster(const ColumnMatrix& data, const Partition& partition) {
  if (static_cast<Index>(partition.assignment.size()) != data.cols()) {
    throw ArgumentError("Cluster: partition covers " + std::to_string(partition.assignment.size()) +
                        " columns, data has " + std::to_string(data.cols()));
  }
  const int s = partition.num_workers();
  if (s < 1) throw ArgumentError("Cluster: need at least one worker");
  workers_.resize(static_cast<std::size_t>(s));
  for (Index j = 0; j < data.cols(); ++j) {
    const int w = partition.assignment[static_cast<std::size_t>(j)];
    if (w < 0 || w >= s) throw ArgumentError("Cluster: invalid worker id in partition");
    workers_[static_cast<std::size_t>(w)].global_indices.push_back(j);
  }
  for (auto& w : workers_) {
    if (w.global_indices.empty()) throw ArgumentError("Cluster: a worker owns no columns");
    w.data = data.select_columns(w.global_indices);
  }
  total_points_ = data.cols();
  dim_ = data.rows();
}

void Cluster::run_round(const std::string& label, const WorkerFn& worker_fn,
                        const MasterFn& master_fn) {
  check_outside_round("run_round");
  in_round_ = true;
  const auto s = static_cast<std::size_t>(size());
  std::vector<WorkerContext> contexts;
  contexts.reserve(s);
  for (std::size_t i = 0; i < s; ++i) contexts.push_back(WorkerContext(*this, static_cast<int>(i)));
  std::vector<std::exception_ptr> errors(s);

  auto run_worker = [&](std::size_t i) {
    try {
      if (worker_fn) worker_fn(contexts[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (parallel_ && s > 1) {
    std::vector<std::thread> threads;
    threads.reserve(s);
    for (std::size_t i = 0; i < s; ++i) threads.emplace_back(run_worker, i);
    for (auto& t : threads) t.join();
  } else {
    for (std::size_t i = 0; i < s; ++i) run_worker(i);
  }
  for (std::size_t i = 0; i < s; ++i) {
    if (!errors[i]) continue;
    in_round_ = false;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw CommError("round '" + label + "' aborted: worker " + std::to_string(i) + ": " + what,
                    errors[i]);
  }

  RoundRecord record{label, std::vector<Index>(s, 0), std::vector<Index>(s, 0)};
  MasterContext master(*this);
  for (std::size_t i = 0; i < s; ++i) {
    for (auto& m : contexts[i].outbox_) {
      record.up_words[i] += word_count(m.payload);
      master.inbox_.push_back(std::move(m));
    }
  }
  if (master_fn) {
    try {
      master_fn(master);
    } catch (const std::exception& e) {
      in_round_ = false;
      throw CommError("round '" + label + "' aborted at master: " + e.what(), std::current_exception());
    }
  }
  for (auto& [w, m] : master.outbox_) {
    record.down_words[static_cast<std::size_t>(w)] += word_count(m.payload);
    workers_[static_cast<std::size_t>(w)].inbox[m.tag] = std::move(m.payload);
  }
  in_round_ = false;
  Index words = 0;
  for (std::size_t i = 0; i < s; ++i) words += record.up_words[i] + record.down_words[i];
  if (words > 0) ledger_.append(std::move(record));
}

void Cluster::check_outside_round(const char* what) const {
  if (in_round_) {
    throw CommError(std::string("Cluster::") + what +
                    " is not available while a round is running; workers may only use their own "
                    "context");
  }
}

const ColumnMatrix& Cluster::worker_data(int worker) const {
  check_outside_round("worker_data");
  return workers_.at(static_cast<std::size_t>(worker)).data;
}

const std::vector<Index>& Cluster::worker_indices(int worker) const {
  check_outside_round("worker_indices");
  return workers_.at(static_cast<std::size_t>(worker)).global_indices;
}

NodeState& Cluster::worker_state(int worker) {
  check_outside_round("worker_state");
  return workers_.at(static_cast<std::size_t>(worker)).state;
}

NodeState& Cluster::master_state() {
  check_outside_round("master_state");
  return master_state_;
}

ColumnMatrix Cluster::gather_all() const {
  check_outside_round("gather_all");
  std::vector<ColumnMatrix> parts;
  std::vector<Index> order;
  for (const auto& w : workers_) {
    parts.push_back(w.data);
    order.insert(order.end(), w.global_indices.begin(), w.global_indices.end());
  }
  const ColumnMatrix stacked = ColumnMatrix::hconcat(parts);
  std::vector<Index> inverse(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) inverse[static_cast<std::size_t>(order[pos])] = static_cast<Index>(pos);
  return stacked.select_columns(inverse);
}

}  // namespace diskpca
