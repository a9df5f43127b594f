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

#include <any>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diskpca/errors.hpp"
#include "diskpca/matrix.hpp"

namespace diskpca {

/// Data points travelling with their global column indices.
struct PointSet {
  std::vector<Index> global_indices;
  ColumnMatrix columns;
};

using Payload = std::variant<double, Vector, Matrix, std::vector<Index>, PointSet>;

/// Words needed to transmit a payload: one per scalar or index. Sparse
/// columns cost an (index, value) pair per nonzero.
Index word_count(const Payload& payload);

struct RoundRecord {
  std::string label;
  std::vector<Index> up_words;    // worker -> master, per worker
  std::vector<Index> down_words;  // master -> worker, per worker
};

class CommLedger {
 public:
  CommLedger() = default;
  explicit CommLedger(std::vector<RoundRecord> rounds) : rounds_(std::move(rounds)) {}

  void append(RoundRecord record) { rounds_.push_back(std::move(record)); }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }

  Index total_up() const;
  Index total_down() const;
  Index total_words() const { return total_up() + total_down(); }
  /// Total over rounds whose label starts with `prefix`.
  Index words_with_prefix(std::string_view prefix) const;

  /// Ledger suffix starting at round `first`.
  CommLedger since(std::size_t first) const;

  /// One JSON object per line: {"label", "up_words", "down_words"}.
  std::string to_jsonl() const;

 private:
  std::vector<RoundRecord> rounds_;
};

struct Partition {
  /// assignment[global column] = worker id
  std::vector<int> assignment;
  std::vector<Index> sizes;

  int num_workers() const { return static_cast<int>(sizes.size()); }
};

/// Worker i gets a share proportional to (i+1)^(−exponent), rounded, with
/// at least one column each and the rounding remainder on worker 0.
/// Columns are dealt out by a seeded shuffle.
Partition partition_powerlaw(Index n, int s, double exponent, std::uint64_t seed);

/// Key-value scratch space local to one node, persisting across rounds.
class NodeState {
 public:
  template <class T>
  void put(const std::string& key, T value) {
    values_[key] = std::move(value);
  }
  template <class T>
  const T& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw CommError("node state has no entry '" + key + "'");
    const T* v = std::any_cast<T>(&it->second);
    if (v == nullptr) throw CommError("node state entry '" + key + "' has another type");
    return *v;
  }
  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  void erase(const std::string& key) { values_.erase(key); }

 private:
  std::map<std::string, std::any> values_;
};

struct Message {
  int from = -1;  // -1 is the master
  std::string tag;
  Payload payload;
};

class Cluster;

/// What a worker sees during a round: its own data, messages the master
/// addressed to it, and its own scratch state.
class WorkerContext {
 public:
  int id() const { return id_; }
  int num_workers() const;
  const ColumnMatrix& local_data() const;
  const std::vector<Index>& global_indices() const;

  void send(std::string tag, Payload payload);
  /// Latest payload the master sent to this worker under `tag`.
  const Payload& received(const std::string& tag) const;
  bool has_received(const std::string& tag) const;

  NodeState& state();

 private:
  friend class Cluster;
  WorkerContext(Cluster& cluster, int id) : cluster_(cluster), id_(id) {}
  Cluster& cluster_;
  int id_;
  std::vector<Message> outbox_;
};

/// What the master sees: this round's worker messages, in worker-id order.
class MasterContext {
 public:
  int num_workers() const;
  /// Payloads sent under `tag`, one entry per sending worker, ordered by id.
  std::vector<const Message*> messages(const std::string& tag) const;
  const Payload& from(int worker, const std::string& tag) const;

  void broadcast(const std::string& tag, const Payload& payload);
  void send(int worker, std::string tag, Payload payload);

  NodeState& state();

 private:
  friend class Cluster;
  explicit MasterContext(Cluster& cluster) : cluster_(cluster) {}
  Cluster& cluster_;
  std::vector<Message> inbox_;
  std::vector<std::pair<int, Message>> outbox_;
};

/// A master and s workers, each worker owning a slice of the columns of A.
/// All communication is worker <-> master and is charged to the ledger.
class Cluster {
 public:
  Cluster(const ColumnMatrix& data, const Partition& partition);

  int size() const { return static_cast<int>(workers_.size()); }
  Index total_points() const { return total_points_; }
  Index dim() const { return dim_; }

  using WorkerFn = std::function<void(WorkerContext&)>;
  using MasterFn = std::function<void(MasterContext&)>;

  /// Runs worker_fn on every worker, then master_fn once. Messages from the
  /// workers reach the master in worker-id order; messages from the master
  /// are delivered to worker inboxes at the end of the round. A throwing
  /// worker aborts the round and nothing from it is recorded.
  void run_round(const std::string& label, const WorkerFn& worker_fn,
                 const MasterFn& master_fn = {});

  /// Workers run on separate threads when enabled. Results do not depend
  /// on this setting.
  void set_parallel(bool parallel) { parallel_ = parallel; }

  const CommLedger& ledger() const { return ledger_; }

  // Orchestrator-side access for setup and evaluation. Not available while
  // a round is running.
  const ColumnMatrix& worker_data(int worker) const;
  const std::vector<Index>& worker_indices(int worker) const;
  NodeState& worker_state(int worker);
  NodeState& master_state();
  /// Columns of A in global order.
  ColumnMatrix gather_all() const;

 private:
  friend class WorkerContext;
  friend class MasterContext;

  struct WorkerNode {
    ColumnMatrix data;
    std::vector<Index> global_indices;
    std::map<std::string, Payload> inbox;
    NodeState state;
  };

  void check_outside_round(const char* what) const;

  std::vector<WorkerNode> workers_;
  NodeState master_state_;
  CommLedger ledger_;
  Index total_points_ = 0;
  Index dim_ = 0;
  bool parallel_ = false;
  bool in_round_ = false;
};

}  // namespace diskpca
