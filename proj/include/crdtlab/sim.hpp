//  Copyright 2026 The crdtlab Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#ifndef CRDTLAB_SIM_HPP_
#define CRDTLAB_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "crdtlab/ids.hpp"
#include "crdtlab/operation.hpp"
#include "crdtlab/purelog.hpp"
#include "crdtlab/scenario.hpp"

// Deterministic discrete-event simulation. Virtual time is integer ticks; all
// randomness comes from one generator seeded by the scenario.
namespace crdtlab::sim {

using purelog::Timestamp;
using VectorClock = std::map<ReplicaId, std::uint64_t>;

/// mt19937_64 with value derivations fixed here, so that results do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return p > 0.0 && uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Causal broadcast with stability detection

/// Reliable causal broadcast among n nodes. Payloads are identified by the
/// message index returned from broadcast(). Duplicated arrivals are ignored.
class CausalBroadcast {
 public:
  explicit CausalBroadcast(std::uint32_t nodes);

  std::uint32_t nodes() const { return static_cast<std::uint32_t>(clocks_.size()); }

  /// Stamps a new message from `origin` and delivers it there immediately.
  /// Returns the message index.
  std::size_t broadcast(std::uint32_t origin);
  const Timestamp& stamp(std::size_t message) const { return stamps_[message]; }
  std::size_t message_count() const { return stamps_.size(); }

  /// Arrival of `message` at `node`. Returns false for a duplicate.
  bool arrive(std::uint32_t node, std::size_t message);
  /// Next message deliverable at `node` in causal order, if any. Among
  /// several candidates the smallest in TimestampOrder is chosen.
  std::optional<std::size_t> next_deliverable(std::uint32_t node) const;
  void deliver(std::uint32_t node, std::size_t message);

  const VectorClock& clock(std::uint32_t node) const { return clocks_[node]; }
  bool delivered(std::uint32_t node, std::size_t message) const;

 private:
  std::vector<Timestamp> stamps_;
  std::vector<VectorClock> clocks_;
  std::vector<std::set<std::size_t>> buffered_;
  std::vector<std::set<std::size_t>> seen_;
};

/// Tagged causal broadcast: stability tracking over CausalBroadcast. Node i
/// keeps, per origin j, the timestamp of the last message from j it
/// delivered (its own clock for j = i). t is stable at i once it is
/// dominated by every row.
class StabilityTracker {
 public:
  explicit StabilityTracker(std::uint32_t nodes);

  /// Records a delivery at `node` (self-deliveries included).
  void on_deliver(std::uint32_t node, const Timestamp& t, const VectorClock& node_clock);
  /// Timestamps that became stable at `node`, in TimestampOrder.
  std::vector<Timestamp> newly_stable(std::uint32_t node);
  bool is_stable(std::uint32_t node, const Timestamp& t) const;
  const purelog::TimestampSet& unstable(std::uint32_t node) const { return unstable_[node]; }

 private:
  std::vector<std::vector<VectorClock>> last_;
  std::vector<purelog::TimestampSet> unstable_;
};

// ---------------------------------------------------------------------------
// Traces

struct TraceEvent {
  enum class Kind {
    kInvoke,     // node, detail = operation
    kBroadcast,  // node, stamp
    kDeliver,    // node, peer = origin, stamp, detail = operation
    kStable,     // node, stamp
    kSend,       // node -> peer, detail = payload size
    kReceive,    // node <- peer
    kDrop,       // node -> peer
    kHold,       // node -> peer, held until reachable
    kPartition,
    kHeal,
    kFlush,
    kQuery,      // node, detail = query=result
    kAssert,     // detail
    kWarning,
  };

  Kind kind = Kind::kInvoke;
  std::uint64_t time = 0;
  std::uint32_t node = 0;
  std::uint32_t peer = 0;
  std::optional<Timestamp> stamp;
  std::string detail;
};

using Trace = std::vector<TraceEvent>;

std::string render(const TraceEvent& e);

/// Every node's delivery sequence respects happens-before and delivers each
/// message at most once: a delivery of t from o at n requires
/// t[o] = delivered[n][o] + 1 and t[k] <= delivered[n][k] for k != o.
bool causal_order_check(const Trace& trace);

/// No node delivers a message whose timestamp is concurrent with (or before)
/// one it has already reported stable.
bool stability_check(const Trace& trace);

// ---------------------------------------------------------------------------
// Runs

struct QueryRecord {
  int line = 0;
  std::uint64_t time = 0;
  Query query;
  std::vector<QueryResult> results;  // one per node
};

struct AssertRecord {
  int line = 0;
  std::uint64_t time = 0;
  std::string what;
  bool passed = false;
  std::string detail;
};

struct Metrics {
  std::uint64_t messages = 0;          // transmissions outside flush rounds
  std::uint64_t payload = 0;           // scalar leaves in those payloads
  std::uint64_t metadata = 0;          // timestamp entries on broadcasts
  std::uint64_t flush_messages = 0;    // full-state flush rounds
  std::uint64_t flush_payload = 0;
  std::uint64_t dropped = 0;
  std::uint64_t duplicated = 0;
  std::uint64_t duplicate_changes = 0;  // second copies that altered state
  std::uint64_t stable_notifications = 0;
  std::optional<std::uint64_t> convergence_tick;
  std::uint64_t end_time = 0;
  /// floor(log2(lag + 1)) -> count, lag = stable time - broadcast time.
  std::map<std::uint32_t, std::uint64_t> stability_lag;
  /// Payload leaves sent per gossip round, in order.
  std::vector<std::uint64_t> payload_series;
};

struct NodeFinal {
  std::vector<QueryResult> results;  // convergence_queries(datatype)
  std::size_t state_size = 0;
  std::string state;
  std::size_t unstable_entries = 0;  // pure: timestamped log entries
};

struct RunResult {
  Trace trace;
  std::vector<QueryRecord> queries;
  std::vector<AssertRecord> asserts;
  Metrics metrics;
  std::vector<NodeFinal> finals;
  std::vector<std::string> warnings;

  bool passed() const;
};

struct RunOptions {
  bool keep_trace = true;
};

/// Executes the scenario. Throws scenario::ParseError if it is not valid.
RunResult run(const scenario::Scenario& s, const RunOptions& options = {});

}  // namespace crdtlab::sim

#endif  // CRDTLAB_SIM_HPP_
