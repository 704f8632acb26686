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

#ifndef CRDTLAB_PURELOG_HPP_
#define CRDTLAB_PURELOG_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "crdtlab/ids.hpp"
#include "crdtlab/operation.hpp"

// Pure operation-based CRDTs. Prepare returns the operation unchanged;
// effect records (timestamp, operation) in a partially ordered log and
// prunes entries made obsolete by it; queries evaluate over the log. When
// the middleware reports a timestamp causally stable, its entry is folded
// into a datatype-specific core without the timestamp.
namespace crdtlab::purelog {

/// Vector-clock timestamp tagged with the broadcasting replica. Zero
/// entries are never stored.
struct Timestamp {
  std::map<ReplicaId, std::uint64_t> clock;
  ReplicaId origin{};

  static Timestamp make(std::map<ReplicaId, std::uint64_t> clock, ReplicaId origin);

  std::uint64_t at(ReplicaId r) const;
  /// Position of this message in its origin's broadcast sequence.
  std::uint64_t sequence() const { return at(origin); }

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Pointwise a <= b.
bool dominated(const Timestamp& a, const Timestamp& b);
/// Happens-before: a <= b pointwise and a != b.
bool before(const Timestamp& a, const Timestamp& b);
bool concurrent(const Timestamp& a, const Timestamp& b);

/// Total order used only for deterministic iteration. It extends
/// happens-before (smaller clock sum first).
struct TimestampOrder {
  bool operator()(const Timestamp& a, const Timestamp& b) const;
};

std::string render(const Timestamp& t);

using TimestampSet = std::set<Timestamp, TimestampOrder>;

struct LogEntry {
  Timestamp timestamp;
  Operation op;
};

// Condensed form of stable entries, per datatype.

struct ElementCore {
  std::set<std::string> elements;
};

struct TallyCore {
  std::int64_t tally = 0;
};

struct AuctionCore {
  struct StableBid {
    Bid bid;
    ReplicaId origin{};
    std::uint64_t sequence = 0;
    bool late = false;           // after some closing
    bool before_closed = false;  // in the past of a stable closed
    // Unstable closed operations this bid is concurrent with.
    TimestampSet concurrent_closed;
  };

  std::vector<StableBid> bids;
  bool closing_stable = false;
  bool closed_stable = false;
  // Unstable bids that are not after any stable closing.
  TimestampSet not_after_stable_closing;
};

using StableCore = std::variant<ElementCore, TallyCore, AuctionCore>;

struct POLog {
  std::map<Timestamp, Operation, TimestampOrder> timestamped;
  StableCore core;

  std::size_t leaf_count() const;
};

/// Datatype-specific rules plugged into the universal prepare/effect.
class Semantics {
 public:
  virtual ~Semantics() = default;

  virtual Datatype datatype() const = 0;
  virtual StableCore initial_core() const = 0;

  /// older is made redundant by newer.
  virtual bool obsolete(const LogEntry& older, const LogEntry& newer) const {
    (void)older;
    (void)newer;
    return false;
  }
  /// Called before pruning; may adjust the stable core.
  virtual void on_arrival(const LogEntry& entry, POLog& log) const {
    (void)entry;
    (void)log;
  }
  /// Entry has already taken full effect and need not be stored.
  virtual bool redundant(const LogEntry& entry, const POLog& log) const {
    (void)entry;
    (void)log;
    return false;
  }
  /// Folds `entry` (already removed from the timestamped part) into the core.
  virtual void stabilize(const LogEntry& entry, POLog& log) const = 0;
  virtual QueryResult eval(const Query& q, const POLog& log) const = 0;
};

/// Throws std::invalid_argument for datatypes without a pure version.
const Semantics& semantics_for(Datatype d);

/// The delivery layer handed the same timestamp twice.
class DuplicateTimestamp : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Pure prepare: the operation itself.
inline Operation prepare(const Operation& op) { return op; }

class PureReplica {
 public:
  PureReplica(ReplicaId id, Datatype d);

  ReplicaId id() const { return id_; }
  Datatype datatype() const { return semantics_->datatype(); }

  void effect(const Operation& op, const Timestamp& t);
  /// No-op for timestamps with no surviving entry.
  void stable(const Timestamp& t);
  QueryResult eval(const Query& q) const;

  const POLog& log() const { return log_; }
  std::size_t state_size() const { return log_.leaf_count(); }
  std::string render_state() const;

 private:
  ReplicaId id_;
  const Semantics* semantics_;
  POLog log_;
  std::map<ReplicaId, std::uint64_t> delivered_;
};

}  // namespace crdtlab::purelog

#endif  // CRDTLAB_PURELOG_HPP_
