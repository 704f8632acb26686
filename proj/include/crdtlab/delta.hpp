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

#ifndef CRDTLAB_DELTA_HPP_
#define CRDTLAB_DELTA_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crdtlab/ids.hpp"
#include "crdtlab/operation.hpp"
#include "crdtlab/statebased.hpp"

// Delta-state CRDTs: mutators return small deltas that are buffered and
// shipped by periodic anti-entropy instead of the full state.
namespace crdtlab::delta {

using statebased::CrdtState;

/// Smallest delta reaching m(x): the difference between m(x) and x.
CrdtState optimal_delta(Datatype d, ReplicaId i, const Operation& op, const CrdtState& x);

enum class Mode {
  kNaive,     // buffer everything received, send the buffer to every neighbor
  kImproved,  // buffer only new information, never send it back to its origin
};

struct DeltaGroup {
  CrdtState value;
  ReplicaId origin{};
};

struct Outgoing {
  ReplicaId to{};
  DeltaGroup group;
  bool full_state = false;
};

class DeltaReplica {
 public:
  /// full_state_every = k > 0 sends the whole state instead of the buffer on
  /// every k-th tick.
  DeltaReplica(ReplicaId id, Datatype d, std::vector<ReplicaId> neighbors, Mode mode,
               std::uint64_t full_state_every = 0);

  ReplicaId id() const { return id_; }
  Datatype datatype() const { return def_->datatype(); }
  Mode mode() const { return mode_; }
  const std::vector<ReplicaId>& neighbors() const { return neighbors_; }

  /// Applies the delta mutator; returns the delta.
  CrdtState mutate(const Operation& op);
  void receive(const DeltaGroup& g);
  /// One anti-entropy round. Bottom payloads are not sent.
  std::vector<Outgoing> tick();
  /// Full state to every neighbor; the buffer is left alone.
  std::vector<Outgoing> full_state_round() const;

  QueryResult query(const Query& q) const { return def_->query(q, x_); }
  const CrdtState& state() const { return x_; }
  /// Join of everything currently buffered.
  CrdtState buffer() const;
  std::size_t state_size() const { return statebased::leaf_count(x_); }

  /// Set when the datatype could not support improved mode.
  const std::optional<std::string>& warning() const { return warning_; }

 private:
  void fall_back(const std::string& why);

  ReplicaId id_;
  const statebased::StateDatatype* def_;
  std::vector<ReplicaId> neighbors_;
  Mode mode_;
  std::uint64_t full_state_every_;
  std::uint64_t ticks_ = 0;

  CrdtState x_;
  CrdtState d_;  // naive buffer
  std::vector<std::pair<ReplicaId, CrdtState>> fragments_;  // improved buffer
  std::optional<std::string> warning_;
};

}  // namespace crdtlab::delta

#endif  // CRDTLAB_DELTA_HPP_
