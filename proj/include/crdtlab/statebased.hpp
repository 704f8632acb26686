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

#ifndef CRDTLAB_STATEBASED_HPP_
#define CRDTLAB_STATEBASED_HPP_

#include <cstddef>
#include <string>
#include <variant>

#include "crdtlab/causal.hpp"
#include "crdtlab/ids.hpp"
#include "crdtlab/lattice.hpp"
#include "crdtlab/operation.hpp"

// State-based CRDTs. Replicas mutate locally with inflations and merge whole
// states with the lattice join, so they tolerate loss, duplication and
// reordering of messages.
namespace crdtlab::statebased {

/// Either a plain lattice value or a causal (dot store, context) pair.
using CrdtState = std::variant<lattice::Value, causal::CausalState>;

CrdtState join(const CrdtState& a, const CrdtState& b);
bool leq(const CrdtState& a, const CrdtState& b);
/// Join of the irreducibles of a not below b.
CrdtState difference(const CrdtState& a, const CrdtState& b);
bool is_bottom(const CrdtState& s);
std::size_t leaf_count(const CrdtState& s);
std::string render(const CrdtState& s);

/// Datatype definition: bottom state, full mutators, handwritten delta
/// mutators and queries. Stateless; one shared instance per datatype.
class StateDatatype {
 public:
  virtual ~StateDatatype() = default;

  virtual Datatype datatype() const = 0;
  virtual CrdtState bottom() const = 0;
  /// m_i(op, x). Always an inflation of x.
  virtual CrdtState mutate(ReplicaId i, const Operation& op, const CrdtState& x) const = 0;
  /// m_i^delta(op, x), with join(x, delta) == mutate(i, op, x).
  virtual CrdtState delta_mutate(ReplicaId i, const Operation& op,
                                 const CrdtState& x) const = 0;
  virtual QueryResult query(const Query& q, const CrdtState& x) const = 0;
};

/// Throws std::invalid_argument for datatypes without a state-based version.
const StateDatatype& state_datatype(Datatype d);

class StateReplica {
 public:
  StateReplica(ReplicaId id, Datatype d);

  ReplicaId id() const { return id_; }
  Datatype datatype() const { return def_->datatype(); }

  void mutate(const Operation& op);
  void merge(const CrdtState& received);
  QueryResult query(const Query& q) const;

  const CrdtState& state() const { return state_; }
  std::size_t state_size() const { return leaf_count(state_); }

 private:
  ReplicaId id_;
  const StateDatatype* def_;
  CrdtState state_;
};

}  // namespace crdtlab::statebased

#endif  // CRDTLAB_STATEBASED_HPP_
