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

#ifndef CRDTLAB_OPBASED_HPP_
#define CRDTLAB_OPBASED_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>

#include "crdtlab/ids.hpp"
#include "crdtlab/operation.hpp"

// Operation-based CRDTs. An update runs prepare at the origin, which builds
// a self-contained message; effect applies that message at every replica,
// the origin included (immediately). Delivery is exactly-once and causal.
namespace crdtlab::opbased {

struct CounterUpdate {
  OpKind kind = OpKind::kInc;  // inc or dec
  friend bool operator==(const CounterUpdate&, const CounterUpdate&) = default;
};

struct GSetAdd {
  std::string element;
  friend bool operator==(const GSetAdd&, const GSetAdd&) = default;
};

/// (add, e, (i, c), m[e])
struct ORSetAdd {
  std::string element;
  Dot dot;
  std::set<Dot> observed;
  friend bool operator==(const ORSetAdd&, const ORSetAdd&) = default;
};

/// (remove, e, m[e])
struct ORSetRemove {
  std::string element;
  std::set<Dot> observed;
  friend bool operator==(const ORSetRemove&, const ORSetRemove&) = default;
};

/// (add, e, u) for the pair-set ORSet.
struct NaiveAdd {
  std::string element;
  Dot id;
  friend bool operator==(const NaiveAdd&, const NaiveAdd&) = default;
};

/// (remove, {(x, u) in s | x = e})
struct NaiveRemove {
  std::set<std::pair<std::string, Dot>> pairs;
  friend bool operator==(const NaiveRemove&, const NaiveRemove&) = default;
};

/// (write, (e, (i, c)), r)
struct MVRegWrite {
  std::string value;
  Dot dot;
  std::set<Dot> overwritten;
  friend bool operator==(const MVRegWrite&, const MVRegWrite&) = default;
};

using Payload = std::variant<CounterUpdate, GSetAdd, ORSetAdd, ORSetRemove,
                             NaiveAdd, NaiveRemove, MVRegWrite>;

struct PreparedMessage {
  ReplicaId origin{};
  Payload payload;
  friend bool operator==(const PreparedMessage&, const PreparedMessage&) = default;
};

std::string render(const PreparedMessage& m);
/// Scalar leaves in the payload (element ids, dots).
std::size_t leaf_count(const PreparedMessage& m);

/// Uniform prepare/effect/query surface used by the simulator.
class Replica {
 public:
  explicit Replica(ReplicaId id) : id_(id) {}
  virtual ~Replica() = default;

  ReplicaId id() const { return id_; }
  virtual Datatype datatype() const = 0;

  /// Builds the message for `op`. Only auxiliary state may change.
  virtual PreparedMessage prepare(const Operation& op) = 0;
  virtual void effect(const PreparedMessage& msg) = 0;
  virtual QueryResult query(const Query& q) const = 0;

  /// Canonical rendering of the converging state (auxiliary state excluded).
  virtual std::string render_state() const = 0;
  virtual std::size_t state_size() const = 0;
  /// Drops non-converging auxiliary state.
  virtual void reset_auxiliary() {}
  virtual std::unique_ptr<Replica> clone() const = 0;

 private:
  ReplicaId id_;
};

class GCounter final : public Replica {
 public:
  using Replica::Replica;
  Datatype datatype() const override { return Datatype::kGCounter; }
  PreparedMessage prepare(const Operation& op) override;
  void effect(const PreparedMessage& msg) override;
  QueryResult query(const Query& q) const override;
  std::string render_state() const override;
  std::size_t state_size() const override { return 1; }
  std::unique_ptr<Replica> clone() const override;

 private:
  std::uint64_t n_ = 0;
};

class PNCounter final : public Replica {
 public:
  using Replica::Replica;
  Datatype datatype() const override { return Datatype::kPNCounter; }
  PreparedMessage prepare(const Operation& op) override;
  void effect(const PreparedMessage& msg) override;
  QueryResult query(const Query& q) const override;
  std::string render_state() const override;
  std::size_t state_size() const override { return 1; }
  std::unique_ptr<Replica> clone() const override;

 private:
  std::int64_t v_ = 0;
};

class GSet final : public Replica {
 public:
  using Replica::Replica;
  Datatype datatype() const override { return Datatype::kGSet; }
  PreparedMessage prepare(const Operation& op) override;
  void effect(const PreparedMessage& msg) override;
  QueryResult query(const Query& q) const override;
  std::string render_state() const override;
  std::size_t state_size() const override { return s_.size(); }
  std::unique_ptr<Replica> clone() const override;

 private:
  std::set<std::string> s_;
};

/// Map from element to the ids of its surviving adds; c is auxiliary.
class ORSet final : public Replica {
 public:
  using Replica::Replica;
  Datatype datatype() const override { return Datatype::kORSet; }
  PreparedMessage prepare(const Operation& op) override;
  void effect(const PreparedMessage& msg) override;
  QueryResult query(const Query& q) const override;
  std::string render_state() const override;
  std::size_t state_size() const override;
  void reset_auxiliary() override { c_ = 0; }
  std::unique_ptr<Replica> clone() const override;

  const std::map<std::string, std::set<Dot>>& entries() const { return m_; }
  std::uint64_t auxiliary_counter() const { return c_; }

 private:
  std::map<std::string, std::set<Dot>> m_;
  std::uint64_t c_ = 0;
};

/// Set of (element, unique id) pairs. Ids are dots.
class NaiveORSet final : public Replica {
 public:
  using Replica::Replica;
  Datatype datatype() const override { return Datatype::kORSetNaive; }
  PreparedMessage prepare(const Operation& op) override;
  void effect(const PreparedMessage& msg) override;
  QueryResult query(const Query& q) const override;
  std::string render_state() const override;
  std::size_t state_size() const override { return 2 * s_.size(); }
  void reset_auxiliary() override { c_ = 0; }
  std::unique_ptr<Replica> clone() const override;

 private:
  std::set<std::pair<std::string, Dot>> s_;
  std::uint64_t c_ = 0;
};

class MVRegister final : public Replica {
 public:
  using Replica::Replica;
  Datatype datatype() const override { return Datatype::kMVRegister; }
  PreparedMessage prepare(const Operation& op) override;
  void effect(const PreparedMessage& msg) override;
  QueryResult query(const Query& q) const override;
  std::string render_state() const override;
  std::size_t state_size() const override { return 2 * s_.size(); }
  void reset_auxiliary() override { c_ = 0; }
  std::unique_ptr<Replica> clone() const override;

 private:
  std::set<std::pair<std::string, Dot>> s_;
  std::uint64_t c_ = 0;
};

/// Throws std::invalid_argument for datatypes without an op-based version.
std::unique_ptr<Replica> make_replica(Datatype d, ReplicaId id);

}  // namespace crdtlab::opbased

#endif  // CRDTLAB_OPBASED_HPP_
