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

#include "crdtlab/statebased.hpp"

#include <algorithm>
#include <stdexcept>

namespace crdtlab::statebased {

using causal::CausalContext;
using causal::CausalState;
using causal::DotStore;
using lattice::Shape;
using lattice::ShapePtr;
using lattice::Value;

namespace {

[[noreturn]] void mixed() {
  throw ShapeMismatch("lattice value combined with causal state");
}

template <typename F, typename G>
auto dispatch2(const CrdtState& a, const CrdtState& b, F on_value, G on_causal) {
  if (const auto* va = std::get_if<Value>(&a)) {
    const auto* vb = std::get_if<Value>(&b);
    if (vb == nullptr) mixed();
    return on_value(*va, *vb);
  }
  const auto* cb = std::get_if<CausalState>(&b);
  if (cb == nullptr) mixed();
  return on_causal(std::get<CausalState>(a), *cb);
}

}  // namespace

CrdtState join(const CrdtState& a, const CrdtState& b) {
  return dispatch2(
      a, b, [](const Value& x, const Value& y) { return CrdtState{lattice::join(x, y)}; },
      [](const CausalState& x, const CausalState& y) {
        return CrdtState{causal::causal_join(x, y)};
      });
}

bool leq(const CrdtState& a, const CrdtState& b) {
  return dispatch2(a, b, [](const Value& x, const Value& y) { return lattice::leq(x, y); },
                   [](const CausalState& x, const CausalState& y) {
                     return causal::causal_leq(x, y);
                   });
}

CrdtState difference(const CrdtState& a, const CrdtState& b) {
  return dispatch2(
      a, b,
      [](const Value& x, const Value& y) { return CrdtState{lattice::difference(x, y)}; },
      [](const CausalState& x, const CausalState& y) {
        return CrdtState{causal::causal_difference(x, y)};
      });
}

bool is_bottom(const CrdtState& s) {
  if (const auto* v = std::get_if<Value>(&s)) return v->is_bottom();
  const auto& c = std::get<CausalState>(s);
  return c.store.is_bottom() && c.context.empty();
}

std::size_t leaf_count(const CrdtState& s) {
  if (const auto* v = std::get_if<Value>(&s)) return lattice::leaf_count(*v);
  return std::get<CausalState>(s).leaf_count();
}

std::string render(const CrdtState& s) {
  if (const auto* v = std::get_if<Value>(&s)) return lattice::render(*v);
  return std::get<CausalState>(s).render();
}

namespace {

[[noreturn]] void bad_operation(Datatype d, const Operation& op) {
  throw std::invalid_argument("operation '" + render(op) + "' is not valid for " +
                              std::string(name_of(d)));
}

[[noreturn]] void bad_query(Datatype d, const Query& q) {
  throw std::invalid_argument("query '" + render(q) + "' is not valid for " +
                              std::string(name_of(d)));
}

const ShapePtr& nat_map() {
  static const ShapePtr s = Shape::map(Shape::nat());
  return s;
}

const Value& as_value(const CrdtState& s) {
  const auto* v = std::get_if<Value>(&s);
  if (v == nullptr) throw ShapeMismatch("expected a lattice value");
  return *v;
}

const CausalState& as_causal(const CrdtState& s) {
  const auto* c = std::get_if<CausalState>(&s);
  if (c == nullptr) throw ShapeMismatch("expected a causal state");
  return *c;
}

std::int64_t map_sum(const Value& m) {
  std::int64_t total = 0;
  for (const auto& [k, v] : m.as_map()) total += static_cast<std::int64_t>(v.as_nat());
  return total;
}

Value singleton(const std::string& key, std::uint64_t n) {
  return Value::map(Shape::nat(), {{key, Value::nat(n)}});
}

// m{key -> n}
Value with_entry(const Value& m, const std::string& key, std::uint64_t n) {
  auto entries = m.as_map();
  entries.insert_or_assign(key, Value::nat(n));
  return Value::map(Shape::nat(), std::move(entries));
}

// m{i -> m[i] + 1}
Value inc_full(ReplicaId i, const Value& m) {
  const auto key = to_string(i);
  return with_entry(m, key, m.at(key).as_nat() + 1);
}

// {i -> m[i] + 1}
Value inc_delta(ReplicaId i, const Value& m) {
  const auto key = to_string(i);
  return singleton(key, m.at(key).as_nat() + 1);
}

QueryResult set_query(Datatype d, const Query& q, const std::set<std::string>& elements) {
  switch (q.kind) {
    case QueryKind::kElements:
      return elements;
    case QueryKind::kContains:
      return elements.contains(q.arg);
    default:
      bad_query(d, q);
  }
}

class GCounterDef final : public StateDatatype {
 public:
  Datatype datatype() const override { return Datatype::kGCounter; }
  CrdtState bottom() const override { return Value::bottom(nat_map()); }

  CrdtState mutate(ReplicaId i, const Operation& op, const CrdtState& x) const override {
    if (op.kind != OpKind::kInc) bad_operation(datatype(), op);
    return inc_full(i, as_value(x));
  }

  CrdtState delta_mutate(ReplicaId i, const Operation& op,
                         const CrdtState& x) const override {
    if (op.kind != OpKind::kInc) bad_operation(datatype(), op);
    return inc_delta(i, as_value(x));
  }

  QueryResult query(const Query& q, const CrdtState& x) const override {
    if (q.kind != QueryKind::kValue) bad_query(datatype(), q);
    return map_sum(as_value(x));
  }
};

// Pair of GCounters (P, N).
class PNCounterDef final : public StateDatatype {
 public:
  Datatype datatype() const override { return Datatype::kPNCounter; }
  CrdtState bottom() const override {
    return Value::bottom(Shape::product(nat_map(), nat_map()));
  }

  CrdtState mutate(ReplicaId i, const Operation& op, const CrdtState& x) const override {
    const auto& v = as_value(x);
    switch (op.kind) {
      case OpKind::kInc:
        return Value::product(inc_full(i, v.first()), v.second());
      case OpKind::kDec:
        return Value::product(v.first(), inc_full(i, v.second()));
      default:
        bad_operation(datatype(), op);
    }
  }

  CrdtState delta_mutate(ReplicaId i, const Operation& op,
                         const CrdtState& x) const override {
    const auto& v = as_value(x);
    const auto empty = Value::bottom(nat_map());
    switch (op.kind) {
      case OpKind::kInc:
        return Value::product(inc_delta(i, v.first()), empty);
      case OpKind::kDec:
        return Value::product(empty, inc_delta(i, v.second()));
      default:
        bad_operation(datatype(), op);
    }
  }

  QueryResult query(const Query& q, const CrdtState& x) const override {
    if (q.kind != QueryKind::kValue) bad_query(datatype(), q);
    const auto& v = as_value(x);
    return map_sum(v.first()) - map_sum(v.second());
  }
};

class GSetDef final : public StateDatatype {
 public:
  Datatype datatype() const override { return Datatype::kGSet; }
  CrdtState bottom() const override { return Value::bottom(Shape::powerset()); }

  CrdtState mutate(ReplicaId, const Operation& op, const CrdtState& x) const override {
    if (op.kind != OpKind::kAdd) bad_operation(datatype(), op);
    auto s = as_value(x).as_set();
    s.insert(op.arg);
    return Value::set(std::move(s));
  }

  CrdtState delta_mutate(ReplicaId, const Operation& op, const CrdtState&) const override {
    if (op.kind != OpKind::kAdd) bad_operation(datatype(), op);
    return Value::set({op.arg});
  }

  QueryResult query(const Query& q, const CrdtState& x) const override {
    return set_query(datatype(), q, as_value(x).as_set());
  }
};

// Map key -> nat. advance(e) lifts e to at least one above every other key.
class AdvancerDef final : public StateDatatype {
 public:
  Datatype datatype() const override { return Datatype::kAdvancer; }
  CrdtState bottom() const override { return Value::bottom(nat_map()); }

  CrdtState mutate(ReplicaId, const Operation& op, const CrdtState& x) const override {
    if (op.kind != OpKind::kAdvance) bad_operation(datatype(), op);
    const auto& s = as_value(x);
    return with_entry(s, op.arg, target(s, op.arg));
  }

  CrdtState delta_mutate(ReplicaId, const Operation& op,
                         const CrdtState& x) const override {
    if (op.kind != OpKind::kAdvance) bad_operation(datatype(), op);
    return singleton(op.arg, target(as_value(x), op.arg));
  }

  QueryResult query(const Query& q, const CrdtState& x) const override {
    if (q.kind != QueryKind::kAhead) bad_query(datatype(), q);
    const auto& m = as_value(x).as_map();
    std::uint64_t top = 0;
    for (const auto& [k, v] : m) top = std::max(top, v.as_nat());
    std::set<std::string> out;
    for (const auto& [k, v] : m) {
      if (v.as_nat() == top) out.insert(k);
    }
    return out;
  }

 private:
  // max{s[e], 1 + max{v | (k, v) in s, k != e}}, with max of nothing = 0
  static std::uint64_t target(const Value& s, const std::string& e) {
    std::uint64_t others = 0;
    for (const auto& [k, v] : s.as_map()) {
      if (k != e) others = std::max(others, v.as_nat());
    }
    return std::max(s.at(e).as_nat(), others + 1);
  }
};

// Causal add-wins set: DotMap<element, DotSet> with a causal context.
class ORSetDef final : public StateDatatype {
 public:
  Datatype datatype() const override { return Datatype::kORSet; }
  CrdtState bottom() const override { return CausalState{DotStore::map(), {}}; }

  CrdtState mutate(ReplicaId i, const Operation& op, const CrdtState& x) const override {
    const auto& s = as_causal(x);
    auto m = s.store.as_map();
    switch (op.kind) {
      case OpKind::kAdd: {
        // (m{e -> {(i, c[i]+1)}}, c{i -> c[i]+1})
        auto [d, c] = causal::next_dot(s.context, i);
        m.insert_or_assign(op.arg, DotStore::set({d}));
        return CausalState{DotStore::map(std::move(m)), std::move(c)};
      }
      case OpKind::kRemove:
        m.erase(op.arg);
        return CausalState{DotStore::map(std::move(m)), s.context};
      default:
        bad_operation(datatype(), op);
    }
  }

  CrdtState delta_mutate(ReplicaId i, const Operation& op,
                         const CrdtState& x) const override {
    const auto& s = as_causal(x);
    causal::DotSet seen;
    const auto& m = s.store.as_map();
    if (auto it = m.find(op.arg); it != m.end()) seen = it->second.as_set();
    switch (op.kind) {
      case OpKind::kAdd: {
        // ({e -> {d}}, {d} u m[e])
        const Dot d = causal::next_dot(s.context, i).first;
        seen.insert(d);
        return CausalState{DotStore::map({{op.arg, DotStore::set({d})}}),
                           CausalContext::from_dots(seen)};
      }
      case OpKind::kRemove:
        // ({}, m[e])
        return CausalState{DotStore::map(), CausalContext::from_dots(seen)};
      default:
        bad_operation(datatype(), op);
    }
  }

  QueryResult query(const Query& q, const CrdtState& x) const override {
    std::set<std::string> elements;
    for (const auto& [e, dots] : as_causal(x).store.as_map()) elements.insert(e);
    return set_query(datatype(), q, elements);
  }
};

}  // namespace

const StateDatatype& state_datatype(Datatype d) {
  static const GCounterDef gcounter;
  static const PNCounterDef pncounter;
  static const GSetDef gset;
  static const AdvancerDef advancer;
  static const ORSetDef orset;
  switch (d) {
    case Datatype::kGCounter:
      return gcounter;
    case Datatype::kPNCounter:
      return pncounter;
    case Datatype::kGSet:
      return gset;
    case Datatype::kAdvancer:
      return advancer;
    case Datatype::kORSet:
      return orset;
    default:
      throw std::invalid_argument(std::string(name_of(d)) +
                                  " has no state-based implementation");
  }
}

StateReplica::StateReplica(ReplicaId id, Datatype d)
    : id_(id), def_(&state_datatype(d)), state_(def_->bottom()) {}

void StateReplica::mutate(const Operation& op) { state_ = def_->mutate(id_, op, state_); }

void StateReplica::merge(const CrdtState& received) { state_ = join(state_, received); }

QueryResult StateReplica::query(const Query& q) const { return def_->query(q, state_); }

}  // namespace crdtlab::statebased
