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

#include "crdtlab/opbased.hpp"

#include <sstream>
#include <stdexcept>

namespace crdtlab::opbased {

namespace {

[[noreturn]] void bad_operation(const Replica& r, const Operation& op) {
  throw std::invalid_argument("operation '" + render(op) + "' is not valid for " +
                              std::string(name_of(r.datatype())));
}

[[noreturn]] void bad_message(const Replica& r) {
  throw std::invalid_argument("message payload does not belong to " +
                              std::string(name_of(r.datatype())));
}

[[noreturn]] void bad_query(const Replica& r, const Query& q) {
  throw std::invalid_argument("query '" + render(q) + "' is not valid for " +
                              std::string(name_of(r.datatype())));
}

std::string render_dots(const std::set<Dot>& dots) {
  std::string out = "{";
  bool first = true;
  for (const auto& d : dots) {
    if (!first) out += ',';
    first = false;
    out += to_string(d);
  }
  return out + "}";
}

std::string render_pairs(const std::set<std::pair<std::string, Dot>>& pairs) {
  std::string out = "{";
  bool first = true;
  for (const auto& [e, d] : pairs) {
    if (!first) out += ',';
    first = false;
    out += "(" + e + "," + to_string(d) + ")";
  }
  return out + "}";
}

}  // namespace

std::string render(const PreparedMessage& m) {
  struct Visitor {
    std::string operator()(const CounterUpdate& u) const {
      return u.kind == OpKind::kInc ? "inc" : "dec";
    }
    std::string operator()(const GSetAdd& a) const {
      return "(add," + a.element + ")";
    }
    std::string operator()(const ORSetAdd& a) const {
      return "(add," + a.element + "," + to_string(a.dot) + "," +
             render_dots(a.observed) + ")";
    }
    std::string operator()(const ORSetRemove& r) const {
      return "(remove," + r.element + "," + render_dots(r.observed) + ")";
    }
    std::string operator()(const NaiveAdd& a) const {
      return "(add," + a.element + "," + to_string(a.id) + ")";
    }
    std::string operator()(const NaiveRemove& r) const {
      return "(remove," + render_pairs(r.pairs) + ")";
    }
    std::string operator()(const MVRegWrite& w) const {
      return "(write,(" + w.value + "," + to_string(w.dot) + ")," +
             render_dots(w.overwritten) + ")";
    }
  };
  return std::visit(Visitor{}, m.payload);
}

std::size_t leaf_count(const PreparedMessage& m) {
  struct Visitor {
    std::size_t operator()(const CounterUpdate&) const { return 1; }
    std::size_t operator()(const GSetAdd&) const { return 1; }
    std::size_t operator()(const ORSetAdd& a) const {
      return 2 + a.observed.size();
    }
    std::size_t operator()(const ORSetRemove& r) const {
      return 1 + r.observed.size();
    }
    std::size_t operator()(const NaiveAdd&) const { return 2; }
    std::size_t operator()(const NaiveRemove& r) const {
      return 2 * r.pairs.size();
    }
    std::size_t operator()(const MVRegWrite& w) const {
      return 2 + w.overwritten.size();
    }
  };
  return std::visit(Visitor{}, m.payload);
}

// ---------------------------------------------------------------------------
// GCounter

PreparedMessage GCounter::prepare(const Operation& op) {
  if (op.kind != OpKind::kInc) bad_operation(*this, op);
  return {id(), CounterUpdate{OpKind::kInc}};
}

void GCounter::effect(const PreparedMessage& msg) {
  const auto* u = std::get_if<CounterUpdate>(&msg.payload);
  if (u == nullptr || u->kind != OpKind::kInc) bad_message(*this);
  n_ += 1;
}

QueryResult GCounter::query(const Query& q) const {
  if (q.kind != QueryKind::kValue) bad_query(*this, q);
  return static_cast<std::int64_t>(n_);
}

std::string GCounter::render_state() const { return std::to_string(n_); }

std::unique_ptr<Replica> GCounter::clone() const {
  return std::make_unique<GCounter>(*this);
}

// ---------------------------------------------------------------------------
// PNCounter

PreparedMessage PNCounter::prepare(const Operation& op) {
  if (op.kind != OpKind::kInc && op.kind != OpKind::kDec) bad_operation(*this, op);
  return {id(), CounterUpdate{op.kind}};
}

void PNCounter::effect(const PreparedMessage& msg) {
  const auto* u = std::get_if<CounterUpdate>(&msg.payload);
  if (u == nullptr) bad_message(*this);
  v_ += u->kind == OpKind::kInc ? 1 : -1;
}

QueryResult PNCounter::query(const Query& q) const {
  if (q.kind != QueryKind::kValue) bad_query(*this, q);
  return v_;
}

std::string PNCounter::render_state() const { return std::to_string(v_); }

std::unique_ptr<Replica> PNCounter::clone() const {
  return std::make_unique<PNCounter>(*this);
}

// ---------------------------------------------------------------------------
// GSet

PreparedMessage GSet::prepare(const Operation& op) {
  if (op.kind != OpKind::kAdd) bad_operation(*this, op);
  return {id(), GSetAdd{op.arg}};
}

void GSet::effect(const PreparedMessage& msg) {
  const auto* a = std::get_if<GSetAdd>(&msg.payload);
  if (a == nullptr) bad_message(*this);
  s_.insert(a->element);
}

QueryResult GSet::query(const Query& q) const {
  switch (q.kind) {
    case QueryKind::kElements:
      return s_;
    case QueryKind::kContains:
      return s_.contains(q.arg);
    default:
      bad_query(*this, q);
  }
}

std::string GSet::render_state() const { return render(QueryResult{s_}); }

std::unique_ptr<Replica> GSet::clone() const {
  return std::make_unique<GSet>(*this);
}

// ---------------------------------------------------------------------------
// ORSet (optimized)

PreparedMessage ORSet::prepare(const Operation& op) {
  auto it = m_.find(op.arg);
  std::set<Dot> observed = it == m_.end() ? std::set<Dot>{} : it->second;
  switch (op.kind) {
    case OpKind::kAdd:
      c_ += 1;
      return {id(), ORSetAdd{op.arg, Dot{id(), c_}, std::move(observed)}};
    case OpKind::kRemove:
      return {id(), ORSetRemove{op.arg, std::move(observed)}};
    default:
      bad_operation(*this, op);
  }
}

void ORSet::effect(const PreparedMessage& msg) {
  auto subtract = [this](const std::string& e, const std::set<Dot>& r) {
    auto it = m_.find(e);
    if (it == m_.end()) return;
    for (const auto& d : r) it->second.erase(d);
    if (it->second.empty()) m_.erase(it);
  };
  if (const auto* a = std::get_if<ORSetAdd>(&msg.payload)) {
    // m[e] <- m[e] \ r ∪ {d}
    subtract(a->element, a->observed);
    m_[a->element].insert(a->dot);
  } else if (const auto* r = std::get_if<ORSetRemove>(&msg.payload)) {
    subtract(r->element, r->observed);
  } else {
    bad_message(*this);
  }
}

QueryResult ORSet::query(const Query& q) const {
  switch (q.kind) {
    case QueryKind::kElements: {
      std::set<std::string> out;
      for (const auto& [e, dots] : m_) out.insert(e);
      return out;
    }
    case QueryKind::kContains:
      return m_.contains(q.arg);
    default:
      bad_query(*this, q);
  }
}

std::string ORSet::render_state() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [e, dots] : m_) {
    if (!first) out += ',';
    first = false;
    out += e + ":" + render_dots(dots);
  }
  return out + "}";
}

std::size_t ORSet::state_size() const {
  std::size_t n = 0;
  for (const auto& [e, dots] : m_) n += 1 + dots.size();
  return n;
}

std::unique_ptr<Replica> ORSet::clone() const {
  return std::make_unique<ORSet>(*this);
}

// ---------------------------------------------------------------------------
// NaiveORSet

PreparedMessage NaiveORSet::prepare(const Operation& op) {
  switch (op.kind) {
    case OpKind::kAdd:
      c_ += 1;
      return {id(), NaiveAdd{op.arg, Dot{id(), c_}}};
    case OpKind::kRemove: {
      NaiveRemove r;
      for (const auto& p : s_) {
        if (p.first == op.arg) r.pairs.insert(p);
      }
      return {id(), std::move(r)};
    }
    default:
      bad_operation(*this, op);
  }
}

void NaiveORSet::effect(const PreparedMessage& msg) {
  if (const auto* a = std::get_if<NaiveAdd>(&msg.payload)) {
    s_.emplace(a->element, a->id);
  } else if (const auto* r = std::get_if<NaiveRemove>(&msg.payload)) {
    for (const auto& p : r->pairs) s_.erase(p);
  } else {
    bad_message(*this);
  }
}

QueryResult NaiveORSet::query(const Query& q) const {
  switch (q.kind) {
    case QueryKind::kElements: {
      std::set<std::string> out;
      for (const auto& p : s_) out.insert(p.first);
      return out;
    }
    case QueryKind::kContains:
      for (const auto& p : s_) {
        if (p.first == q.arg) return true;
      }
      return false;
    default:
      bad_query(*this, q);
  }
}

std::string NaiveORSet::render_state() const { return render_pairs(s_); }

std::unique_ptr<Replica> NaiveORSet::clone() const {
  return std::make_unique<NaiveORSet>(*this);
}

// ---------------------------------------------------------------------------
// MVRegister

PreparedMessage MVRegister::prepare(const Operation& op) {
  if (op.kind != OpKind::kWrite) bad_operation(*this, op);
  c_ += 1;
  std::set<Dot> r;
  for (const auto& [e, d] : s_) r.insert(d);
  return {id(), MVRegWrite{op.arg, Dot{id(), c_}, std::move(r)}};
}

void MVRegister::effect(const PreparedMessage& msg) {
  const auto* w = std::get_if<MVRegWrite>(&msg.payload);
  if (w == nullptr) bad_message(*this);
  std::erase_if(s_, [&](const auto& p) { return w->overwritten.contains(p.second); });
  s_.emplace(w->value, w->dot);
}

QueryResult MVRegister::query(const Query& q) const {
  if (q.kind != QueryKind::kRead) bad_query(*this, q);
  std::set<std::string> out;
  for (const auto& p : s_) out.insert(p.first);
  return out;
}

std::string MVRegister::render_state() const { return render_pairs(s_); }

std::unique_ptr<Replica> MVRegister::clone() const {
  return std::make_unique<MVRegister>(*this);
}

std::unique_ptr<Replica> make_replica(Datatype d, ReplicaId id) {
  switch (d) {
    case Datatype::kGCounter:
      return std::make_unique<GCounter>(id);
    case Datatype::kPNCounter:
      return std::make_unique<PNCounter>(id);
    case Datatype::kGSet:
      return std::make_unique<GSet>(id);
    case Datatype::kORSet:
      return std::make_unique<ORSet>(id);
    case Datatype::kORSetNaive:
      return std::make_unique<NaiveORSet>(id);
    case Datatype::kMVRegister:
      return std::make_unique<MVRegister>(id);
    default:
      throw std::invalid_argument(std::string(name_of(d)) +
                                  " has no op-based implementation");
  }
}

}  // namespace crdtlab::opbased
