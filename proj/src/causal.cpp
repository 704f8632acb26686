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

#include "crdtlab/causal.hpp"

#include <algorithm>
#include <sstream>

namespace crdtlab::causal {

// ---------------------------------------------------------------------------
// CausalContext

CausalContext CausalContext::from_vector(std::map<ReplicaId, std::uint64_t> vv) {
  CausalContext c;
  for (const auto& [r, n] : vv) {
    if (n > 0) c.compact_.emplace(r, n);
  }
  return c;
}

bool CausalContext::contains(const Dot& d) const {
  auto it = compact_.find(d.replica);
  if (it != compact_.end() && d.counter <= it->second) return true;
  return cloud_.contains(d);
}

void CausalContext::insert(const Dot& d) {
  if (d.counter == 0 || contains(d)) return;
  cloud_.insert(d);
  normalize();
}

std::uint64_t CausalContext::covered(ReplicaId r) const {
  auto it = compact_.find(r);
  return it == compact_.end() ? 0 : it->second;
}

std::uint64_t CausalContext::max_counter(ReplicaId r) const {
  std::uint64_t best = covered(r);
  auto it = cloud_.lower_bound(Dot{r, 0});
  for (; it != cloud_.end() && it->replica == r; ++it) {
    best = std::max(best, it->counter);
  }
  return best;
}

void CausalContext::normalize() {
  for (auto it = cloud_.begin(); it != cloud_.end();) {
    auto& top = compact_[it->replica];
    if (it->counter <= top) {
      it = cloud_.erase(it);
    } else if (it->counter == top + 1) {
      ++top;
      it = cloud_.erase(it);
    } else {
      ++it;
    }
  }
  std::erase_if(compact_, [](const auto& kv) { return kv.second == 0; });
}

CausalContext CausalContext::join(const CausalContext& other) const {
  CausalContext out = *this;
  for (const auto& [r, n] : other.compact_) {
    auto& top = out.compact_[r];
    top = std::max(top, n);
  }
  out.cloud_.insert(other.cloud_.begin(), other.cloud_.end());
  out.normalize();
  return out;
}

std::vector<Dot> CausalContext::dots() const {
  std::vector<Dot> out;
  for (const auto& [r, n] : compact_) {
    for (std::uint64_t k = 1; k <= n; ++k) out.push_back(Dot{r, k});
  }
  out.insert(out.end(), cloud_.begin(), cloud_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string CausalContext::render() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [r, n] : compact_) {
    if (!first) os << ',';
    first = false;
    os << to_string(r) << ':' << n;
  }
  os << '}';
  if (!cloud_.empty()) {
    os << "+{";
    first = true;
    for (const auto& d : cloud_) {
      if (!first) os << ',';
      first = false;
      os << to_string(d);
    }
    os << '}';
  }
  return os.str();
}

std::pair<Dot, CausalContext> next_dot(const CausalContext& context,
                                       ReplicaId replica) {
  Dot d{replica, context.max_counter(replica) + 1};
  CausalContext out = context;
  out.insert(d);
  return {d, std::move(out)};
}

CausalContext cc_join(const CausalContext& a, const CausalContext& b) {
  return a.join(b);
}

// ---------------------------------------------------------------------------
// DotStore

DotStore::DotStore() = default;
DotStore::DotStore(DotStore&&) noexcept = default;
DotStore& DotStore::operator=(DotStore&&) noexcept = default;
DotStore::~DotStore() = default;

DotStore::DotStore(const DotStore& other)
    : kind_(other.kind_),
      set_(other.set_),
      fun_(other.fun_),
      map_(other.map_ ? std::make_unique<DotMap>(*other.map_) : nullptr) {}

DotStore& DotStore::operator=(const DotStore& other) {
  if (this != &other) {
    DotStore copy(other);
    *this = std::move(copy);
  }
  return *this;
}

DotStore DotStore::set(DotSet dots) {
  DotStore s;
  s.kind_ = Kind::kSet;
  s.set_ = std::move(dots);
  return s;
}

DotStore DotStore::fun(DotFun entries) {
  std::erase_if(entries, [](const auto& kv) { return kv.second.is_bottom(); });
  DotStore s;
  s.kind_ = Kind::kFun;
  s.fun_ = std::move(entries);
  return s;
}

DotStore DotStore::map(DotMap entries) {
  std::erase_if(entries, [](const auto& kv) { return kv.second.is_bottom(); });
  DotStore s;
  s.kind_ = Kind::kMap;
  s.map_ = std::make_unique<DotMap>(std::move(entries));
  return s;
}

namespace {

[[noreturn]] void wrong_kind(const char* wanted) {
  throw ShapeMismatch(std::string("dot store is not a ") + wanted);
}

const char* kind_name(DotStore::Kind k) {
  switch (k) {
    case DotStore::Kind::kSet:
      return "DotSet";
    case DotStore::Kind::kFun:
      return "DotFun";
    case DotStore::Kind::kMap:
      return "DotMap";
  }
  return "?";
}

}  // namespace

const DotSet& DotStore::as_set() const {
  if (kind_ != Kind::kSet) wrong_kind("DotSet");
  return set_;
}
DotSet& DotStore::as_set() {
  if (kind_ != Kind::kSet) wrong_kind("DotSet");
  return set_;
}
const DotFun& DotStore::as_fun() const {
  if (kind_ != Kind::kFun) wrong_kind("DotFun");
  return fun_;
}
DotFun& DotStore::as_fun() {
  if (kind_ != Kind::kFun) wrong_kind("DotFun");
  return fun_;
}
const DotMap& DotStore::as_map() const {
  if (kind_ != Kind::kMap) wrong_kind("DotMap");
  return *map_;
}
DotMap& DotStore::as_map() {
  if (kind_ != Kind::kMap) wrong_kind("DotMap");
  return *map_;
}

bool DotStore::is_bottom() const {
  switch (kind_) {
    case Kind::kSet:
      return set_.empty();
    case Kind::kFun:
      return fun_.empty();
    case Kind::kMap:
      return map_->empty();
  }
  return true;
}

DotStore DotStore::bottom_like() const {
  switch (kind_) {
    case Kind::kSet:
      return set();
    case Kind::kFun:
      return fun();
    case Kind::kMap:
      return map();
  }
  return set();
}

void DotStore::collect_dots(std::set<Dot>& out) const {
  switch (kind_) {
    case Kind::kSet:
      out.insert(set_.begin(), set_.end());
      return;
    case Kind::kFun:
      for (const auto& [d, v] : fun_) out.insert(d);
      return;
    case Kind::kMap:
      for (const auto& [k, child] : *map_) child.collect_dots(out);
      return;
  }
}

std::set<Dot> DotStore::dots() const {
  std::set<Dot> out;
  collect_dots(out);
  return out;
}

std::size_t DotStore::leaf_count() const {
  switch (kind_) {
    case Kind::kSet:
      return set_.size();
    case Kind::kFun: {
      std::size_t n = 0;
      for (const auto& [d, v] : fun_) n += 1 + lattice::leaf_count(v);
      return n;
    }
    case Kind::kMap: {
      std::size_t n = 0;
      for (const auto& [k, child] : *map_) n += 1 + child.leaf_count();
      return n;
    }
  }
  return 0;
}

std::string DotStore::render() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  auto sep = [&] {
    if (!first) os << ',';
    first = false;
  };
  switch (kind_) {
    case Kind::kSet:
      for (const auto& d : set_) {
        sep();
        os << to_string(d);
      }
      break;
    case Kind::kFun:
      for (const auto& [d, v] : fun_) {
        sep();
        os << to_string(d) << ':' << lattice::render(v);
      }
      break;
    case Kind::kMap:
      for (const auto& [k, child] : *map_) {
        sep();
        os << k << ':' << child.render();
      }
      break;
  }
  os << '}';
  return os.str();
}

bool operator==(const DotStore& a, const DotStore& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case DotStore::Kind::kSet:
      return a.set_ == b.set_;
    case DotStore::Kind::kFun:
      return a.fun_ == b.fun_;
    case DotStore::Kind::kMap:
      return *a.map_ == *b.map_;
  }
  return false;
}

bool CausalState::well_formed() const {
  for (const auto& d : store.dots()) {
    if (!context.contains(d)) return false;
  }
  return true;
}

std::string CausalState::render() const {
  return "(" + store.render() + "," + context.render() + ")";
}

// ---------------------------------------------------------------------------
// Join

namespace {

// Join with an absent (bottom) counterpart whose context is `c_absent`:
// only entries whose dots the absent side has not seen survive.
DotStore keep_unseen(const DotStore& s, const CausalContext& c_absent) {
  switch (s.kind()) {
    case DotStore::Kind::kSet: {
      DotSet out;
      for (const auto& d : s.as_set()) {
        if (!c_absent.contains(d)) out.insert(d);
      }
      return DotStore::set(std::move(out));
    }
    case DotStore::Kind::kFun: {
      DotFun out;
      for (const auto& [d, v] : s.as_fun()) {
        if (!c_absent.contains(d)) out.emplace(d, v);
      }
      return DotStore::fun(std::move(out));
    }
    case DotStore::Kind::kMap: {
      DotMap out;
      for (const auto& [k, child] : s.as_map()) {
        auto kept = keep_unseen(child, c_absent);
        if (!kept.is_bottom()) out.emplace(k, std::move(kept));
      }
      return DotStore::map(std::move(out));
    }
  }
  return s;
}

}  // namespace

DotStore join_stores(const DotStore& a, const CausalContext& ca,
                     const DotStore& b, const CausalContext& cb) {
  if (a.kind() != b.kind()) {
    throw ShapeMismatch(std::string("causal join: ") + kind_name(a.kind()) +
                        " vs " + kind_name(b.kind()));
  }
  switch (a.kind()) {
    case DotStore::Kind::kSet: {
      const auto& s = a.as_set();
      const auto& t = b.as_set();
      DotSet out;
      // (s ∩ t) ∪ (s \ cb) ∪ (t \ ca)
      for (const auto& d : s) {
        if (t.contains(d) || !cb.contains(d)) out.insert(d);
      }
      for (const auto& d : t) {
        if (!ca.contains(d)) out.insert(d);
      }
      return DotStore::set(std::move(out));
    }
    case DotStore::Kind::kFun: {
      const auto& m = a.as_fun();
      const auto& n = b.as_fun();
      DotFun out;
      for (const auto& [d, v] : m) {
        auto it = n.find(d);
        if (it != n.end()) {
          out.emplace(d, lattice::join(v, it->second));
        } else if (!cb.contains(d)) {
          out.emplace(d, v);
        }
      }
      for (const auto& [d, v] : n) {
        if (!m.contains(d) && !ca.contains(d)) out.emplace(d, v);
      }
      return DotStore::fun(std::move(out));
    }
    case DotStore::Kind::kMap: {
      const auto& m = a.as_map();
      const auto& n = b.as_map();
      DotMap out;
      for (const auto& [k, child] : m) {
        auto it = n.find(k);
        DotStore joined = it != n.end() ? join_stores(child, ca, it->second, cb)
                                        : keep_unseen(child, cb);
        if (!joined.is_bottom()) out.emplace(k, std::move(joined));
      }
      for (const auto& [k, child] : n) {
        if (m.contains(k)) continue;
        DotStore joined = keep_unseen(child, ca);
        if (!joined.is_bottom()) out.emplace(k, std::move(joined));
      }
      return DotStore::map(std::move(out));
    }
  }
  return a;
}

CausalState causal_join(const CausalState& a, const CausalState& b) {
  return CausalState{join_stores(a.store, a.context, b.store, b.context),
                     a.context.join(b.context)};
}

bool causal_leq(const CausalState& a, const CausalState& b) {
  return causal_join(a, b) == b;
}

// ---------------------------------------------------------------------------
// Decomposition

namespace {

// Irreducible stores holding only dot d, or empty if d is not in s.
std::vector<DotStore> project(const DotStore& s, const Dot& d) {
  std::vector<DotStore> out;
  switch (s.kind()) {
    case DotStore::Kind::kSet:
      if (s.as_set().contains(d)) out.push_back(DotStore::set({d}));
      break;
    case DotStore::Kind::kFun: {
      auto it = s.as_fun().find(d);
      if (it != s.as_fun().end()) {
        for (auto& y : lattice::decompose(it->second).irreducibles) {
          out.push_back(DotStore::fun({{d, std::move(y)}}));
        }
      }
      break;
    }
    case DotStore::Kind::kMap:
      for (const auto& [k, child] : s.as_map()) {
        for (auto& p : project(child, d)) {
          DotMap single;
          single.emplace(k, std::move(p));
          out.push_back(DotStore::map(std::move(single)));
        }
      }
      break;
  }
  return out;
}

}  // namespace

std::vector<CausalState> causal_decompose(const CausalState& x) {
  std::vector<CausalState> out;
  const DotStore empty = x.store.bottom_like();
  for (const auto& d : x.context.dots()) {
    CausalContext single;
    single.insert(d);
    auto parts = project(x.store, d);
    if (parts.empty()) {
      out.push_back(CausalState{empty, single});
    } else {
      for (auto& p : parts) out.push_back(CausalState{std::move(p), single});
    }
  }
  return out;
}

CausalState causal_difference(const CausalState& a, const CausalState& b) {
  if (a.store.kind() != b.store.kind()) {
    throw ShapeMismatch("causal difference: dot store kinds differ");
  }
  CausalState acc{a.store.bottom_like(), CausalContext{}};
  for (const auto& part : causal_decompose(a)) {
    if (!causal_leq(part, b)) acc = causal_join(acc, part);
  }
  return acc;
}

}  // namespace crdtlab::causal
