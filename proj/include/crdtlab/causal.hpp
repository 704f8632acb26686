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

#ifndef CRDTLAB_CAUSAL_HPP_
#define CRDTLAB_CAUSAL_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "crdtlab/ids.hpp"
#include "crdtlab/lattice.hpp"

namespace crdtlab::causal {

/// Set of seen dots, kept as a version vector plus a cloud of dots that are
/// not contiguous with it. Always normalized: cloud dots are never covered
/// by the vector and never directly follow it.
class CausalContext {
 public:
  CausalContext() = default;

  static CausalContext from_vector(std::map<ReplicaId, std::uint64_t> vv);
  template <typename Range>
  static CausalContext from_dots(const Range& dots) {
    CausalContext c;
    for (const Dot& d : dots) c.insert(d);
    return c;
  }

  bool contains(const Dot& d) const;
  void insert(const Dot& d);
  /// Highest counter seen for `r`, including the cloud.
  std::uint64_t max_counter(ReplicaId r) const;
  /// Contiguous prefix covered for `r`.
  std::uint64_t covered(ReplicaId r) const;

  CausalContext join(const CausalContext& other) const;

  /// Every dot in the context, ascending.
  std::vector<Dot> dots() const;
  bool empty() const { return compact_.empty() && cloud_.empty(); }

  const std::map<ReplicaId, std::uint64_t>& compact() const { return compact_; }
  const std::set<Dot>& cloud() const { return cloud_; }

  std::size_t leaf_count() const { return compact_.size() + cloud_.size(); }
  std::string render() const;

  friend bool operator==(const CausalContext&, const CausalContext&) = default;

 private:
  void normalize();

  std::map<ReplicaId, std::uint64_t> compact_;
  std::set<Dot> cloud_;
};

/// Returns (replica, max_counter(replica) + 1) and the context with it added.
std::pair<Dot, CausalContext> next_dot(const CausalContext& context,
                                       ReplicaId replica);

CausalContext cc_join(const CausalContext& a, const CausalContext& b);

class DotStore;
using DotSet = std::set<Dot>;
using DotFun = std::map<Dot, lattice::Value>;
using DotMap = std::map<std::string, DotStore>;

/// One of DotSet, DotFun<V> or DotMap<K, DotStore>. Bottom children and
/// bottom values are never stored.
class DotStore {
 public:
  enum class Kind { kSet, kFun, kMap };

  DotStore();  // empty DotSet
  static DotStore set(DotSet dots = {});
  static DotStore fun(DotFun entries = {});
  static DotStore map(DotMap entries = {});

  DotStore(const DotStore& other);
  DotStore(DotStore&&) noexcept;
  DotStore& operator=(const DotStore& other);
  DotStore& operator=(DotStore&&) noexcept;
  ~DotStore();

  Kind kind() const { return kind_; }

  const DotSet& as_set() const;
  DotSet& as_set();
  const DotFun& as_fun() const;
  DotFun& as_fun();
  const DotMap& as_map() const;
  DotMap& as_map();

  bool is_bottom() const;
  /// Same kind, emptied.
  DotStore bottom_like() const;

  void collect_dots(std::set<Dot>& out) const;
  std::set<Dot> dots() const;

  std::size_t leaf_count() const;
  std::string render() const;

  friend bool operator==(const DotStore& a, const DotStore& b);

 private:
  Kind kind_ = Kind::kSet;
  DotSet set_;
  DotFun fun_;
  std::unique_ptr<DotMap> map_;
};

/// Dot store paired with the context of everything it has seen.
struct CausalState {
  DotStore store;
  CausalContext context;

  /// Every dot in the store is covered by the context.
  bool well_formed() const;
  std::size_t leaf_count() const {
    return store.leaf_count() + context.leaf_count();
  }
  std::string render() const;

  friend bool operator==(const CausalState&, const CausalState&) = default;
};

/// Store half of the causal join, with each side's context deciding which
/// unmatched dots were removed.
DotStore join_stores(const DotStore& a, const CausalContext& ca,
                     const DotStore& b, const CausalContext& cb);

CausalState causal_join(const CausalState& a, const CausalState& b);

/// a <= b iff joining a into b leaves b unchanged.
bool causal_leq(const CausalState& a, const CausalState& b);

/// Irreducible parts: one per dot of the context. Dots present in the store
/// carry the store entry for that dot; others carry only the dot (a removal).
std::vector<CausalState> causal_decompose(const CausalState& x);

/// Join of the irreducible parts of a that are not below b.
CausalState causal_difference(const CausalState& a, const CausalState& b);

}  // namespace crdtlab::causal

#endif  // CRDTLAB_CAUSAL_HPP_
