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

#ifndef CRDTLAB_TESTS_LATTICE_GEN_HPP_
#define CRDTLAB_TESTS_LATTICE_GEN_HPP_

#include <optional>
#include <string>
#include <vector>

#include "crdtlab/causal.hpp"
#include "crdtlab/lattice.hpp"
#include "crdtlab/sim.hpp"

namespace crdtlab::testing {

struct NamedShape {
  std::string name;
  lattice::ShapePtr shape;
};

/// Shapes exercised by the law suite, lex products included.
std::vector<NamedShape> law_shapes();

/// Small random value: naturals up to 4, elements from {a,b,c,d}, map keys
/// from {x,y,z}.
lattice::Value random_value(const lattice::ShapePtr& shape, sim::Rng& rng);

/// Every value of `shape` with naturals <= max_nat, elements from the first
/// `elements` letters and keys from the first `keys` of {x,y,z}. The result
/// is closed under join.
std::vector<lattice::Value> enumerate(const lattice::ShapePtr& shape, std::uint64_t max_nat,
                                      std::size_t elements, std::size_t keys);

/// Least upper bound by exhaustive search over `universe`, using only leq.
std::optional<lattice::Value> brute_force_lub(const std::vector<lattice::Value>& universe,
                                              const lattice::Value& a,
                                              const lattice::Value& b);

/// x is not bottom and is not the join of two strictly smaller values.
bool brute_force_irreducible(const std::vector<lattice::Value>& universe,
                             const lattice::Value& x);

enum class StoreKind { kSet, kFun, kMap };

/// Well-formed causal state over replicas 0..2. DotFun values are a fixed
/// function of the dot so that independently generated states agree.
causal::CausalState random_causal(StoreKind kind, sim::Rng& rng);

/// a <= b from the definition: a's context is contained in b's, and every
/// dot of a's context still present in b's store is present in a's store.
bool causal_leq_oracle(const causal::CausalState& a, const causal::CausalState& b);

}  // namespace crdtlab::testing

#endif  // CRDTLAB_TESTS_LATTICE_GEN_HPP_
