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

#ifndef CRDTLAB_LATTICE_HPP_
#define CRDTLAB_LATTICE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "crdtlab/ids.hpp"

// Join-semilattices built from a closed combinator grammar:
//
//   nat          naturals ordered by <=, join = max, bottom = 0
//   bool         false < true, join = or
//   powerset     finite sets of strings under inclusion, join = union
//   product A B  componentwise order and join
//   lex A B      lexicographic product (compare A, break ties on B)
//   map V        string keys to V, pointwise; absent key reads as bottom
//
// Values are immutable; compound payloads are shared between copies.
namespace crdtlab::lattice {

enum class ShapeKind { kNat, kBool, kPowerset, kProduct, kLex, kMap };

class Shape;
using ShapePtr = std::shared_ptr<const Shape>;

class Shape {
 public:
  static ShapePtr nat();
  static ShapePtr boolean();
  static ShapePtr powerset();
  static ShapePtr product(ShapePtr first, ShapePtr second);
  static ShapePtr lex(ShapePtr first, ShapePtr second);
  static ShapePtr map(ShapePtr value);

  ShapeKind kind() const { return kind_; }
  // product/lex: both components; map: first() is the value shape.
  const ShapePtr& first() const { return first_; }
  const ShapePtr& second() const { return second_; }

  bool is_chain() const;
  std::string describe() const;

  friend bool operator==(const Shape& a, const Shape& b);

  Shape(ShapeKind kind, ShapePtr first, ShapePtr second)
      : kind_(kind), first_(std::move(first)), second_(std::move(second)) {}

 private:
  ShapeKind kind_;
  ShapePtr first_;
  ShapePtr second_;
};

bool same_shape(const ShapePtr& a, const ShapePtr& b);

class Value {
 public:
  using Set = std::set<std::string>;
  using Map = std::map<std::string, Value>;

  static Value bottom(const ShapePtr& shape);
  static Value nat(std::uint64_t n);
  static Value boolean(bool b);
  static Value set(Set elements);
  static Value product(Value first, Value second);
  static Value lex(Value first, Value second);
  // Bottom-valued entries are dropped so that absent == bottom.
  static Value map(const ShapePtr& value_shape, Map entries);

  const ShapePtr& shape() const { return shape_; }
  ShapeKind kind() const { return shape_->kind(); }

  std::uint64_t as_nat() const;
  bool as_bool() const;
  const Set& as_set() const;
  const Value& first() const;
  const Value& second() const;
  const Map& as_map() const;
  // Map lookup; missing keys yield bottom of the value shape.
  Value at(const std::string& key) const;

  bool is_bottom() const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  struct Pair;
  using Payload = std::variant<std::uint64_t, bool, std::shared_ptr<const Set>,
                               std::shared_ptr<const Pair>,
                               std::shared_ptr<const Map>>;

  Value(ShapePtr shape, Payload payload)
      : shape_(std::move(shape)), payload_(std::move(payload)) {}

  ShapePtr shape_;
  Payload payload_;
};

/// Irredundant join decomposition of `target`.
struct Decomposition {
  std::vector<Value> irreducibles;
  Value target;
};

bool leq(const Value& a, const Value& b);
Value join(const Value& a, const Value& b);
/// Join of a finite family; bottom of `shape` for an empty family.
Value join_all(const ShapePtr& shape, std::span<const Value> values);

/// Strict order a < b.
bool less(const Value& a, const Value& b);
/// Neither a <= b nor b <= a.
bool concurrent(const Value& a, const Value& b);

/// Maximal join-irreducibles below x. Lexicographic products are rejected
/// with UnsupportedShape.
Decomposition decompose(const Value& x);

/// Join of the irreducibles of a that are not below b.
Value difference(const Value& a, const Value& b);

/// Canonical text: nat "3", bool "true", set "{a,b}", product "(x,y)",
/// lex "<x,y>", map "{k:v,...}". Keys and elements are sorted.
std::string render(const Value& v);

/// Number of scalar leaves (naturals, booleans, element ids, map keys).
std::size_t leaf_count(const Value& v);

}  // namespace crdtlab::lattice

#endif  // CRDTLAB_LATTICE_HPP_
