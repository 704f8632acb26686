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

#include "crdtlab/lattice.hpp"

#include <algorithm>
#include <sstream>

namespace crdtlab {

std::string to_string(ReplicaId id) { return std::to_string(index_of(id)); }

std::string to_string(const Dot& dot) {
  return "(" + to_string(dot.replica) + "," + std::to_string(dot.counter) + ")";
}

}  // namespace crdtlab

namespace crdtlab::lattice {

struct Value::Pair {
  Value first;
  Value second;
};

// ---------------------------------------------------------------------------
// Shape

ShapePtr Shape::nat() {
  static const ShapePtr shape =
      std::make_shared<const Shape>(ShapeKind::kNat, nullptr, nullptr);
  return shape;
}

ShapePtr Shape::boolean() {
  static const ShapePtr shape =
      std::make_shared<const Shape>(ShapeKind::kBool, nullptr, nullptr);
  return shape;
}

ShapePtr Shape::powerset() {
  static const ShapePtr shape =
      std::make_shared<const Shape>(ShapeKind::kPowerset, nullptr, nullptr);
  return shape;
}

ShapePtr Shape::product(ShapePtr first, ShapePtr second) {
  return std::make_shared<const Shape>(ShapeKind::kProduct, std::move(first),
                                       std::move(second));
}

ShapePtr Shape::lex(ShapePtr first, ShapePtr second) {
  return std::make_shared<const Shape>(ShapeKind::kLex, std::move(first),
                                       std::move(second));
}

ShapePtr Shape::map(ShapePtr value) {
  return std::make_shared<const Shape>(ShapeKind::kMap, std::move(value),
                                       nullptr);
}

bool Shape::is_chain() const {
  switch (kind_) {
    case ShapeKind::kNat:
    case ShapeKind::kBool:
      return true;
    case ShapeKind::kLex:
      return first_->is_chain() && second_->is_chain();
    default:
      return false;
  }
}

std::string Shape::describe() const {
  switch (kind_) {
    case ShapeKind::kNat:
      return "nat";
    case ShapeKind::kBool:
      return "bool";
    case ShapeKind::kPowerset:
      return "powerset";
    case ShapeKind::kProduct:
      return "product(" + first_->describe() + "," + second_->describe() + ")";
    case ShapeKind::kLex:
      return "lex(" + first_->describe() + "," + second_->describe() + ")";
    case ShapeKind::kMap:
      return "map(" + first_->describe() + ")";
  }
  return "?";
}

bool operator==(const Shape& a, const Shape& b) {
  if (&a == &b) return true;
  if (a.kind_ != b.kind_) return false;
  auto eq = [](const ShapePtr& x, const ShapePtr& y) {
    if (x == y) return true;
    if (!x || !y) return false;
    return *x == *y;
  };
  return eq(a.first_, b.first_) && eq(a.second_, b.second_);
}

bool same_shape(const ShapePtr& a, const ShapePtr& b) {
  return a == b || *a == *b;
}

namespace {

void require_same_shape(const Value& a, const Value& b, const char* op) {
  if (!same_shape(a.shape(), b.shape())) {
    throw ShapeMismatch(std::string(op) + ": " + a.shape()->describe() +
                        " vs " + b.shape()->describe());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Value

Value Value::bottom(const ShapePtr& shape) {
  switch (shape->kind()) {
    case ShapeKind::kNat:
      return Value(shape, std::uint64_t{0});
    case ShapeKind::kBool:
      return Value(shape, false);
    case ShapeKind::kPowerset:
      return Value(shape, std::make_shared<const Set>());
    case ShapeKind::kProduct:
    case ShapeKind::kLex:
      // Every construction in the grammar has a bottom, so the lexicographic
      // side condition always holds.
      return Value(shape, std::make_shared<const Pair>(
                              Pair{bottom(shape->first()),
                                   bottom(shape->second())}));
    case ShapeKind::kMap:
      return Value(shape, std::make_shared<const Map>());
  }
  throw UnsupportedShape("bottom: " + shape->describe());
}

Value Value::nat(std::uint64_t n) { return Value(Shape::nat(), n); }

Value Value::boolean(bool b) { return Value(Shape::boolean(), b); }

Value Value::set(Set elements) {
  return Value(Shape::powerset(),
               std::make_shared<const Set>(std::move(elements)));
}

Value Value::product(Value first, Value second) {
  auto shape = Shape::product(first.shape(), second.shape());
  return Value(std::move(shape), std::make_shared<const Pair>(
                                     Pair{std::move(first), std::move(second)}));
}

Value Value::lex(Value first, Value second) {
  auto shape = Shape::lex(first.shape(), second.shape());
  return Value(std::move(shape), std::make_shared<const Pair>(
                                     Pair{std::move(first), std::move(second)}));
}

Value Value::map(const ShapePtr& value_shape, Map entries) {
  for (auto it = entries.begin(); it != entries.end();) {
    if (!same_shape(it->second.shape(), value_shape)) {
      throw ShapeMismatch("map entry '" + it->first + "' has shape " +
                          it->second.shape()->describe() + ", expected " +
                          value_shape->describe());
    }
    if (it->second.is_bottom()) {
      it = entries.erase(it);
    } else {
      ++it;
    }
  }
  return Value(Shape::map(value_shape),
               std::make_shared<const Map>(std::move(entries)));
}

std::uint64_t Value::as_nat() const { return std::get<std::uint64_t>(payload_); }

bool Value::as_bool() const { return std::get<bool>(payload_); }

const Value::Set& Value::as_set() const {
  return *std::get<std::shared_ptr<const Set>>(payload_);
}

const Value& Value::first() const {
  return std::get<std::shared_ptr<const Pair>>(payload_)->first;
}

const Value& Value::second() const {
  return std::get<std::shared_ptr<const Pair>>(payload_)->second;
}

const Value::Map& Value::as_map() const {
  return *std::get<std::shared_ptr<const Map>>(payload_);
}

Value Value::at(const std::string& key) const {
  const auto& entries = as_map();
  auto it = entries.find(key);
  if (it == entries.end()) return bottom(shape_->first());
  return it->second;
}

bool Value::is_bottom() const {
  switch (kind()) {
    case ShapeKind::kNat:
      return as_nat() == 0;
    case ShapeKind::kBool:
      return !as_bool();
    case ShapeKind::kPowerset:
      return as_set().empty();
    case ShapeKind::kProduct:
    case ShapeKind::kLex:
      return first().is_bottom() && second().is_bottom();
    case ShapeKind::kMap:
      return as_map().empty();
  }
  return false;
}

bool operator==(const Value& a, const Value& b) {
  if (!same_shape(a.shape_, b.shape_)) return false;
  switch (a.kind()) {
    case ShapeKind::kNat:
      return a.as_nat() == b.as_nat();
    case ShapeKind::kBool:
      return a.as_bool() == b.as_bool();
    case ShapeKind::kPowerset:
      return a.as_set() == b.as_set();
    case ShapeKind::kProduct:
    case ShapeKind::kLex:
      return a.first() == b.first() && a.second() == b.second();
    case ShapeKind::kMap:
      return a.as_map() == b.as_map();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Order and join

bool leq(const Value& a, const Value& b) {
  require_same_shape(a, b, "leq");
  switch (a.kind()) {
    case ShapeKind::kNat:
      return a.as_nat() <= b.as_nat();
    case ShapeKind::kBool:
      return !a.as_bool() || b.as_bool();
    case ShapeKind::kPowerset:
      return std::includes(b.as_set().begin(), b.as_set().end(),
                           a.as_set().begin(), a.as_set().end());
    case ShapeKind::kProduct:
      return leq(a.first(), b.first()) && leq(a.second(), b.second());
    case ShapeKind::kLex:
      return less(a.first(), b.first()) ||
             (a.first() == b.first() && leq(a.second(), b.second()));
    case ShapeKind::kMap: {
      const auto& bm = b.as_map();
      for (const auto& [key, value] : a.as_map()) {
        auto it = bm.find(key);
        // Stored values are never bottom, so a missing key in b fails.
        if (it == bm.end() || !leq(value, it->second)) return false;
      }
      return true;
    }
  }
  return false;
}

bool less(const Value& a, const Value& b) { return leq(a, b) && !(a == b); }

bool concurrent(const Value& a, const Value& b) {
  return !leq(a, b) && !leq(b, a);
}

Value join(const Value& a, const Value& b) {
  require_same_shape(a, b, "join");
  switch (a.kind()) {
    case ShapeKind::kNat:
      return Value::nat(std::max(a.as_nat(), b.as_nat()));
    case ShapeKind::kBool:
      return Value::boolean(a.as_bool() || b.as_bool());
    case ShapeKind::kPowerset: {
      if (b.as_set().empty()) return a;
      if (a.as_set().empty()) return b;
      Value::Set merged = a.as_set();
      merged.insert(b.as_set().begin(), b.as_set().end());
      return Value::set(std::move(merged));
    }
    case ShapeKind::kProduct:
      return Value::product(join(a.first(), b.first()),
                            join(a.second(), b.second()));
    case ShapeKind::kLex: {
      const Value& a1 = a.first();
      const Value& a2 = b.first();
      if (less(a2, a1)) return a;
      if (less(a1, a2)) return b;
      if (a1 == a2) return Value::lex(a1, join(a.second(), b.second()));
      return Value::lex(join(a1, a2), Value::bottom(a.shape()->second()));
    }
    case ShapeKind::kMap: {
      if (b.as_map().empty()) return a;
      if (a.as_map().empty()) return b;
      Value::Map merged = a.as_map();
      for (const auto& [key, value] : b.as_map()) {
        auto [it, inserted] = merged.emplace(key, value);
        if (!inserted) it->second = join(it->second, value);
      }
      return Value::map(a.shape()->first(), std::move(merged));
    }
  }
  throw UnsupportedShape("join: " + a.shape()->describe());
}

Value join_all(const ShapePtr& shape, std::span<const Value> values) {
  for (const auto& v : values) {
    if (!same_shape(v.shape(), shape)) {
      throw ShapeMismatch("join_all: " + v.shape()->describe() + " vs " +
                          shape->describe());
    }
  }
  switch (shape->kind()) {
    case ShapeKind::kPowerset: {
      Value::Set merged;
      for (const auto& v : values) {
        merged.insert(v.as_set().begin(), v.as_set().end());
      }
      return Value::set(std::move(merged));
    }
    case ShapeKind::kMap: {
      std::map<std::string, std::vector<Value>> grouped;
      for (const auto& v : values) {
        for (const auto& [key, child] : v.as_map()) grouped[key].push_back(child);
      }
      Value::Map merged;
      for (auto& [key, children] : grouped) {
        merged.emplace(key, join_all(shape->first(), children));
      }
      return Value::map(shape->first(), std::move(merged));
    }
    case ShapeKind::kProduct: {
      std::vector<Value> firsts;
      std::vector<Value> seconds;
      for (const auto& v : values) {
        firsts.push_back(v.first());
        seconds.push_back(v.second());
      }
      return Value::product(join_all(shape->first(), firsts),
                            join_all(shape->second(), seconds));
    }
    default: {
      Value acc = Value::bottom(shape);
      for (const auto& v : values) acc = join(acc, v);
      return acc;
    }
  }
}

// ---------------------------------------------------------------------------
// Decomposition

namespace {

void collect_irreducibles(const Value& x, std::vector<Value>& out) {
  switch (x.kind()) {
    case ShapeKind::kNat:
      // A chain element other than bottom is its own decomposition.
      if (x.as_nat() > 0) out.push_back(x);
      return;
    case ShapeKind::kBool:
      if (x.as_bool()) out.push_back(x);
      return;
    case ShapeKind::kPowerset:
      for (const auto& e : x.as_set()) out.push_back(Value::set({e}));
      return;
    case ShapeKind::kProduct: {
      const auto& shape = x.shape();
      std::vector<Value> left;
      std::vector<Value> right;
      collect_irreducibles(x.first(), left);
      collect_irreducibles(x.second(), right);
      for (auto& l : left) {
        out.push_back(Value::product(std::move(l),
                                     Value::bottom(shape->second())));
      }
      for (auto& r : right) {
        out.push_back(Value::product(Value::bottom(shape->first()),
                                     std::move(r)));
      }
      return;
    }
    case ShapeKind::kLex:
      throw UnsupportedShape("decompose: lexicographic products have no "
                             "supported join decomposition");
    case ShapeKind::kMap: {
      const auto& value_shape = x.shape()->first();
      for (const auto& [key, child] : x.as_map()) {
        std::vector<Value> parts;
        collect_irreducibles(child, parts);
        for (auto& p : parts) {
          out.push_back(Value::map(value_shape, {{key, std::move(p)}}));
        }
      }
      return;
    }
  }
}

}  // namespace

Decomposition decompose(const Value& x) {
  Decomposition d{{}, x};
  collect_irreducibles(x, d.irreducibles);
  return d;
}

Value difference(const Value& a, const Value& b) {
  require_same_shape(a, b, "difference");
  auto parts = decompose(a).irreducibles;
  std::vector<Value> fresh;
  for (auto& y : parts) {
    if (!leq(y, b)) fresh.push_back(std::move(y));
  }
  return join_all(a.shape(), fresh);
}

// ---------------------------------------------------------------------------
// Rendering and size

namespace {

void render_to(const Value& v, std::ostringstream& os) {
  switch (v.kind()) {
    case ShapeKind::kNat:
      os << v.as_nat();
      return;
    case ShapeKind::kBool:
      os << (v.as_bool() ? "true" : "false");
      return;
    case ShapeKind::kPowerset: {
      os << '{';
      bool first = true;
      for (const auto& e : v.as_set()) {
        if (!first) os << ',';
        first = false;
        os << e;
      }
      os << '}';
      return;
    }
    case ShapeKind::kProduct:
      os << '(';
      render_to(v.first(), os);
      os << ',';
      render_to(v.second(), os);
      os << ')';
      return;
    case ShapeKind::kLex:
      os << '<';
      render_to(v.first(), os);
      os << ',';
      render_to(v.second(), os);
      os << '>';
      return;
    case ShapeKind::kMap: {
      os << '{';
      bool first = true;
      for (const auto& [key, child] : v.as_map()) {
        if (!first) os << ',';
        first = false;
        os << key << ':';
        render_to(child, os);
      }
      os << '}';
      return;
    }
  }
}

}  // namespace

std::string render(const Value& v) {
  std::ostringstream os;
  render_to(v, os);
  return os.str();
}

std::size_t leaf_count(const Value& v) {
  switch (v.kind()) {
    case ShapeKind::kNat:
    case ShapeKind::kBool:
      return 1;
    case ShapeKind::kPowerset:
      return v.as_set().size();
    case ShapeKind::kProduct:
    case ShapeKind::kLex:
      return leaf_count(v.first()) + leaf_count(v.second());
    case ShapeKind::kMap: {
      std::size_t n = 0;
      for (const auto& [key, child] : v.as_map()) n += 1 + leaf_count(child);
      return n;
    }
  }
  return 0;
}

}  // namespace crdtlab::lattice
