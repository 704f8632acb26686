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

#include "crdtlab/operation.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace crdtlab {

namespace {

constexpr std::array kDatatypes = {
    Datatype::kGCounter,   Datatype::kPNCounter, Datatype::kGSet,
    Datatype::kORSet,      Datatype::kORSetNaive, Datatype::kMVRegister,
    Datatype::kAdvancer,   Datatype::kAuction,
};

constexpr std::array kApproaches = {
    Approach::kOp, Approach::kPure, Approach::kState, Approach::kDeltaNaive,
    Approach::kDeltaImproved,
};

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    if (j > i) words.push_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

void require_args(const std::vector<std::string_view>& w, std::size_t n,
                  std::string_view what) {
  if (w.size() != n + 1) {
    throw std::invalid_argument(std::string(what) + " expects " +
                                std::to_string(n) + " argument(s)");
  }
}

}  // namespace

std::span<const Datatype> all_datatypes() { return kDatatypes; }
std::span<const Approach> all_approaches() { return kApproaches; }

std::string_view name_of(Datatype d) {
  switch (d) {
    case Datatype::kGCounter:
      return "gcounter";
    case Datatype::kPNCounter:
      return "pncounter";
    case Datatype::kGSet:
      return "gset";
    case Datatype::kORSet:
      return "orset";
    case Datatype::kORSetNaive:
      return "orset-naive";
    case Datatype::kMVRegister:
      return "mvreg";
    case Datatype::kAdvancer:
      return "advancer";
    case Datatype::kAuction:
      return "auction";
  }
  return "?";
}

std::string_view name_of(Approach a) {
  switch (a) {
    case Approach::kOp:
      return "op";
    case Approach::kPure:
      return "pure";
    case Approach::kState:
      return "state";
    case Approach::kDeltaNaive:
      return "delta-naive";
    case Approach::kDeltaImproved:
      return "delta-improved";
  }
  return "?";
}

std::optional<Datatype> parse_datatype(std::string_view name) {
  for (auto d : kDatatypes) {
    if (name_of(d) == name) return d;
  }
  return std::nullopt;
}

std::optional<Approach> parse_approach(std::string_view name) {
  for (auto a : kApproaches) {
    if (name_of(a) == name) return a;
  }
  return std::nullopt;
}

bool supports(Approach a, Datatype d) {
  switch (d) {
    case Datatype::kGCounter:
    case Datatype::kPNCounter:
    case Datatype::kGSet:
    case Datatype::kORSet:
      return true;
    case Datatype::kORSetNaive:
    case Datatype::kMVRegister:
      return a == Approach::kOp;
    case Datatype::kAdvancer:
      return a == Approach::kState || a == Approach::kDeltaNaive ||
             a == Approach::kDeltaImproved;
    case Datatype::kAuction:
      return a == Approach::kPure;
  }
  return false;
}

std::string render(const Operation& op) {
  switch (op.kind) {
    case OpKind::kInc:
      return "inc";
    case OpKind::kDec:
      return "dec";
    case OpKind::kAdd:
      return "add " + op.arg;
    case OpKind::kRemove:
      return "remove " + op.arg;
    case OpKind::kWrite:
      return "write " + op.arg;
    case OpKind::kAdvance:
      return "advance " + op.arg;
    case OpKind::kBid:
      return "bid " + op.arg + " " + std::to_string(op.amount);
    case OpKind::kClosing:
      return "closing";
    case OpKind::kClosed:
      return "closed";
  }
  return "?";
}

std::size_t leaf_count(const Operation& op) {
  switch (op.kind) {
    case OpKind::kInc:
    case OpKind::kDec:
    case OpKind::kClosing:
    case OpKind::kClosed:
      return 0;
    case OpKind::kBid:
      return 2;
    default:
      return 1;
  }
}

Operation parse_operation(std::string_view text) {
  auto w = split_words(text);
  if (w.empty()) throw std::invalid_argument("empty operation");
  const auto name = w[0];
  if (name == "inc") {
    require_args(w, 0, name);
    return Operation::inc();
  }
  if (name == "dec") {
    require_args(w, 0, name);
    return Operation::dec();
  }
  if (name == "add") {
    require_args(w, 1, name);
    return Operation::add(std::string(w[1]));
  }
  if (name == "remove") {
    require_args(w, 1, name);
    return Operation::remove(std::string(w[1]));
  }
  if (name == "write") {
    require_args(w, 1, name);
    return Operation::write(std::string(w[1]));
  }
  if (name == "advance") {
    require_args(w, 1, name);
    return Operation::advance(std::string(w[1]));
  }
  if (name == "bid") {
    require_args(w, 2, name);
    std::int64_t amount = 0;
    auto [p, ec] = std::from_chars(w[2].data(), w[2].data() + w[2].size(), amount);
    if (ec != std::errc{} || p != w[2].data() + w[2].size() || amount < 0) {
      throw std::invalid_argument("bid amount must be a non-negative integer");
    }
    return Operation::bid(std::string(w[1]), amount);
  }
  if (name == "closing") {
    require_args(w, 0, name);
    return Operation::closing();
  }
  if (name == "closed") {
    require_args(w, 0, name);
    return Operation::closed();
  }
  throw std::invalid_argument("unknown operation '" + std::string(name) + "'");
}

bool valid_for(const Operation& op, Datatype d) {
  switch (d) {
    case Datatype::kGCounter:
      return op.kind == OpKind::kInc;
    case Datatype::kPNCounter:
      return op.kind == OpKind::kInc || op.kind == OpKind::kDec;
    case Datatype::kGSet:
      return op.kind == OpKind::kAdd;
    case Datatype::kORSet:
    case Datatype::kORSetNaive:
      return op.kind == OpKind::kAdd || op.kind == OpKind::kRemove;
    case Datatype::kMVRegister:
      return op.kind == OpKind::kWrite;
    case Datatype::kAdvancer:
      return op.kind == OpKind::kAdvance;
    case Datatype::kAuction:
      return op.kind == OpKind::kBid || op.kind == OpKind::kClosing ||
             op.kind == OpKind::kClosed;
  }
  return false;
}

std::string render(const Query& q) {
  switch (q.kind) {
    case QueryKind::kValue:
      return "value";
    case QueryKind::kElements:
      return "elements";
    case QueryKind::kContains:
      return "contains " + q.arg;
    case QueryKind::kRead:
      return "read";
    case QueryKind::kAhead:
      return "ahead";
    case QueryKind::kWinner:
      return "winner";
    case QueryKind::kLate:
      return "late";
  }
  return "?";
}

Query parse_query(std::string_view text) {
  auto w = split_words(text);
  if (w.empty()) throw std::invalid_argument("empty query");
  const auto name = w[0];
  if (name == "contains") {
    require_args(w, 1, name);
    return Query{QueryKind::kContains, std::string(w[1])};
  }
  static constexpr std::pair<std::string_view, QueryKind> kNullary[] = {
      {"value", QueryKind::kValue}, {"elements", QueryKind::kElements},
      {"read", QueryKind::kRead},   {"ahead", QueryKind::kAhead},
      {"winner", QueryKind::kWinner}, {"late", QueryKind::kLate},
  };
  for (const auto& [n, k] : kNullary) {
    if (n == name) {
      require_args(w, 0, name);
      return Query{k, {}};
    }
  }
  throw std::invalid_argument("unknown query '" + std::string(name) + "'");
}

bool valid_for(const Query& q, Datatype d) {
  switch (d) {
    case Datatype::kGCounter:
    case Datatype::kPNCounter:
      return q.kind == QueryKind::kValue;
    case Datatype::kGSet:
    case Datatype::kORSet:
    case Datatype::kORSetNaive:
      return q.kind == QueryKind::kElements || q.kind == QueryKind::kContains;
    case Datatype::kMVRegister:
      return q.kind == QueryKind::kRead;
    case Datatype::kAdvancer:
      return q.kind == QueryKind::kAhead;
    case Datatype::kAuction:
      return q.kind == QueryKind::kWinner || q.kind == QueryKind::kLate;
  }
  return false;
}

std::vector<Query> convergence_queries(Datatype d) {
  switch (d) {
    case Datatype::kGCounter:
    case Datatype::kPNCounter:
      return {Query{QueryKind::kValue, {}}};
    case Datatype::kGSet:
    case Datatype::kORSet:
    case Datatype::kORSetNaive:
      return {Query{QueryKind::kElements, {}}};
    case Datatype::kMVRegister:
      return {Query{QueryKind::kRead, {}}};
    case Datatype::kAdvancer:
      return {Query{QueryKind::kAhead, {}}};
    case Datatype::kAuction:
      return {Query{QueryKind::kWinner, {}}, Query{QueryKind::kLate, {}}};
  }
  return {};
}

std::string render(const Bid& b) {
  return b.name + ":" + std::to_string(b.amount);
}

std::string render(const QueryResult& r) {
  struct Visitor {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::set<std::string>& s) const {
      std::string out = "{";
      bool first = true;
      for (const auto& e : s) {
        if (!first) out += ',';
        first = false;
        out += e;
      }
      return out + "}";
    }
    std::string operator()(const Bid& b) const { return render(b); }
    std::string operator()(const NoWinner&) const { return "none"; }
    std::string operator()(const QueryError& e) const { return "error:" + e.code; }
  };
  return std::visit(Visitor{}, r);
}

}  // namespace crdtlab
