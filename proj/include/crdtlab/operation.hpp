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

#ifndef CRDTLAB_OPERATION_HPP_
#define CRDTLAB_OPERATION_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Datatype-neutral vocabulary shared by every replication approach: which
// datatype, which operation, which query, and what a query answers.
namespace crdtlab {

enum class Datatype {
  kGCounter,
  kPNCounter,
  kGSet,
  kORSet,
  kORSetNaive,
  kMVRegister,
  kAdvancer,
  kAuction,
};

enum class Approach { kOp, kPure, kState, kDeltaNaive, kDeltaImproved };

std::span<const Datatype> all_datatypes();
std::span<const Approach> all_approaches();

std::string_view name_of(Datatype d);
std::string_view name_of(Approach a);
std::optional<Datatype> parse_datatype(std::string_view name);
std::optional<Approach> parse_approach(std::string_view name);

bool supports(Approach a, Datatype d);

enum class OpKind { kInc, kDec, kAdd, kRemove, kWrite, kAdvance, kBid, kClosing, kClosed };

struct Operation {
  OpKind kind = OpKind::kInc;
  std::string arg;          // element, value, key or bidder name
  std::int64_t amount = 0;  // bid amount

  static Operation inc() { return {OpKind::kInc, {}, 0}; }
  static Operation dec() { return {OpKind::kDec, {}, 0}; }
  static Operation add(std::string e) { return {OpKind::kAdd, std::move(e), 0}; }
  static Operation remove(std::string e) {
    return {OpKind::kRemove, std::move(e), 0};
  }
  static Operation write(std::string v) {
    return {OpKind::kWrite, std::move(v), 0};
  }
  static Operation advance(std::string k) {
    return {OpKind::kAdvance, std::move(k), 0};
  }
  static Operation bid(std::string name, std::int64_t amount) {
    return {OpKind::kBid, std::move(name), amount};
  }
  static Operation closing() { return {OpKind::kClosing, {}, 0}; }
  static Operation closed() { return {OpKind::kClosed, {}, 0}; }

  friend bool operator==(const Operation&, const Operation&) = default;
};

/// Text form used in scenarios and traces, e.g. "add a", "bid Bob 60".
std::string render(const Operation& op);
/// Scalar leaves of the operation itself (tag excluded).
std::size_t leaf_count(const Operation& op);

/// Parses "<name> [args...]". Throws std::invalid_argument.
Operation parse_operation(std::string_view text);
bool valid_for(const Operation& op, Datatype d);

enum class QueryKind { kValue, kElements, kContains, kRead, kAhead, kWinner, kLate };

struct Query {
  QueryKind kind = QueryKind::kValue;
  std::string arg;

  friend bool operator==(const Query&, const Query&) = default;
};

std::string render(const Query& q);
Query parse_query(std::string_view text);
bool valid_for(const Query& q, Datatype d);

/// Queries used to decide whether replicas agree.
std::vector<Query> convergence_queries(Datatype d);

struct Bid {
  std::string name;
  std::int64_t amount = 0;

  friend auto operator<=>(const Bid&, const Bid&) = default;
};

struct QueryError {
  std::string code;  // e.g. "auction-not-closed"

  friend bool operator==(const QueryError&, const QueryError&) = default;
};

/// Answer to a query: integer, boolean, set of strings, a single bid, the
/// absence of a winner, or a query-level error.
struct NoWinner {
  friend bool operator==(const NoWinner&, const NoWinner&) = default;
};

using QueryResult =
    std::variant<std::int64_t, bool, std::set<std::string>, Bid, NoWinner, QueryError>;

std::string render(const QueryResult& r);

std::string render(const Bid& b);

}  // namespace crdtlab

#endif  // CRDTLAB_OPERATION_HPP_
