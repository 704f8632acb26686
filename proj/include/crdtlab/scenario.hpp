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

#ifndef CRDTLAB_SCENARIO_HPP_
#define CRDTLAB_SCENARIO_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crdtlab/operation.hpp"

// Line-oriented scenario files. Header lines ("nodes 3", "datatype orset",
// ...) come first, then commands, each optionally prefixed by "at <tick>":
//
//   at 1 node 0 add a          invoke an operation at a node
//   at 1 node 2 beacon         empty broadcast (pure mode stability)
//   at 4 partition 0,1 | 2     split the network; unlisted nodes group together
//   at 6 heal
//   flush                      drive everything reachable to quiescence
//   query-all elements
//   assert-converged
//   assert-query [node 1] winner Bob:60
//
// '#' starts a comment. Commands without "at" run at the previous tick.
namespace crdtlab::scenario {

enum class Topology { kClique, kLine, kRing, kStar };

std::string_view name_of(Topology t);

struct AuctionPolicy {
  enum class Kind { kStabilityWait, kTimeout };
  Kind kind = Kind::kStabilityWait;
  std::uint64_t timeout = 0;  // ticks, for kTimeout
};

struct Command {
  enum class Kind {
    kOperation,
    kBeacon,
    kPartition,
    kHeal,
    kFlush,
    kQueryAll,
    kAssertConverged,
    kAssertQuery,
  };

  Kind kind = Kind::kFlush;
  std::uint64_t tick = 0;
  int line = 0;

  std::uint32_t node = 0;  // kOperation, kBeacon, kAssertQuery with has_node
  bool has_node = false;
  Operation op;
  std::vector<std::vector<std::uint32_t>> groups;  // kPartition
  Query query;
  std::string expected;  // kAssertQuery, canonical result text
};

struct Scenario {
  std::string name = "scenario";
  std::uint32_t nodes = 0;
  Datatype datatype = Datatype::kGCounter;
  Approach approach = Approach::kOp;
  Topology topology = Topology::kClique;
  std::uint64_t seed = 1;
  std::uint64_t latency = 1;  // base delay of every transmission
  double drop = 0.0;
  double dup = 0.0;
  std::uint64_t reorder = 0;  // extra random delay in [0, reorder]
  std::uint64_t gossip_interval = 1;
  std::uint64_t full_state_every = 0;
  std::uint32_t auction_admin = 0;
  AuctionPolicy auction_policy;
  std::vector<Command> commands;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

Scenario parse(std::string_view text);

/// Checks header/command consistency for a possibly hand-built scenario
/// (approach supports datatype, node indices, ticks). Throws ParseError.
void validate(const Scenario& s);

/// Same scenario under another approach; throws ParseError if unsupported.
Scenario with_approach(const Scenario& s, Approach a);

/// Neighbors of `node` under the topology.
std::vector<std::uint32_t> neighbors(Topology t, std::uint32_t nodes, std::uint32_t node);

}  // namespace crdtlab::scenario

#endif  // CRDTLAB_SCENARIO_HPP_
