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

#include "scenario_gen.hpp"

#include <sstream>

#include "history.hpp"

namespace crdtlab::testing {

using scenario::Command;

scenario::Scenario random_scenario(const ScenarioShape& shape, sim::Rng& rng) {
  scenario::Scenario s;
  s.name = "random";
  s.nodes = shape.nodes;
  s.datatype = shape.datatype;
  s.approach = shape.approach;
  s.topology = shape.topology;
  s.seed = shape.seed;
  s.drop = shape.drop;
  s.dup = shape.dup;
  s.reorder = shape.reorder;

  std::uint64_t tick = 0;
  const std::size_t split_at = shape.partition ? shape.ops / 3 : shape.ops + 1;
  const std::size_t heal_at = shape.partition ? 2 * shape.ops / 3 : shape.ops + 1;
  int line = 1;
  for (std::size_t i = 0; i < shape.ops; ++i) {
    tick += rng.below(3);
    if (i == split_at) {
      Command c;
      c.kind = Command::Kind::kPartition;
      c.tick = tick;
      c.line = line++;
      std::vector<std::uint32_t> left, right;
      for (std::uint32_t n = 0; n < shape.nodes; ++n) (n % 2 == 0 ? left : right).push_back(n);
      c.groups = {left, right};
      s.commands.push_back(c);
    }
    if (i == heal_at) {
      Command c;
      c.kind = Command::Kind::kHeal;
      c.tick = tick;
      c.line = line++;
      s.commands.push_back(c);
    }
    Command c;
    c.kind = Command::Kind::kOperation;
    c.tick = tick;
    c.line = line++;
    c.node = static_cast<std::uint32_t>(rng.below(shape.nodes));
    c.has_node = true;
    c.op = random_operation(shape.datatype, c.node, rng);
    if (c.op.kind == OpKind::kClosed && c.node != s.auction_admin) c.op = Operation::closing();
    s.commands.push_back(c);
  }
  tick += 1;
  for (auto kind : {Command::Kind::kHeal, Command::Kind::kFlush, Command::Kind::kAssertConverged}) {
    Command c;
    c.kind = kind;
    c.tick = tick;
    c.line = line++;
    s.commands.push_back(c);
  }
  scenario::validate(s);
  return s;
}

std::string to_text(const scenario::Scenario& s) {
  std::ostringstream os;
  os << "name " << s.name << "\nnodes " << s.nodes << "\ndatatype " << name_of(s.datatype)
     << "\napproach " << name_of(s.approach) << "\ntopology " << scenario::name_of(s.topology)
     << "\nseed " << s.seed << "\nlatency " << s.latency << "\ndrop " << s.drop << "\ndup "
     << s.dup << "\nreorder " << s.reorder << "\ngossip-interval " << s.gossip_interval
     << "\nfull-state-every " << s.full_state_every << '\n';
  for (const auto& c : s.commands) {
    os << "at " << c.tick << ' ';
    switch (c.kind) {
      case Command::Kind::kOperation:
        os << "node " << c.node << ' ' << render(c.op);
        break;
      case Command::Kind::kBeacon:
        os << "node " << c.node << " beacon";
        break;
      case Command::Kind::kPartition:
        for (std::size_t g = 0; g < c.groups.size(); ++g) {
          if (g > 0) os << " |";
          os << (g == 0 ? "partition " : " ");
          for (std::size_t k = 0; k < c.groups[g].size(); ++k) {
            os << (k > 0 ? "," : "") << c.groups[g][k];
          }
        }
        break;
      case Command::Kind::kHeal:
        os << "heal";
        break;
      case Command::Kind::kFlush:
        os << "flush";
        break;
      case Command::Kind::kQueryAll:
        os << "query-all " << render(c.query);
        break;
      case Command::Kind::kAssertConverged:
        os << "assert-converged";
        break;
      case Command::Kind::kAssertQuery:
        os << "assert-query ";
        if (c.has_node) os << "node " << c.node << ' ';
        os << render(c.query) << ' ' << c.expected;
        break;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace crdtlab::testing
