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

#include "crdtlab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <set>

namespace crdtlab::scenario {

std::string_view name_of(Topology t) {
  switch (t) {
    case Topology::kClique:
      return "clique";
    case Topology::kLine:
      return "line";
    case Topology::kRing:
      return "ring";
    case Topology::kStar:
      return "star";
  }
  return "?";
}

std::vector<std::uint32_t> neighbors(Topology t, std::uint32_t nodes, std::uint32_t node) {
  std::set<std::uint32_t> out;
  switch (t) {
    case Topology::kClique:
      for (std::uint32_t j = 0; j < nodes; ++j) out.insert(j);
      break;
    case Topology::kLine:
      if (node > 0) out.insert(node - 1);
      if (node + 1 < nodes) out.insert(node + 1);
      break;
    case Topology::kRing:
      if (nodes > 1) {
        out.insert((node + 1) % nodes);
        out.insert((node + nodes - 1) % nodes);
      }
      break;
    case Topology::kStar:
      // node 0 is the hub
      if (node == 0) {
        for (std::uint32_t j = 1; j < nodes; ++j) out.insert(j);
      } else {
        out.insert(0);
      }
      break;
  }
  out.erase(node);
  return {out.begin(), out.end()};
}

namespace {

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> w;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\r') ++j;
    if (j > i) w.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return w;
}

std::string join_words(const std::vector<std::string>& w, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t k = from; k < to; ++k) {
    if (!out.empty()) out += ' ';
    out += w[k];
  }
  return out;
}

template <typename T>
std::optional<T> number(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

class Parser {
 public:
  Scenario run(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      ++line_no;
      auto line = text.substr(pos, nl - pos);
      if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      auto w = words_of(line);
      if (!w.empty()) handle(line_no, w);
      pos = nl + 1;
    }
    if (!header_done_) finish_header(line_no);
    return s_;
  }

 private:
  [[noreturn]] static void fail(int line, const std::string& msg) { throw ParseError(line, msg); }

  void handle(int line, const std::vector<std::string>& w) {
    if (!header_done_ && header(line, w)) return;
    if (!header_done_) finish_header(line);
    command(line, w);
  }

  template <typename T>
  T need_number(int line, const std::vector<std::string>& w) {
    if (w.size() != 2) fail(line, "'" + w[0] + "' expects one value");
    auto v = number<T>(w[1]);
    if (!v) fail(line, "'" + w[0] + "': invalid number '" + w[1] + "'");
    return *v;
  }

  double need_probability(int line, const std::vector<std::string>& w) {
    auto p = need_number<double>(line, w);
    if (!(p >= 0.0 && p <= 1.0)) fail(line, "'" + w[0] + "' must be within [0, 1]");
    return p;
  }

  bool header(int line, const std::vector<std::string>& w) {
    const auto& key = w[0];
    if (key == "name") {
      if (w.size() != 2) fail(line, "'name' expects one value");
      s_.name = w[1];
    } else if (key == "nodes") {
      s_.nodes = need_number<std::uint32_t>(line, w);
      if (s_.nodes == 0) fail(line, "'nodes' must be positive");
      have_nodes_ = true;
    } else if (key == "datatype") {
      if (w.size() != 2) fail(line, "'datatype' expects one value");
      auto d = parse_datatype(w[1]);
      if (!d) fail(line, "unknown datatype '" + w[1] + "'");
      s_.datatype = *d;
      datatype_line_ = line;
    } else if (key == "approach") {
      if (w.size() != 2) fail(line, "'approach' expects one value");
      auto a = parse_approach(w[1]);
      if (!a) fail(line, "unknown approach '" + w[1] + "'");
      s_.approach = *a;
      approach_line_ = line;
    } else if (key == "topology") {
      if (w.size() != 2) fail(line, "'topology' expects one value");
      static constexpr Topology kAll[] = {Topology::kClique, Topology::kLine,
                                          Topology::kRing, Topology::kStar};
      auto it = std::find_if(std::begin(kAll), std::end(kAll),
                             [&](Topology t) { return name_of(t) == w[1]; });
      if (it == std::end(kAll)) fail(line, "unknown topology '" + w[1] + "'");
      s_.topology = *it;
    } else if (key == "seed") {
      s_.seed = need_number<std::uint64_t>(line, w);
    } else if (key == "latency") {
      s_.latency = need_number<std::uint64_t>(line, w);
      if (s_.latency == 0) fail(line, "'latency' must be at least 1");
    } else if (key == "drop") {
      s_.drop = need_probability(line, w);
    } else if (key == "dup") {
      s_.dup = need_probability(line, w);
    } else if (key == "reorder") {
      s_.reorder = need_number<std::uint64_t>(line, w);
    } else if (key == "gossip-interval") {
      s_.gossip_interval = need_number<std::uint64_t>(line, w);
      if (s_.gossip_interval == 0) fail(line, "'gossip-interval' must be positive");
    } else if (key == "full-state-every") {
      s_.full_state_every = need_number<std::uint64_t>(line, w);
    } else if (key == "auction-admin") {
      s_.auction_admin = need_number<std::uint32_t>(line, w);
    } else if (key == "auction-policy") {
      if (w.size() == 2 && w[1] == "stability-wait") {
        s_.auction_policy = {AuctionPolicy::Kind::kStabilityWait, 0};
      } else if (w.size() == 3 && w[1] == "timeout") {
        auto n = number<std::uint64_t>(w[2]);
        if (!n) fail(line, "'auction-policy timeout' expects a tick count");
        s_.auction_policy = {AuctionPolicy::Kind::kTimeout, *n};
      } else {
        fail(line, "'auction-policy' expects 'stability-wait' or 'timeout <ticks>'");
      }
    } else {
      return false;
    }
    return true;
  }

  void finish_header(int line) {
    header_done_ = true;
    if (!have_nodes_) fail(line, "missing 'nodes' header");
    if (datatype_line_ == 0) fail(line, "missing 'datatype' header");
    if (approach_line_ == 0) fail(line, "missing 'approach' header");
    if (!supports(s_.approach, s_.datatype)) {
      fail(std::max(datatype_line_, approach_line_),
           "unsupported combination: approach " + std::string(name_of(s_.approach)) +
               " does not implement " + std::string(name_of(s_.datatype)));
    }
    if (s_.auction_admin >= s_.nodes) fail(line, "'auction-admin' is out of range");
  }

  std::uint32_t node_index(int line, const std::string& text) {
    auto n = number<std::uint32_t>(text);
    if (!n) fail(line, "invalid node index '" + text + "'");
    if (*n >= s_.nodes) {
      fail(line, "node " + text + " out of range (nodes " + std::to_string(s_.nodes) + ")");
    }
    return *n;
  }

  void command(int line, std::vector<std::string> w) {
    Command c;
    c.line = line;
    c.tick = tick_;
    if (w[0] == "at") {
      if (w.size() < 3) fail(line, "'at' expects a tick and a command");
      auto t = number<std::uint64_t>(w[1]);
      if (!t) fail(line, "invalid tick '" + w[1] + "'");
      if (*t < tick_) {
        fail(line, "tick " + w[1] + " is earlier than the previous tick " +
                       std::to_string(tick_));
      }
      c.tick = tick_ = *t;
      w.erase(w.begin(), w.begin() + 2);
    }

    const auto& name = w[0];
    if (name == "node") {
      if (w.size() < 3) fail(line, "'node' expects an index and an operation");
      c.node = node_index(line, w[1]);
      c.has_node = true;
      if (w[2] == "beacon") {
        if (w.size() != 3) fail(line, "'beacon' takes no arguments");
        c.kind = Command::Kind::kBeacon;
      } else {
        c.kind = Command::Kind::kOperation;
        try {
          c.op = parse_operation(join_words(w, 2, w.size()));
        } catch (const std::invalid_argument& e) {
          fail(line, e.what());
        }
      }
    } else if (name == "partition") {
      c.kind = Command::Kind::kPartition;
      auto spec = join_words(w, 1, w.size());
      std::vector<std::uint32_t> group;
      std::string token;
      auto flush_token = [&] {
        if (!token.empty()) group.push_back(node_index(line, token));
        token.clear();
      };
      for (char ch : spec + "|") {
        if (ch == ',' || ch == ' ') {
          flush_token();
        } else if (ch == '|') {
          flush_token();
          if (group.empty()) fail(line, "empty partition group");
          c.groups.push_back(std::move(group));
          group.clear();
        } else {
          token += ch;
        }
      }
    } else if (name == "heal" || name == "flush" || name == "assert-converged") {
      if (w.size() != 1) fail(line, "'" + name + "' takes no arguments");
      c.kind = name == "heal"    ? Command::Kind::kHeal
               : name == "flush" ? Command::Kind::kFlush
                                 : Command::Kind::kAssertConverged;
    } else if (name == "query-all") {
      c.kind = Command::Kind::kQueryAll;
      c.query = query_of(line, join_words(w, 1, w.size()));
    } else if (name == "assert-query") {
      c.kind = Command::Kind::kAssertQuery;
      std::size_t from = 1;
      if (w.size() > 2 && w[1] == "node") {
        c.node = node_index(line, w[2]);
        c.has_node = true;
        from = 3;
      }
      if (w.size() < from + 2) fail(line, "'assert-query' expects a query and a result");
      c.query = query_of(line, join_words(w, from, w.size() - 1));
      c.expected = w.back();
    } else {
      fail(line, "unknown command '" + name + "'");
    }
    check(c);
    s_.commands.push_back(std::move(c));
  }

  Query query_of(int line, const std::string& text) {
    try {
      return parse_query(text);
    } catch (const std::invalid_argument& e) {
      fail(line, e.what());
    }
  }

  void check(const Command& c) {
    try {
      check_command(s_, c);
    } catch (const std::invalid_argument& e) {
      fail(c.line, e.what());
    }
  }

 public:
  static void check_command(const Scenario& s, const Command& c) {
    auto bad = [](const std::string& msg) { throw std::invalid_argument(msg); };
    const bool broadcast = s.approach == Approach::kOp || s.approach == Approach::kPure;
    if (c.has_node && c.node >= s.nodes) bad("node out of range");
    switch (c.kind) {
      case Command::Kind::kOperation:
        if (!valid_for(c.op, s.datatype)) {
          bad("operation '" + render(c.op) + "' is not valid for " +
              std::string(name_of(s.datatype)));
        }
        if (c.op.kind == OpKind::kClosed && c.node != s.auction_admin) {
          bad("'closed' may only be invoked by the auction administrator (node " +
              std::to_string(s.auction_admin) + ")");
        }
        break;
      case Command::Kind::kBeacon:
        if (!broadcast) bad("'beacon' requires the op or pure approach");
        break;
      case Command::Kind::kQueryAll:
      case Command::Kind::kAssertQuery:
        if (!valid_for(c.query, s.datatype)) {
          bad("query '" + render(c.query) + "' is not valid for " +
              std::string(name_of(s.datatype)));
        }
        break;
      case Command::Kind::kPartition: {
        std::set<std::uint32_t> seen;
        if (c.groups.empty()) bad("'partition' expects groups such as 0,1 | 2");
        for (const auto& g : c.groups) {
          for (auto n : g) {
            if (n >= s.nodes) bad("node out of range");
            if (!seen.insert(n).second) {
              bad("node " + std::to_string(n) + " appears in two partition groups");
            }
          }
        }
        break;
      }
      default:
        break;
    }
  }

 private:
  Scenario s_;
  bool header_done_ = false;
  bool have_nodes_ = false;
  int datatype_line_ = 0;
  int approach_line_ = 0;
  std::uint64_t tick_ = 0;
};

}  // namespace

Scenario parse(std::string_view text) { return Parser{}.run(text); }

void validate(const Scenario& s) {
  if (s.nodes == 0) throw ParseError(0, "'nodes' must be positive");
  if (!supports(s.approach, s.datatype)) {
    throw ParseError(0, "unsupported combination: approach " +
                            std::string(name_of(s.approach)) + " does not implement " +
                            std::string(name_of(s.datatype)));
  }
  if (s.auction_admin >= s.nodes) throw ParseError(0, "'auction-admin' is out of range");
  std::uint64_t tick = 0;
  for (const auto& c : s.commands) {
    if (c.tick < tick) throw ParseError(c.line, "ticks must be nondecreasing");
    tick = c.tick;
    try {
      Parser::check_command(s, c);
    } catch (const std::invalid_argument& e) {
      throw ParseError(c.line, e.what());
    }
  }
}

Scenario with_approach(const Scenario& s, Approach a) {
  Scenario out = s;
  out.approach = a;
  // Beacons carry no operation; gossip approaches have nothing to send.
  if (a != Approach::kOp && a != Approach::kPure) {
    std::erase_if(out.commands,
                  [](const Command& c) { return c.kind == Command::Kind::kBeacon; });
  }
  validate(out);
  return out;
}

}  // namespace crdtlab::scenario
