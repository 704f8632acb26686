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

#include "history.hpp"

#include <sstream>
#include <stdexcept>
#include <tuple>

namespace crdtlab::testing {

namespace {

const char* const kElements[] = {"a", "b", "c"};
const char* const kBidders[] = {"Ann", "Bo", "Cy"};

const char* pick(const char* const (&from)[3], sim::Rng& rng) { return from[rng.below(3)]; }

using Clock = std::map<ReplicaId, std::uint64_t>;

bool deliverable(const Clock& at, const Message& m) {
  const auto origin = replica(m.origin);
  for (const auto& [r, n] : m.stamp.clock) {
    const auto have = at.contains(r) ? at.at(r) : 0;
    if (r == origin ? n != have + 1 : n > have) return false;
  }
  return true;
}

}  // namespace

Operation random_operation(Datatype d, std::uint32_t node, sim::Rng& rng) {
  switch (d) {
    case Datatype::kGCounter:
      return Operation::inc();
    case Datatype::kPNCounter:
      return rng.chance(0.6) ? Operation::inc() : Operation::dec();
    case Datatype::kGSet:
      return Operation::add(pick(kElements, rng));
    case Datatype::kORSet:
    case Datatype::kORSetNaive:
      return rng.chance(0.55) ? Operation::add(pick(kElements, rng))
                              : Operation::remove(pick(kElements, rng));
    case Datatype::kMVRegister:
      return Operation::write(pick(kElements, rng));
    case Datatype::kAdvancer:
      return Operation::advance(pick(kElements, rng));
    case Datatype::kAuction:
      if (node == 0) {
        auto roll = rng.below(4);
        if (roll == 0) return Operation::closing();
        if (roll == 1) return Operation::closed();
      }
      return Operation::bid(pick(kBidders, rng), static_cast<std::int64_t>(1 + rng.below(4)));
  }
  return Operation::inc();
}

History random_history(Datatype d, std::uint32_t nodes, std::size_t ops, sim::Rng& rng,
                       bool deliver_all) {
  History h;
  h.datatype = d;
  h.nodes = nodes;
  std::vector<Clock> clocks(nodes);
  std::vector<std::vector<bool>> delivered;  // [message][node]
  bool closing_issued = false;
  bool closed_issued = false;

  auto candidates = [&] {
    std::vector<std::pair<std::uint32_t, std::size_t>> out;
    for (std::size_t m = 0; m < h.messages.size(); ++m) {
      for (std::uint32_t n = 0; n < nodes; ++n) {
        if (!delivered[m][n] && deliverable(clocks[n], h.messages[m])) out.emplace_back(n, m);
      }
    }
    return out;
  };

  std::size_t issued = 0;
  for (;;) {
    auto ready = candidates();
    const bool can_issue = issued < ops;
    if (!can_issue && (ready.empty() || (!deliver_all && rng.chance(0.3)))) break;
    if (can_issue && (ready.empty() || rng.chance(0.5))) {
      const auto node = static_cast<std::uint32_t>(rng.below(nodes));
      auto op = random_operation(d, node, rng);
      // The administrator closes at most once, and only after closing.
      if (op.kind == OpKind::kClosing) {
        if (closing_issued) op = Operation::bid("Ann", 1);
        closing_issued = true;
      } else if (op.kind == OpKind::kClosed) {
        if (!closing_issued || closed_issued) op = Operation::bid("Bo", 2);
        else closed_issued = true;
      }
      auto& clock = clocks[node];
      ++clock[replica(node)];
      h.messages.push_back({node, op, Timestamp::make(clock, replica(node))});
      delivered.emplace_back(nodes, false);
      delivered.back()[node] = true;
      h.steps.push_back({Step::Kind::kIssue, node, h.messages.size() - 1});
      ++issued;
    } else {
      auto [node, m] = ready[rng.below(ready.size())];
      const auto& msg = h.messages[m];
      clocks[node][replica(msg.origin)] = msg.stamp.at(replica(msg.origin));
      delivered[m][node] = true;
      h.steps.push_back({Step::Kind::kDeliver, node, m});
    }
  }
  return h;
}

std::string describe(const History& h) {
  std::ostringstream os;
  os << name_of(h.datatype) << " on " << h.nodes << " nodes:";
  for (const auto& s : h.steps) {
    const auto& m = h.messages[s.message];
    if (s.kind == Step::Kind::kIssue) {
      os << " [n" << s.node << " " << render(m.op) << " " << render(m.stamp) << "]";
    } else {
      os << " [n" << s.node << " <- #" << s.message << "]";
    }
  }
  return os.str();
}

std::vector<Query> probe_queries(Datatype d) {
  auto out = convergence_queries(d);
  if (d == Datatype::kGSet || d == Datatype::kORSet || d == Datatype::kORSetNaive) {
    for (const char* e : kElements) out.push_back(Query{QueryKind::kContains, e});
  }
  return out;
}

// ---------------------------------------------------------------------------

QueryResult ReferenceLog::eval(const Query& q) const {
  using purelog::before;
  auto count = [&](OpKind k) {
    std::int64_t n = 0;
    for (const auto& e : entries_) n += e.op.kind == k ? 1 : 0;
    return n;
  };
  // Arguments of entries of kind k that no entry of a kind in `killers`
  // with the same argument happens after.
  auto surviving = [&](OpKind k, std::initializer_list<OpKind> killers, bool same_arg) {
    std::set<std::string> out;
    for (const auto& e : entries_) {
      if (e.op.kind != k) continue;
      bool killed = false;
      for (const auto& f : entries_) {
        bool kills = false;
        for (auto kk : killers) kills = kills || f.op.kind == kk;
        if (kills && (!same_arg || f.op.arg == e.op.arg) && before(e.timestamp, f.timestamp)) {
          killed = true;
        }
      }
      if (!killed) out.insert(e.op.arg);
    }
    return out;
  };

  switch (datatype_) {
    case Datatype::kGCounter:
      return count(OpKind::kInc);
    case Datatype::kPNCounter:
      return count(OpKind::kInc) - count(OpKind::kDec);
    case Datatype::kGSet:
    case Datatype::kORSet:
    case Datatype::kORSetNaive: {
      // An add survives unless a remove of the same element observed it.
      auto present = datatype_ == Datatype::kGSet
                         ? surviving(OpKind::kAdd, {}, true)
                         : surviving(OpKind::kAdd, {OpKind::kRemove}, true);
      if (q.kind == QueryKind::kContains) return present.contains(q.arg);
      return present;
    }
    case Datatype::kMVRegister:
      return surviving(OpKind::kWrite, {OpKind::kWrite}, false);
    case Datatype::kAuction: {
      bool closed_visible = false;
      for (const auto& e : entries_) closed_visible = closed_visible || e.op.kind == OpKind::kClosed;
      struct Candidate {
        const purelog::LogEntry* entry;
        bool late;
        bool before_closed;
      };
      std::vector<Candidate> bids;
      for (const auto& e : entries_) {
        if (e.op.kind != OpKind::kBid) continue;
        Candidate c{&e, false, false};
        for (const auto& f : entries_) {
          if (f.op.kind == OpKind::kClosing && before(f.timestamp, e.timestamp)) c.late = true;
          if (f.op.kind == OpKind::kClosed && before(e.timestamp, f.timestamp)) {
            c.before_closed = true;
          }
        }
        bids.push_back(c);
      }
      if (q.kind == QueryKind::kWinner) {
        if (!closed_visible) return QueryError{"auction-not-closed"};
        const purelog::LogEntry* best = nullptr;
        auto key = [](const purelog::LogEntry& e) {
          return std::tuple(-e.op.amount, e.timestamp.origin, e.timestamp.sequence());
        };
        for (const auto& c : bids) {
          if (c.late || !c.before_closed) continue;
          if (best == nullptr || key(*c.entry) < key(*best)) best = c.entry;
        }
        if (best == nullptr) return NoWinner{};
        return Bid{best->op.arg, best->op.amount};
      }
      std::set<std::string> late;
      for (const auto& c : bids) {
        if (c.late || (closed_visible && !c.before_closed)) {
          late.insert(render(Bid{c.entry->op.arg, c.entry->op.amount}));
        }
      }
      return late;
    }
    case Datatype::kAdvancer:
      break;
  }
  throw std::invalid_argument("no reference semantics for " + std::string(name_of(datatype_)));
}

// ---------------------------------------------------------------------------

namespace {

class ReferenceDriver final : public Driver {
 public:
  ReferenceDriver(std::uint32_t nodes, Datatype d) : logs_(nodes, ReferenceLog(d)) {}
  std::string name() const override { return "reference"; }
  void step(const History& h, const Step& s) override {
    const auto& m = h.messages[s.message];
    logs_[s.node].add(m.stamp, m.op);
  }
  QueryResult query(std::uint32_t node, const Query& q) const override {
    return logs_[node].eval(q);
  }

 private:
  std::vector<ReferenceLog> logs_;
};

class OpDriver final : public Driver {
 public:
  OpDriver(std::uint32_t nodes, Datatype d) {
    for (std::uint32_t n = 0; n < nodes; ++n) replicas_.push_back(opbased::make_replica(d, replica(n)));
  }
  std::string name() const override { return "op"; }
  void step(const History& h, const Step& s) override {
    if (s.kind == Step::Kind::kIssue) {
      auto msg = replicas_[s.node]->prepare(h.messages[s.message].op);
      replicas_[s.node]->effect(msg);
      prepared_.resize(h.messages.size());
      prepared_[s.message] = std::move(msg);
    } else {
      replicas_[s.node]->effect(*prepared_[s.message]);
    }
  }
  QueryResult query(std::uint32_t node, const Query& q) const override {
    return replicas_[node]->query(q);
  }

 private:
  std::vector<std::unique_ptr<opbased::Replica>> replicas_;
  std::vector<std::optional<opbased::PreparedMessage>> prepared_;
};

class PureDriver final : public Driver {
 public:
  PureDriver(std::uint32_t nodes, Datatype d, bool stability)
      : stability_(stability), clocks_(nodes), tracker_(nodes) {
    for (std::uint32_t n = 0; n < nodes; ++n) replicas_.emplace_back(replica(n), d);
  }
  std::string name() const override { return stability_ ? "pure" : "pure-uncompacted"; }
  void step(const History& h, const Step& s) override {
    const auto& m = h.messages[s.message];
    deliver(s.node, m.stamp, &m.op);
  }
  void finish(const History& h) override {
    if (!stability_) return;
    const auto n = static_cast<std::uint32_t>(replicas_.size());
    (void)h;
    for (std::uint32_t from = 0; from < n; ++from) {
      auto clock = clocks_[from];
      ++clock[replica(from)];
      const auto t = Timestamp::make(clock, replica(from));
      deliver(from, t, nullptr);
      for (std::uint32_t to = 0; to < n; ++to) {
        if (to != from) deliver(to, t, nullptr);
      }
    }
  }
  QueryResult query(std::uint32_t node, const Query& q) const override {
    return replicas_[node].eval(q);
  }
  const std::vector<purelog::PureReplica>& replicas() const { return replicas_; }

 private:
  void deliver(std::uint32_t node, const Timestamp& t, const Operation* op) {
    auto& clock = clocks_[node];
    clock[t.origin] = std::max(clock[t.origin], t.sequence());
    if (op != nullptr) replicas_[node].effect(*op, t);
    if (!stability_) return;
    tracker_.on_deliver(node, t, clock);
    for (const auto& u : tracker_.newly_stable(node)) replicas_[node].stable(u);
  }

  bool stability_;
  std::vector<purelog::PureReplica> replicas_;
  std::vector<Clock> clocks_;
  sim::StabilityTracker tracker_;
};

class StateDriver final : public Driver {
 public:
  StateDriver(std::uint32_t nodes, Datatype d) {
    for (std::uint32_t n = 0; n < nodes; ++n) replicas_.emplace_back(replica(n), d);
  }
  std::string name() const override { return "state"; }
  void step(const History& h, const Step& s) override {
    if (s.kind == Step::Kind::kIssue) {
      replicas_[s.node].mutate(h.messages[s.message].op);
      snapshots_.resize(h.messages.size());
      snapshots_[s.message] = replicas_[s.node].state();
    } else {
      replicas_[s.node].merge(*snapshots_[s.message]);
    }
  }
  QueryResult query(std::uint32_t node, const Query& q) const override {
    return replicas_[node].query(q);
  }

 private:
  std::vector<statebased::StateReplica> replicas_;
  std::vector<std::optional<statebased::CrdtState>> snapshots_;
};

class DeltaDriver final : public Driver {
 public:
  DeltaDriver(std::uint32_t nodes, Datatype d, delta::Mode mode) : mode_(mode) {
    for (std::uint32_t n = 0; n < nodes; ++n) replicas_.emplace_back(replica(n), d, std::vector<ReplicaId>{}, mode);
  }
  std::string name() const override {
    return mode_ == delta::Mode::kImproved ? "delta-improved" : "delta-naive";
  }
  void step(const History& h, const Step& s) override {
    if (s.kind == Step::Kind::kIssue) {
      auto d = replicas_[s.node].mutate(h.messages[s.message].op);
      deltas_.resize(h.messages.size());
      deltas_[s.message] = delta::DeltaGroup{std::move(d), replica(s.node)};
    } else {
      replicas_[s.node].receive(*deltas_[s.message]);
    }
  }
  QueryResult query(std::uint32_t node, const Query& q) const override {
    return replicas_[node].query(q);
  }

 private:
  delta::Mode mode_;
  std::vector<delta::DeltaReplica> replicas_;
  std::vector<std::optional<delta::DeltaGroup>> deltas_;
};

}  // namespace

std::unique_ptr<Driver> reference_driver(std::uint32_t nodes, Datatype d) {
  return std::make_unique<ReferenceDriver>(nodes, d);
}
std::unique_ptr<Driver> op_driver(std::uint32_t nodes, Datatype d) {
  return std::make_unique<OpDriver>(nodes, d);
}
std::unique_ptr<Driver> pure_driver(std::uint32_t nodes, Datatype d) {
  return std::make_unique<PureDriver>(nodes, d, true);
}
std::unique_ptr<Driver> pure_unstable_driver(std::uint32_t nodes, Datatype d) {
  return std::make_unique<PureDriver>(nodes, d, false);
}
std::unique_ptr<Driver> state_driver(std::uint32_t nodes, Datatype d) {
  return std::make_unique<StateDriver>(nodes, d);
}
std::unique_ptr<Driver> delta_driver(std::uint32_t nodes, Datatype d, delta::Mode mode) {
  return std::make_unique<DeltaDriver>(nodes, d, mode);
}

std::vector<std::size_t> pure_unstable_entries(const Driver& d) {
  std::vector<std::size_t> out;
  const auto& pure = dynamic_cast<const PureDriver&>(d);
  for (const auto& r : pure.replicas()) out.push_back(r.log().timestamped.size());
  return out;
}

std::optional<Divergence> replay_and_compare(const History& h,
                                             std::vector<std::unique_ptr<Driver>>& drivers) {
  const auto queries = probe_queries(h.datatype);
  auto check = [&](std::size_t step) -> std::optional<Divergence> {
    for (std::uint32_t n = 0; n < h.nodes; ++n) {
      for (const auto& q : queries) {
        const auto want = drivers.front()->query(n, q);
        for (std::size_t k = 1; k < drivers.size(); ++k) {
          const auto got = drivers[k]->query(n, q);
          if (got != want) {
            return Divergence{step, n, q, render(want), drivers[k]->name(), render(got)};
          }
        }
      }
    }
    return std::nullopt;
  };

  for (std::size_t i = 0; i < h.steps.size(); ++i) {
    for (auto& d : drivers) d->step(h, h.steps[i]);
    if (auto bad = check(i)) return bad;
  }
  for (auto& d : drivers) d->finish(h);
  return check(h.steps.size());
}

std::string describe(const Divergence& d) {
  std::ostringstream os;
  os << "after step " << d.step << ", node " << d.node << ", " << render(d.query)
     << ": reference " << d.expected << ", " << d.driver << " " << d.got;
  return os.str();
}

}  // namespace crdtlab::testing
