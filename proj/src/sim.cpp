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

#include "crdtlab/sim.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <memory>
#include <queue>
#include <sstream>
#include <tuple>

#include "crdtlab/delta.hpp"
#include "crdtlab/opbased.hpp"
#include "crdtlab/statebased.hpp"

namespace crdtlab::sim {

namespace {

std::uint64_t at(const VectorClock& c, ReplicaId r) {
  auto it = c.find(r);
  return it == c.end() ? 0 : it->second;
}

bool clock_leq(const VectorClock& a, const VectorClock& b) {
  return std::all_of(a.begin(), a.end(),
                     [&](const auto& kv) { return kv.second <= at(b, kv.first); });
}

}  // namespace

// ---------------------------------------------------------------------------
// CausalBroadcast

CausalBroadcast::CausalBroadcast(std::uint32_t nodes)
    : clocks_(nodes), buffered_(nodes), seen_(nodes) {}

std::size_t CausalBroadcast::broadcast(std::uint32_t origin) {
  auto& c = clocks_[origin];
  c[replica(origin)] += 1;
  stamps_.push_back(Timestamp::make(c, replica(origin)));
  const std::size_t id = stamps_.size() - 1;
  seen_[origin].insert(id);
  return id;
}

bool CausalBroadcast::arrive(std::uint32_t node, std::size_t message) {
  if (!seen_[node].insert(message).second) return false;
  buffered_[node].insert(message);
  return true;
}

std::optional<std::size_t> CausalBroadcast::next_deliverable(std::uint32_t node) const {
  const auto& clock = clocks_[node];
  std::optional<std::size_t> best;
  for (auto m : buffered_[node]) {
    const auto& t = stamps_[m];
    bool ok = t.sequence() == at(clock, t.origin) + 1;
    for (const auto& [r, n] : t.clock) {
      if (r != t.origin && n > at(clock, r)) ok = false;
    }
    if (ok && (!best || purelog::TimestampOrder{}(t, stamps_[*best]))) best = m;
  }
  return best;
}

void CausalBroadcast::deliver(std::uint32_t node, std::size_t message) {
  buffered_[node].erase(message);
  const auto& t = stamps_[message];
  clocks_[node][t.origin] = t.sequence();
}

bool CausalBroadcast::delivered(std::uint32_t node, std::size_t message) const {
  const auto& t = stamps_[message];
  return t.sequence() <= at(clocks_[node], t.origin);
}

// ---------------------------------------------------------------------------
// StabilityTracker

StabilityTracker::StabilityTracker(std::uint32_t nodes)
    : last_(nodes, std::vector<VectorClock>(nodes)), unstable_(nodes) {}

void StabilityTracker::on_deliver(std::uint32_t node, const Timestamp& t,
                                  const VectorClock& node_clock) {
  last_[node][index_of(t.origin)] = t.clock;
  last_[node][node] = node_clock;
  unstable_[node].insert(t);
}

bool StabilityTracker::is_stable(std::uint32_t node, const Timestamp& t) const {
  return std::all_of(last_[node].begin(), last_[node].end(),
                     [&](const VectorClock& row) { return clock_leq(t.clock, row); });
}

std::vector<Timestamp> StabilityTracker::newly_stable(std::uint32_t node) {
  std::vector<Timestamp> out;
  for (auto it = unstable_[node].begin(); it != unstable_[node].end();) {
    if (is_stable(node, *it)) {
      out.push_back(*it);
      it = unstable_[node].erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Traces

std::string render(const TraceEvent& e) {
  using K = TraceEvent::Kind;
  std::ostringstream os;
  os << "t=" << e.time << ' ';
  switch (e.kind) {
    case K::kInvoke:
      os << "invoke node=" << e.node << " op=" << e.detail;
      break;
    case K::kBroadcast:
      os << "bcast node=" << e.node << " ts=" << purelog::render(*e.stamp);
      break;
    case K::kDeliver:
      os << "deliver node=" << e.node << " from=" << e.peer
         << " ts=" << purelog::render(*e.stamp) << " op=" << e.detail;
      break;
    case K::kStable:
      os << "stable node=" << e.node << " ts=" << purelog::render(*e.stamp);
      break;
    case K::kSend:
      os << "send " << e.node << "->" << e.peer << " leaves=" << e.detail;
      break;
    case K::kReceive:
      os << "recv " << e.node << "<-" << e.peer;
      break;
    case K::kDrop:
      os << "drop " << e.node << "->" << e.peer;
      break;
    case K::kHold:
      os << "hold " << e.node << "->" << e.peer;
      break;
    case K::kPartition:
      os << "partition " << e.detail;
      break;
    case K::kHeal:
      os << "heal";
      break;
    case K::kFlush:
      os << "flush";
      break;
    case K::kQuery:
      os << "query node=" << e.node << ' ' << e.detail;
      break;
    case K::kAssert:
      os << "assert " << e.detail;
      break;
    case K::kWarning:
      os << "warning " << e.detail;
      break;
  }
  return os.str();
}

bool causal_order_check(const Trace& trace) {
  std::map<std::uint32_t, VectorClock> delivered;
  for (const auto& e : trace) {
    if (e.kind != TraceEvent::Kind::kDeliver || !e.stamp) continue;
    auto& vc = delivered[e.node];
    const auto& t = *e.stamp;
    if (t.sequence() != at(vc, t.origin) + 1) return false;
    for (const auto& [r, n] : t.clock) {
      if (r != t.origin && n > at(vc, r)) return false;
    }
    vc[t.origin] = t.sequence();
  }
  return true;
}

bool stability_check(const Trace& trace) {
  std::map<std::uint32_t, std::vector<Timestamp>> stable;
  for (const auto& e : trace) {
    if (!e.stamp) continue;
    if (e.kind == TraceEvent::Kind::kStable) {
      stable[e.node].push_back(*e.stamp);
    } else if (e.kind == TraceEvent::Kind::kDeliver) {
      for (const auto& s : stable[e.node]) {
        // everything delivered later must be causally after s
        if (!purelog::before(s, *e.stamp)) return false;
      }
    }
  }
  return true;
}

bool RunResult::passed() const {
  return std::all_of(asserts.begin(), asserts.end(),
                     [](const AssertRecord& a) { return a.passed; });
}

// ---------------------------------------------------------------------------
// Engines

namespace {

using scenario::Command;
using scenario::Scenario;

std::uint32_t lag_bucket(std::uint64_t lag) {
  return static_cast<std::uint32_t>(std::bit_width(lag + 1) - 1);
}

class Engine {
 public:
  Engine(const Scenario& s, const RunOptions& options)
      : s_(s), options_(options), rng_(s.seed), group_(s.nodes, 0) {}
  virtual ~Engine() = default;

  RunResult run() {
    next_gossip_ = s_.gossip_interval;
    note_convergence();
    for (const auto& c : s_.commands) {
      advance_to(c.tick);
      now_ = std::max(now_, c.tick);
      execute(c);
      step_done();
    }
    drain();
    finish();
    return std::move(result_);
  }

 protected:
  // approach-specific hooks
  virtual void invoke(std::uint32_t node, const Operation& op) = 0;
  virtual void beacon(std::uint32_t) {}
  virtual void gossip_round() {}
  virtual bool gossips() const { return false; }
  virtual void flush() = 0;
  virtual void reachability_changed() {}
  virtual QueryResult query(std::uint32_t node, const Query& q) const = 0;
  virtual NodeFinal final_of(std::uint32_t node) const = 0;
  virtual bool states_equal(std::string& detail) const = 0;
  virtual void after_step() {}

  std::uint32_t nodes() const { return s_.nodes; }

  void schedule(std::uint64_t time, int cls, std::function<void()> fire) {
    queue_.push(Event{time, cls, seq_++, std::move(fire)});
  }

  // Runs every queued event (gossip excluded) until none remain.
  void drain() {
    while (!queue_.empty()) pop_and_fire();
    realign_gossip();
  }

  bool reachable(std::uint32_t a, std::uint32_t b) const { return group_[a] == group_[b]; }

  void trace(TraceEvent e) {
    e.time = now_;
    if (options_.keep_trace) result_.trace.push_back(std::move(e));
  }

  std::uint64_t delay() { return s_.latency + rng_.below(s_.reorder + 1); }

  void count_message(std::uint64_t leaves, std::uint64_t metadata = 0) {
    auto& m = result_.metrics;
    if (in_flush_) {
      m.flush_messages += 1;
      m.flush_payload += leaves;
    } else {
      m.messages += 1;
      m.payload += leaves;
      m.metadata += metadata;
      round_payload_ += leaves;
    }
  }

  const Scenario& s_;
  RunOptions options_;
  Rng rng_;
  std::uint64_t now_ = 0;
  std::vector<std::uint32_t> group_;
  RunResult result_;
  bool in_flush_ = false;

 private:
  struct Event {
    std::uint64_t time;
    int cls;  // 0 commands (not queued), 1 arrivals and timers, 2 gossip
    std::uint64_t seq;
    std::function<void()> fire;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return std::tie(a.time, a.cls, a.seq) > std::tie(b.time, b.cls, b.seq);
    }
  };

  void pop_and_fire() {
    Event e = queue_.top();
    queue_.pop();
    now_ = std::max(now_, e.time);
    e.fire();
    step_done();
  }

  void realign_gossip() {
    if (next_gossip_ <= now_) {
      next_gossip_ = (now_ / s_.gossip_interval + 1) * s_.gossip_interval;
    }
  }

  // Processes events and gossip rounds strictly before `tick`.
  void advance_to(std::uint64_t tick) {
    for (;;) {
      const bool have_event = !queue_.empty() && queue_.top().time < tick;
      const bool have_gossip = gossips() && next_gossip_ < tick;
      if (have_gossip && (!have_event || next_gossip_ < queue_.top().time)) {
        now_ = next_gossip_;
        round_payload_ = 0;
        gossip_round();
        result_.metrics.payload_series.push_back(round_payload_);
        next_gossip_ += s_.gossip_interval;
        step_done();
      } else if (have_event) {
        pop_and_fire();
      } else {
        break;
      }
    }
  }

  void step_done() {
    after_step();
    note_convergence();
  }

  void note_convergence() {
    const auto qs = convergence_queries(s_.datatype);
    bool agree = true;
    for (const auto& q : qs) {
      const auto first = query(0, q);
      for (std::uint32_t n = 1; n < nodes() && agree; ++n) agree = query(n, q) == first;
    }
    if (!agree) {
      converged_since_.reset();
    } else if (!converged_since_) {
      converged_since_ = now_;
    }
  }

  void execute(const Command& c) {
    using K = Command::Kind;
    switch (c.kind) {
      case K::kOperation:
        invoke(c.node, c.op);
        break;
      case K::kBeacon:
        beacon(c.node);
        break;
      case K::kPartition: {
        std::string text;
        std::fill(group_.begin(), group_.end(), 0);
        for (std::size_t g = 0; g < c.groups.size(); ++g) {
          if (g > 0) text += " | ";
          for (std::size_t k = 0; k < c.groups[g].size(); ++k) {
            if (k > 0) text += ',';
            text += std::to_string(c.groups[g][k]);
            group_[c.groups[g][k]] = static_cast<std::uint32_t>(g + 1);
          }
        }
        trace({TraceEvent::Kind::kPartition, 0, 0, 0, std::nullopt, text});
        reachability_changed();
        break;
      }
      case K::kHeal:
        std::fill(group_.begin(), group_.end(), 0);
        trace({TraceEvent::Kind::kHeal, 0, 0, 0, std::nullopt, {}});
        reachability_changed();
        break;
      case K::kFlush:
        trace({TraceEvent::Kind::kFlush, 0, 0, 0, std::nullopt, {}});
        in_flush_ = true;
        flush();
        in_flush_ = false;
        realign_gossip();
        break;
      case K::kQueryAll: {
        QueryRecord rec{c.line, now_, c.query, {}};
        for (std::uint32_t n = 0; n < nodes(); ++n) {
          rec.results.push_back(query(n, c.query));
          trace({TraceEvent::Kind::kQuery, 0, n, 0, std::nullopt,
                 render(c.query) + "=" + render(rec.results.back())});
        }
        result_.queries.push_back(std::move(rec));
        break;
      }
      case K::kAssertConverged:
        assert_converged(c);
        break;
      case K::kAssertQuery:
        assert_query(c);
        break;
    }
  }

  void assert_converged(const Command& c) {
    AssertRecord rec{c.line, now_, "assert-converged", true, {}};
    for (const auto& q : convergence_queries(s_.datatype)) {
      const auto first = query(0, q);
      for (std::uint32_t n = 1; n < nodes() && rec.passed; ++n) {
        const auto other = query(n, q);
        if (other != first) {
          rec.passed = false;
          rec.detail = render(q) + ": node 0 has " + render(first) + ", node " +
                       std::to_string(n) + " has " + render(other);
        }
      }
    }
    if (rec.passed) {
      std::string why;
      if (!states_equal(why)) {
        rec.passed = false;
        rec.detail = why;
      }
    }
    record(std::move(rec));
  }

  void assert_query(const Command& c) {
    AssertRecord rec{c.line, now_, "assert-query " + render(c.query) + " " + c.expected,
                     true, {}};
    for (std::uint32_t n = 0; n < nodes(); ++n) {
      if (c.has_node && n != c.node) continue;
      const auto got = render(query(n, c.query));
      if (got != c.expected && rec.passed) {
        rec.passed = false;
        rec.detail = "node " + std::to_string(n) + " has " + got;
      }
    }
    record(std::move(rec));
  }

  void record(AssertRecord rec) {
    trace({TraceEvent::Kind::kAssert, 0, 0, 0, std::nullopt,
           rec.what + (rec.passed ? " ok" : " FAILED: " + rec.detail)});
    result_.asserts.push_back(std::move(rec));
  }

  void finish() {
    result_.metrics.end_time = now_;
    result_.metrics.convergence_tick = converged_since_;
    for (std::uint32_t n = 0; n < nodes(); ++n) result_.finals.push_back(final_of(n));
  }

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_gossip_ = 1;
  std::uint64_t round_payload_ = 0;
  std::optional<std::uint64_t> converged_since_;
};

// Op-based and pure op-based: reliable causal broadcast (tagged, with
// stability, for pure). Lost copies are retransmitted; messages across a
// partition are held until the nodes can reach each other again.
class BroadcastEngine final : public Engine {
 public:
  BroadcastEngine(const Scenario& s, const RunOptions& o)
      : Engine(s, o),
        pure_mode_(s.approach == Approach::kPure),
        layer_(s.nodes),
        stability_(s.nodes),
        closings_(s.nodes) {
    for (std::uint32_t n = 0; n < s.nodes; ++n) {
      if (pure_mode_) {
        pure_.emplace_back(replica(n), s.datatype);
      } else {
        op_.push_back(opbased::make_replica(s.datatype, replica(n)));
      }
    }
  }

 private:
  struct Message {
    std::optional<opbased::PreparedMessage> prepared;
    std::optional<Operation> op;  // pure payload; neither set for a beacon
    std::uint64_t sent = 0;
  };

  struct Held {
    std::uint32_t from;
    std::uint32_t to;
    std::size_t id;
  };

  void invoke(std::uint32_t node, const Operation& op) override {
    trace({TraceEvent::Kind::kInvoke, 0, node, 0, std::nullopt, render(op)});
    if (pure_mode_ && op.kind == OpKind::kClosed && !closing_stable_at(node)) {
      std::optional<std::uint64_t> deadline;
      if (s_.auction_policy.kind == scenario::AuctionPolicy::Kind::kTimeout) {
        deadline = now_ + s_.auction_policy.timeout;
        schedule(*deadline, 1, [] {});
      }
      deferred_.push_back({node, deadline});
      return;
    }
    broadcast(node, op);
  }

  void beacon(std::uint32_t node) override { broadcast(node, std::nullopt); }

  void broadcast(std::uint32_t node, const std::optional<Operation>& op) {
    Message msg;
    msg.sent = now_;
    if (op) {
      ++op_broadcasts_;
      if (pure_mode_) {
        msg.op = purelog::prepare(*op);
      } else {
        msg.prepared = op_[node]->prepare(*op);
      }
    }
    const std::size_t id = layer_.broadcast(node);
    messages_.push_back(std::move(msg));
    const auto& t = layer_.stamp(id);
    index_.emplace(t, id);
    trace({TraceEvent::Kind::kBroadcast, 0, node, 0, t, {}});
    apply(node, id);
    for (std::uint32_t to = 0; to < nodes(); ++to) {
      if (to == node) continue;
      count_message(payload_leaves(id), t.clock.size());
      if (!reachable(node, to)) {
        hold(node, to, id);
      } else {
        send_copy(node, to, id);
      }
    }
  }

  std::uint64_t payload_leaves(std::size_t id) const {
    const auto& m = messages_[id];
    if (m.prepared) return opbased::leaf_count(*m.prepared);
    if (m.op) return std::max<std::size_t>(1, leaf_count(*m.op));
    return 0;
  }

  void hold(std::uint32_t from, std::uint32_t to, std::size_t id) {
    trace({TraceEvent::Kind::kHold, 0, from, to, std::nullopt, {}});
    held_.push_back({from, to, id});
  }

  void send_copy(std::uint32_t from, std::uint32_t to, std::size_t id) {
    // A lost copy costs one retransmission timeout; delivery stays reliable.
    constexpr double kMaxLoss = 0.9;
    std::uint64_t when = now_;
    while (rng_.chance(std::min(s_.drop, kMaxLoss))) {
      result_.metrics.dropped += 1;
      when += 2 * s_.latency + s_.reorder;
    }
    schedule(when + delay(), 1, [this, from, to, id] { arrive(from, to, id); });
    if (rng_.chance(s_.dup)) {
      result_.metrics.duplicated += 1;
      schedule(when + delay(), 1, [this, from, to, id] { arrive(from, to, id); });
    }
  }

  void arrive(std::uint32_t from, std::uint32_t to, std::size_t id) {
    if (!reachable(from, to)) {
      if (!layer_.delivered(to, id)) hold(from, to, id);
      return;
    }
    if (!layer_.arrive(to, id)) return;  // duplicate
    while (auto next = layer_.next_deliverable(to)) apply(to, *next);
  }

  void apply(std::uint32_t node, std::size_t id) {
    const auto& t = layer_.stamp(id);
    const auto origin = index_of(t.origin);
    if (origin != node) layer_.deliver(node, id);
    const auto& msg = messages_[id];
    std::string what = "beacon";
    if (msg.prepared) {
      op_[node]->effect(*msg.prepared);
      what = opbased::render(*msg.prepared);
    } else if (msg.op) {
      pure_[node].effect(*msg.op, t);
      what = render(*msg.op);
      if (msg.op->kind == OpKind::kClosing) closings_[node].push_back(t);
    }
    trace({TraceEvent::Kind::kDeliver, 0, node, origin, t, what});
    if (!pure_mode_) return;
    stability_.on_deliver(node, t, layer_.clock(node));
    for (const auto& s : stability_.newly_stable(node)) {
      pure_[node].stable(s);
      trace({TraceEvent::Kind::kStable, 0, node, 0, s, {}});
      auto& m = result_.metrics;
      m.stable_notifications += 1;
      const auto& src = messages_[index_.at(s)];
      if (src.op) m.stability_lag[lag_bucket(now_ - src.sent)] += 1;
    }
  }

  void reachability_changed() override {
    std::vector<Held> still;
    auto held = std::move(held_);
    held_.clear();
    for (const auto& h : held) {
      if (reachable(h.from, h.to)) {
        send_copy(h.from, h.to, h.id);
      } else {
        still.push_back(h);
      }
    }
    held_.insert(held_.begin(), still.begin(), still.end());
  }

  bool closing_stable_at(std::uint32_t node) const {
    const auto& cs = closings_[node];
    if (cs.empty()) return false;
    return std::none_of(cs.begin(), cs.end(), [&](const Timestamp& t) {
      return stability_.unstable(node).contains(t);
    });
  }

  bool fire_deferred() {
    bool fired = false;
    for (std::size_t k = 0; k < deferred_.size();) {
      auto [node, deadline] = deferred_[k];
      if (closing_stable_at(node) || (deadline && now_ >= *deadline)) {
        deferred_.erase(deferred_.begin() + static_cast<std::ptrdiff_t>(k));
        broadcast(node, Operation::closed());
        fired = true;
      } else {
        ++k;
      }
    }
    return fired;
  }

  void after_step() override {
    if (!deferred_.empty()) fire_deferred();
  }

  void flush() override {
    for (;;) {
      drain();
      if (pure_mode_) {
        // Every node broadcasts once so that everything delivered so far
        // becomes stable wherever it is reachable.
        const auto before = op_broadcasts_;
        for (std::uint32_t n = 0; n < nodes(); ++n) broadcast(n, std::nullopt);
        drain();
        // A deferred closed may have fired while draining; it needs
        // another round to become stable.
        if (op_broadcasts_ != before) continue;
      }
      if (deferred_.empty() || !fire_deferred()) break;
    }
  }

  QueryResult query(std::uint32_t node, const Query& q) const override {
    return pure_mode_ ? pure_[node].eval(q) : op_[node]->query(q);
  }

  NodeFinal final_of(std::uint32_t node) const override {
    NodeFinal f;
    for (const auto& q : convergence_queries(s_.datatype)) f.results.push_back(query(node, q));
    if (pure_mode_) {
      f.state_size = pure_[node].state_size();
      f.state = pure_[node].render_state();
      f.unstable_entries = pure_[node].log().timestamped.size();
    } else {
      f.state_size = op_[node]->state_size();
      f.state = op_[node]->render_state();
    }
    return f;
  }

  bool states_equal(std::string& detail) const override {
    if (pure_mode_) return true;  // logs legitimately differ in what has stabilized
    for (std::uint32_t n = 1; n < nodes(); ++n) {
      if (op_[n]->render_state() != op_[0]->render_state()) {
        detail = "state of node " + std::to_string(n) + " differs from node 0";
        return false;
      }
    }
    return true;
  }

  bool pure_mode_;
  CausalBroadcast layer_;
  StabilityTracker stability_;
  std::vector<std::unique_ptr<opbased::Replica>> op_;
  std::vector<purelog::PureReplica> pure_;
  std::vector<Message> messages_;
  std::map<Timestamp, std::size_t, purelog::TimestampOrder> index_;
  std::vector<Held> held_;
  std::vector<std::vector<Timestamp>> closings_;
  std::vector<std::pair<std::uint32_t, std::optional<std::uint64_t>>> deferred_;
  std::uint64_t op_broadcasts_ = 0;
};

// State-based and delta-state: periodic gossip over lossy point-to-point
// channels along the topology.
class GossipEngine final : public Engine {
 public:
  GossipEngine(const Scenario& s, const RunOptions& o) : Engine(s, o), arrived_(s.nodes) {
    delta_mode_ = s.approach == Approach::kDeltaNaive || s.approach == Approach::kDeltaImproved;
    for (std::uint32_t n = 0; n < s.nodes; ++n) {
      neighbors_.push_back(scenario::neighbors(s.topology, s.nodes, n));
      if (delta_mode_) {
        std::vector<ReplicaId> ids;
        for (auto j : neighbors_.back()) ids.push_back(replica(j));
        delta_.emplace_back(replica(n), s.datatype, std::move(ids),
                            s.approach == Approach::kDeltaNaive ? delta::Mode::kNaive
                                                                : delta::Mode::kImproved,
                            s.full_state_every);
      } else {
        state_.emplace_back(replica(n), s.datatype);
      }
    }
  }

 private:
  using CrdtState = statebased::CrdtState;

  bool gossips() const override { return true; }

  const CrdtState& state_of(std::uint32_t n) const {
    return delta_mode_ ? delta_[n].state() : state_[n].state();
  }

  void invoke(std::uint32_t node, const Operation& op) override {
    trace({TraceEvent::Kind::kInvoke, 0, node, 0, std::nullopt, render(op)});
    if (delta_mode_) {
      delta_[node].mutate(op);
    } else {
      state_[node].mutate(op);
    }
  }

  void gossip_round() override {
    for (std::uint32_t n = 0; n < nodes(); ++n) {
      if (delta_mode_) {
        for (auto& out : delta_[n].tick()) transmit(n, index_of(out.to), std::move(out.group.value));
      } else if (!statebased::is_bottom(state_[n].state())) {
        for (auto j : neighbors_[n]) transmit(n, j, state_[n].state());
      }
    }
    collect_warnings();
  }

  void transmit(std::uint32_t from, std::uint32_t to, CrdtState payload) {
    const auto leaves = statebased::leaf_count(payload);
    count_message(leaves);
    trace({TraceEvent::Kind::kSend, 0, from, to, std::nullopt, std::to_string(leaves)});
    if (!reachable(from, to) || rng_.chance(s_.drop)) {
      result_.metrics.dropped += 1;
      trace({TraceEvent::Kind::kDrop, 0, from, to, std::nullopt, {}});
      return;
    }
    const std::size_t id = payloads_.size();
    payloads_.push_back(std::move(payload));
    schedule(now_ + delay(), 1, [this, from, to, id] { arrive(from, to, id); });
    if (rng_.chance(s_.dup)) {
      result_.metrics.duplicated += 1;
      schedule(now_ + delay(), 1, [this, from, to, id] { arrive(from, to, id); });
    }
  }

  void arrive(std::uint32_t from, std::uint32_t to, std::size_t id) {
    if (!reachable(from, to)) {
      result_.metrics.dropped += 1;
      trace({TraceEvent::Kind::kDrop, 0, from, to, std::nullopt, {}});
      return;
    }
    const bool repeat = !arrived_[to].insert(id).second;
    std::optional<CrdtState> before;
    if (repeat) before = state_of(to);
    receive(from, to, payloads_[id]);
    if (repeat && !(state_of(to) == *before)) result_.metrics.duplicate_changes += 1;
    trace({TraceEvent::Kind::kReceive, 0, to, from, std::nullopt, {}});
  }

  void receive(std::uint32_t from, std::uint32_t to, const CrdtState& payload) {
    if (delta_mode_) {
      delta_[to].receive({payload, replica(from)});
    } else {
      state_[to].merge(payload);
    }
  }

  void flush() override {
    drain();
    // Enough reliable full-state rounds to cross any path in the topology.
    for (std::uint32_t round = 0; round < nodes(); ++round) {
      for (std::uint32_t n = 0; n < nodes(); ++n) {
        if (statebased::is_bottom(state_of(n))) continue;
        for (auto j : neighbors_[n]) {
          if (!reachable(n, j)) continue;
          const CrdtState full = state_of(n);
          count_message(statebased::leaf_count(full));
          receive(n, j, full);
        }
      }
    }
    collect_warnings();
  }

  void collect_warnings() {
    if (!delta_mode_) return;
    for (const auto& d : delta_) {
      if (d.warning() && warned_.insert(index_of(d.id())).second) {
        result_.warnings.push_back("node " + to_string(d.id()) + ": " + *d.warning());
        trace({TraceEvent::Kind::kWarning, 0, index_of(d.id()), 0, std::nullopt, *d.warning()});
      }
    }
  }

  QueryResult query(std::uint32_t node, const Query& q) const override {
    return delta_mode_ ? delta_[node].query(q) : state_[node].query(q);
  }

  NodeFinal final_of(std::uint32_t node) const override {
    NodeFinal f;
    for (const auto& q : convergence_queries(s_.datatype)) f.results.push_back(query(node, q));
    f.state_size = statebased::leaf_count(state_of(node));
    f.state = statebased::render(state_of(node));
    return f;
  }

  bool states_equal(std::string& detail) const override {
    for (std::uint32_t n = 1; n < nodes(); ++n) {
      if (!(state_of(n) == state_of(0))) {
        detail = "state of node " + std::to_string(n) + " differs from node 0";
        return false;
      }
    }
    return true;
  }

  bool delta_mode_ = false;
  std::vector<std::vector<std::uint32_t>> neighbors_;
  std::vector<statebased::StateReplica> state_;
  std::vector<delta::DeltaReplica> delta_;
  std::vector<CrdtState> payloads_;
  std::vector<std::set<std::size_t>> arrived_;
  std::set<std::uint32_t> warned_;
};

}  // namespace

RunResult run(const Scenario& s, const RunOptions& options) {
  scenario::validate(s);
  std::unique_ptr<Engine> engine;
  if (s.approach == Approach::kOp || s.approach == Approach::kPure) {
    engine = std::make_unique<BroadcastEngine>(s, options);
  } else {
    engine = std::make_unique<GossipEngine>(s, options);
  }
  return engine->run();
}

}  // namespace crdtlab::sim
