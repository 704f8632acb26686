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

#include "crdtlab/purelog.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <tuple>
#include <type_traits>
#include <variant>

namespace crdtlab::purelog {

// ---------------------------------------------------------------------------
// Timestamps

Timestamp Timestamp::make(std::map<ReplicaId, std::uint64_t> clock,
                          ReplicaId origin) {
  std::erase_if(clock, [](const auto& kv) { return kv.second == 0; });
  return Timestamp{std::move(clock), origin};
}

std::uint64_t Timestamp::at(ReplicaId r) const {
  auto it = clock.find(r);
  return it == clock.end() ? 0 : it->second;
}

bool dominated(const Timestamp& a, const Timestamp& b) {
  for (const auto& [r, n] : a.clock) {
    if (n > b.at(r)) return false;
  }
  return true;
}

bool before(const Timestamp& a, const Timestamp& b) {
  return dominated(a, b) && a.clock != b.clock;
}

bool concurrent(const Timestamp& a, const Timestamp& b) {
  return !dominated(a, b) && !dominated(b, a);
}

namespace {

std::uint64_t clock_sum(const Timestamp& t) {
  std::uint64_t s = 0;
  for (const auto& [r, n] : t.clock) s += n;
  return s;
}

}  // namespace

bool TimestampOrder::operator()(const Timestamp& a, const Timestamp& b) const {
  const auto sa = clock_sum(a);
  const auto sb = clock_sum(b);
  if (sa != sb) return sa < sb;
  if (a.clock != b.clock) return a.clock < b.clock;
  return a.origin < b.origin;
}

std::string render(const Timestamp& t) {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (const auto& [r, n] : t.clock) {
    if (!first) os << ',';
    first = false;
    os << to_string(r) << ':' << n;
  }
  os << "]@" << to_string(t.origin);
  return os.str();
}

std::size_t POLog::leaf_count() const {
  std::size_t n = 0;
  for (const auto& [t, op] : timestamped) {
    n += t.clock.size() + std::max<std::size_t>(1, crdtlab::leaf_count(op));
  }
  struct CoreSize {
    std::size_t operator()(const ElementCore& c) const { return c.elements.size(); }
    std::size_t operator()(const TallyCore&) const { return 1; }
    std::size_t operator()(const AuctionCore& c) const {
      std::size_t k = 2;  // phase flags
      for (const auto& b : c.bids) k += 2 + b.concurrent_closed.size();
      return k + c.not_after_stable_closing.size();
    }
  };
  return n + std::visit(CoreSize{}, core);
}

namespace {

[[noreturn]] void bad_query(Datatype d, const Query& q) {
  throw std::invalid_argument("query '" + render(q) + "' is not valid for " +
                              std::string(name_of(d)));
}

// ---------------------------------------------------------------------------
// Counters: commutative, nothing is ever obsolete; stable entries collapse
// into a tally.

class CounterSemantics final : public Semantics {
 public:
  explicit CounterSemantics(Datatype d) : datatype_(d) {}
  Datatype datatype() const override { return datatype_; }
  StableCore initial_core() const override { return TallyCore{}; }

  void stabilize(const LogEntry& entry, POLog& log) const override {
    std::get<TallyCore>(log.core).tally += delta(entry.op);
  }

  QueryResult eval(const Query& q, const POLog& log) const override {
    if (q.kind != QueryKind::kValue) bad_query(datatype_, q);
    std::int64_t v = std::get<TallyCore>(log.core).tally;
    for (const auto& [t, op] : log.timestamped) v += delta(op);
    return v;
  }

 private:
  static std::int64_t delta(const Operation& op) {
    return op.kind == OpKind::kDec ? -1 : 1;
  }
  Datatype datatype_;
};

QueryResult eval_elements(Datatype d, const Query& q,
                          const std::set<std::string>& elements) {
  switch (q.kind) {
    case QueryKind::kElements:
      return elements;
    case QueryKind::kContains:
      return elements.contains(q.arg);
    default:
      bad_query(d, q);
  }
}

std::set<std::string> surviving_adds(const POLog& log) {
  std::set<std::string> out = std::get<ElementCore>(log.core).elements;
  for (const auto& [t, op] : log.timestamped) {
    if (op.kind == OpKind::kAdd) out.insert(op.arg);
  }
  return out;
}

class GSetSemantics final : public Semantics {
 public:
  Datatype datatype() const override { return Datatype::kGSet; }
  StableCore initial_core() const override { return ElementCore{}; }

  bool obsolete(const LogEntry& older, const LogEntry& newer) const override {
    return before(older.timestamp, newer.timestamp) && older.op.arg == newer.op.arg;
  }

  void stabilize(const LogEntry& entry, POLog& log) const override {
    std::get<ElementCore>(log.core).elements.insert(entry.op.arg);
  }

  QueryResult eval(const Query& q, const POLog& log) const override {
    return eval_elements(datatype(), q, surviving_adds(log));
  }
};

// Add-wins set. The obsolete relation:
//   (t, add v)    is obsolete given (t', add v)    when t < t'
//   (t, add v)    is obsolete given (t', remove v) when t < t'
//   (t, remove v) is obsolete given anything
// With these rules the compacted log holds only adds, and a remove never
// outlives its own delivery.
class ORSetSemantics final : public Semantics {
 public:
  Datatype datatype() const override { return Datatype::kORSet; }
  StableCore initial_core() const override { return ElementCore{}; }

  bool obsolete(const LogEntry& older, const LogEntry& newer) const override {
    if (older.op.kind == OpKind::kRemove) return true;
    return before(older.timestamp, newer.timestamp) && older.op.arg == newer.op.arg;
  }

  void on_arrival(const LogEntry& entry, POLog& log) const override {
    // Stable adds are in the causal past of everything delivered later.
    if (entry.op.kind == OpKind::kRemove) {
      std::get<ElementCore>(log.core).elements.erase(entry.op.arg);
    }
  }

  bool redundant(const LogEntry& entry, const POLog& log) const override {
    if (entry.op.kind != OpKind::kRemove) return false;
    for (const auto& [t, op] : log.timestamped) {
      if (op.kind == OpKind::kAdd && op.arg == entry.op.arg &&
          before(t, entry.timestamp)) {
        return false;
      }
    }
    return true;
  }

  void stabilize(const LogEntry& entry, POLog& log) const override {
    auto& core = std::get<ElementCore>(log.core);
    if (entry.op.kind == OpKind::kAdd) {
      core.elements.insert(entry.op.arg);
    } else {
      core.elements.erase(entry.op.arg);
    }
  }

  QueryResult eval(const Query& q, const POLog& log) const override {
    return eval_elements(datatype(), q, surviving_adds(log));
  }
};

// Auction with bid / closing / closed. A bid after any closing is late. The
// winner is the highest bid that is not late and precedes a closed; bids not
// preceding the closed are reported late once it is visible.
class AuctionSemantics final : public Semantics {
 public:
  Datatype datatype() const override { return Datatype::kAuction; }
  StableCore initial_core() const override { return AuctionCore{}; }

  void stabilize(const LogEntry& entry, POLog& log) const override {
    auto& core = std::get<AuctionCore>(log.core);
    const auto& t = entry.timestamp;
    switch (entry.op.kind) {
      case OpKind::kBid: {
        AuctionCore::StableBid sb;
        sb.bid = Bid{entry.op.arg, entry.op.amount};
        sb.origin = t.origin;
        sb.sequence = t.sequence();
        sb.late = late_unstable(core, log, t);
        // Anything concurrent with a stable closed was delivered before the
        // closed stabilized, so this bid cannot precede it.
        sb.before_closed = false;
        for (const auto& [u, op] : log.timestamped) {
          if (op.kind == OpKind::kClosed && concurrent(u, t)) {
            sb.concurrent_closed.insert(u);
          }
        }
        core.not_after_stable_closing.erase(t);
        core.bids.push_back(std::move(sb));
        break;
      }
      case OpKind::kClosing: {
        if (!core.closing_stable) {
          core.closing_stable = true;
          for (const auto& [u, op] : log.timestamped) {
            if (op.kind == OpKind::kBid && !before(t, u)) {
              core.not_after_stable_closing.insert(u);
            }
          }
        } else {
          std::erase_if(core.not_after_stable_closing,
                        [&](const Timestamp& u) { return before(t, u); });
        }
        break;
      }
      case OpKind::kClosed: {
        core.closed_stable = true;
        for (auto& sb : core.bids) {
          if (!sb.concurrent_closed.contains(t)) sb.before_closed = true;
          sb.concurrent_closed.erase(t);
        }
        break;
      }
      default:
        break;
    }
  }

  QueryResult eval(const Query& q, const POLog& log) const override {
    const auto& core = std::get<AuctionCore>(log.core);
    bool closed_visible = core.closed_stable;
    for (const auto& [u, op] : log.timestamped) {
      if (op.kind == OpKind::kClosed) closed_visible = true;
    }

    struct Candidate {
      Bid bid;
      ReplicaId origin;
      std::uint64_t sequence;
      bool late;
      bool before_closed;
    };
    std::vector<Candidate> all;
    for (const auto& sb : core.bids) {
      bool before_closed = sb.before_closed;
      for (const auto& [u, op] : log.timestamped) {
        if (op.kind == OpKind::kClosed && !sb.concurrent_closed.contains(u)) {
          before_closed = true;
        }
      }
      all.push_back({sb.bid, sb.origin, sb.sequence, sb.late, before_closed});
    }
    for (const auto& [t, op] : log.timestamped) {
      if (op.kind != OpKind::kBid) continue;
      bool before_closed = false;
      for (const auto& [u, other] : log.timestamped) {
        if (other.kind == OpKind::kClosed && purelog::before(t, u)) {
          before_closed = true;
        }
      }
      all.push_back({Bid{op.arg, op.amount}, t.origin, t.sequence(),
                     late_unstable(core, log, t), before_closed});
    }

    switch (q.kind) {
      case QueryKind::kWinner: {
        if (!closed_visible) return QueryError{"auction-not-closed"};
        const Candidate* best = nullptr;
        for (const auto& c : all) {
          if (c.late || !c.before_closed) continue;
          if (best == nullptr || ranks_higher(c, *best)) best = &c;
        }
        if (best == nullptr) return NoWinner{};
        return best->bid;
      }
      case QueryKind::kLate: {
        std::set<std::string> out;
        for (const auto& c : all) {
          if (c.late || (closed_visible && !c.before_closed)) {
            out.insert(render(c.bid));
          }
        }
        return out;
      }
      default:
        bad_query(datatype(), q);
    }
  }

 private:
  template <typename C>
  static bool ranks_higher(const C& a, const C& b) {
    // amount desc, replica id asc, origin counter asc
    return std::tuple(-a.bid.amount, a.origin, a.sequence) <
           std::tuple(-b.bid.amount, b.origin, b.sequence);
  }

  static bool late_unstable(const AuctionCore& core, const POLog& log,
                            const Timestamp& t) {
    if (core.closing_stable && !core.not_after_stable_closing.contains(t)) {
      return true;
    }
    for (const auto& [u, op] : log.timestamped) {
      if (op.kind == OpKind::kClosing && before(u, t)) return true;
    }
    return false;
  }
};

}  // namespace

const Semantics& semantics_for(Datatype d) {
  static const CounterSemantics gcounter(Datatype::kGCounter);
  static const CounterSemantics pncounter(Datatype::kPNCounter);
  static const GSetSemantics gset;
  static const ORSetSemantics orset;
  static const AuctionSemantics auction;
  switch (d) {
    case Datatype::kGCounter:
      return gcounter;
    case Datatype::kPNCounter:
      return pncounter;
    case Datatype::kGSet:
      return gset;
    case Datatype::kORSet:
      return orset;
    case Datatype::kAuction:
      return auction;
    default:
      throw std::invalid_argument(std::string(name_of(d)) +
                                  " has no pure op-based implementation");
  }
}

// ---------------------------------------------------------------------------
// Replica

PureReplica::PureReplica(ReplicaId id, Datatype d)
    : id_(id), semantics_(&semantics_for(d)) {
  log_.core = semantics_->initial_core();
}

void PureReplica::effect(const Operation& op, const Timestamp& t) {
  auto& seen = delivered_[t.origin];
  if (t.sequence() <= seen) {
    throw DuplicateTimestamp("timestamp " + render(t) + " delivered twice at " +
                             to_string(id_));
  }
  seen = t.sequence();

  const LogEntry entry{t, op};
  semantics_->on_arrival(entry, log_);
  std::erase_if(log_.timestamped, [&](const auto& kv) {
    return semantics_->obsolete(LogEntry{kv.first, kv.second}, entry);
  });
  const bool superseded =
      std::any_of(log_.timestamped.begin(), log_.timestamped.end(),
                  [&](const auto& kv) {
                    return semantics_->obsolete(entry, LogEntry{kv.first, kv.second});
                  });
  if (superseded || semantics_->redundant(entry, log_)) return;
  log_.timestamped.emplace(t, op);
}

void PureReplica::stable(const Timestamp& t) {
  auto it = log_.timestamped.find(t);
  if (it == log_.timestamped.end()) return;
  LogEntry entry{it->first, it->second};
  log_.timestamped.erase(it);
  semantics_->stabilize(entry, log_);
}

QueryResult PureReplica::eval(const Query& q) const {
  return semantics_->eval(q, log_);
}

std::string PureReplica::render_state() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& core) {
        using T = std::decay_t<decltype(core)>;
        if constexpr (std::is_same_v<T, ElementCore>) {
          os << render(QueryResult{core.elements});
        } else if constexpr (std::is_same_v<T, TallyCore>) {
          os << core.tally;
        } else {
          os << '[';
          for (std::size_t i = 0; i < core.bids.size(); ++i) {
            if (i > 0) os << ',';
            os << render(core.bids[i].bid) << (core.bids[i].late ? "!late" : "");
          }
          os << ']' << (core.closed_stable ? " closed" : core.closing_stable ? " closing" : "");
        }
      },
      log_.core);
  os << " | {";
  bool first = true;
  for (const auto& [t, op] : log_.timestamped) {
    if (!first) os << ',';
    first = false;
    os << render(t) << '=' << render(op);
  }
  os << "}";
  return os.str();
}

}  // namespace crdtlab::purelog
