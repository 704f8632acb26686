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

#include "crdtlab/delta.hpp"

namespace crdtlab::delta {

using statebased::difference;
using statebased::is_bottom;
using statebased::join;

CrdtState optimal_delta(Datatype d, ReplicaId i, const Operation& op, const CrdtState& x) {
  const auto& def = statebased::state_datatype(d);
  return difference(def.mutate(i, op, x), x);
}

DeltaReplica::DeltaReplica(ReplicaId id, Datatype d, std::vector<ReplicaId> neighbors,
                           Mode mode, std::uint64_t full_state_every)
    : id_(id),
      def_(&statebased::state_datatype(d)),
      neighbors_(std::move(neighbors)),
      mode_(mode),
      full_state_every_(full_state_every),
      x_(def_->bottom()),
      d_(def_->bottom()) {}

CrdtState DeltaReplica::mutate(const Operation& op) {
  CrdtState delta = def_->delta_mutate(id_, op, x_);
  x_ = join(x_, delta);
  if (mode_ == Mode::kNaive) {
    d_ = join(d_, delta);
  } else {
    fragments_.emplace_back(id_, delta);
  }
  return delta;
}

void DeltaReplica::receive(const DeltaGroup& g) {
  if (mode_ == Mode::kImproved) {
    try {
      CrdtState fresh = difference(g.value, x_);
      if (is_bottom(fresh)) return;
      x_ = join(x_, fresh);
      fragments_.emplace_back(g.origin, std::move(fresh));
      return;
    } catch (const UnsupportedShape& e) {
      fall_back(e.what());
    }
  }
  x_ = join(x_, g.value);
  d_ = join(d_, g.value);
}

void DeltaReplica::fall_back(const std::string& why) {
  warning_ = "improved anti-entropy unavailable (" + why + "); using naive mode";
  d_ = buffer();
  fragments_.clear();
  mode_ = Mode::kNaive;
}

CrdtState DeltaReplica::buffer() const {
  if (mode_ == Mode::kNaive) return d_;
  CrdtState out = def_->bottom();
  for (const auto& [origin, f] : fragments_) out = join(out, f);
  return out;
}

std::vector<Outgoing> DeltaReplica::tick() {
  ++ticks_;
  if (full_state_every_ > 0 && ticks_ % full_state_every_ == 0) {
    auto out = full_state_round();
    d_ = def_->bottom();
    fragments_.clear();
    return out;
  }

  std::vector<Outgoing> out;
  if (mode_ == Mode::kNaive) {
    if (!is_bottom(d_)) {
      for (auto j : neighbors_) out.push_back({j, {d_, id_}, false});
    }
    d_ = def_->bottom();
    return out;
  }

  for (auto j : neighbors_) {
    CrdtState payload = def_->bottom();
    for (const auto& [origin, f] : fragments_) {
      if (origin != j) payload = join(payload, f);
    }
    if (!is_bottom(payload)) out.push_back({j, {std::move(payload), id_}, false});
  }
  fragments_.clear();
  return out;
}

std::vector<Outgoing> DeltaReplica::full_state_round() const {
  std::vector<Outgoing> out;
  if (is_bottom(x_)) return out;
  for (auto j : neighbors_) out.push_back({j, {x_, id_}, true});
  return out;
}

}  // namespace crdtlab::delta
