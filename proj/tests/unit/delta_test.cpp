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

#include <gtest/gtest.h>

namespace crdtlab::delta {
namespace {

using statebased::render;

const Query kValue{QueryKind::kValue, {}};

std::vector<DeltaReplica> line(Datatype d, Mode mode) {
  std::vector<DeltaReplica> out;
  out.emplace_back(replica(0), d, std::vector<ReplicaId>{replica(1)}, mode);
  out.emplace_back(replica(1), d, std::vector<ReplicaId>{replica(0), replica(2)}, mode);
  out.emplace_back(replica(2), d, std::vector<ReplicaId>{replica(1)}, mode);
  return out;
}

void deliver(std::vector<DeltaReplica>& rs, ReplicaId from, const std::vector<Outgoing>& out) {
  for (const auto& o : out) rs[index_of(o.to)].receive(DeltaGroup{o.group.value, from});
}

TEST(Delta, LineTopologyPropagatesInTwoTicks) {
  for (auto mode : {Mode::kNaive, Mode::kImproved}) {
    auto rs = line(Datatype::kGCounter, mode);
    rs[0].mutate(Operation::inc());
    deliver(rs, replica(0), rs[0].tick());
    deliver(rs, replica(1), rs[1].tick());
    EXPECT_EQ(rs[2].query(kValue), QueryResult{std::int64_t{1}});
  }
}

TEST(Delta, ImprovedNeverSendsBackToOrigin) {
  auto rs = line(Datatype::kGSet, Mode::kImproved);
  rs[0].mutate(Operation::add("x"));
  deliver(rs, replica(0), rs[0].tick());
  auto out = rs[1].tick();
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].to, replica(2));
}

TEST(Delta, NaiveEchoesToEveryNeighbor) {
  auto rs = line(Datatype::kGSet, Mode::kNaive);
  rs[0].mutate(Operation::add("x"));
  deliver(rs, replica(0), rs[0].tick());
  EXPECT_EQ(rs[1].tick().size(), 2u);
}

TEST(Delta, ImprovedDropsKnownInformation) {
  auto rs = line(Datatype::kGSet, Mode::kImproved);
  rs[1].mutate(Operation::add("x"));
  (void)rs[1].tick();
  rs[1].receive(DeltaGroup{statebased::state_datatype(Datatype::kGSet).delta_mutate(
                               replica(0), Operation::add("x"), rs[0].state()),
                           replica(0)});
  EXPECT_TRUE(statebased::is_bottom(rs[1].buffer()));
  EXPECT_TRUE(rs[1].tick().empty());
}

TEST(Delta, EmptyBufferSendsNothing) {
  auto rs = line(Datatype::kORSet, Mode::kNaive);
  EXPECT_TRUE(rs[0].tick().empty());
}

TEST(Delta, FullStateEveryKthTick) {
  DeltaReplica r(replica(0), Datatype::kGCounter, {replica(1)}, Mode::kImproved, 2);
  r.mutate(Operation::inc());
  auto first = r.tick();
  ASSERT_EQ(first.size(), 1u);
  EXPECT_FALSE(first[0].full_state);
  auto second = r.tick();
  ASSERT_EQ(second.size(), 1u);
  EXPECT_TRUE(second[0].full_state);
  EXPECT_EQ(render(second[0].group.value), "{0:1}");
}

TEST(Delta, FullStateRoundLeavesBuffer) {
  DeltaReplica r(replica(0), Datatype::kGSet, {replica(1), replica(2)}, Mode::kNaive);
  r.mutate(Operation::add("x"));
  EXPECT_EQ(r.full_state_round().size(), 2u);
  EXPECT_FALSE(statebased::is_bottom(r.buffer()));
}

TEST(OptimalDelta, RedundantMutationHasBottomDelta) {
  const auto& def = statebased::state_datatype(Datatype::kGSet);
  auto x = def.mutate(replica(0), Operation::add("x"), def.bottom());
  EXPECT_TRUE(statebased::is_bottom(optimal_delta(Datatype::kGSet, replica(0), Operation::add("x"), x)));
  // The handwritten delta does not know that.
  EXPECT_FALSE(statebased::is_bottom(def.delta_mutate(replica(0), Operation::add("x"), x)));
}

TEST(OptimalDelta, CounterIncrementIsOneEntry) {
  const auto& def = statebased::state_datatype(Datatype::kGCounter);
  auto x = def.mutate(replica(1), Operation::inc(), def.bottom());
  x = def.mutate(replica(0), Operation::inc(), x);
  EXPECT_EQ(render(optimal_delta(Datatype::kGCounter, replica(0), Operation::inc(), x)), "{0:2}");
}

}  // namespace
}  // namespace crdtlab::delta
