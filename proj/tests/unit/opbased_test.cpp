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

#include "crdtlab/opbased.hpp"

#include <gtest/gtest.h>

namespace crdtlab::opbased {
namespace {

const Query kElements{QueryKind::kElements, {}};
const Query kValue{QueryKind::kValue, {}};
const Query kRead{QueryKind::kRead, {}};

QueryResult elems(std::initializer_list<const char*> xs) {
  std::set<std::string> s;
  for (const char* x : xs) s.insert(x);
  return s;
}

// Applies `op` at its origin and returns the message for the others.
PreparedMessage local(Replica& r, const Operation& op) {
  auto m = r.prepare(op);
  r.effect(m);
  return m;
}

TEST(OpBased, CountersCommute) {
  auto a = make_replica(Datatype::kPNCounter, replica(0));
  auto b = make_replica(Datatype::kPNCounter, replica(1));
  auto m1 = local(*a, Operation::inc());
  auto m2 = local(*b, Operation::dec());
  auto m3 = local(*b, Operation::dec());
  a->effect(m2);
  a->effect(m3);
  b->effect(m1);
  EXPECT_EQ(a->query(kValue), QueryResult{std::int64_t{-1}});
  EXPECT_EQ(a->render_state(), b->render_state());
  EXPECT_EQ(a->state_size(), 1u);
}

TEST(OpBased, ORSetAddWinsOverConcurrentRemove) {
  auto a = make_replica(Datatype::kORSet, replica(0));
  auto b = make_replica(Datatype::kORSet, replica(1));
  auto add = local(*a, Operation::add("x"));
  b->effect(add);
  // b removes x while a concurrently adds it again.
  auto rm = local(*b, Operation::remove("x"));
  auto again = local(*a, Operation::add("x"));
  a->effect(rm);
  b->effect(again);
  EXPECT_EQ(a->query(kElements), elems({"x"}));
  EXPECT_EQ(a->render_state(), b->render_state());
}

TEST(OpBased, ORSetRemoveOnlyCancelsObservedAdds) {
  auto a = make_replica(Datatype::kORSet, replica(0));
  auto rm = local(*a, Operation::remove("x"));
  const auto& msg = std::get<ORSetRemove>(rm.payload);
  EXPECT_TRUE(msg.observed.empty());
  auto add = local(*a, Operation::add("x"));
  EXPECT_EQ(std::get<ORSetAdd>(add.payload).dot, (Dot{replica(0), 1}));
  EXPECT_EQ(a->query(Query{QueryKind::kContains, "x"}), QueryResult{true});
}

TEST(OpBased, PrepareLeavesConvergingStateAlone) {
  auto a = make_replica(Datatype::kORSet, replica(0));
  local(*a, Operation::add("x"));
  const auto before = a->render_state();
  (void)a->prepare(Operation::add("y"));
  EXPECT_EQ(a->render_state(), before);
}

TEST(OpBased, NaiveORSetUsesPairs) {
  auto a = make_replica(Datatype::kORSetNaive, replica(0));
  auto b = make_replica(Datatype::kORSetNaive, replica(1));
  auto add = local(*a, Operation::add("x"));
  b->effect(add);
  auto rm = local(*b, Operation::remove("x"));
  EXPECT_EQ(std::get<NaiveRemove>(rm.payload).pairs.size(), 1u);
  auto again = local(*a, Operation::add("x"));
  a->effect(rm);
  b->effect(again);
  EXPECT_EQ(a->query(kElements), elems({"x"}));
  EXPECT_EQ(b->query(kElements), elems({"x"}));
  EXPECT_EQ(a->state_size(), 2u);
}

TEST(OpBased, MVRegisterKeepsConcurrentWrites) {
  auto a = make_replica(Datatype::kMVRegister, replica(0));
  auto b = make_replica(Datatype::kMVRegister, replica(1));
  auto wa = local(*a, Operation::write("p"));
  auto wb = local(*b, Operation::write("q"));
  a->effect(wb);
  b->effect(wa);
  EXPECT_EQ(a->query(kRead), elems({"p", "q"}));
  auto w = local(*a, Operation::write("r"));
  b->effect(w);
  EXPECT_EQ(b->query(kRead), elems({"r"}));
}

TEST(OpBased, GSetIgnoresDuplicates) {
  auto a = make_replica(Datatype::kGSet, replica(0));
  local(*a, Operation::add("x"));
  local(*a, Operation::add("x"));
  EXPECT_EQ(a->query(kElements), elems({"x"}));
}

TEST(OpBased, MessageSizes) {
  auto a = make_replica(Datatype::kORSet, replica(0));
  auto add = local(*a, Operation::add("x"));
  EXPECT_EQ(leaf_count(add), 2u);  // element + dot
  auto add2 = local(*a, Operation::add("x"));
  EXPECT_EQ(leaf_count(add2), 3u);  // element + dot + observed dot
}

TEST(OpBased, CloneIsIndependent) {
  auto a = make_replica(Datatype::kGCounter, replica(0));
  local(*a, Operation::inc());
  auto c = a->clone();
  local(*a, Operation::inc());
  EXPECT_EQ(c->query(kValue), QueryResult{std::int64_t{1}});
  EXPECT_EQ(a->query(kValue), QueryResult{std::int64_t{2}});
}

TEST(OpBased, UnsupportedDatatypes) {
  EXPECT_THROW(make_replica(Datatype::kAdvancer, replica(0)), std::invalid_argument);
  EXPECT_THROW(make_replica(Datatype::kAuction, replica(0)), std::invalid_argument);
}

}  // namespace
}  // namespace crdtlab::opbased
