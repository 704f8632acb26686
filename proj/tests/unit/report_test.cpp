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


#include "crdtlab/report.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace crdtlab::report {
namespace {

using scenario::parse;

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

const char* kCounter =
    "name demo\nnodes 2\ndatatype gcounter\napproach state\nseed 4\n"
    "at 0 node 0 inc\nat 1 node 1 inc\nat 2 query-all value\nflush\nassert-converged\n";

TEST(Report, RunHasScenarioQueriesMetricsAndResult) {
  auto s = parse(kCounter);
  auto text = render_run(s, sim::run(s), false);
  EXPECT_TRUE(contains(text, "scenario.name=demo\n")) << text;
  EXPECT_TRUE(contains(text, "scenario.approach=state\n"));
  EXPECT_TRUE(contains(text, "query.line8.node0.value="));
  EXPECT_TRUE(contains(text, "assert.line10=pass"));
  EXPECT_TRUE(contains(text, "metrics.payload="));
  EXPECT_TRUE(contains(text, "final.node1.value=2\n"));
  EXPECT_TRUE(contains(text, "result=pass\n"));
  EXPECT_FALSE(contains(text, "trace "));
}

TEST(Report, TraceOnlyWhenRequested) {
  auto s = parse(kCounter);
  EXPECT_TRUE(contains(render_run(s, sim::run(s), true), "trace t=0 invoke node=0 op=inc"));
}

TEST(Report, FailureIsMarked) {
  auto s = parse("nodes 2\ndatatype gcounter\napproach op\nnode 0 inc\nassert-query node 1 value 7\n");
  auto text = render_run(s, sim::run(s), false);
  EXPECT_TRUE(contains(text, "assert.line5=fail")) << text;
  EXPECT_TRUE(contains(text, "result=fail\n"));
}

TEST(Report, CompareAgreesAcrossApproaches) {
  auto s = parse(
      "nodes 3\ndatatype orset\napproach op\nseed 2\ndrop 0.2\n"
      "at 0 node 0 add a\nat 0 node 1 add b\nat 1 node 2 remove a\nat 3 node 1 add a\n"
      "flush\nassert-converged\n");
  std::vector<Approach> all{Approach::kOp, Approach::kPure, Approach::kState,
                            Approach::kDeltaNaive, Approach::kDeltaImproved};
  auto c = compare(s, all);
  EXPECT_TRUE(c.equivalent) << c.divergence;
  ASSERT_EQ(c.runs.size(), 5u);
  auto text = render_comparison(s, c);
  EXPECT_TRUE(contains(text, "equivalence=ok\n")) << text;
  EXPECT_TRUE(contains(text, "delta-improved"));
  EXPECT_TRUE(contains(text, "result=pass\n"));
}

TEST(Report, CompareRejectsUnsupportedApproach) {
  auto s = parse("nodes 2\ndatatype mvreg\napproach op\nnode 0 write v\n");
  std::vector<Approach> bad{Approach::kOp, Approach::kState};
  EXPECT_THROW(compare(s, bad), scenario::ParseError);
}

}  // namespace
}  // namespace crdtlab::report
