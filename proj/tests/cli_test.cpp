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


#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(CRDTLAB_CLI) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return o;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) o.out.append(buf.data(), n);
  int status = pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("crdtlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  fs::path dir_;
};

const char* kPass =
    "nodes 2\ndatatype orset\napproach pure\nnode 0 add x\nnode 1 add y\nflush\nassert-converged\n";

TEST_F(Cli, RunSuccess) {
  auto o = cli("run " + write("ok.scn", kPass));
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("result=pass"), std::string::npos) << o.out;
  EXPECT_EQ(o.out.find("trace "), std::string::npos);
}

TEST_F(Cli, RunWithTraceAndSeed) {
  auto o = cli("run " + write("ok.scn", kPass) + " --trace --seed 123");
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("trace t=0 invoke"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("scenario.seed=123"), std::string::npos);
}

TEST_F(Cli, RunWritesReportFile) {
  auto report = (dir_ / "report.txt").string();
  auto o = cli("run " + write("ok.scn", kPass) + " --out " + report);
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(report);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("result=pass"), std::string::npos);
}

TEST_F(Cli, AssertionFailureExitsOne) {
  auto o = cli("run " + write("bad.scn", "nodes 2\ndatatype gcounter\napproach op\n"
                                         "node 0 inc\nassert-query node 1 value 1\n"));
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("result=fail"), std::string::npos);
}

TEST_F(Cli, ParseAndUsageErrorsExitTwo) {
  EXPECT_EQ(cli("run " + write("broken.scn", "nodes two\n")).code, 2);
  EXPECT_EQ(cli("run " + (dir_ / "missing.scn").string()).code, 2);
  EXPECT_EQ(cli("run").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("compare " + write("ok.scn", kPass) + " --approaches op,smoke").code, 2);
  EXPECT_EQ(cli("compare " + write("mv.scn", "nodes 2\ndatatype mvreg\napproach op\n") +
                " --approaches op,state")
                .code,
            2);
}

TEST_F(Cli, Compare) {
  auto o = cli("compare " + write("ok.scn", kPass) + " --approaches op,pure,state,delta-improved");
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("equivalence=ok"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("delta-improved"), std::string::npos);
}

TEST_F(Cli, ListDatatypes) {
  auto o = cli("list-datatypes");
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("auction: pure\n"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("gcounter:"), std::string::npos);
}

}  // namespace
