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

// crdtlab: run and compare replication scenarios through the C interface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "crdtlab/crdtlab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct ScenarioDeleter {
  void operator()(crdtlab_scenario* s) const { crdtlab_scenario_free(s); }
};
struct ReportDeleter {
  void operator()(crdtlab_report* r) const { crdtlab_report_free(r); }
};
using ScenarioPtr = std::unique_ptr<crdtlab_scenario, ScenarioDeleter>;
using ReportPtr = std::unique_ptr<crdtlab_report, ReportDeleter>;

int exit_code(crdtlab_status s) {
  switch (s) {
    case CRDTLAB_OK:
      return kExitOk;
    case CRDTLAB_PARSE_ERROR:
    case CRDTLAB_INVALID_ARGUMENT:
    case CRDTLAB_UNSUPPORTED:
      return kExitUsage;
    default:
      return kExitFailed;
  }
}

// Loads and parses the file; prints a diagnostic and returns null on error.
ScenarioPtr load(const std::string& path, std::optional<std::uint64_t> seed, int& code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "crdtlab: cannot read " << path << '\n';
    code = kExitUsage;
    return nullptr;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  crdtlab_scenario* raw = nullptr;
  auto st = crdtlab_scenario_parse(text.data(), text.size(), &raw);
  if (st != CRDTLAB_OK) {
    std::cerr << path << ": " << crdtlab_last_error() << '\n';
    code = exit_code(st);
    return nullptr;
  }
  ScenarioPtr s(raw);
  if (seed) crdtlab_scenario_set_seed(s.get(), *seed);
  return s;
}

int emit(const crdtlab_report* report, const std::string& out_path) {
  const char* text = crdtlab_report_text(report);
  if (out_path.empty()) {
    std::fputs(text, stdout);
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "crdtlab: cannot write " << out_path << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int finish(crdtlab_status st, crdtlab_report* raw, const std::string& out_path) {
  ReportPtr report(raw);
  if (report) {
    int wrote = emit(report.get(), out_path);
    if (wrote != kExitOk) return wrote;
  }
  if (st != CRDTLAB_OK) std::cerr << "crdtlab: " << crdtlab_last_error() << '\n';
  return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crdtlab - CRDT replication workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", crdtlab_version());

  std::string file;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  bool trace = false;
  std::string approaches;

  auto* run = app.add_subcommand("run", "Simulate a scenario file and print its report");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_path, "Write the report to PATH instead of stdout");
  run->add_flag("--trace", trace, "Include the event trace in the report");

  auto* cmp = app.add_subcommand("compare", "Run a scenario under several approaches");
  cmp->add_option("file", file, "Scenario file")->required();
  cmp->add_option("--approaches", approaches, "Comma-separated approach list")->required();
  cmp->add_option("--seed", seed, "Override the scenario seed");
  cmp->add_option("--out", out_path, "Write the table to PATH instead of stdout");

  auto* list = app.add_subcommand("list-datatypes", "Show datatypes and supporting approaches");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*list) {
    for (std::size_t i = 0; i < crdtlab_datatype_count(); ++i) {
      const char* d = crdtlab_datatype_name(i);
      std::string line = d;
      line += ':';
      for (std::size_t k = 0; k < crdtlab_approach_count(); ++k) {
        const char* a = crdtlab_approach_name(k);
        if (crdtlab_supports(a, d) == 1) {
          line += ' ';
          line += a;
        }
      }
      std::cout << line << '\n';
    }
    return kExitOk;
  }

  int code = kExitOk;
  auto scenario = load(file, seed, code);
  if (!scenario) return code;

  crdtlab_report* report = nullptr;
  if (*run) {
    auto st = crdtlab_run(scenario.get(), trace ? CRDTLAB_RUN_TRACE : 0u, &report);
    return finish(st, report, out_path);
  }
  auto st = crdtlab_compare(scenario.get(), approaches.c_str(), &report);
  return finish(st, report, out_path);
}
