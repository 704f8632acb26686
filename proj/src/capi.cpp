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

#include "crdtlab/crdtlab.h"

#include <exception>
#include <new>
#include <string>
#include <string_view>
#include <vector>

#include "crdtlab/report.hpp"
#include "crdtlab/scenario.hpp"
#include "crdtlab/sim.hpp"

struct crdtlab_scenario {
  crdtlab::scenario::Scenario value;
};

struct crdtlab_report {
  std::string text;
  bool passed = false;
};

namespace {

thread_local std::string last_error;

crdtlab_status fail(crdtlab_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Maps exceptions escaping the core onto status codes.
template <typename F>
crdtlab_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const crdtlab::scenario::ParseError& e) {
    return fail(CRDTLAB_PARSE_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CRDTLAB_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CRDTLAB_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CRDTLAB_INTERNAL, e.what());
  } catch (...) {
    return fail(CRDTLAB_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* crdtlab_version(void) { return "0.1.0"; }

const char* crdtlab_last_error(void) { return last_error.c_str(); }

crdtlab_status crdtlab_scenario_parse(const char* text, size_t length, crdtlab_scenario** out) {
  if (out == nullptr || (text == nullptr && length > 0)) {
    return fail(CRDTLAB_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto s = crdtlab::scenario::parse(std::string_view(text == nullptr ? "" : text, length));
    *out = new crdtlab_scenario{std::move(s)};
    return CRDTLAB_OK;
  });
}

void crdtlab_scenario_free(crdtlab_scenario* scenario) { delete scenario; }

crdtlab_status crdtlab_scenario_set_seed(crdtlab_scenario* scenario, uint64_t seed) {
  if (scenario == nullptr) return fail(CRDTLAB_INVALID_ARGUMENT, "null scenario");
  scenario->value.seed = seed;
  return CRDTLAB_OK;
}

crdtlab_status crdtlab_scenario_set_name(crdtlab_scenario* scenario, const char* name) {
  if (scenario == nullptr || name == nullptr) {
    return fail(CRDTLAB_INVALID_ARGUMENT, "null argument");
  }
  scenario->value.name = name;
  return CRDTLAB_OK;
}

crdtlab_status crdtlab_run(const crdtlab_scenario* scenario, unsigned flags,
                           crdtlab_report** out) {
  if (scenario == nullptr || out == nullptr) {
    return fail(CRDTLAB_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    const bool trace = (flags & CRDTLAB_RUN_TRACE) != 0;
    const auto result = crdtlab::sim::run(scenario->value, {.keep_trace = trace});
    auto* report = new crdtlab_report{
        crdtlab::report::render_run(scenario->value, result, trace), result.passed()};
    *out = report;
    if (!report->passed) {
      last_error = "assertion failed";
      return CRDTLAB_ASSERTION_FAILED;
    }
    return CRDTLAB_OK;
  });
}

crdtlab_status crdtlab_compare(const crdtlab_scenario* scenario, const char* approaches,
                               crdtlab_report** out) {
  if (scenario == nullptr || approaches == nullptr || out == nullptr) {
    return fail(CRDTLAB_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    std::vector<crdtlab::Approach> list;
    std::string_view rest = approaches;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto name = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (name.empty()) continue;
      auto a = crdtlab::parse_approach(name);
      if (!a) return fail(CRDTLAB_INVALID_ARGUMENT, "unknown approach '" + std::string(name) + "'");
      if (!crdtlab::supports(*a, scenario->value.datatype)) {
        return fail(CRDTLAB_UNSUPPORTED,
                    "approach " + std::string(name) + " does not implement " +
                        std::string(crdtlab::name_of(scenario->value.datatype)));
      }
      list.push_back(*a);
    }
    if (list.empty()) return fail(CRDTLAB_INVALID_ARGUMENT, "no approaches given");

    const auto cmp = crdtlab::report::compare(scenario->value, list);
    bool asserts_ok = true;
    for (const auto& [a, r] : cmp.runs) asserts_ok = asserts_ok && r.passed();
    *out = new crdtlab_report{crdtlab::report::render_comparison(scenario->value, cmp),
                              cmp.equivalent && asserts_ok};
    if (!cmp.equivalent) return fail(CRDTLAB_DIVERGENCE, "divergence: " + cmp.divergence);
    if (!asserts_ok) return fail(CRDTLAB_ASSERTION_FAILED, "assertion failed");
    return CRDTLAB_OK;
  });
}

const char* crdtlab_report_text(const crdtlab_report* report) {
  return report == nullptr ? "" : report->text.c_str();
}

int crdtlab_report_passed(const crdtlab_report* report) {
  return report != nullptr && report->passed ? 1 : 0;
}

void crdtlab_report_free(crdtlab_report* report) { delete report; }

size_t crdtlab_datatype_count(void) { return crdtlab::all_datatypes().size(); }

const char* crdtlab_datatype_name(size_t index) {
  const auto all = crdtlab::all_datatypes();
  return index < all.size() ? crdtlab::name_of(all[index]).data() : nullptr;
}

size_t crdtlab_approach_count(void) { return crdtlab::all_approaches().size(); }

const char* crdtlab_approach_name(size_t index) {
  const auto all = crdtlab::all_approaches();
  return index < all.size() ? crdtlab::name_of(all[index]).data() : nullptr;
}

int crdtlab_supports(const char* approach, const char* datatype) {
  if (approach == nullptr || datatype == nullptr) return -1;
  auto a = crdtlab::parse_approach(approach);
  auto d = crdtlab::parse_datatype(datatype);
  if (!a || !d) return -1;
  return crdtlab::supports(*a, *d) ? 1 : 0;
}

}  // extern "C"
