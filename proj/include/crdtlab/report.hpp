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

#ifndef CRDTLAB_REPORT_HPP_
#define CRDTLAB_REPORT_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crdtlab/operation.hpp"
#include "crdtlab/scenario.hpp"
#include "crdtlab/sim.hpp"

// Plain-text reports: one key=value per line, stable ordering.
namespace crdtlab::report {

std::string render_run(const scenario::Scenario& s, const sim::RunResult& r, bool with_trace);

struct Comparison {
  std::vector<std::pair<Approach, sim::RunResult>> runs;
  bool equivalent = true;
  std::string divergence;  // first disagreement, when not equivalent
};

/// Runs `s` under each approach with the same seed and commands and checks
/// that the final convergence-query answers agree across all of them.
/// Throws scenario::ParseError if an approach does not support the datatype.
Comparison compare(const scenario::Scenario& s, std::span<const Approach> approaches);

std::string render_comparison(const scenario::Scenario& s, const Comparison& c);

}  // namespace crdtlab::report

#endif  // CRDTLAB_REPORT_HPP_
