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

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace crdtlab::report {

namespace {

std::string lag_label(std::uint32_t bucket) {
  const std::uint64_t lo = (std::uint64_t{1} << bucket) - 1;
  const std::uint64_t hi = (std::uint64_t{1} << (bucket + 1)) - 2;
  return lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
}

std::string query_key(const Query& q) {
  std::string k = render(q);
  std::replace(k.begin(), k.end(), ' ', '.');
  return k;
}

std::string join_numbers(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::size_t max_state(const sim::RunResult& r) {
  std::size_t m = 0;
  for (const auto& f : r.finals) m = std::max(m, f.state_size);
  return m;
}

}  // namespace

std::string render_run(const scenario::Scenario& s, const sim::RunResult& r, bool with_trace) {
  std::ostringstream os;
  os << "scenario.name=" << s.name << '\n'
     << "scenario.nodes=" << s.nodes << '\n'
     << "scenario.datatype=" << name_of(s.datatype) << '\n'
     << "scenario.approach=" << name_of(s.approach) << '\n'
     << "scenario.topology=" << scenario::name_of(s.topology) << '\n'
     << "scenario.seed=" << s.seed << '\n';

  if (with_trace) {
    for (const auto& e : r.trace) os << "trace " << sim::render(e) << '\n';
  }

  for (const auto& q : r.queries) {
    for (std::size_t n = 0; n < q.results.size(); ++n) {
      os << "query.line" << q.line << ".node" << n << '.' << query_key(q.query) << '='
         << render(q.results[n]) << '\n';
    }
  }
  for (const auto& a : r.asserts) {
    os << "assert.line" << a.line << '=' << (a.passed ? "pass" : "fail") << ' ' << a.what;
    if (!a.passed) os << " (" << a.detail << ')';
    os << '\n';
  }

  const auto& m = r.metrics;
  os << "metrics.messages=" << m.messages << '\n'
     << "metrics.payload=" << m.payload << '\n'
     << "metrics.metadata=" << m.metadata << '\n'
     << "metrics.flush_messages=" << m.flush_messages << '\n'
     << "metrics.flush_payload=" << m.flush_payload << '\n'
     << "metrics.dropped=" << m.dropped << '\n'
     << "metrics.duplicated=" << m.duplicated << '\n'
     << "metrics.duplicate_changes=" << m.duplicate_changes << '\n';
  if (s.approach == Approach::kPure) {
    os << "metrics.stable_notifications=" << m.stable_notifications << '\n';
    os << "metrics.stability_lag=";
    bool first = true;
    for (const auto& [bucket, count] : m.stability_lag) {
      if (!first) os << ',';
      first = false;
      os << lag_label(bucket) << ':' << count;
    }
    os << '\n';
  }
  os << "metrics.convergence_tick="
     << (m.convergence_tick ? std::to_string(*m.convergence_tick) : "none") << '\n'
     << "metrics.end_time=" << m.end_time << '\n';
  if (!m.payload_series.empty()) {
    os << "metrics.payload_series=" << join_numbers(m.payload_series) << '\n';
  }

  const auto queries = convergence_queries(s.datatype);
  for (std::size_t n = 0; n < r.finals.size(); ++n) {
    const auto& f = r.finals[n];
    for (std::size_t k = 0; k < queries.size(); ++k) {
      os << "final.node" << n << '.' << query_key(queries[k]) << '=' << render(f.results[k])
         << '\n';
    }
    os << "final.node" << n << ".state_size=" << f.state_size << '\n';
    if (s.approach == Approach::kPure) {
      os << "final.node" << n << ".unstable_entries=" << f.unstable_entries << '\n';
    }
    os << "final.node" << n << ".state=" << f.state << '\n';
  }
  for (const auto& w : r.warnings) os << "warning=" << w << '\n';
  os << "result=" << (r.passed() ? "pass" : "fail") << '\n';
  return os.str();
}

Comparison compare(const scenario::Scenario& s, std::span<const Approach> approaches) {
  Comparison out;
  for (auto a : approaches) {
    auto variant = scenario::with_approach(s, a);
    out.runs.emplace_back(a, sim::run(variant, {.keep_trace = false}));
  }
  if (out.runs.empty()) return out;

  const auto queries = convergence_queries(s.datatype);
  const auto& [base_approach, base] = out.runs.front();
  for (const auto& [a, r] : out.runs) {
    for (std::size_t n = 0; n < r.finals.size() && out.equivalent; ++n) {
      for (std::size_t k = 0; k < queries.size(); ++k) {
        const auto& want = base.finals[0].results[k];
        const auto& got = r.finals[n].results[k];
        if (got != want) {
          out.equivalent = false;
          out.divergence = render(queries[k]) + ": " + std::string(name_of(base_approach)) +
                           " node 0 has " + render(want) + ", " + std::string(name_of(a)) +
                           " node " + std::to_string(n) + " has " + render(got);
          break;
        }
      }
    }
  }
  return out;
}

std::string render_comparison(const scenario::Scenario& s, const Comparison& c) {
  std::ostringstream os;
  os << "scenario.name=" << s.name << '\n'
     << "scenario.nodes=" << s.nodes << '\n'
     << "scenario.datatype=" << name_of(s.datatype) << '\n'
     << "scenario.seed=" << s.seed << '\n';

  const char* headers[] = {"approach", "messages", "payload", "metadata", "flush_payload",
                           "max_state", "converged_at", "asserts"};
  std::vector<std::vector<std::string>> rows;
  rows.emplace_back(std::begin(headers), std::end(headers));
  for (const auto& [a, r] : c.runs) {
    const auto& m = r.metrics;
    rows.push_back({std::string(name_of(a)), std::to_string(m.messages),
                    std::to_string(m.payload), std::to_string(m.metadata),
                    std::to_string(m.flush_payload), std::to_string(max_state(r)),
                    m.convergence_tick ? std::to_string(*m.convergence_tick) : "none",
                    r.passed() ? "pass" : "fail"});
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t k = 0; k < row.size(); ++k) {
      std::ostringstream cell;
      if (k == 0) {
        cell << std::left << std::setw(static_cast<int>(width[k])) << row[k];
      } else {
        cell << "  " << std::right << std::setw(static_cast<int>(width[k])) << row[k];
      }
      line += cell.str();
    }
    os << line << '\n';
  }

  if (!c.runs.empty()) {
    const auto queries = convergence_queries(s.datatype);
    const auto& first = c.runs.front().second;
    for (std::size_t k = 0; k < queries.size(); ++k) {
      os << "final." << query_key(queries[k]) << '=' << render(first.finals[0].results[k])
         << '\n';
    }
  }
  os << "equivalence=" << (c.equivalent ? "ok" : "DIVERGED: " + c.divergence) << '\n';
  bool all_pass = c.equivalent;
  for (const auto& [a, r] : c.runs) all_pass = all_pass && r.passed();
  os << "result=" << (all_pass ? "pass" : "fail") << '\n';
  return os.str();
}

}  // namespace crdtlab::report
