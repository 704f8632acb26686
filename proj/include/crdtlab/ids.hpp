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

#ifndef CRDTLAB_IDS_HPP_
#define CRDTLAB_IDS_HPP_

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace crdtlab {

/// Replica identifier. Scenario nodes are numbered 0..n-1.
enum class ReplicaId : std::uint32_t {};

constexpr ReplicaId replica(std::uint32_t index) { return ReplicaId{index}; }
constexpr std::uint32_t index_of(ReplicaId id) {
  return static_cast<std::uint32_t>(id);
}

std::string to_string(ReplicaId id);

/// Unique event identifier: (replica, per-replica counter), counter >= 1.
struct Dot {
  ReplicaId replica{};
  std::uint64_t counter = 0;

  friend auto operator<=>(const Dot&, const Dot&) = default;
};

std::string to_string(const Dot& dot);

/// Raised when two values built from different lattice constructions are
/// combined. This is a programming error, not a recoverable condition.
class ShapeMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when an operation is requested on a construction that does not
/// support it (e.g. decomposing a lexicographic product).
class UnsupportedShape : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace crdtlab

#endif  // CRDTLAB_IDS_HPP_
