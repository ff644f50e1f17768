// Copyright 2026 The samuel-oco Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Geometric covering intervals: level i partitions [1, T] into consecutive
// blocks of length 2^i (the last one truncated at T). Any interval [s, t]
// splits into O(log T) members of the cover.

#include <compare>
#include <cstdint>
#include <ostream>
#include <vector>

namespace samuel {

/// Closed 1-based time interval [s, t].
struct Interval {
  std::int64_t s = 1;
  std::int64_t t = 1;

  std::int64_t length() const { return t - s + 1; }
  bool contains(std::int64_t tau) const { return s <= tau && tau <= t; }
  friend bool operator==(const Interval&, const Interval&) = default;
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

std::ostream& operator<<(std::ostream& os, const Interval& iv);

/// Stable identity of a cover member: (level, index within level).
struct IntervalKey {
  int level = 0;
  std::int64_t index = 0;
  friend bool operator==(const IntervalKey&, const IntervalKey&) = default;
  friend auto operator<=>(const IntervalKey&, const IntervalKey&) = default;
};

class GeometricCover {
 public:
  /// Throws BadHorizon for T < 1.
  explicit GeometricCover(std::int64_t T);

  std::int64_t horizon() const { return T_; }
  /// floor(log2 T) + 1.
  int num_levels() const { return levels_; }

  /// Level-i intervals in order, as defined (the truncated tail included even
  /// when it coincides with a lower-level interval).
  std::vector<Interval> level(int i) const;

  Interval at(IntervalKey key) const;

  /// False when the keyed interval repeats an identical [s, t] from a lower
  /// level; such keys are not separate members of the set.
  bool is_canonical(IntervalKey key) const;

  /// Distinct members ordered by level then index.
  std::vector<IntervalKey> members() const;

  /// Key of the lowest level holding `iv`; throws BadInterval if absent.
  IntervalKey key_of(Interval iv) const;

  /// Canonical keys of the members containing tau, ascending level.
  /// Throws BadTime unless 1 <= tau <= T.
  std::vector<IntervalKey> active_keys(std::int64_t tau) const;

  /// Canonical keys of the members starting at tau, ascending level; empty
  /// when tau is outside [1, T].
  std::vector<IntervalKey> starting_keys(std::int64_t tau) const;

 private:
  std::int64_t T_;
  int levels_;
};

GeometricCover build_cover(std::int64_t T);

std::vector<Interval> active(const GeometricCover& cover, std::int64_t tau);

std::vector<Interval> starting_at(const GeometricCover& cover, std::int64_t tau);

/// Greedy split of J into disjoint ordered cover members whose union is J:
/// at each left endpoint take the longest member that stays inside J.
/// Throws BadInterval unless 1 <= J.s <= J.t <= T.
std::vector<Interval> decompose(const GeometricCover& cover, Interval J);

}  // namespace samuel
