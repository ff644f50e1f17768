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

#include "samuel/intervals.hpp"

#include <algorithm>
#include <string>

#include "samuel/error.hpp"

namespace samuel {

std::ostream& operator<<(std::ostream& os, const Interval& iv) {
  return os << '[' << iv.s << ',' << iv.t << ']';
}

namespace {

int floor_log2(std::int64_t v) {
  int k = 0;
  while ((std::int64_t{1} << (k + 1)) <= v) ++k;
  return k;
}

Interval raw_interval(std::int64_t T, int level, std::int64_t index) {
  const std::int64_t len = std::int64_t{1} << level;
  return {index * len + 1, std::min((index + 1) * len, T)};
}

}  // namespace

GeometricCover::GeometricCover(std::int64_t T) : T_(T) {
  if (T < 1) throw BadHorizon("cover horizon must be at least 1, got " + std::to_string(T));
  levels_ = floor_log2(T) + 1;
}

std::vector<Interval> GeometricCover::level(int i) const {
  std::vector<Interval> out;
  if (i < 0 || i >= levels_) return out;
  const std::int64_t count = ((T_ - 1) >> i) + 1;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < count; ++j) out.push_back(raw_interval(T_, i, j));
  return out;
}

Interval GeometricCover::at(IntervalKey key) const {
  if (key.level < 0 || key.level >= levels_ || key.index < 0 ||
      key.index > ((T_ - 1) >> key.level)) {
    throw BadInterval("no cover interval at level " + std::to_string(key.level) +
                      ", index " + std::to_string(key.index));
  }
  return raw_interval(T_, key.level, key.index);
}

bool GeometricCover::is_canonical(IntervalKey key) const {
  const Interval iv = at(key);
  if (key.level == 0) return true;
  // Nested levels: a repeat must already appear one level down.
  const Interval below = raw_interval(T_, key.level - 1, (iv.s - 1) >> (key.level - 1));
  return below != iv;
}

std::vector<IntervalKey> GeometricCover::members() const {
  std::vector<IntervalKey> out;
  for (int i = 0; i < levels_; ++i) {
    const std::int64_t count = ((T_ - 1) >> i) + 1;
    for (std::int64_t j = 0; j < count; ++j) {
      const IntervalKey key{i, j};
      if (is_canonical(key)) out.push_back(key);
    }
  }
  return out;
}

IntervalKey GeometricCover::key_of(Interval iv) const {
  if (iv.s >= 1 && iv.s <= iv.t && iv.t <= T_) {
    for (int i = 0; i < levels_; ++i) {
      const std::int64_t len = std::int64_t{1} << i;
      if ((iv.s - 1) % len != 0) break;
      const IntervalKey key{i, (iv.s - 1) >> i};
      if (raw_interval(T_, i, key.index) == iv) return key;
    }
  }
  throw BadInterval("interval is not a member of the cover");
}

std::vector<IntervalKey> GeometricCover::active_keys(std::int64_t tau) const {
  if (tau < 1 || tau > T_) {
    throw BadTime("time " + std::to_string(tau) + " outside [1, " + std::to_string(T_) + "]");
  }
  std::vector<IntervalKey> out;
  out.reserve(static_cast<std::size_t>(levels_));
  Interval prev{0, 0};
  for (int i = 0; i < levels_; ++i) {
    const IntervalKey key{i, (tau - 1) >> i};
    const Interval iv = raw_interval(T_, i, key.index);
    if (i > 0 && iv == prev) continue;
    out.push_back(key);
    prev = iv;
  }
  return out;
}

std::vector<IntervalKey> GeometricCover::starting_keys(std::int64_t tau) const {
  std::vector<IntervalKey> out;
  if (tau < 1 || tau > T_) return out;
  Interval prev{0, 0};
  for (int i = 0; i < levels_; ++i) {
    const std::int64_t len = std::int64_t{1} << i;
    if ((tau - 1) % len != 0) break;
    const IntervalKey key{i, (tau - 1) >> i};
    const Interval iv = raw_interval(T_, i, key.index);
    if (i > 0 && iv == prev) continue;
    out.push_back(key);
    prev = iv;
  }
  return out;
}

GeometricCover build_cover(std::int64_t T) { return GeometricCover(T); }

std::vector<Interval> active(const GeometricCover& cover, std::int64_t tau) {
  std::vector<Interval> out;
  for (const auto& key : cover.active_keys(tau)) out.push_back(cover.at(key));
  return out;
}

std::vector<Interval> starting_at(const GeometricCover& cover, std::int64_t tau) {
  std::vector<Interval> out;
  for (const auto& key : cover.starting_keys(tau)) out.push_back(cover.at(key));
  return out;
}

std::vector<Interval> decompose(const GeometricCover& cover, Interval J) {
  if (J.s < 1 || J.s > J.t || J.t > cover.horizon()) {
    throw BadInterval("interval outside [1, " + std::to_string(cover.horizon()) + "]");
  }
  std::vector<Interval> out;
  std::int64_t cursor = J.s;
  while (cursor <= J.t) {
    Interval best{cursor, cursor};
    for (const auto& key : cover.starting_keys(cursor)) {
      const Interval iv = cover.at(key);
      if (iv.t <= J.t) best = iv;
    }
    out.push_back(best);
    cursor = best.t + 1;
  }
  return out;
}

}  // namespace samuel
