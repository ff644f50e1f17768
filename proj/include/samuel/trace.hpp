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

// Per-round record of a run. Append-only; owned by whoever drives the rounds.

#include <cstdint>
#include <string>
#include <vector>

#include "samuel/intervals.hpp"
#include "samuel/oco.hpp"

namespace samuel {

enum class CombineMode { Average, Sample };

/// One alive expert at one round.
struct SlotRecord {
  IntervalKey key;
  Interval interval;
  double expert_loss = 0.0;
  double r = 0.0;
  // w_tau(I, q) for q = 1..Q as used in this round. Empty for traces read
  // back from CSV, where only the two sums survive.
  std::vector<double> weights;
  double weight_sum = 0.0;
  double pseudo_weight_sum = 0.0;
};

struct RoundRecord {
  std::int64_t tau = 0;
  Vector x;
  double loss = 0.0;
  double W = 0.0;
  std::int64_t alive_slots = 0;
  std::vector<SlotRecord> slots;
};

struct RunTrace {
  ProblemParams params;
  std::string algorithm;
  CombineMode combine = CombineMode::Average;
  std::uint64_t seed = 0;
  std::vector<double> eta;  // multiplicative-weight grid; empty for solo learners
  std::vector<LossFn> losses;
  std::vector<RoundRecord> rounds;
  std::vector<std::int64_t> reinit_rounds;
};

/// sum over tau in J of loss_tau(x_tau) - loss_tau(comparator).
/// Throws BadInterval if J is not inside the recorded rounds.
double regret(const RunTrace& trace, Interval J, const Vector& comparator);

/// Subgradients at the recorded predictions, rounds J.s..J.t.
std::vector<Vector> trace_gradients(const RunTrace& trace, Interval J);

inline double regret(const RunTrace& trace, Interval J, const Vector& comparator) {
  const auto n = static_cast<std::int64_t>(trace.rounds.size());
  if (J.s < 1 || J.s > J.t || J.t > n || J.t > static_cast<std::int64_t>(trace.losses.size())) {
    throw BadInterval("regret interval outside the recorded rounds");
  }
  double total = 0.0;
  for (std::int64_t tau = J.s; tau <= J.t; ++tau) {
    const auto i = static_cast<std::size_t>(tau - 1);
    total += trace.rounds[i].loss - trace.losses[i].eval(comparator);
  }
  return total;
}

inline std::vector<Vector> trace_gradients(const RunTrace& trace, Interval J) {
  const auto n = static_cast<std::int64_t>(trace.rounds.size());
  if (J.s < 1 || J.s > J.t || J.t > n) throw BadInterval("gradient interval outside the trace");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(J.length()));
  for (std::int64_t tau = J.s; tau <= J.t; ++tau) {
    const auto i = static_cast<std::size_t>(tau - 1);
    out.push_back(trace.losses[i].subgrad(trace.rounds[i].x));
  }
  return out;
}

}  // namespace samuel
