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

// Multiplicative weights over (cover interval, eta) slots with sleeping
// experts, plus the fixed-pool variant with periodic re-initialization.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "samuel/experts.hpp"
#include "samuel/intervals.hpp"
#include "samuel/oco.hpp"
#include "samuel/trace.hpp"

namespace samuel {

/// ceil(4 ln(d T D^2 G^2)), at least 1.
int q_count(const ProblemParams& params);

/// eta_q for q = 1..Q, strictly decreasing.
struct EtaGrid {
  std::vector<double> values;

  int Q() const { return static_cast<int>(values.size()); }
  /// eta_q = 1 / (2 G D 2^q).
  static EtaGrid online(const ProblemParams& params, int Q);
  /// eta_q = 1 / 2^q.
  static EtaGrid offline(int Q);
};

struct MetaOptions {
  ExpertConfig expert;
  CombineMode combine = CombineMode::Average;
  std::uint64_t seed = 0;
  std::optional<int> Q;     // overrides q_count
  bool clip_r = false;      // clip r to [-2GD, 2GD] instead of raising
  bool warm_start = false;  // newborn experts start at the current aggregate
};

/// Online meta-learner state. One instance per run, driven by alternating
/// predict() and update() calls.
class MetaState {
 public:
  struct Slot {
    Interval interval;
    Expert expert;
    std::vector<double> weights;  // indexed by q - 1
  };

  /// Weights min(1/2, eta_q) for every interval starting at 1, zero
  /// elsewhere; one expert per such interval.
  MetaState(const ProblemParams& params, const GeometricCover& cover, const Domain& domain,
            const MetaOptions& options);

  std::int64_t round() const { return tau_; }
  const EtaGrid& eta() const { return eta_; }
  const std::map<IntervalKey, Slot>& alive() const { return alive_; }
  std::int64_t alive_slots() const {
    return static_cast<std::int64_t>(alive_.size()) * eta_.Q();
  }

  /// Zero for intervals not alive at the current round.
  double weight(IntervalKey key, int q) const;
  /// W_tau, summed in (interval key, q) order. Throws CorruptedState when
  /// non-positive or non-finite.
  double total_weight() const;

  /// Aggregate point for the current round (weighted average or a weighted
  /// draw, per the combine mode).
  Vector predict();

  /// Reveals the loss for the current round and advances to the next.
  /// Throws AssumptionViolation if some |eta_q r| exceeds 1 and clipping is off.
  RoundRecord update(const LossFn& loss);

 private:
  void spawn_starting(std::int64_t tau, const Vector& warm_point);

  ProblemParams params_;
  const GeometricCover* cover_;
  Domain domain_;
  MetaOptions options_;
  EtaGrid eta_;
  std::map<IntervalKey, Slot> alive_;
  std::int64_t tau_ = 1;
  std::mt19937_64 rng_;
  std::optional<Vector> prediction_;
};

MetaState meta_init(const ProblemParams& params, const GeometricCover& cover,
                    const Domain& domain, const MetaOptions& options);

Vector meta_predict(MetaState& state);

RoundRecord meta_update(MetaState& state, const LossFn& loss);

/// Full online run. Throws InvalidParams if the stream length is not T.
RunTrace run(const ProblemParams& params, const GeometricCover& cover, const Domain& domain,
             const MetaOptions& options, const std::vector<LossFn>& stream);

/// A single learner over the whole horizon, recorded in the same trace format.
RunTrace run_single(const ProblemParams& params, const Domain& domain,
                    const ExpertConfig& expert, const std::vector<LossFn>& stream);

struct OfflineConfig {
  std::vector<double> step_scales{2.0};
  std::vector<double> alphas{1.0, 0.99, 0.9};
  std::int64_t K = 64;  // re-initialization period
  std::optional<int> Q;
  std::uint64_t seed = 0;
  double eps = 1e-8;
  ProjectionKind projection = ProjectionKind::Mahalanobis;

  void validate() const;
};

/// Fixed pool of decayed full-matrix experts, one per (step scale, alpha),
/// combined by weighted sampling. Every K rounds the weights reset and all
/// experts restart from the sampled point.
RunTrace run_offline(const ProblemParams& params, const Domain& domain,
                     const OfflineConfig& config, const std::vector<LossFn>& stream);

}  // namespace samuel
