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

// Black-box online convex optimization learners. Each instance runs on its
// own iterate and sees the loss as a white-box function.

#include <cstdint>
#include <string>
#include <string_view>

#include "samuel/oco.hpp"

namespace samuel {

enum class ExpertKind { FullAdagrad, DiagAdagrad, OGDSqrt, OGDInvT, DecayedAdagrad };

enum class ProjectionKind { Mahalanobis, Euclidean };

std::string_view to_string(ExpertKind kind);
/// Accepts the CLI spellings: adagrad-full, adagrad-diag, ogd-sqrt, ogd-invt,
/// adagrad-decayed. Throws ConfigError otherwise.
ExpertKind parse_expert_kind(std::string_view name);

struct ExpertConfig {
  ExpertKind kind = ExpertKind::FullAdagrad;
  double step_scale = 2.0;  // eta_exp
  double alpha = 1.0;       // accumulator decay, DecayedAdagrad only
  double eps = 1e-8;        // eigenvalue / diagonal floor
  ProjectionKind projection = ProjectionKind::Mahalanobis;

  /// Throws InvalidParams if step_scale <= 0, eps <= 0 or alpha outside (0, 1].
  void validate() const;
};

class Expert {
 public:
  /// Starts at `start` with a zero accumulator. A start point outside the
  /// domain is projected and a warning is written to stderr.
  Expert(const ExpertConfig& config, const Domain& domain, Vector start, std::int64_t birth);

  const Vector& predict() const { return x_; }

  /// One step on the subgradient of `loss` at the current iterate.
  /// Throws NonFiniteGradient if the subgradient has non-finite entries.
  void update(const LossFn& loss);

  const ExpertConfig& config() const { return config_; }
  std::int64_t birth() const { return birth_; }
  std::int64_t steps() const { return steps_; }

  /// eps I + accumulated (possibly decayed) outer products. Full kinds only.
  Matrix preconditioner() const;
  /// eps + accumulated squared coordinates. DiagAdagrad only.
  Vector diag_preconditioner() const;

 private:
  void update_full(const Vector& g);
  void update_diag(const Vector& g);
  void update_ogd(const Vector& g, double step);

  ExpertConfig config_;
  Domain domain_;
  Vector x_;
  Matrix outer_;  // full kinds
  Vector diag_;   // DiagAdagrad
  std::int64_t steps_ = 0;
  std::int64_t birth_ = 1;
};

Expert spawn(const ExpertConfig& config, const Domain& domain, Vector start, std::int64_t birth);

}  // namespace samuel
