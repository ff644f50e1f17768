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

#include "samuel/experts.hpp"

#include <cmath>
#include <iostream>
#include <utility>

namespace samuel {

std::string_view to_string(ExpertKind kind) {
  switch (kind) {
    case ExpertKind::FullAdagrad:
      return "adagrad-full";
    case ExpertKind::DiagAdagrad:
      return "adagrad-diag";
    case ExpertKind::OGDSqrt:
      return "ogd-sqrt";
    case ExpertKind::OGDInvT:
      return "ogd-invt";
    case ExpertKind::DecayedAdagrad:
      return "adagrad-decayed";
  }
  return "unknown";
}

ExpertKind parse_expert_kind(std::string_view name) {
  for (auto kind : {ExpertKind::FullAdagrad, ExpertKind::DiagAdagrad, ExpertKind::OGDSqrt,
                    ExpertKind::OGDInvT, ExpertKind::DecayedAdagrad}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown expert kind '" + std::string(name) + "'");
}

void ExpertConfig::validate() const {
  if (!(step_scale > 0.0)) throw InvalidParams("expert step scale must be positive");
  if (!(eps > 0.0)) throw InvalidParams("expert floor eps must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParams("decay alpha must lie in (0, 1]");
}

Expert::Expert(const ExpertConfig& config, const Domain& domain, Vector start,
               std::int64_t birth)
    : config_(config), domain_(domain), x_(std::move(start)), birth_(birth) {
  config_.validate();
  if (!domain_.contains(x_)) {
    std::cerr << "warning: expert start point outside the domain, projecting\n";
    x_ = domain_.project(x_);
  }
  const auto d = x_.size();
  switch (config_.kind) {
    case ExpertKind::FullAdagrad:
    case ExpertKind::DecayedAdagrad:
      outer_ = Matrix::Zero(d, d);
      break;
    case ExpertKind::DiagAdagrad:
      diag_ = Vector::Zero(d);
      break;
    default:
      break;
  }
}

Matrix Expert::preconditioner() const {
  return config_.eps * Matrix::Identity(outer_.rows(), outer_.cols()) + outer_;
}

Vector Expert::diag_preconditioner() const { return diag_.array() + config_.eps; }

void Expert::update(const LossFn& loss) {
  const Vector g = loss.subgrad(x_);
  if (!g.allFinite()) {
    throw NonFiniteGradient("expert born at " + std::to_string(birth_) +
                            " received a non-finite subgradient at local step " +
                            std::to_string(steps_ + 1));
  }
  ++steps_;
  switch (config_.kind) {
    case ExpertKind::FullAdagrad:
    case ExpertKind::DecayedAdagrad:
      update_full(g);
      break;
    case ExpertKind::DiagAdagrad:
      update_diag(g);
      break;
    case ExpertKind::OGDSqrt:
      update_ogd(g, config_.step_scale / std::sqrt(static_cast<double>(steps_)));
      break;
    case ExpertKind::OGDInvT:
      update_ogd(g, config_.step_scale / static_cast<double>(steps_));
      break;
  }
}

void Expert::update_full(const Vector& g) {
  if (config_.kind == ExpertKind::DecayedAdagrad) {
    // alpha == 1 multiplies exactly, so the full-matrix path is reproduced bit for bit.
    outer_ = config_.alpha * outer_;
  }
  outer_.noalias() += g * g.transpose();
  if (g.squaredNorm() == 0.0) return;

  const auto eig = linalg::eigh(preconditioner());
  const Vector step = x_ - config_.step_scale * (linalg::inv_sqrt(eig, config_.eps) * g);
  if (domain_.kind() == DomainKind::Ball && config_.projection == ProjectionKind::Mahalanobis) {
    // Metric (eps I + M)^{1/2} shares the eigenvectors; only the spectrum changes.
    linalg::SymEigen<double> metric{eig.values.cwiseMax(config_.eps).cwiseSqrt(), eig.vectors};
    x_ = linalg::project_mahalanobis_ball(step, domain_.radius(), metric);
  } else {
    // Box domains with a full preconditioner fall back to the Euclidean clamp.
    x_ = domain_.project(step);
  }
}

void Expert::update_diag(const Vector& g) {
  diag_.array() += g.array().square();
  if (g.squaredNorm() == 0.0) return;
  const Vector scale = diag_preconditioner().cwiseSqrt();
  const Vector step = x_ - config_.step_scale * g.cwiseQuotient(scale);
  if (domain_.kind() == DomainKind::Ball && config_.projection == ProjectionKind::Mahalanobis) {
    linalg::SymEigen<double> metric{scale, Matrix::Identity(g.size(), g.size())};
    x_ = linalg::project_mahalanobis_ball(step, domain_.radius(), metric);
  } else {
    x_ = domain_.project(step);
  }
}

void Expert::update_ogd(const Vector& g, double step) {
  if (g.squaredNorm() == 0.0) return;
  x_ = domain_.project(x_ - step * g);
}

Expert spawn(const ExpertConfig& config, const Domain& domain, Vector start, std::int64_t birth) {
  return Expert(config, domain, std::move(start), birth);
}

}  // namespace samuel
