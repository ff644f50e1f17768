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

// Problem definition: bounds, convex domains and white-box convex losses.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "samuel/error.hpp"
#include "samuel/numerics.hpp"

namespace samuel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Horizon, dimension and the bounds every stream must respect:
/// ||x||_2 <= D and ||x||_inf <= D_inf on the domain, ||grad||_2 <= G.
struct ProblemParams {
  int d = 1;
  std::int64_t T = 2;
  double D = 2.0;
  double D_inf = 2.0;
  double G = 2.0;

  /// Throws InvalidParams unless d >= 1, T >= 2 and all bounds exceed 1.
  void validate() const;
};

inline void ProblemParams::validate() const {
  if (d < 1) throw InvalidParams("dimension must be positive");
  if (T < 2) throw InvalidParams("horizon must be at least 2");
  if (!(D > 1.0)) throw InvalidParams("D must exceed 1");
  if (!(D_inf > 1.0)) throw InvalidParams("D_inf must exceed 1");
  if (!(G > 1.0)) throw InvalidParams("G must exceed 1");
}

enum class DomainKind { Ball, Box };

/// Centered L2 ball or L-infinity box.
template <typename Scalar>
class BasicDomain {
 public:
  using Vec = linalg::VecX<Scalar>;

  static BasicDomain ball(Scalar radius) { return BasicDomain(DomainKind::Ball, radius); }
  static BasicDomain box(Scalar halfwidth) { return BasicDomain(DomainKind::Box, halfwidth); }

  DomainKind kind() const { return kind_; }
  Scalar radius() const { return radius_; }

  Vec project(const Vec& x) const {
    return kind_ == DomainKind::Ball ? linalg::project_ball(x, radius_)
                                     : linalg::project_box(x, radius_);
  }

  bool contains(const Vec& x, Scalar tol = Scalar(0)) const {
    if (kind_ == DomainKind::Ball) return x.norm() <= radius_ + tol;
    return x.cwiseAbs().maxCoeff() <= radius_ + tol;
  }

  static Vec center(int d) { return Vec::Zero(d); }

  /// Largest L2 norm of a domain point in dimension d.
  Scalar l2_bound(int d) const {
    using std::sqrt;
    return kind_ == DomainKind::Ball ? radius_ : radius_ * sqrt(Scalar(d));
  }

  /// Largest L-infinity norm of a domain point.
  Scalar linf_bound() const { return radius_; }

 private:
  BasicDomain(DomainKind kind, Scalar radius) : kind_(kind), radius_(radius) {
    if (!(radius > Scalar(0))) throw InvalidParams("domain radius must be positive");
  }

  DomainKind kind_;
  Scalar radius_;
};

template <typename Scalar>
struct QuadraticLoss {
  linalg::VecX<Scalar> center;
  Scalar scale;  // x -> scale * ||x - center||^2
};

template <typename Scalar>
struct LinearLoss {
  linalg::VecX<Scalar> g;  // x -> g^T x
};

template <typename Scalar>
struct AbsLoss {
  linalg::VecX<Scalar> center;  // x -> ||x - center||_1
};

/// Convex loss with exact value and subgradient oracles.
template <typename Scalar>
class BasicLoss {
 public:
  using Vec = linalg::VecX<Scalar>;
  using Payload =
      std::variant<QuadraticLoss<Scalar>, LinearLoss<Scalar>, AbsLoss<Scalar>>;

  static BasicLoss quadratic(Vec center, Scalar scale) {
    return BasicLoss(QuadraticLoss<Scalar>{std::move(center), scale});
  }
  static BasicLoss linear(Vec g) { return BasicLoss(LinearLoss<Scalar>{std::move(g)}); }
  static BasicLoss abs(Vec center) { return BasicLoss(AbsLoss<Scalar>{std::move(center)}); }

  const Payload& payload() const { return payload_; }

  int dim() const {
    return std::visit(
        [](const auto& p) -> int {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, LinearLoss<Scalar>>) {
            return static_cast<int>(p.g.size());
          } else {
            return static_cast<int>(p.center.size());
          }
        },
        payload_);
  }

  Scalar eval(const Vec& x) const {
    return std::visit(
        [&x](const auto& p) -> Scalar {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, QuadraticLoss<Scalar>>) {
            return p.scale * (x - p.center).squaredNorm();
          } else if constexpr (std::is_same_v<T, LinearLoss<Scalar>>) {
            return p.g.dot(x);
          } else {
            return (x - p.center).template lpNorm<1>();
          }
        },
        payload_);
  }

  /// At kinks of the L1 loss the zero element of the subdifferential is used.
  Vec subgrad(const Vec& x) const {
    return std::visit(
        [&x](const auto& p) -> Vec {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, QuadraticLoss<Scalar>>) {
            return Scalar(2) * p.scale * (x - p.center);
          } else if constexpr (std::is_same_v<T, LinearLoss<Scalar>>) {
            return p.g;
          } else {
            return (x - p.center).unaryExpr([](Scalar v) {
              return v > Scalar(0) ? Scalar(1) : (v < Scalar(0) ? Scalar(-1) : Scalar(0));
            });
          }
        },
        payload_);
  }

  /// Largest subgradient norm over the domain, by maximizing each kind's
  /// subgradient norm analytically.
  Scalar max_subgrad_norm(const BasicDomain<Scalar>& domain, int d) const {
    using std::sqrt;
    return std::visit(
        [&](const auto& p) -> Scalar {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, QuadraticLoss<Scalar>>) {
            Scalar far;
            if (domain.kind() == DomainKind::Ball) {
              far = domain.radius() + p.center.norm();
            } else {
              far = (p.center.cwiseAbs().array() + domain.radius()).matrix().norm();
            }
            return Scalar(2) * std::abs(p.scale) * far;
          } else if constexpr (std::is_same_v<T, LinearLoss<Scalar>>) {
            return p.g.norm();
          } else {
            return sqrt(Scalar(d));
          }
        },
        payload_);
  }

 private:
  explicit BasicLoss(Payload p) : payload_(std::move(p)) {}
  Payload payload_;
};

using Domain = BasicDomain<double>;
using LossFn = BasicLoss<double>;

}  // namespace samuel
