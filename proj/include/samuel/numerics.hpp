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

// Dense symmetric linear algebra and projections used by the experts and the
// verification oracles. Everything here is a pure function of its inputs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "samuel/error.hpp"

namespace samuel::linalg {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Spectral decomposition m = V diag(values) V^T, eigenvalues ascending,
/// eigenvectors as orthonormal columns.
template <typename Scalar>
struct SymEigen {
  VecX<Scalar> values;
  MatX<Scalar> vectors;

  /// V diag(f(values)) V^T.
  template <typename F>
  MatX<Scalar> apply(F&& f) const {
    VecX<Scalar> mapped = values.unaryExpr(f);
    return vectors * mapped.asDiagonal() * vectors.transpose();
  }

  MatX<Scalar> reconstruct() const {
    return vectors * values.asDiagonal() * vectors.transpose();
  }
};

/// Symmetric matrix built from the upper triangle of `m`; the strict lower
/// triangle is ignored.
template <typename Derived>
MatX<typename Derived::Scalar> symmetrize_upper(const Eigen::MatrixBase<Derived>& m) {
  MatX<typename Derived::Scalar> full = m.template selfadjointView<Eigen::Upper>();
  return full;
}

template <typename Derived>
SymEigen<typename Derived::Scalar> eigh(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) {
    throw InvalidMatrix("eigh: matrix is not square");
  }
  if (!m.allFinite()) {
    throw InvalidMatrix("eigh: matrix has non-finite entries");
  }
  const MatX<Scalar> full = symmetrize_upper(m);
  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> solver(full, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw InvalidMatrix("eigh: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace detail {

template <typename Scalar>
void require_psd(const SymEigen<Scalar>& eig, Scalar frobenius) {
  if (eig.values.size() == 0) return;
  if (eig.values.minCoeff() < Scalar(-1e-8) * frobenius) {
    throw NotPSD("matrix has a negative eigenvalue below tolerance");
  }
}

}  // namespace detail

/// V diag(1/sqrt(max(lambda, floor))) V^T, from a precomputed decomposition.
template <typename Scalar>
MatX<Scalar> inv_sqrt(const SymEigen<Scalar>& eig, Scalar floor) {
  return eig.apply([floor](Scalar l) {
    using std::sqrt;
    return Scalar(1) / sqrt(std::max(l, floor));
  });
}

template <typename Derived>
MatX<typename Derived::Scalar> inv_sqrt(const Eigen::MatrixBase<Derived>& m,
                                        typename Derived::Scalar floor) {
  const auto eig = eigh(m);
  detail::require_psd(eig, symmetrize_upper(m).norm());
  return inv_sqrt(eig, floor);
}

/// Principal square root with the same eigenvalue floor as inv_sqrt.
template <typename Scalar>
MatX<Scalar> sqrt_psd(const SymEigen<Scalar>& eig, Scalar floor) {
  return eig.apply([floor](Scalar l) {
    using std::sqrt;
    return sqrt(std::max(l, floor));
  });
}

template <typename Derived>
MatX<typename Derived::Scalar> sqrt_psd(const Eigen::MatrixBase<Derived>& m,
                                        typename Derived::Scalar floor) {
  const auto eig = eigh(m);
  detail::require_psd(eig, symmetrize_upper(m).norm());
  return sqrt_psd(eig, floor);
}

/// tr(m^{1/2}) for PSD m; tiny negative eigenvalues from roundoff count as 0.
template <typename Derived>
typename Derived::Scalar trace_sqrt(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto eig = eigh(m);
  detail::require_psd(eig, symmetrize_upper(m).norm());
  Scalar total(0);
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    using std::sqrt;
    total += sqrt(std::max(eig.values(i), Scalar(0)));
  }
  return total;
}

namespace detail {

// Largest s <= D/norm such that ||x * s|| <= D holds in floating point, so a
// second projection of the output is the identity.
template <typename Derived>
typename Derived::Scalar feasible_scale(const Eigen::MatrixBase<Derived>& x,
                                        typename Derived::Scalar radius) {
  using Scalar = typename Derived::Scalar;
  Scalar scale = radius / x.norm();
  while ((x * scale).norm() > radius) {
    scale = std::nextafter(scale, Scalar(0));
  }
  return scale;
}

}  // namespace detail

template <typename Derived>
VecX<typename Derived::Scalar> project_ball(const Eigen::MatrixBase<Derived>& x,
                                            typename Derived::Scalar radius) {
  if (x.norm() <= radius) return x;
  return x * detail::feasible_scale(x, radius);
}

template <typename Derived>
VecX<typename Derived::Scalar> project_box(const Eigen::MatrixBase<Derived>& x,
                                           typename Derived::Scalar halfwidth) {
  return x.cwiseMax(-halfwidth).cwiseMin(halfwidth);
}

inline constexpr int kMahalanobisMaxIterations = 200;

/// argmin over ||y||_2 <= radius of (y - x)^T A (y - x), where A is given by
/// its decomposition. KKT gives y(mu) = (A + mu I)^{-1} A x, and ||y(mu)|| is
/// monotone decreasing in mu >= 0; mu solves the secular equation
/// 1/||y(mu)|| = 1/radius with Newton steps safeguarded by bisection.
template <typename Derived>
VecX<typename Derived::Scalar> project_mahalanobis_ball(
    const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar radius,
    const SymEigen<typename Derived::Scalar>& metric) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  if (x.norm() <= radius) return x;

  const VecX<Scalar> z = metric.vectors.transpose() * x;
  const VecX<Scalar> lambda = metric.values.cwiseMax(Scalar(0));
  const VecX<Scalar> c = lambda.cwiseProduct(z);
  if (c.norm() == Scalar(0)) {
    throw ProjectionFailure("mahalanobis projection: metric annihilates the point");
  }

  auto norm_at = [&](Scalar mu) {
    return (c.array() / (lambda.array() + mu)).matrix().norm();
  };

  Scalar lo(0);
  // ||y(mu)|| <= lambda_max ||z|| / mu, so this mu is already feasible.
  Scalar hi = lambda.maxCoeff() * z.norm() / radius;
  Scalar mu = lo;
  const Scalar tol = Scalar(1e-13) * radius;
  bool converged = false;
  for (int it = 0; it < kMahalanobisMaxIterations; ++it) {
    const Scalar n = norm_at(mu);
    if (std::abs(n - radius) <= tol) {
      converged = true;
      break;
    }
    if (n > radius) {
      lo = mu;
    } else {
      hi = mu;
    }
    const VecX<Scalar> denom = lambda.array() + mu;
    const Scalar dnorm_sq =
        (c.array().square() / denom.array().cube()).sum();  // -d||y||^2/dmu / 2
    const Scalar psi = Scalar(1) / n - Scalar(1) / radius;
    const Scalar dpsi = dnorm_sq / (n * n * n);
    Scalar next = mu - psi / dpsi;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      next = lo + (hi - lo) / Scalar(2);
    }
    if (next == mu) {
      converged = true;
      break;
    }
    mu = next;
  }
  if (!converged) {
    throw ProjectionFailure("mahalanobis projection: root finder did not converge");
  }

  VecX<Scalar> y = metric.vectors * (c.array() / (lambda.array() + mu)).matrix();
  if (y.norm() > radius) {
    y *= detail::feasible_scale(y, radius);
  }
  return y;
}

template <typename Derived, typename MetricDerived>
VecX<typename Derived::Scalar> project_mahalanobis_ball(
    const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar radius,
    const Eigen::MatrixBase<MetricDerived>& metric) {
  return project_mahalanobis_ball(x, radius, eigh(metric));
}

}  // namespace samuel::linalg
