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

// Seeded generators for property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "samuel/oco.hpp"

namespace samuel::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal() {
    std::normal_distribution<double> n;
    return n(rng_);
  }

  Vector gaussian(int d) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

  Vector in_ball(int d, double radius) {
    const Vector dir = gaussian(d).normalized();
    return dir * radius * std::pow(uniform(), 1.0 / d);
  }

  Matrix symmetric(int d) {
    const Matrix a = Matrix::NullaryExpr(d, d, [this] { return normal(); });
    return 0.5 * (a + a.transpose());
  }

  /// Random PSD matrix of the given rank; full rank when rank == d.
  Matrix psd(int d, int rank) {
    const Matrix b = Matrix::NullaryExpr(d, rank, [this] { return normal(); });
    return b * b.transpose();
  }

  std::vector<Vector> gradients(int d, int n, double scale = 1.0) {
    std::vector<Vector> out;
    for (int i = 0; i < n; ++i) out.push_back(scale * gaussian(d));
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace samuel::testing
