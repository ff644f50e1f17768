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

#include <algorithm>
#include <cmath>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "samuel/error.hpp"
#include "samuel/meta.hpp"
#include "samuel/regret_lab.hpp"
#include "support.hpp"

using namespace samuel;
using samuel::testing::Gen;

namespace {

ProblemParams params_of(int d, std::int64_t T, double D, double G) {
  ProblemParams p;
  p.d = d;
  p.T = T;
  p.D = D;
  p.D_inf = D;
  p.G = G;
  return p;
}

double median_loss(const std::vector<double>& centers, double radius) {
  std::vector<double> c = centers;
  std::sort(c.begin(), c.end());
  const double m = std::clamp(c[c.size() / 2], -radius, radius);
  double total = 0.0;
  for (double v : c) total += std::abs(m - v);
  return total;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("best fixed point of the shifting quadratic is the origin with loss T") {
  std::vector<LossFn> losses;
  for (int t = 1; t <= 8192; ++t) {
    losses.push_back(LossFn::quadratic(Vector::Constant(1, t <= 4096 ? -1.0 : 1.0), 1.0));
  }
  const auto best = lab::best_fixed(losses, Domain::ball(2.0), 1);
  CHECK(best.point[0] == 0.0);
  CHECK(best.loss == 8192.0);
}

TEST_CASE("shared-scale quadratics plus linear terms against a dense grid") {
  Gen gen(51);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<LossFn> losses;
    const double a = gen.uniform(0.2, 2.0);
    for (int i = 0; i < 20; ++i) {
      losses.push_back(gen.uniform() < 0.7 ? LossFn::quadratic(Vector::Constant(1, gen.uniform(-4, 4)), a)
                                           : LossFn::linear(Vector::Constant(1, gen.uniform(-3, 3))));
    }
    const auto best = lab::best_fixed(losses, Domain::ball(2.0), 1);
    double grid_best = 1e300;
    for (int k = 0; k <= 400000; ++k) {
      const Vector x = Vector::Constant(1, -2.0 + 4.0 * k / 400000);
      double f = 0.0;
      for (const auto& l : losses) f += l.eval(x);
      grid_best = std::min(grid_best, f);
    }
    CHECK(best.loss <= grid_best + 1e-9 * (1.0 + std::abs(grid_best)));
  }
}

TEST_CASE("mixed-scale quadratics reach the projected weighted mean") {
  Gen gen(52);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<LossFn> losses;
    Vector num = Vector::Zero(2);
    double den = 0.0;
    for (int i = 0; i < 30; ++i) {
      const double a = gen.uniform(0.1, 2.0);
      const Vector c = 3.0 * gen.gaussian(2);
      losses.push_back(LossFn::quadratic(c, a));
      num += a * c;
      den += a;
    }
    const Domain dom = Domain::ball(1.0);
    const Vector x = dom.project(num / den);
    double expect = 0.0;
    for (const auto& l : losses) expect += l.eval(x);
    const auto best = lab::best_fixed(losses, dom, 2);
    CHECK(best.loss == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("absolute losses reach the clamped median") {
  Gen gen(53);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<LossFn> losses;
    std::vector<double> centers;
    const int n = static_cast<int>(gen.integer(1, 40));
    for (int i = 0; i < n; ++i) {
      centers.push_back(gen.uniform(-3, 3));
      losses.push_back(LossFn::abs(Vector::Constant(1, centers.back())));
    }
    const auto best = lab::best_fixed(losses, Domain::box(2.0), 1);
    const double expect = median_loss(centers, 2.0);
    CHECK(best.loss <= expect + 1e-7 * (1.0 + expect));
    CHECK(best.loss >= expect - 1e-12);
  }
}

TEST_CASE("linear sums go to the boundary") {
  std::vector<LossFn> losses{LossFn::linear(vec2(1.0, 0.0)), LossFn::linear(vec2(2.0, -4.0))};
  const auto ball = lab::best_fixed(losses, Domain::ball(2.0), 2);
  CHECK((ball.point - vec2(-1.2, 1.6)).norm() <= 1e-12);
  CHECK(ball.loss == doctest::Approx(-10.0));
  const auto box = lab::best_fixed(losses, Domain::box(1.5), 2);
  CHECK(box.point == vec2(-1.5, 1.5));
  CHECK(box.loss == doctest::Approx(-10.5));
  CHECK_THROWS_AS(lab::best_fixed({}, Domain::ball(1.0), 1), BadInterval);
}

TEST_CASE("full-matrix energy: closed form is a lower bound and is attained") {
  Gen gen(54);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = static_cast<int>(gen.integer(2, 4));
    const auto grads = gen.gradients(d, static_cast<int>(gen.integer(d, 30)));
    const double closed = lab::min_H_energy(grads, d);
    Matrix M = Matrix::Zero(d, d);
    for (const auto& g : grads) M += g * g.transpose();
    const Matrix root = M.sqrt();
    const Matrix H_star = static_cast<double>(d) * root / root.trace();
    double at_star = 0.0;
    for (const auto& g : grads) at_star += g.dot(H_star.inverse() * g);
    CHECK(at_star == doctest::Approx(closed).epsilon(1e-8));
    for (int k = 0; k < 200; ++k) {
      Matrix H = gen.psd(d, d) + 1e-6 * Matrix::Identity(d, d);
      H *= static_cast<double>(d) / H.trace();
      double value = 0.0;
      for (const auto& g : grads) value += g.dot(H.inverse() * g);
      CHECK(value >= closed * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("bound formulas on hand examples") {
  const std::vector<Vector> grads{vec2(3.0, 0.0), vec2(0.0, 4.0)};
  // tr(diag(9, 16)^{1/2})^2 / 2 = 49 / 2
  CHECK(lab::min_H_energy(grads, 2) == doctest::Approx(24.5));
  const double lnT = std::log(16.0);
  CHECK(lab::adaptive_regret_bound(grads, params_of(2, 16, 2.0, 5.0)) ==
        doctest::Approx(2.0 * lnT * 5.0 * std::sqrt(lnT)));
  CHECK(lab::adaptive_regret_bound(grads, params_of(2, 16, 2.0, 1.01)) ==
        doctest::Approx(2.0 * lnT * 7.0));

  const std::vector<Vector> g2{vec2(1.0, 0.0), vec2(1.0, 2.0)};
  CHECK(lab::diag_bound(g2, params_of(2, 16, 2.0, 5.0)) ==
        doctest::Approx(2.0 * (std::sqrt(2.0) + 2.0)));
  CHECK(lab::diag_bound_summed(g2, params_of(2, 16, 2.0, 5.0)) == doctest::Approx(8.0));

  const auto p = params_of(1, 1024, 2.0, 6.0);
  const double X = std::log(1024.0 * 4.0 * 36.0);
  CHECK(lab::pseudo_weight_envelope(1, p) == doctest::Approx(X * std::log(1024.0)));
  CHECK(lab::pseudo_weight_envelope(10, p) ==
        doctest::Approx(10.0 * (std::log(10.0) + 1.0) * X * std::log(1024.0)));
}

namespace {

RunTrace small_run(std::uint64_t seed, std::int64_t T) {
  Gen gen(seed);
  const auto p = params_of(2, T, 1.5, 3.1);
  std::vector<LossFn> stream;
  for (std::int64_t t = 0; t < T; ++t) stream.push_back(LossFn::quadratic(gen.in_ball(2, 0.5), 0.5));
  const GeometricCover cover(T);
  return run(p, cover, Domain::ball(1.5), MetaOptions{}, stream);
}

}  // namespace

TEST_CASE("check_trace on a genuine run") {
  const RunTrace trace = small_run(55, 64);
  const GeometricCover cover(64);
  lab::CheckOptions opt;
  opt.extra_intervals = {{3, 50}, {10, 64}};
  const auto report = lab::check_trace(trace, cover, trace.params, Domain::ball(1.5), opt);
  int regret_checks = 0, stitching = 0;
  for (const auto& r : report.results) {
    if (r.name == "nonpositive_weighted_regret" || r.name == "pseudo_weight_count" ||
        r.name == "stitching" || r.name == "regret_bound") {
      CHECK_MESSAGE(r.pass, r.name);
    }
    regret_checks += r.name == "regret_bound";
    stitching += r.name == "stitching";
  }
  CHECK(regret_checks == static_cast<int>(cover.members().size()) + 2);
  CHECK(stitching == 2);
  CHECK(report.info.count("pseudo_weight_envelope_worst_ratio") == 1);
  const auto j = lab::to_json(report);
  CHECK(j["checks"][0].contains("check_name"));
}

TEST_CASE("check_trace rejects inconsistent traces") {
  const GeometricCover cover(32);
  const RunTrace good = small_run(56, 32);
  lab::CheckOptions opt;
  opt.check_regret = false;

  RunTrace t = good;
  t.rounds[5].tau = 99;
  CHECK_THROWS_AS(lab::check_trace(t, cover, t.params, Domain::ball(1.5), opt), TraceError);
  t = good;
  t.rounds.pop_back();
  CHECK_THROWS_AS(lab::check_trace(t, cover, t.params, Domain::ball(1.5), opt), TraceError);
  t = good;
  t.rounds[3].W *= 2.0;
  CHECK_THROWS_AS(lab::check_trace(t, cover, t.params, Domain::ball(1.5), opt), TraceError);
  t = good;
  t.rounds[3].slots[0].weights.pop_back();
  CHECK_THROWS_AS(lab::check_trace(t, cover, t.params, Domain::ball(1.5), opt), TraceError);
}

TEST_CASE("regret report arithmetic") {
  const RunTrace trace = small_run(57, 32);
  const auto rep = lab::regret_report(trace, {5, 20}, Domain::ball(1.5), 10.0);
  double algo = 0.0;
  for (int t = 5; t <= 20; ++t) algo += trace.rounds[static_cast<std::size_t>(t - 1)].loss;
  CHECK(rep.algo_loss == doctest::Approx(algo));
  CHECK(rep.regret == doctest::Approx(rep.algo_loss - rep.comparator_loss));
  CHECK(rep.regret == doctest::Approx(regret(trace, {5, 20}, rep.comparator)));
  CHECK_THROWS_AS(lab::regret_report(trace, {5, 40}, Domain::ball(1.5), 10.0), BadInterval);
}

TEST_CASE("an inflated weight trips the envelope and count checks") {
  const GeometricCover cover(64);
  RunTrace t = small_run(58, 64);
  lab::CheckOptions opt;
  opt.check_regret = false;
  opt.check_stitching = false;
  opt.envelope_slack = 10.0;  // roomy enough that the untouched trace passes
  auto passes = [&](const RunTrace& trace, const std::string& name) {
    for (const auto& r : lab::check_trace(trace, cover, trace.params, Domain::ball(1.5), opt).results) {
      if (r.name == name) return r.pass;
    }
    return false;
  };
  REQUIRE(passes(t, "pseudo_weight_envelope"));
  REQUIRE(passes(t, "pseudo_weight_count"));
  auto& rec = t.rounds[20];
  auto& w = rec.slots[1].weights[3];
  rec.W += w * (1e6 - 1.0);
  w *= 1e6;
  CHECK_FALSE(passes(t, "pseudo_weight_envelope"));
  CHECK_FALSE(passes(t, "pseudo_weight_count"));
}
