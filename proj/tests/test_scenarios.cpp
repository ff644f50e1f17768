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

#include <doctest.h>

#include "samuel/error.hpp"
#include "samuel/scenarios.hpp"
#include "support.hpp"

using namespace samuel;
using namespace samuel::scenarios;
using samuel::testing::Gen;

namespace {

Scenario of_kind(ScenarioKind kind, int d, std::int64_t T) {
  Scenario sc;
  sc.kind = kind;
  sc.d = d;
  sc.T = T;
  return sc;
}

bool same_stream(const std::vector<LossFn>& a, const std::vector<LossFn>& b, int d) {
  if (a.size() != b.size()) return false;
  const Vector probe = Vector::LinSpaced(d, -0.3, 0.7);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].eval(probe) != b[i].eval(probe) || a[i].subgrad(probe) != b[i].subgrad(probe)) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("kind names round-trip") {
  for (auto kind : {ScenarioKind::ShiftingQuadratic, ScenarioKind::PiecewiseDrift,
                    ScenarioKind::RandomLinear, ScenarioKind::SparseCoordinate,
                    ScenarioKind::RotatingLinear}) {
    CHECK(parse_scenario_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_scenario_kind("sawtooth"), BadScenario);
}

TEST_CASE("shifting quadratic") {
  Scenario sc = of_kind(ScenarioKind::ShiftingQuadratic, 1, 10);
  const auto stream = generate(sc);
  REQUIRE(stream.size() == 10);
  const Vector zero = Vector::Zero(1);
  for (int t = 1; t <= 10; ++t) {
    CHECK(stream[static_cast<std::size_t>(t - 1)].eval(zero) == 1.0);
    const double expected_grad = t <= 5 ? 2.0 : -2.0;  // 2 (0 - c)
    CHECK(stream[static_cast<std::size_t>(t - 1)].subgrad(zero)[0] == expected_grad);
  }
  CHECK(change_points_of(sc) == std::vector<std::int64_t>{6});
  CHECK(segments_of(sc) == std::vector<Interval>{{1, 5}, {6, 10}});
  const auto p = assumptions_of(sc);
  CHECK(p.D == 2.0);
  CHECK(p.G == 6.0);  // 2 (radius + |c|)
}

TEST_CASE("validation") {
  Scenario sc = of_kind(ScenarioKind::ShiftingQuadratic, 2, 10);
  CHECK_THROWS_AS(validate(sc), BadScenario);
  sc = of_kind(ScenarioKind::RotatingLinear, 1, 10);
  CHECK_THROWS_AS(validate(sc), BadScenario);
  sc = of_kind(ScenarioKind::PiecewiseDrift, 2, 1);
  CHECK_THROWS_AS(validate(sc), BadScenario);
  sc = of_kind(ScenarioKind::PiecewiseDrift, 2, 10);
  sc.change_points = {5, 5};
  CHECK_THROWS_AS(validate(sc), BadScenario);
  sc.change_points = {1};
  CHECK_THROWS_AS(validate(sc), BadScenario);
  sc.change_points = {11};
  CHECK_THROWS_AS(validate(sc), BadScenario);
  sc.change_points = {2, 10};
  CHECK_NOTHROW(validate(sc));
  sc.G_cap = 0.5;
  CHECK_THROWS_AS(assumptions_of(sc), BadScenario);
}

TEST_CASE("streams are pure functions of the scenario and seed") {
  for (auto kind : {ScenarioKind::PiecewiseDrift, ScenarioKind::RandomLinear,
                    ScenarioKind::SparseCoordinate, ScenarioKind::RotatingLinear}) {
    Scenario sc = of_kind(kind, 3, 200);
    sc.num_changes = 3;
    sc.seed = 9;
    CHECK(same_stream(generate(sc), generate(sc), 3));
    Scenario other = sc;
    other.seed = 10;
    CHECK_FALSE(same_stream(generate(sc), generate(other), 3));
  }
}

TEST_CASE("drawn change points and segments") {
  Gen gen(61);
  for (int trial = 0; trial < 100; ++trial) {
    Scenario sc = of_kind(ScenarioKind::PiecewiseDrift, 2, gen.integer(2, 300));
    sc.num_changes = static_cast<int>(gen.integer(0, std::min<std::int64_t>(5, sc.T - 1)));
    sc.seed = static_cast<std::uint64_t>(trial);
    const auto cps = change_points_of(sc);
    CHECK(static_cast<int>(cps.size()) == sc.num_changes);
    const auto segs = segments_of(sc);
    std::int64_t cursor = 1;
    for (const auto& s : segs) {
      CHECK(s.s == cursor);
      CHECK(s.t >= s.s);
      cursor = s.t + 1;
    }
    CHECK(cursor == sc.T + 1);

    // Each drift segment holds one quadratic.
    const auto stream = generate(sc);
    for (const auto& s : segs) {
      const auto& first = std::get<QuadraticLoss<double>>(stream[static_cast<std::size_t>(s.s - 1)].payload());
      CHECK(first.center.norm() <= sc.center_radius);
      for (std::int64_t t = s.s; t <= s.t; ++t) {
        const auto& q = std::get<QuadraticLoss<double>>(stream[static_cast<std::size_t>(t - 1)].payload());
        CHECK(q.center == first.center);
      }
    }
  }
}

TEST_CASE("declared bounds hold for every loss over the domain") {
  Gen gen(62);
  for (auto kind : {ScenarioKind::PiecewiseDrift, ScenarioKind::RandomLinear,
                    ScenarioKind::SparseCoordinate, ScenarioKind::RotatingLinear}) {
    Scenario sc = of_kind(kind, 4, 128);
    sc.num_changes = 2;
    sc.radius = 1.5;
    const auto p = assumptions_of(sc);
    const Domain dom = domain_of(sc);
    CHECK(p.D > 1.0);
    CHECK(p.D_inf > 1.0);
    CHECK(p.G > 1.0);
    for (const auto& f : generate(sc)) {
      for (int k = 0; k < 5; ++k) {
        const Vector x = dom.project(3.0 * gen.gaussian(4));
        CHECK(x.norm() <= p.D * (1 + 1e-12));
        CHECK(x.cwiseAbs().maxCoeff() <= p.D_inf * (1 + 1e-12));
        CHECK(f.subgrad(x).norm() <= p.G * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("sparse coordinate streams use one coordinate per phase on a box") {
  Scenario sc = of_kind(ScenarioKind::SparseCoordinate, 5, 100);
  sc.change_points = {30, 70};
  CHECK(domain_of(sc).kind() == DomainKind::Box);
  const auto stream = generate(sc);
  for (const auto& seg : segments_of(sc)) {
    int coord = -1;
    for (std::int64_t t = seg.s; t <= seg.t; ++t) {
      const Vector g = stream[static_cast<std::size_t>(t - 1)].subgrad(Vector::Zero(5));
      CHECK((g.array() != 0.0).count() == 1);
      int idx = 0;
      g.cwiseAbs().maxCoeff(&idx);
      if (coord < 0) coord = idx;
      CHECK(idx == coord);
    }
  }
}
