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

#include "samuel/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

namespace samuel::scenarios {

namespace {

constexpr double kAssumptionFloor = 1.01;

double raise_to_floor(double v) { return v > 1.0 ? v : kAssumptionFloor; }

// Portable draws; std distributions are implementation-defined.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  double normal() {
    // Box-Muller; 1 - unit() lies in (0, 1].
    const double u1 = 1.0 - unit();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector gaussian(int d) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = normal();
    return v;
  }

  Vector in_ball(int d, double r) {
    Vector v = gaussian(d);
    while (v.norm() == 0.0) v = gaussian(d);
    return v.normalized() * r * std::pow(unit(), 1.0 / d);
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(unit() * static_cast<double>(hi - lo + 1));
  }

 private:
  std::mt19937_64 rng_;
};

// Independent substreams so change-point draws do not shift the loss draws.
constexpr std::uint64_t kChangePointStream = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ShiftingQuadratic:
      return "shifting-quadratic";
    case ScenarioKind::PiecewiseDrift:
      return "piecewise-drift";
    case ScenarioKind::RandomLinear:
      return "random-linear";
    case ScenarioKind::SparseCoordinate:
      return "sparse-coordinate";
    case ScenarioKind::RotatingLinear:
      return "rotating-linear";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  for (auto kind : {ScenarioKind::ShiftingQuadratic, ScenarioKind::PiecewiseDrift,
                    ScenarioKind::RandomLinear, ScenarioKind::SparseCoordinate,
                    ScenarioKind::RotatingLinear}) {
    if (to_string(kind) == name) return kind;
  }
  throw BadScenario("unknown scenario kind '" + std::string(name) + "'");
}

void validate(const Scenario& sc) {
  if (sc.T < 2) throw BadScenario("scenario horizon must be at least 2");
  if (sc.d < 1) throw BadScenario("scenario dimension must be positive");
  if (!(sc.radius > 0.0)) throw BadScenario("domain radius must be positive");
  if (!(sc.grad_scale > 0.0)) throw BadScenario("gradient scale must be positive");
  if (!(sc.quad_scale > 0.0)) throw BadScenario("quadratic scale must be positive");
  if (sc.num_changes < 0 || sc.num_changes > sc.T - 1) {
    throw BadScenario("number of change points out of range");
  }
  if (!(sc.positive_rate >= 0.0 && sc.positive_rate <= 1.0)) {
    throw BadScenario("positive rate must lie in [0, 1]");
  }
  std::int64_t prev = 1;
  for (auto c : sc.change_points) {
    if (c <= prev || c > sc.T) {
      throw BadScenario("change points must be strictly increasing within [2, T]");
    }
    prev = c;
  }
  switch (sc.kind) {
    case ScenarioKind::ShiftingQuadratic:
      if (sc.d != 1) throw BadScenario("shifting-quadratic is one-dimensional");
      if (sc.radius < 1.0) throw BadScenario("shifting-quadratic needs radius >= 1");
      break;
    case ScenarioKind::RotatingLinear:
      if (sc.d < 2) throw BadScenario("rotating-linear needs d >= 2");
      break;
    default:
      break;
  }
}

Domain domain_of(const Scenario& sc) {
  return sc.kind == ScenarioKind::SparseCoordinate ? Domain::box(sc.radius)
                                                   : Domain::ball(sc.radius);
}

std::vector<std::int64_t> change_points_of(const Scenario& sc) {
  validate(sc);
  if (sc.kind == ScenarioKind::ShiftingQuadratic) return {sc.T / 2 + 1};
  if (!sc.change_points.empty() || sc.num_changes == 0) return sc.change_points;
  Draws draws(sc.seed ^ kChangePointStream);
  std::set<std::int64_t> picked;
  while (static_cast<int>(picked.size()) < sc.num_changes) picked.insert(draws.integer(2, sc.T));
  return {picked.begin(), picked.end()};
}

std::vector<Interval> segments_of(const Scenario& sc) {
  std::vector<Interval> out;
  std::int64_t start = 1;
  for (auto c : change_points_of(sc)) {
    out.push_back({start, c - 1});
    start = c;
  }
  out.push_back({start, sc.T});
  return out;
}

std::vector<LossFn> generate(const Scenario& sc) {
  validate(sc);
  const auto segments = segments_of(sc);
  std::vector<LossFn> stream;
  stream.reserve(static_cast<std::size_t>(sc.T));
  Draws draws(sc.seed);

  switch (sc.kind) {
    case ScenarioKind::ShiftingQuadratic: {
      for (std::int64_t t = 1; t <= sc.T; ++t) {
        const double c = t <= sc.T / 2 ? -1.0 : 1.0;
        stream.push_back(LossFn::quadratic(Vector::Constant(1, c), 1.0));
      }
      break;
    }
    case ScenarioKind::PiecewiseDrift: {
      for (const auto& seg : segments) {
        const Vector center = draws.in_ball(sc.d, sc.center_radius);
        for (std::int64_t t = seg.s; t <= seg.t; ++t) {
          stream.push_back(LossFn::quadratic(center, sc.quad_scale));
        }
      }
      break;
    }
    case ScenarioKind::RandomLinear: {
      Vector drift = draws.gaussian(sc.d);
      drift = drift.norm() > 0.0 ? Vector(drift.normalized()) : Vector(Vector::Zero(sc.d));
      for (std::int64_t t = 1; t <= sc.T; ++t) {
        Vector g = sc.bias * drift + draws.gaussian(sc.d);
        while (g.norm() == 0.0) g = draws.gaussian(sc.d);
        stream.push_back(LossFn::linear(sc.grad_scale * g.normalized()));
      }
      break;
    }
    case ScenarioKind::SparseCoordinate: {
      const auto offset = draws.integer(0, sc.d - 1);
      for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto coord = static_cast<int>((static_cast<std::int64_t>(k) + offset) % sc.d);
        for (std::int64_t t = segments[k].s; t <= segments[k].t; ++t) {
          Vector g = Vector::Zero(sc.d);
          g(coord) = draws.unit() < sc.positive_rate ? sc.grad_scale : -sc.grad_scale;
          stream.push_back(LossFn::linear(std::move(g)));
        }
      }
      break;
    }
    case ScenarioKind::RotatingLinear: {
      const double phase = 2.0 * std::numbers::pi * draws.unit();
      for (std::int64_t t = 1; t <= sc.T; ++t) {
        const double theta = phase + 2.0 * std::numbers::pi * sc.rotations *
                                         static_cast<double>(t - 1) / static_cast<double>(sc.T);
        Vector g = Vector::Zero(sc.d);
        g(0) = sc.grad_scale * std::cos(theta);
        g(1) = sc.grad_scale * std::sin(theta);
        stream.push_back(LossFn::linear(std::move(g)));
      }
      break;
    }
  }
  return stream;
}

ProblemParams assumptions_of(const Scenario& sc) {
  const auto stream = generate(sc);
  const Domain domain = domain_of(sc);
  double G = 0.0;
  for (const auto& loss : stream) G = std::max(G, loss.max_subgrad_norm(domain, sc.d));
  if (sc.G_cap && G > *sc.G_cap) {
    throw BadScenario("stream gradient bound " + std::to_string(G) + " exceeds the cap " +
                      std::to_string(*sc.G_cap));
  }
  ProblemParams params;
  params.d = sc.d;
  params.T = sc.T;
  params.D = raise_to_floor(domain.l2_bound(sc.d));
  params.D_inf = raise_to_floor(domain.linf_bound());
  params.G = raise_to_floor(G);
  return params;
}

}  // namespace samuel::scenarios
