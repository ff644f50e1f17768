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

// Deterministic, seeded loss-stream generators with the bounds each stream
// satisfies attached.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "samuel/intervals.hpp"
#include "samuel/oco.hpp"

namespace samuel::scenarios {

enum class ScenarioKind {
  ShiftingQuadratic,  // d = 1: (x + 1)^2 for the first half, (x - 1)^2 after
  PiecewiseDrift,     // quadratics whose centers jump at change points
  RandomLinear,       // i.i.d. linear losses of fixed norm around a drift direction
  SparseCoordinate,   // linear losses on one coordinate per phase, box domain
  RotatingLinear,     // linear losses whose direction turns in the first plane
};

std::string_view to_string(ScenarioKind kind);
/// shifting-quadratic, piecewise-drift, random-linear, sparse-coordinate,
/// rotating-linear. Throws BadScenario otherwise.
ScenarioKind parse_scenario_kind(std::string_view name);

/// A change point c starts a new phase at round c, so 2 <= c <= T.
struct Scenario {
  ScenarioKind kind = ScenarioKind::ShiftingQuadratic;
  std::int64_t T = 1024;
  int d = 1;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> change_points;
  int num_changes = 0;         // drawn from the seed when change_points is empty
  double radius = 2.0;         // ball radius, or box halfwidth for SparseCoordinate
  double grad_scale = 1.0;     // norm of linear gradients
  double center_radius = 1.0;  // PiecewiseDrift centers lie in this ball
  double quad_scale = 1.0;     // quadratic curvature a in a ||x - c||^2
  double bias = 0.5;           // RandomLinear drift strength
  double positive_rate = 0.75; // SparseCoordinate sign bias
  double rotations = 1.0;      // RotatingLinear turns over the horizon
  std::optional<double> G_cap; // reject streams whose gradient bound exceeds this
};

/// Throws BadScenario on invalid combinations.
void validate(const Scenario& scenario);

Domain domain_of(const Scenario& scenario);

/// Explicit change points, or the seeded draw when only a count is given.
std::vector<std::int64_t> change_points_of(const Scenario& scenario);

/// Maximal intervals between consecutive change points.
std::vector<Interval> segments_of(const Scenario& scenario);

std::vector<LossFn> generate(const Scenario& scenario);

/// Tight bounds for the generated stream over its domain; values that come
/// out at or below 1 are raised to 1.01.
ProblemParams assumptions_of(const Scenario& scenario);

}  // namespace samuel::scenarios
