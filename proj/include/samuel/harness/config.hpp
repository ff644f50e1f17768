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

// Run configuration and its text format.
//
// The format is a flat subset of TOML: `[section]` headers, `key = value`
// lines and `#` comments. Values are booleans, integers, floats, quoted
// strings, or one-level arrays of those. Unknown sections or keys are errors.
//
//   [scenario]   kind, T, d, radius, change_points, num_changes, grad_scale,
//                center_radius, quad_scale, bias, positive_rate, rotations, G_cap
//   [algorithm]  names, expert, combine, Q, eta_exp, eps, projection, clip_r,
//                warm_start, step_scales, alphas, K
//   [run]        seeds
//   [checks]     enabled, envelope_slack, regret_slack, nonpositive_tol,
//                nonpositive, envelope, count, regret, stitching, report_intervals
//   [output]     dir, downsample, elide_x

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "samuel/experts.hpp"
#include "samuel/regret_lab.hpp"
#include "samuel/scenarios.hpp"
#include "samuel/trace.hpp"

namespace samuel::harness {

inline constexpr const char* kCodeVersion = "0.1.0";

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"samuel",       "samuel-offline", "adagrad-full",
                                              "adagrad-diag", "ogd-sqrt",       "ogd-invt"};
  return names;
}

struct AlgorithmSpec {
  std::vector<std::string> names{"samuel"};
  ExpertKind expert = ExpertKind::FullAdagrad;
  CombineMode combine = CombineMode::Average;
  std::optional<int> Q;
  std::optional<double> eta_exp;  // defaults to the domain's L2 bound (ball) or halfwidth (box)
  double eps = 1e-8;
  ProjectionKind projection = ProjectionKind::Mahalanobis;
  bool clip_r = false;
  bool warm_start = false;
  std::vector<double> step_scales;  // offline candidates; empty means {eta_exp}
  std::vector<double> alphas{1.0, 0.99, 0.9};
  std::int64_t K = 64;
};

struct ChecksSpec {
  bool enabled = true;
  lab::CheckOptions options;
  // "halves", "all-dyadic", "segments", or "s:t,s:t,...".
  std::string report_intervals = "halves";
};

struct OutputSpec {
  std::string dir = "out";
  std::int64_t downsample = 1;
  bool elide_x = false;
};

struct RunConfig {
  scenarios::Scenario scenario;
  AlgorithmSpec algorithm;
  std::vector<std::uint64_t> seeds{0};
  bool seeds_explicit = false;
  ChecksSpec checks;
  OutputSpec output;
};

/// Throws ConfigError with "<source>:<line>: message".
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text; parse_config(serialize(c)) serializes back to the same text.
std::string serialize(const RunConfig& config);

/// FNV-1a 64 of the canonical text without the output section, hex encoded.
std::string config_hash(const RunConfig& config);
/// Same, over the scenario section only; seeds are excluded.
std::string scenario_hash(const RunConfig& config);

/// Applies SAMUEL_SEED when the config lists no seeds.
void apply_seed_env(RunConfig& config);

std::string format_double(double v);

/// Parses "s:t,s:t,..." into intervals inside [1, T]. Throws ConfigError.
std::vector<Interval> parse_interval_list(const std::string& spec, std::int64_t T);

}  // namespace samuel::harness
