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

// Executes algorithm x seed grids and writes per-cell artifacts:
//   <dir>/<algorithm>_seed<seed>/trace.csv
//   <dir>/<algorithm>_seed<seed>/regret_report.json
//   <dir>/<algorithm>_seed<seed>/checks.json

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "samuel/harness/config.hpp"
#include "samuel/harness/trace_io.hpp"
#include "samuel/intervals.hpp"
#include "samuel/meta.hpp"
#include "samuel/regret_lab.hpp"

namespace samuel::harness {

/// Everything a cell needs that follows from the config and one seed.
struct ResolvedRun {
  scenarios::Scenario scenario;  // with the seed filled in
  ProblemParams params;
  Domain domain = Domain::ball(2.0);
  int Q = 1;
  std::vector<LossFn> stream;
  std::vector<Interval> report_intervals;
};

ResolvedRun resolve(const RunConfig& config, std::uint64_t seed);

/// Expert step scale for an algorithm: the configured eta_exp if any,
/// otherwise 1 for ogd-invt, D / G for ogd-sqrt, and the domain's radius
/// (L2 for a ball, halfwidth for a box) for the Adagrad learners.
double step_scale_for(const RunConfig& config, const ResolvedRun& run,
                      const std::string& algorithm);

/// Runs one algorithm on the resolved stream. Throws on algorithm errors.
RunTrace execute(const RunConfig& config, const ResolvedRun& run, const std::string& algorithm);

/// Resolved config plus derived quantities per seed, as printed by --dry-run.
std::string describe(const RunConfig& config);

struct CellResult {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  bool completed = false;
  std::string error;
  lab::CheckReport checks;
  std::vector<lab::RegretReport> reports;
};

struct GridResult {
  std::vector<CellResult> cells;  // algorithm-major, seeds in config order

  bool all_completed() const;
  bool all_passed() const;
};

/// Runs every (algorithm, seed) cell on up to `workers` threads. Output
/// bytes do not depend on the worker count.
GridResult run_grid(const RunConfig& config, int workers);

/// Comparison table over regret_report.json files, one row per (algorithm,
/// interval) with mean and sample standard deviation over seeds. Throws
/// CompareError on an empty list or mismatched scenario hashes.
std::string compare_reports(const std::vector<std::filesystem::path>& reports);

/// Re-checks a trace.csv against the stream regenerated from the config.
/// The algorithm is read from the sibling checks.json when present.
lab::CheckReport check_trace_file(const std::filesystem::path& trace_path,
                                  const RunConfig& config, std::uint64_t seed);

}  // namespace samuel::harness
