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

// Command-line front end: run, compare, check.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "samuel/error.hpp"
#include "samuel/harness/config.hpp"
#include "samuel/harness/harness.hpp"
#include "samuel/harness/trace_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kChecksFailed = 1;
constexpr int kBadConfig = 2;

namespace h = samuel::harness;

int cmd_run(const std::string& config_path, bool dry_run, int workers) {
  h::RunConfig config;
  try {
    config = h::load_config(config_path);
    h::apply_seed_env(config);
    if (dry_run) {
      std::cout << h::describe(config);
      return kOk;
    }
  } catch (const samuel::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const samuel::Error& e) {
    std::cerr << "error: " << config_path << ": " << e.what() << "\n";
    return kBadConfig;
  }

  const h::GridResult grid = h::run_grid(config, workers);
  for (const auto& cell : grid.cells) {
    if (!cell.completed) {
      std::cerr << cell.algorithm << " seed " << cell.seed << ": FAILED: " << cell.error << "\n";
      continue;
    }
    const auto failures = cell.checks.failures();
    std::cout << cell.algorithm << " seed " << cell.seed << ": "
              << (failures.empty() ? "ok" : "checks failed") << " -> " << cell.dir.string()
              << "\n";
    for (const auto& f : failures) {
      std::cout << "  " << f.name << " [" << f.interval.s << ", " << f.interval.t
                << "]: " << h::format_double(f.lhs) << " > " << h::format_double(f.rhs) << "\n";
    }
  }
  return grid.all_passed() ? kOk : kChecksFailed;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
  try {
    const std::string table = h::compare_reports(paths);
    if (out.empty()) {
      std::cout << table;
    } else {
      h::write_atomic(out, table);
    }
  } catch (const samuel::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  }
  return kOk;
}

int cmd_check(const std::string& trace_path, const std::string& config_path,
              std::optional<std::uint64_t> seed) {
  h::RunConfig config;
  try {
    config = h::load_config(config_path);
    h::apply_seed_env(config);
  } catch (const samuel::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  }
  try {
    const auto report = h::check_trace_file(trace_path, config, seed.value_or(config.seeds.front()));
    std::cout << h::dump_json(samuel::lab::to_json(report));
    return report.all_passed() ? kOk : kChecksFailed;
  } catch (const samuel::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kChecksFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-regret online convex optimization harness"};
  app.require_subcommand(1);

  std::string config_path;
  bool dry_run = false;
  int workers = 1;
  auto* run = app.add_subcommand("run", "Execute every (algorithm, seed) cell of a config");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_flag("--dry-run", dry_run, "Print the resolved config and exit");
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reports;
  std::string out;
  auto* compare = app.add_subcommand("compare", "Tabulate regret reports as CSV");
  compare->add_option("reports", reports, "regret_report.json files");
  compare->add_option("--out", out, "Output CSV (stdout when omitted)");

  std::string trace_path;
  std::string check_config;
  std::optional<std::uint64_t> seed;
  auto* check = app.add_subcommand("check", "Re-run the trace checks on a trace.csv");
  check->add_option("--trace", trace_path, "trace.csv")->required();
  check->add_option("--config", check_config, "Config the trace was produced with")->required();
  check->add_option("--seed", seed, "Seed of the trace (default: first configured seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBadConfig;
  }

  if (*run) return cmd_run(config_path, dry_run, workers);
  if (*compare) return cmd_compare(reports, out);
  return cmd_check(trace_path, check_config, seed);
}
