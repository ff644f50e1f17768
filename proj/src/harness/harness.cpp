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

#include "samuel/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "samuel/error.hpp"

namespace samuel::harness {

namespace {

nlohmann::json cell_meta(const RunConfig& config, const ResolvedRun& run,
                         const std::string& algorithm, std::uint64_t seed, double step_scale,
                         const RunTrace* trace) {
  nlohmann::json meta = {
      {"algorithm", algorithm},
      {"seed", seed},
      {"config_hash", config_hash(config)},
      {"scenario_hash", scenario_hash(config)},
      {"code_version", kCodeVersion},
      {"params",
       {{"d", run.params.d},
        {"T", run.params.T},
        {"D", run.params.D},
        {"D_inf", run.params.D_inf},
        {"G", run.params.G}}},
      {"Q", run.Q},
      {"step_scale", step_scale},
  };
  meta["reinit_rounds"] = trace ? trace->reinit_rounds : std::vector<std::int64_t>{};
  return meta;
}

std::vector<Interval> extra_intervals(const RunConfig& config, const ResolvedRun& run) {
  if (config.checks.report_intervals == "all-dyadic") return {};
  return run.report_intervals;
}

CellResult run_cell(const RunConfig& config, const std::string& algorithm, std::uint64_t seed) {
  CellResult cell;
  cell.algorithm = algorithm;
  cell.seed = seed;
  cell.dir = std::filesystem::path(config.output.dir) /
             (algorithm + "_seed" + std::to_string(seed));
  ResolvedRun run;
  double step = 0.0;
  try {
    run = resolve(config, seed);
    step = step_scale_for(config, run, algorithm);
    const RunTrace trace = execute(config, run, algorithm);
    const GeometricCover cover(run.params.T);

    for (const auto& J : run.report_intervals) {
      cell.reports.push_back(
          lab::regret_report(trace, J, run.domain, config.checks.options.regret_slack));
    }
    if (config.checks.enabled) {
      lab::CheckOptions options = config.checks.options;
      options.extra_intervals = extra_intervals(config, run);
      cell.checks = lab::check_trace(trace, cover, run.params, run.domain, options);
    }

    const nlohmann::json meta = cell_meta(config, run, algorithm, seed, step, &trace);
    CsvLayout layout{cover.num_levels(), run.params.d, config.output.elide_x,
                     config.output.downsample};
    write_atomic(cell.dir / "trace.csv", trace_csv(trace, layout));

    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : cell.reports) reports.push_back(lab::to_json(r));
    write_atomic(cell.dir / "regret_report.json",
                 dump_json({{"meta", meta}, {"reports", reports}}));

    nlohmann::json checks = lab::to_json(cell.checks);
    checks["meta"] = meta;
    checks["enabled"] = config.checks.enabled;
    write_atomic(cell.dir / "checks.json", dump_json(checks));
    cell.completed = true;
  } catch (const std::exception& e) {
    cell.error = e.what();
    nlohmann::json checks = {{"meta", {{"algorithm", algorithm}, {"seed", seed}}},
                             {"all_passed", false},
                             {"error", cell.error}};
    try {
      write_atomic(cell.dir / "checks.json", dump_json(checks));
    } catch (const std::exception&) {
      // The error is still reported through the cell result.
    }
  }
  return cell;
}

struct CompareKey {
  std::string algorithm;
  Interval interval;
};

}  // namespace

ResolvedRun resolve(const RunConfig& config, std::uint64_t seed) {
  ResolvedRun run;
  run.scenario = config.scenario;
  run.scenario.seed = seed;
  run.params = scenarios::assumptions_of(run.scenario);
  run.domain = scenarios::domain_of(run.scenario);
  run.Q = config.algorithm.Q.value_or(q_count(run.params));
  run.stream = scenarios::generate(run.scenario);

  const auto& spec = config.checks.report_intervals;
  const std::int64_t T = run.params.T;
  if (spec == "halves") {
    run.report_intervals = {{1, T / 2}, {T / 2 + 1, T}};
  } else if (spec == "all-dyadic") {
    const GeometricCover cover(T);
    for (const auto& key : cover.members()) run.report_intervals.push_back(cover.at(key));
  } else if (spec == "segments") {
    run.report_intervals = scenarios::segments_of(run.scenario);
  } else {
    run.report_intervals = parse_interval_list(spec, T);
  }
  return run;
}

double step_scale_for(const RunConfig& config, const ResolvedRun& run,
                      const std::string& algorithm) {
  if (config.algorithm.eta_exp) return *config.algorithm.eta_exp;
  if (algorithm == "ogd-invt") return 1.0;
  if (algorithm == "ogd-sqrt") return run.params.D / run.params.G;
  return run.domain.kind() == DomainKind::Ball ? run.params.D : run.params.D_inf;
}

RunTrace execute(const RunConfig& config, const ResolvedRun& run, const std::string& algorithm) {
  const auto& a = config.algorithm;
  const double step = step_scale_for(config, run, algorithm);
  if (algorithm == "samuel") {
    MetaOptions options;
    options.expert = ExpertConfig{a.expert, step, 1.0, a.eps, a.projection};
    options.combine = a.combine;
    options.seed = run.scenario.seed;
    options.Q = run.Q;
    options.clip_r = a.clip_r;
    options.warm_start = a.warm_start;
    const GeometricCover cover(run.params.T);
    return samuel::run(run.params, cover, run.domain, options, run.stream);
  }
  if (algorithm == "samuel-offline") {
    OfflineConfig offline;
    offline.step_scales = a.step_scales.empty() ? std::vector<double>{step} : a.step_scales;
    offline.alphas = a.alphas;
    offline.K = a.K;
    offline.Q = a.Q;
    offline.seed = run.scenario.seed;
    offline.eps = a.eps;
    offline.projection = a.projection;
    RunTrace trace = run_offline(run.params, run.domain, offline, run.stream);
    trace.seed = run.scenario.seed;
    return trace;
  }
  ExpertConfig expert{parse_expert_kind(algorithm), step, 1.0, a.eps, a.projection};
  RunTrace trace = run_single(run.params, run.domain, expert, run.stream);
  trace.seed = run.scenario.seed;
  return trace;
}

std::string describe(const RunConfig& config) {
  std::ostringstream out;
  out << serialize(config);
  for (const auto seed : config.seeds) {
    const ResolvedRun run = resolve(config, seed);
    const GeometricCover cover(run.params.T);
    out << "\n# resolved for seed " << seed << "\n";
    out << "#   d = " << run.params.d << ", T = " << run.params.T << "\n";
    out << "#   D = " << format_double(run.params.D)
        << ", D_inf = " << format_double(run.params.D_inf)
        << ", G = " << format_double(run.params.G) << "\n";
    out << "#   Q = " << run.Q << ", cover levels = " << cover.num_levels()
        << ", cover members = " << cover.members().size() << "\n";
    out << "#   change points = [";
    const auto cps = scenarios::change_points_of(run.scenario);
    for (std::size_t i = 0; i < cps.size(); ++i) out << (i ? ", " : "") << cps[i];
    out << "]\n";
    for (const auto& name : config.algorithm.names) {
      out << "#   " << name << " step scale = " << format_double(step_scale_for(config, run, name))
          << "\n";
    }
    out << "#   report intervals = " << run.report_intervals.size() << "\n";
  }
  return out.str();
}

bool GridResult::all_completed() const {
  return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.completed; });
}

bool GridResult::all_passed() const {
  return std::all_of(cells.begin(), cells.end(),
                     [](const auto& c) { return c.completed && c.checks.all_passed(); });
}

GridResult run_grid(const RunConfig& config, int workers) {
  struct Job {
    std::string algorithm;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& name : config.algorithm.names) {
    for (const auto seed : config.seeds) jobs.push_back({name, seed});
  }
  GridResult result;
  result.cells.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      result.cells[i] = run_cell(config, jobs[i].algorithm, jobs[i].seed);
    }
  };
  const int n = std::clamp<int>(workers, 1, static_cast<int>(std::max<std::size_t>(1, jobs.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return result;
}

std::string compare_reports(const std::vector<std::filesystem::path>& reports) {
  if (reports.empty()) throw CompareError("no regret reports given");
  struct Acc {
    std::vector<double> regrets;
    std::vector<double> bounds;
  };
  std::map<std::pair<std::string, std::pair<std::int64_t, std::int64_t>>, Acc> rows;
  std::string hash;
  for (const auto& path : reports) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw CompareError(path.string() + ": " + e.what());
    } catch (const TraceError& e) {
      throw CompareError(e.what());
    }
    if (!doc.contains("meta") || !doc.contains("reports")) {
      throw CompareError(path.string() + ": not a regret report");
    }
    const auto h = doc["meta"].value("scenario_hash", std::string());
    if (hash.empty()) {
      hash = h;
    } else if (h != hash) {
      throw CompareError(path.string() + ": scenario hash " + h + " differs from " + hash);
    }
    const auto algorithm = doc["meta"].value("algorithm", std::string("unknown"));
    for (const auto& r : doc["reports"]) {
      const auto iv = r.at("interval");
      auto& acc = rows[{algorithm, {iv.at(0).get<std::int64_t>(), iv.at(1).get<std::int64_t>()}}];
      acc.regrets.push_back(r.at("regret").get<double>());
      acc.bounds.push_back(r.at("full_matrix_bound").get<double>());
    }
  }

  struct Row {
    std::string algorithm;
    Interval interval;
    std::size_t seeds;
    double mean, stdev, bound, ratio;
  };
  std::vector<Row> table;
  for (const auto& [key, acc] : rows) {
    const auto n = static_cast<double>(acc.regrets.size());
    double mean = 0.0, bound = 0.0;
    for (std::size_t i = 0; i < acc.regrets.size(); ++i) {
      mean += acc.regrets[i];
      bound += acc.bounds[i];
    }
    mean /= n;
    bound /= n;
    double var = 0.0;
    for (double r : acc.regrets) var += (r - mean) * (r - mean);
    const double stdev = acc.regrets.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    table.push_back({key.first, {key.second.first, key.second.second}, acc.regrets.size(), mean,
                     stdev, bound, bound > 0.0 ? mean / bound : 0.0});
  }
  std::sort(table.begin(), table.end(), [](const Row& a, const Row& b) {
    if (a.interval != b.interval) return a.interval < b.interval;
    if (a.mean != b.mean) return a.mean < b.mean;
    return a.algorithm < b.algorithm;
  });

  std::string out =
      "algorithm,interval_start,interval_end,seeds,regret_mean,regret_std,bound_mean,ratio\n";
  for (const auto& r : table) {
    out += r.algorithm + "," + std::to_string(r.interval.s) + "," + std::to_string(r.interval.t) +
           "," + std::to_string(r.seeds) + "," + format_double(r.mean) + "," +
           format_double(r.stdev) + "," + format_double(r.bound) + "," + format_double(r.ratio) +
           "\n";
  }
  return out;
}

lab::CheckReport check_trace_file(const std::filesystem::path& trace_path,
                                  const RunConfig& config, std::uint64_t seed) {
  const ResolvedRun run = resolve(config, seed);
  const GeometricCover cover(run.params.T);
  if (config.output.downsample != 1) {
    throw TraceError("downsampled traces cannot be re-checked; rerun with downsample = 1");
  }
  if (config.output.elide_x) {
    throw TraceError("traces without predictions cannot be re-checked; rerun with elide_x = false");
  }
  const CsvLayout layout{cover.num_levels(), run.params.d, false, 1};

  RunTrace trace;
  trace.params = run.params;
  trace.combine = config.algorithm.combine;
  trace.seed = seed;
  trace.losses = run.stream;
  trace.rounds = parse_trace_csv(read_file(trace_path), layout);

  const auto sibling = trace_path.parent_path() / "checks.json";
  if (std::filesystem::exists(sibling)) {
    const auto doc = nlohmann::json::parse(read_file(sibling), nullptr, false);
    if (!doc.is_discarded() && doc.contains("meta")) {
      trace.algorithm = doc["meta"].value("algorithm", std::string());
    }
  }
  if (trace.algorithm.empty()) {
    const bool has_slots = std::any_of(trace.rounds.begin(), trace.rounds.end(),
                                       [](const auto& r) { return !r.slots.empty(); });
    trace.algorithm = has_slots ? "samuel" : "unknown";
  }
  if (trace.algorithm == "samuel") trace.eta = EtaGrid::online(run.params, run.Q).values;

  lab::CheckOptions options = config.checks.options;
  options.extra_intervals = extra_intervals(config, run);
  return lab::check_trace(trace, cover, run.params, run.domain, options);
}

}  // namespace samuel::harness
