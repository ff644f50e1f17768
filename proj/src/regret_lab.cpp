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

#include "samuel/regret_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <type_traits>
#include <variant>

#include "samuel/numerics.hpp"

namespace samuel::lab {

namespace {

double total_loss(std::span<const LossFn> losses, const Vector& x) {
  double total = 0.0;
  for (const auto& l : losses) total += l.eval(x);
  return total;
}

Vector total_subgrad(std::span<const LossFn> losses, const Vector& x) {
  Vector g = Vector::Zero(x.size());
  for (const auto& l : losses) g += l.subgrad(x);
  return g;
}

// Exact minimizer when the sum is a*N ||x||^2 + b^T x + const (shared
// quadratic scale, linear terms allowed). Empty when an L1 term or mixed
// scales make the sum anisotropic or nonsmooth.
std::optional<Vector> isotropic_minimizer(std::span<const LossFn> losses, const Domain& domain,
                                          int d) {
  double scale = 0.0;
  std::int64_t quadratics = 0;
  Vector center_sum = Vector::Zero(d);
  Vector linear_sum = Vector::Zero(d);
  for (const auto& l : losses) {
    const auto& p = l.payload();
    if (const auto* q = std::get_if<QuadraticLoss<double>>(&p)) {
      if (quadratics > 0 && q->scale != scale) return std::nullopt;
      if (!(q->scale > 0.0)) return std::nullopt;
      scale = q->scale;
      ++quadratics;
      center_sum += q->center;
    } else if (const auto* lin = std::get_if<LinearLoss<double>>(&p)) {
      linear_sum += lin->g;
    } else {
      return std::nullopt;
    }
  }
  if (quadratics > 0) {
    // gradient 2 a (N x - sum c) + b = 0; the objective is isotropic so the
    // Euclidean projection of the free minimizer is the constrained one.
    const Vector free = (2.0 * scale * center_sum - linear_sum) /
                        (2.0 * scale * static_cast<double>(quadratics));
    return domain.project(free);
  }
  if (linear_sum.squaredNorm() == 0.0) return Domain::center(d);
  if (domain.kind() == DomainKind::Ball) {
    return domain.project(-domain.radius() * linear_sum.normalized());
  }
  return Vector(linear_sum.unaryExpr([&](double g) {
    return g > 0.0 ? -domain.radius() : (g < 0.0 ? domain.radius() : 0.0);
  }));
}

FixedPoint subgradient_minimizer(std::span<const LossFn> losses, const Domain& domain, int d) {
  constexpr int kIterations = 50000;
  constexpr int kPolishStages = 48;
  constexpr int kPolishIterations = 400;
  const double diameter = 2.0 * domain.l2_bound(d);

  Vector x = Domain::center(d);
  Vector avg = Vector::Zero(d);
  FixedPoint best{x, total_loss(losses, x)};
  for (int k = 1; k <= kIterations; ++k) {
    const Vector g = total_subgrad(losses, x);
    const double gn = g.norm();
    if (gn == 0.0) break;
    x = domain.project(x - (diameter / (gn * std::sqrt(static_cast<double>(k)))) * g);
    avg += (x - avg) / static_cast<double>(k);
    const double fx = total_loss(losses, x);
    if (fx < best.loss) best = {x, fx};
  }
  const double favg = total_loss(losses, avg);
  if (favg < best.loss) best = {avg, favg};

  // Polish: normalized subgradient steps with a geometrically shrinking
  // length, restarted from the incumbent at every stage.
  double step = 0.25 * diameter;
  for (int stage = 0; stage < kPolishStages; ++stage, step *= 0.5) {
    Vector y = best.point;
    for (int k = 0; k < kPolishIterations; ++k) {
      const Vector g = total_subgrad(losses, y);
      const double gn = g.norm();
      if (gn == 0.0) break;
      y = domain.project(y - (step / gn) * g);
      const double fy = total_loss(losses, y);
      if (fy < best.loss) best = {y, fy};
    }
  }
  return best;
}

}  // namespace

FixedPoint best_fixed(std::span<const LossFn> losses, const Domain& domain, int d) {
  if (losses.empty()) throw BadInterval("best_fixed needs at least one loss");
  if (auto x = isotropic_minimizer(losses, domain, d)) {
    const double loss = total_loss(losses, *x);
    return {std::move(*x), loss};
  }
  return subgradient_minimizer(losses, domain, d);
}

double min_H_energy(std::span<const Vector> grads, int d) {
  Matrix outer = Matrix::Zero(d, d);
  for (const auto& g : grads) outer.noalias() += g * g.transpose();
  const double tr = linalg::trace_sqrt(outer);
  return tr * tr / static_cast<double>(d);
}

double adaptive_regret_bound(std::span<const Vector> grads, const ProblemParams& params) {
  const double lnT = std::log(static_cast<double>(params.T));
  const double first = params.G * std::sqrt(lnT);
  const double second = std::sqrt(static_cast<double>(params.d) * min_H_energy(grads, params.d));
  return params.D * lnT * std::max(first, second);
}

double diag_bound(std::span<const Vector> grads, const ProblemParams& params) {
  Vector sq = Vector::Zero(params.d);
  for (const auto& g : grads) sq += g.cwiseAbs2();
  return params.D_inf * sq.cwiseSqrt().sum();
}

double diag_bound_summed(std::span<const Vector> grads, const ProblemParams& params) {
  Vector sum = Vector::Zero(params.d);
  for (const auto& g : grads) sum += g;
  return params.D_inf * sum.cwiseAbs().sum();
}

namespace {

std::span<const LossFn> losses_in(const RunTrace& trace, Interval J) {
  return std::span<const LossFn>(trace.losses).subspan(static_cast<std::size_t>(J.s - 1),
                                                       static_cast<std::size_t>(J.length()));
}

}  // namespace

RegretReport regret_report(const RunTrace& trace, Interval J, const Domain& domain,
                           double slack) {
  const auto& params = trace.params;
  if (J.s < 1 || J.s > J.t || J.t > static_cast<std::int64_t>(trace.rounds.size())) {
    throw BadInterval("report interval outside the trace");
  }
  RegretReport rep;
  rep.interval = J;
  rep.slack = slack;
  for (std::int64_t tau = J.s; tau <= J.t; ++tau) {
    rep.algo_loss += trace.rounds[static_cast<std::size_t>(tau - 1)].loss;
  }
  const FixedPoint best = best_fixed(losses_in(trace, J), domain, params.d);
  rep.comparator = best.point;
  rep.comparator_loss = best.loss;
  rep.regret = rep.algo_loss - rep.comparator_loss;
  const auto grads = trace_gradients(trace, J);
  rep.full_matrix_bound = adaptive_regret_bound(grads, params);
  rep.diag_bound = diag_bound(grads, params);
  rep.diag_bound_summed = diag_bound_summed(grads, params);
  rep.full_matrix_satisfied = rep.regret <= slack * rep.full_matrix_bound;
  rep.diag_satisfied = rep.regret <= slack * rep.diag_bound;
  return rep;
}

bool CheckReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

std::vector<CheckResult> CheckReport::failures() const {
  std::vector<CheckResult> out;
  for (const auto& r : results) {
    if (!r.pass) out.push_back(r);
  }
  return out;
}

double pseudo_weight_envelope(std::int64_t tau, const ProblemParams& params) {
  const double t = static_cast<double>(tau);
  const double log_arg = static_cast<double>(params.d) * static_cast<double>(params.T) *
                         params.D * params.D * params.G * params.G;
  return t * (std::log(t) + 1.0) * std::log(log_arg) * std::log(static_cast<double>(params.T));
}

namespace {

void validate_trace(const RunTrace& trace, const GeometricCover& cover,
                    const ProblemParams& params) {
  const auto T = params.T;
  if (cover.horizon() != T) throw TraceError("cover horizon does not match the parameters");
  if (static_cast<std::int64_t>(trace.rounds.size()) != T) {
    throw TraceError("trace has " + std::to_string(trace.rounds.size()) + " rounds, expected " +
                     std::to_string(T));
  }
  if (static_cast<std::int64_t>(trace.losses.size()) != T) {
    throw TraceError("trace loss stream length does not match the horizon");
  }
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const auto& rec = trace.rounds[i];
    if (rec.tau != static_cast<std::int64_t>(i) + 1) {
      throw TraceError("round " + std::to_string(i + 1) + " is labelled " +
                       std::to_string(rec.tau));
    }
    if (rec.x.size() != params.d) {
      throw TraceError("round " + std::to_string(rec.tau) + " has a prediction of wrong size");
    }
    for (const auto& s : rec.slots) {
      if (!s.interval.contains(rec.tau)) {
        throw TraceError("round " + std::to_string(rec.tau) + " logs an expert that is not alive");
      }
      if (!s.weights.empty() && s.weights.size() != trace.eta.size()) {
        throw TraceError("round " + std::to_string(rec.tau) + " weight count differs from Q");
      }
    }
  }
}

struct SlotSums {
  double weight = 0.0;
  double pseudo = 0.0;
  double weighted_r = 0.0;
};

SlotSums slot_sums(const SlotRecord& s, const std::vector<double>& eta) {
  SlotSums out;
  if (s.weights.empty()) {
    out.weight = s.weight_sum;
    out.pseudo = s.pseudo_weight_sum;
  } else {
    for (std::size_t q = 0; q < s.weights.size(); ++q) {
      out.weight += s.weights[q];
      out.pseudo += s.weights[q] / eta[q];
    }
  }
  out.weighted_r = out.weight * s.r;
  return out;
}

CheckResult worst(std::string name, std::int64_t tau, double lhs, double rhs, double slack) {
  return {std::move(name), {tau, tau}, lhs, rhs, slack, lhs <= rhs};
}

}  // namespace

CheckReport check_trace(const RunTrace& trace, const GeometricCover& cover,
                        const ProblemParams& params, const Domain& domain,
                        const CheckOptions& options) {
  validate_trace(trace, cover, params);
  CheckReport report;
  const bool online = trace.algorithm == "samuel" && !trace.eta.empty();
  const bool averaged = trace.combine == CombineMode::Average;

  if (online && averaged) {
    const int Q = static_cast<int>(trace.eta.size());
    // Running count of cover members with start <= tau.
    std::int64_t started = 0;
    CheckResult nonpos{"nonpositive_weighted_regret", {1, 1}, 0, 0, options.nonpositive_tol, true};
    double nonpos_margin = -std::numeric_limits<double>::infinity();
    CheckResult envelope{"pseudo_weight_envelope", {1, 1}, 0, 0, options.envelope_slack, true};
    double envelope_ratio = -std::numeric_limits<double>::infinity();
    CheckResult count{"pseudo_weight_count", {1, 1}, 0, 0, 1.0, true};
    double count_ratio = -std::numeric_limits<double>::infinity();

    std::map<IntervalKey, double> frozen;  // last pseudo-weight sum per interval ever alive
    double frozen_total = 0.0;
    double frozen_ratio_max = 0.0;

    for (const auto& rec : trace.rounds) {
      started += static_cast<std::int64_t>(cover.starting_keys(rec.tau).size());
      double W = 0.0;
      double pseudo = 0.0;
      double wr = 0.0;
      for (const auto& s : rec.slots) {
        const SlotSums sums = slot_sums(s, trace.eta);
        W += sums.weight;
        pseudo += sums.pseudo;
        wr += sums.weighted_r;
        auto [slot, inserted] = frozen.try_emplace(s.key, 0.0);
        frozen_total += sums.pseudo - slot->second;
        slot->second = sums.pseudo;
      }
      if (std::abs(W - rec.W) > 1e-9 * std::max(1.0, std::abs(rec.W))) {
        throw TraceError("round " + std::to_string(rec.tau) +
                         ": logged W disagrees with the logged weights");
      }
      const double nonpos_rhs = options.nonpositive_tol * W * params.G * params.D;
      if (wr - nonpos_rhs > nonpos_margin) {
        nonpos_margin = wr - nonpos_rhs;
        nonpos = worst("nonpositive_weighted_regret", rec.tau, wr, nonpos_rhs,
                       options.nonpositive_tol);
      }
      const double env = options.envelope_slack * pseudo_weight_envelope(rec.tau, params);
      if (pseudo / env > envelope_ratio) {
        envelope_ratio = pseudo / env;
        envelope = worst("pseudo_weight_envelope", rec.tau, pseudo, env, options.envelope_slack);
      }
      // Roundoff allowance only; the count bound is exact in real arithmetic.
      const double cap = static_cast<double>(Q) * static_cast<double>(started) * (1.0 + 1e-9);
      if (pseudo / cap > count_ratio) {
        count_ratio = pseudo / cap;
        count = worst("pseudo_weight_count", rec.tau, pseudo, cap, 1.0);
      }
      frozen_ratio_max = std::max(frozen_ratio_max,
                                  frozen_total / pseudo_weight_envelope(rec.tau, params));
    }
    if (options.check_nonpositive) report.results.push_back(nonpos);
    if (options.check_envelope) report.results.push_back(envelope);
    if (options.check_count) report.results.push_back(count);
    report.info["pseudo_weight_envelope_worst_ratio"] = envelope_ratio * options.envelope_slack;
    report.info["frozen_pseudo_weight_worst_ratio"] = frozen_ratio_max;
  }

  if (online && options.check_regret) {
    std::vector<Interval> intervals;
    for (const auto& key : cover.members()) intervals.push_back(cover.at(key));
    for (const auto& J : options.extra_intervals) intervals.push_back(J);
    for (const auto& J : intervals) {
      const FixedPoint best = best_fixed(losses_in(trace, J), domain, params.d);
      const double lhs = regret(trace, J, best.point);
      const auto grads = trace_gradients(trace, J);
      const double rhs = options.regret_slack * adaptive_regret_bound(grads, params);
      report.results.push_back({"regret_bound", J, lhs, rhs, options.regret_slack, lhs <= rhs});
    }
  }

  if (online && options.check_stitching) {
    for (const auto& J : options.extra_intervals) {
      const auto pieces = decompose(cover, J);
      double sq = 0.0;
      for (const auto& piece : pieces) {
        const FixedPoint best = best_fixed(losses_in(trace, piece), domain, params.d);
        const double r = regret(trace, piece, best.point);
        sq += r * r;
      }
      const FixedPoint best = best_fixed(losses_in(trace, J), domain, params.d);
      const double lhs = regret(trace, J, best.point);
      const double rhs = std::sqrt(static_cast<double>(pieces.size()) * sq);
      // Relative roundoff allowance for the equality case of a single piece.
      report.results.push_back(
          {"stitching", J, lhs, rhs, 1.0, lhs <= rhs + 1e-9 * (1.0 + std::abs(rhs))});
    }
  }
  return report;
}

nlohmann::json to_json(const CheckResult& r) {
  return {{"check_name", r.name},
          {"interval", {r.interval.s, r.interval.t}},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"slack", r.slack},
          {"pass", r.pass}};
}

nlohmann::json to_json(const CheckReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : report.results) checks.push_back(to_json(r));
  nlohmann::json info = nlohmann::json::object();
  for (const auto& [k, v] : report.info) info[k] = v;
  return {{"all_passed", report.all_passed()}, {"checks", checks}, {"info", info}};
}

nlohmann::json to_json(const RegretReport& r) {
  return {{"interval", {r.interval.s, r.interval.t}},
          {"algo_loss", r.algo_loss},
          {"comparator", std::vector<double>(r.comparator.data(),
                                             r.comparator.data() + r.comparator.size())},
          {"comparator_loss", r.comparator_loss},
          {"regret", r.regret},
          {"full_matrix_bound", r.full_matrix_bound},
          {"diag_bound", r.diag_bound},
          {"diag_bound_summed", r.diag_bound_summed},
          {"slack", r.slack},
          {"full_matrix_satisfied", r.full_matrix_satisfied},
          {"diag_satisfied", r.diag_satisfied}};
}

}  // namespace samuel::lab
