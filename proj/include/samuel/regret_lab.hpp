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

// Independent verification: best fixed comparators, the closed-form optimal
// full-matrix gradient energy, bound evaluation and trace-level checks.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "samuel/intervals.hpp"
#include "samuel/oco.hpp"
#include "samuel/trace.hpp"

namespace samuel::lab {

struct FixedPoint {
  Vector point;
  double loss = 0.0;
};

/// Minimizer of the summed losses over the domain. Exact for isotropic smooth
/// sums (quadratics sharing one scale, plus any linear terms); otherwise
/// 50,000 averaged projected subgradient iterations followed by a
/// shrinking-step polish from the best point seen.
FixedPoint best_fixed(std::span<const LossFn> losses, const Domain& domain, int d);

/// inf over {H >= 0, tr H <= d} of sum g^T H^{-1} g, which equals
/// tr((sum g g^T)^{1/2})^2 / d. Attained only in the limit when the outer
/// product sum is rank deficient.
double min_H_energy(std::span<const Vector> grads, int d);

/// D ln T max{G sqrt(ln T), sqrt(d min_H_energy)}; constant 1.
double adaptive_regret_bound(std::span<const Vector> grads, const ProblemParams& params);

/// D_inf sum_i sqrt(sum_tau g_{tau,i}^2).
double diag_bound(std::span<const Vector> grads, const ProblemParams& params);

/// Alternative reading: D_inf sum_i |sum_tau g_{tau,i}|. Reported, never checked.
double diag_bound_summed(std::span<const Vector> grads, const ProblemParams& params);

struct RegretReport {
  Interval interval;
  double algo_loss = 0.0;
  Vector comparator;
  double comparator_loss = 0.0;
  double regret = 0.0;
  double full_matrix_bound = 0.0;
  double diag_bound = 0.0;
  double diag_bound_summed = 0.0;
  double slack = 10.0;
  bool full_matrix_satisfied = false;
  bool diag_satisfied = false;
};

RegretReport regret_report(const RunTrace& trace, Interval J, const Domain& domain,
                           double slack);

struct CheckResult {
  std::string name;
  Interval interval;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 1.0;
  bool pass = false;
};

struct CheckOptions {
  double envelope_slack = 2.0;
  double regret_slack = 10.0;
  double nonpositive_tol = 1e-9;
  bool check_nonpositive = true;
  bool check_envelope = true;
  bool check_count = true;
  bool check_regret = true;
  bool check_stitching = true;
  // Checked against the regret bound and by stitching, on top of every
  // member of the cover.
  std::vector<Interval> extra_intervals;
};

struct CheckReport {
  std::vector<CheckResult> results;
  // Diagnostics that are reported but not asserted.
  std::map<std::string, double> info;

  bool all_passed() const;
  /// Failing results only.
  std::vector<CheckResult> failures() const;
};

/// The envelope tau (ln tau + 1) ln(d T D^2 G^2) ln T, without slack.
double pseudo_weight_envelope(std::int64_t tau, const ProblemParams& params);

/// Recomputes weight sums and pseudo-weights from the logged weights and the
/// eta grid, and checks, for traces of the online meta-learner:
///   nonpositive_weighted_regret  sum_{I,q} w r <= tol W G D every round
///                                (average combine only)
///   pseudo_weight_envelope       sum w/eta <= slack x envelope every round
///   pseudo_weight_count          sum w/eta <= Q #{I in S : I.s <= tau}
///   regret_bound                 regret(I) <= slack x adaptive_regret_bound(I)
///                                for every I in S and every extra interval
///   stitching                    regret(J) <= sqrt(n sum regret(I_i)^2)
///                                over decompose(J), extra intervals only
/// Per-round checks report the worst round. Throws TraceError when the trace
/// is incomplete or inconsistent.
CheckReport check_trace(const RunTrace& trace, const GeometricCover& cover,
                        const ProblemParams& params, const Domain& domain,
                        const CheckOptions& options);

nlohmann::json to_json(const CheckResult& result);
nlohmann::json to_json(const CheckReport& report);
nlohmann::json to_json(const RegretReport& report);

}  // namespace samuel::lab
