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

#include "samuel/meta.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace samuel {

namespace {

// Uniform draw in [0, 1) from the top 53 bits; portable across standard libraries.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double birth_weight(double eta) { return std::min(0.5, eta); }

}  // namespace

int q_count(const ProblemParams& params) {
  const double arg = static_cast<double>(params.d) * static_cast<double>(params.T) *
                     params.D * params.D * params.G * params.G;
  const double q = std::ceil(4.0 * std::log(arg));
  return std::max(1, static_cast<int>(q));
}

EtaGrid EtaGrid::online(const ProblemParams& params, int Q) {
  if (Q < 1) throw InvalidParams("Q must be at least 1");
  EtaGrid grid;
  grid.values.reserve(static_cast<std::size_t>(Q));
  for (int q = 1; q <= Q; ++q) {
    grid.values.push_back(1.0 / (2.0 * params.G * params.D * std::ldexp(1.0, q)));
  }
  return grid;
}

EtaGrid EtaGrid::offline(int Q) {
  if (Q < 1) throw InvalidParams("Q must be at least 1");
  EtaGrid grid;
  for (int q = 1; q <= Q; ++q) grid.values.push_back(std::ldexp(1.0, -q));
  return grid;
}

MetaState::MetaState(const ProblemParams& params, const GeometricCover& cover,
                     const Domain& domain, const MetaOptions& options)
    : params_(params),
      cover_(&cover),
      domain_(domain),
      options_(options),
      eta_(EtaGrid::online(params, options.Q.value_or(q_count(params)))),
      rng_(options.seed) {
  params_.validate();
  options_.expert.validate();
  if (cover.horizon() != params.T) {
    throw InvalidParams("cover horizon does not match the problem horizon");
  }
  spawn_starting(1, Domain::center(params_.d));
}

void MetaState::spawn_starting(std::int64_t tau, const Vector& warm_point) {
  for (const auto& key : cover_->starting_keys(tau)) {
    Slot slot{cover_->at(key),
              spawn(options_.expert, domain_,
                    options_.warm_start ? warm_point : Domain::center(params_.d), tau),
              {}};
    slot.weights.reserve(eta_.values.size());
    for (double eta : eta_.values) slot.weights.push_back(birth_weight(eta));
    alive_.insert_or_assign(key, std::move(slot));
  }
}

double MetaState::weight(IntervalKey key, int q) const {
  const auto it = alive_.find(key);
  if (it == alive_.end() || q < 1 || q > eta_.Q()) return 0.0;
  return it->second.weights[static_cast<std::size_t>(q - 1)];
}

double MetaState::total_weight() const {
  double W = 0.0;
  for (const auto& [key, slot] : alive_) {
    for (double w : slot.weights) W += w;
  }
  if (!(W > 0.0) || !std::isfinite(W)) {
    std::ostringstream msg;
    msg << "total weight " << W << " at round " << tau_;
    throw CorruptedState(msg.str());
  }
  return W;
}

Vector MetaState::predict() {
  if (tau_ > params_.T) throw CorruptedState("predict called past the horizon");
  const double W = total_weight();
  if (options_.combine == CombineMode::Sample) {
    const double target = unit_draw(rng_) * W;
    double cumulative = 0.0;
    const Vector* chosen = nullptr;
    for (const auto& [key, slot] : alive_) {
      for (double w : slot.weights) {
        cumulative += w;
        if (chosen == nullptr && target < cumulative) chosen = &slot.expert.predict();
      }
    }
    // Roundoff can leave target just above the final cumulative sum.
    if (chosen == nullptr) chosen = &std::prev(alive_.end())->second.expert.predict();
    prediction_ = *chosen;
  } else {
    Vector x = Vector::Zero(params_.d);
    for (const auto& [key, slot] : alive_) {
      double w_interval = 0.0;
      for (double w : slot.weights) w_interval += w;
      x += (w_interval / W) * slot.expert.predict();
    }
    // A convex combination of feasible points; projection only removes roundoff.
    prediction_ = domain_.project(x);
  }
  return *prediction_;
}

RoundRecord MetaState::update(const LossFn& loss) {
  if (!prediction_) throw CorruptedState("update called before predict in this round");
  const Vector x = std::move(*prediction_);
  prediction_.reset();

  RoundRecord rec;
  rec.tau = tau_;
  rec.x = x;
  rec.loss = loss.eval(x);
  rec.W = total_weight();
  rec.alive_slots = alive_slots();

  const double eta_max = eta_.values.front();
  const double r_cap = 2.0 * params_.G * params_.D;
  std::vector<double> r_values;
  r_values.reserve(alive_.size());
  for (const auto& [key, slot] : alive_) {
    SlotRecord s;
    s.key = key;
    s.interval = slot.interval;
    s.expert_loss = loss.eval(slot.expert.predict());
    double r = rec.loss - s.expert_loss;
    if (std::abs(eta_max * r) > 1.0) {
      if (!options_.clip_r) {
        std::ostringstream msg;
        msg << "round " << tau_ << ", interval " << slot.interval << ": |eta r| = "
            << std::abs(eta_max * r) << " > 1; the loss violates the G/D bounds";
        throw AssumptionViolation(msg.str());
      }
    }
    if (options_.clip_r) r = std::clamp(r, -r_cap, r_cap);
    s.r = r;
    s.weights = slot.weights;
    for (std::size_t q = 0; q < slot.weights.size(); ++q) {
      s.weight_sum += slot.weights[q];
      s.pseudo_weight_sum += slot.weights[q] / eta_.values[q];
    }
    r_values.push_back(r);
    rec.slots.push_back(std::move(s));
  }

  const std::int64_t next = tau_ + 1;
  std::size_t i = 0;
  for (auto it = alive_.begin(); it != alive_.end(); ++i) {
    Slot& slot = it->second;
    if (!slot.interval.contains(next)) {
      it = alive_.erase(it);
      continue;
    }
    for (std::size_t q = 0; q < slot.weights.size(); ++q) {
      slot.weights[q] *= 1.0 + eta_.values[q] * r_values[i];
    }
    slot.expert.update(loss);
    ++it;
  }
  if (next <= params_.T) spawn_starting(next, x);
  tau_ = next;
  return rec;
}

MetaState meta_init(const ProblemParams& params, const GeometricCover& cover,
                    const Domain& domain, const MetaOptions& options) {
  return MetaState(params, cover, domain, options);
}

Vector meta_predict(MetaState& state) { return state.predict(); }

RoundRecord meta_update(MetaState& state, const LossFn& loss) { return state.update(loss); }

namespace {

void require_stream(const ProblemParams& params, const std::vector<LossFn>& stream) {
  if (static_cast<std::int64_t>(stream.size()) != params.T) {
    throw InvalidParams("loss stream length " + std::to_string(stream.size()) +
                        " does not match horizon " + std::to_string(params.T));
  }
}

}  // namespace

RunTrace run(const ProblemParams& params, const GeometricCover& cover, const Domain& domain,
             const MetaOptions& options, const std::vector<LossFn>& stream) {
  require_stream(params, stream);
  MetaState state(params, cover, domain, options);
  RunTrace trace;
  trace.params = params;
  trace.algorithm = "samuel";
  trace.combine = options.combine;
  trace.seed = options.seed;
  trace.eta = state.eta().values;
  trace.losses = stream;
  trace.rounds.reserve(stream.size());
  for (const auto& loss : stream) {
    state.predict();
    trace.rounds.push_back(state.update(loss));
  }
  return trace;
}

RunTrace run_single(const ProblemParams& params, const Domain& domain,
                    const ExpertConfig& expert, const std::vector<LossFn>& stream) {
  require_stream(params, stream);
  Expert learner = spawn(expert, domain, Domain::center(params.d), 1);
  RunTrace trace;
  trace.params = params;
  trace.algorithm = std::string(to_string(expert.kind));
  trace.losses = stream;
  trace.rounds.reserve(stream.size());
  std::int64_t tau = 1;
  for (const auto& loss : stream) {
    RoundRecord rec;
    rec.tau = tau++;
    rec.x = learner.predict();
    rec.loss = loss.eval(rec.x);
    rec.W = 1.0;
    rec.alive_slots = 1;
    trace.rounds.push_back(std::move(rec));
    learner.update(loss);
  }
  return trace;
}

void OfflineConfig::validate() const {
  if (step_scales.empty()) throw InvalidParams("offline step-scale candidates are empty");
  if (alphas.empty()) throw InvalidParams("offline alpha candidates are empty");
  if (K < 1) throw InvalidParams("re-initialization period K must be at least 1");
}

RunTrace run_offline(const ProblemParams& params, const Domain& domain,
                     const OfflineConfig& config, const std::vector<LossFn>& stream) {
  params.validate();
  config.validate();
  require_stream(params, stream);
  const EtaGrid eta = EtaGrid::offline(config.Q.value_or(q_count(params)));

  std::vector<ExpertConfig> candidates;
  for (double step : config.step_scales) {
    for (double alpha : config.alphas) {
      candidates.push_back({ExpertKind::DecayedAdagrad, step, alpha, config.eps, config.projection});
    }
  }
  auto fresh_weights = [&] {
    std::vector<double> w;
    for (double e : eta.values) w.push_back(birth_weight(e));
    return w;
  };

  std::vector<Expert> experts;
  std::vector<std::vector<double>> weights;
  auto restart = [&](const Vector& start, std::int64_t birth) {
    experts.clear();
    weights.clear();
    for (const auto& c : candidates) {
      experts.push_back(spawn(c, domain, start, birth));
      weights.push_back(fresh_weights());
    }
  };
  restart(Domain::center(params.d), 1);
  std::int64_t epoch_start = 1;

  RunTrace trace;
  trace.params = params;
  trace.algorithm = "samuel-offline";
  trace.combine = CombineMode::Sample;
  trace.seed = config.seed;
  trace.eta = eta.values;
  trace.losses = stream;
  std::mt19937_64 rng(config.seed);

  for (std::int64_t tau = 1; tau <= params.T; ++tau) {
    const LossFn& loss = stream[static_cast<std::size_t>(tau - 1)];
    double W = 0.0;
    for (const auto& ws : weights) {
      for (double w : ws) W += w;
    }
    if (!(W > 0.0) || !std::isfinite(W)) {
      throw CorruptedState("offline total weight is not positive at round " + std::to_string(tau));
    }
    const double target = unit_draw(rng) * W;
    double cumulative = 0.0;
    std::size_t chosen = experts.size() - 1;
    bool found = false;
    for (std::size_t i = 0; i < weights.size() && !found; ++i) {
      for (double w : weights[i]) {
        cumulative += w;
        if (target < cumulative) {
          chosen = i;
          found = true;
          break;
        }
      }
    }

    RoundRecord rec;
    rec.tau = tau;
    rec.x = experts[chosen].predict();
    rec.loss = loss.eval(rec.x);
    rec.W = W;
    rec.alive_slots = static_cast<std::int64_t>(experts.size()) * eta.Q();
    const Interval epoch{epoch_start, std::min(epoch_start + config.K - 1, params.T)};
    for (std::size_t i = 0; i < experts.size(); ++i) {
      SlotRecord s;
      s.key = {0, static_cast<std::int64_t>(i)};
      s.interval = epoch;
      s.expert_loss = loss.eval(experts[i].predict());
      s.r = rec.loss - s.expert_loss;
      s.weights = weights[i];
      for (std::size_t q = 0; q < weights[i].size(); ++q) {
        s.weight_sum += weights[i][q];
        s.pseudo_weight_sum += weights[i][q] / eta.values[q];
        // No boundedness assumption here; a factor below zero is floored.
        weights[i][q] *= std::max(0.0, 1.0 + eta.values[q] * s.r);
      }
      rec.slots.push_back(std::move(s));
      experts[i].update(loss);
    }
    const Vector sampled = rec.x;
    trace.rounds.push_back(std::move(rec));

    if (tau % config.K == 0 && tau < params.T) {
      trace.reinit_rounds.push_back(tau);
      restart(sampled, tau + 1);
      epoch_start = tau + 1;
    }
  }
  return trace;
}

}  // namespace samuel
