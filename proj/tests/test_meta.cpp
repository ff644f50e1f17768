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

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include <doctest.h>

#include "samuel/error.hpp"
#include "samuel/meta.hpp"
#include "support.hpp"

using namespace samuel;
using samuel::testing::Gen;

namespace {

ProblemParams params_of(int d, std::int64_t T, double D, double G) {
  ProblemParams p;
  p.d = d;
  p.T = T;
  p.D = D;
  p.D_inf = D;
  p.G = G;
  return p;
}

// A straight-line reimplementation of the online loop: intervals from the
// raw definition, weights in plain vectors, experts as explicit state.
struct Reference {
  using Step = std::function<Vector(const Vector& x, const Vector& g, int k, Vector& acc)>;

  struct Slot {
    std::int64_t s, t;
    Vector x;
    Vector acc;
    int steps = 0;
    std::vector<double> w;
  };

  std::vector<Vector> xs;
  std::vector<double> Ws;

  Reference(const ProblemParams& p, int Q, const std::vector<LossFn>& stream, const Step& step) {
    std::vector<double> eta;
    for (int q = 1; q <= Q; ++q) eta.push_back(1.0 / (2.0 * p.G * p.D * std::pow(2.0, q)));
    std::set<std::pair<std::int64_t, std::int64_t>> cover;
    for (std::int64_t len = 1; len <= p.T; len *= 2) {
      for (std::int64_t s = 1; s <= p.T; s += len) cover.insert({s, std::min(s + len - 1, p.T)});
    }
    std::vector<Slot> alive;
    auto spawn_at = [&](std::int64_t tau) {
      for (const auto& [s, t] : cover) {
        if (s != tau) continue;
        Slot slot{s, t, Vector::Zero(p.d), Vector::Zero(p.d), 0, {}};
        for (double e : eta) slot.w.push_back(std::min(0.5, e));
        alive.push_back(slot);
      }
    };
    spawn_at(1);
    for (std::int64_t tau = 1; tau <= p.T; ++tau) {
      const LossFn& f = stream[static_cast<std::size_t>(tau - 1)];
      double W = 0.0;
      for (const auto& a : alive) for (double w : a.w) W += w;
      Vector x = Vector::Zero(p.d);
      for (const auto& a : alive) {
        double wi = 0.0;
        for (double w : a.w) wi += w;
        x += wi / W * a.x;
      }
      if (x.norm() > p.D) x *= p.D / x.norm();
      xs.push_back(x);
      Ws.push_back(W);
      const double loss = f.eval(x);
      std::vector<Slot> next;
      for (auto& a : alive) {
        if (a.t < tau + 1) continue;
        const double r = loss - f.eval(a.x);
        for (std::size_t q = 0; q < a.w.size(); ++q) a.w[q] *= 1.0 + eta[q] * r;
        a.x = step(a.x, f.subgrad(a.x), ++a.steps, a.acc);
        next.push_back(a);
      }
      alive = next;
      spawn_at(tau + 1);
    }
  }
};

std::vector<LossFn> alternating_quadratics(std::int64_t T, double c) {
  std::vector<LossFn> out;
  for (std::int64_t t = 1; t <= T; ++t) {
    out.push_back(LossFn::quadratic(Vector::Constant(1, (t * 5 % 3 == 0) ? -c : c), 1.0));
  }
  return out;
}

}  // namespace

TEST_CASE("q_count and the online eta grid") {
  // ceil(4 ln(1 * 1024 * 2^2 * 6^2)) = ceil(47.61) = 48
  CHECK(q_count(params_of(1, 1024, 2.0, 6.0)) == 48);
  const double arg = 4.0 * 8192 * 1.5 * 1.5 * 3.0 * 3.0;
  CHECK(q_count(params_of(4, 8192, 1.5, 3.0)) == static_cast<int>(std::ceil(4.0 * std::log(arg))));
  const EtaGrid grid = EtaGrid::online(params_of(1, 8, 2.0, 6.0), 3);
  CHECK(grid.values == std::vector<double>{1.0 / 48, 1.0 / 96, 1.0 / 192});
  CHECK(EtaGrid::offline(2).values == std::vector<double>{0.5, 0.25});
  CHECK_THROWS_AS(EtaGrid::online(params_of(1, 8, 2.0, 6.0), 0), InvalidParams);
}

TEST_CASE("initial weights sit on the intervals starting at round one") {
  const auto p = params_of(1, 16, 2.0, 6.0);
  const GeometricCover cover(16);
  MetaOptions opt;
  opt.Q = 4;
  const MetaState state(p, cover, Domain::ball(2.0), opt);
  CHECK(state.alive().size() == 5);
  for (const auto& [key, slot] : state.alive()) CHECK(slot.interval.s == 1);
  CHECK(state.weight({2, 0}, 1) == 1.0 / 48);
  CHECK(state.weight({0, 1}, 1) == 0.0);
  CHECK(state.total_weight() == doctest::Approx(5.0 * (1.0 / 48) * (1.0 + 0.5 + 0.25 + 0.125)));
  CHECK(state.alive_slots() == 20);
}

TEST_CASE("average-mode run matches the straight-line reference, d = 1 Adagrad") {
  const auto p = params_of(1, 8, 2.0, 6.0);
  const auto stream = alternating_quadratics(8, 1.0);
  const int Q = q_count(p);
  const double eta_exp = 2.0;
  const Reference ref(p, Q, stream, [&](const Vector& x, const Vector& g, int, Vector& acc) {
    acc.array() += g.array().square();
    if (g.squaredNorm() == 0.0) return x;
    Vector y = x - eta_exp * g.cwiseQuotient((acc.array() + 1e-8).sqrt().matrix());
    return Vector(y.cwiseMax(-2.0).cwiseMin(2.0));
  });
  MetaOptions opt;
  opt.expert.step_scale = eta_exp;
  const GeometricCover cover(8);
  const RunTrace trace = run(p, cover, Domain::ball(2.0), opt, stream);
  REQUIRE(trace.rounds.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(trace.rounds[i].x[0] == doctest::Approx(ref.xs[i][0]).epsilon(1e-12));
    CHECK(trace.rounds[i].W == doctest::Approx(ref.Ws[i]).epsilon(1e-12));
  }
}

TEST_CASE("average-mode run matches the straight-line reference, d = 2 OGD") {
  Gen gen(41);
  const auto p = params_of(2, 32, 1.5, 4.0);
  std::vector<LossFn> stream;
  for (int t = 0; t < 32; ++t) stream.push_back(LossFn::linear(gen.gaussian(2).normalized() * 3.0));
  const double eta_exp = 0.4;
  const Reference ref(p, 6, stream, [&](const Vector& x, const Vector& g, int k, Vector&) {
    Vector y = x - eta_exp / std::sqrt(static_cast<double>(k)) * g;
    if (y.norm() > 1.5) y *= 1.5 / y.norm();
    return y;
  });
  MetaOptions opt;
  opt.expert.kind = ExpertKind::OGDSqrt;
  opt.expert.step_scale = eta_exp;
  opt.Q = 6;
  const GeometricCover cover(32);
  const RunTrace trace = run(p, cover, Domain::ball(1.5), opt, stream);
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK((trace.rounds[i].x - ref.xs[i]).norm() <= 1e-12);
    CHECK(trace.rounds[i].W == doctest::Approx(ref.Ws[i]).epsilon(1e-12));
  }
}

TEST_CASE("alive slots follow the active set and weighted regret is nonpositive") {
  Gen gen(42);
  for (int trial = 0; trial < 5; ++trial) {
    const std::int64_t T = gen.integer(2, 80);
    const auto p = params_of(2, T, 1.5, 3.1);
    std::vector<LossFn> stream;
    for (std::int64_t t = 0; t < T; ++t) {
      stream.push_back(trial % 2 ? LossFn::linear(gen.gaussian(2).normalized() * 3.0)
                                 : LossFn::quadratic(gen.in_ball(2, 0.5), 0.5));
    }
    const GeometricCover cover(T);
    MetaOptions opt;
    const RunTrace trace = run(p, cover, Domain::ball(1.5), opt, stream);
    for (const auto& rec : trace.rounds) {
      const auto keys = cover.active_keys(rec.tau);
      REQUIRE(rec.slots.size() == keys.size());
      double wr = 0.0;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        CHECK(rec.slots[i].key == keys[i]);
        for (double w : rec.slots[i].weights) {
          CHECK(w > 0.0);
          wr += w * rec.slots[i].r;
        }
      }
      CHECK(rec.alive_slots == static_cast<std::int64_t>(keys.size()) * q_count(p));
      CHECK(wr <= 1e-9 * rec.W * p.G * p.D);
    }
  }
}

TEST_CASE("sample mode plays one expert's point and is seeded") {
  Gen gen(43);
  const auto p = params_of(2, 64, 1.5, 3.1);
  std::vector<LossFn> stream;
  for (int t = 0; t < 64; ++t) stream.push_back(LossFn::quadratic(gen.in_ball(2, 1.0), 0.5));
  const GeometricCover cover(64);
  MetaOptions opt;
  opt.combine = CombineMode::Sample;
  opt.seed = 5;
  const RunTrace a = run(p, cover, Domain::ball(1.5), opt, stream);
  const RunTrace b = run(p, cover, Domain::ball(1.5), opt, stream);
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(a.rounds[i].x == b.rounds[i].x);
    const auto& slots = a.rounds[i].slots;
    CHECK(std::any_of(slots.begin(), slots.end(),
                      [&](const SlotRecord& s) { return s.expert_loss == a.rounds[i].loss; }));
  }
}

TEST_CASE("losses beyond the declared bounds are reported or clipped") {
  const auto p = params_of(1, 16, 2.0, 1.01);
  std::vector<LossFn> stream;
  for (int t = 0; t < 16; ++t) stream.push_back(LossFn::linear(Vector::Constant(1, t % 2 ? 100.0 : -100.0)));
  const GeometricCover cover(16);
  MetaOptions opt;
  CHECK_THROWS_AS(run(p, cover, Domain::ball(2.0), opt, stream), AssumptionViolation);
  opt.clip_r = true;
  const RunTrace trace = run(p, cover, Domain::ball(2.0), opt, stream);
  for (const auto& rec : trace.rounds) {
    for (const auto& s : rec.slots) CHECK(std::abs(s.r) <= 2.0 * p.G * p.D);
  }
}

TEST_CASE("misuse") {
  const auto p = params_of(1, 8, 2.0, 6.0);
  const GeometricCover cover(8);
  MetaState state(p, cover, Domain::ball(2.0), MetaOptions{});
  CHECK_THROWS_AS(state.update(LossFn::linear(Vector::Ones(1))), CorruptedState);
  CHECK_THROWS_AS(run(p, cover, Domain::ball(2.0), MetaOptions{}, alternating_quadratics(7, 1.0)),
                  InvalidParams);
  CHECK_THROWS_AS(MetaState(p, GeometricCover(16), Domain::ball(2.0), MetaOptions{}),
                  InvalidParams);
  for (int t = 0; t < 8; ++t) {
    meta_predict(state);
    meta_update(state, LossFn::quadratic(Vector::Zero(1), 1.0));
  }
  CHECK_THROWS_AS(state.predict(), CorruptedState);
}

TEST_CASE("single learners are recorded in the same format") {
  const auto p = params_of(1, 8, 2.0, 6.0);
  ExpertConfig c;
  c.kind = ExpertKind::OGDInvT;
  c.step_scale = 1.0;
  const RunTrace t = run_single(p, Domain::ball(2.0), c, alternating_quadratics(8, 1.0));
  CHECK(t.algorithm == "ogd-invt");
  CHECK(t.rounds.size() == 8);
  CHECK(t.rounds[0].x[0] == 0.0);
  CHECK(t.eta.empty());
}

TEST_CASE("offline pool re-initializes every K rounds") {
  const auto p = params_of(1, 100, 2.0, 6.0);
  OfflineConfig c;
  c.K = 16;
  const RunTrace t = run_offline(p, Domain::ball(2.0), c, alternating_quadratics(100, 1.0));
  CHECK(t.reinit_rounds == std::vector<std::int64_t>{16, 32, 48, 64, 80, 96});
  CHECK(t.rounds[16].slots[0].interval == Interval{17, 32});
  CHECK(t.rounds[99].slots[0].interval == Interval{97, 100});

  const auto p96 = params_of(1, 96, 2.0, 6.0);
  const RunTrace u = run_offline(p96, Domain::ball(2.0), c, alternating_quadratics(96, 1.0));
  CHECK(u.reinit_rounds.back() == 80);
}

TEST_CASE("offline pool with one candidate and no reset is that candidate") {
  const auto p = params_of(2, 50, 1.5, 4.0);
  Gen gen(44);
  std::vector<LossFn> stream;
  for (int t = 0; t < 50; ++t) stream.push_back(LossFn::quadratic(gen.in_ball(2, 1.0), 1.0));
  OfflineConfig c;
  c.step_scales = {0.7};
  c.alphas = {1.0};
  c.K = 51;
  const RunTrace off = run_offline(p, Domain::ball(1.5), c, stream);
  ExpertConfig solo;
  solo.step_scale = 0.7;
  const RunTrace single = run_single(p, Domain::ball(1.5), solo, stream);
  for (std::size_t i = 0; i < 50; ++i) CHECK(off.rounds[i].x == single.rounds[i].x);
  CHECK(off.reinit_rounds.empty());
}

TEST_CASE("offline config validation") {
  OfflineConfig c;
  c.K = 0;
  CHECK_THROWS_AS(c.validate(), InvalidParams);
  c = OfflineConfig{};
  c.alphas.clear();
  CHECK_THROWS_AS(c.validate(), InvalidParams);
}
