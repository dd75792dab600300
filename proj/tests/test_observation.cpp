// Copyright 2026 The Contention Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "contention/observation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "contention/game.hpp"
#include "test_helpers.hpp"

using namespace contention;
using namespace contention::testing;

TEST_CASE("degenerate profiles pin every slot") {
  GameSpec two = GameSpec::homogeneous(2);
  SlotTrace trace = simulate(two, arr({1.0, 0.0}), 0.0, 500, 1);
  CHECK(trace.idle_count() == 0);
  CHECK(trace.success_counts()[0] == 500);

  trace = simulate(two, arr({1.0, 1.0}), 0.0, 500, 1);
  CHECK(trace.collision_count() == 500);

  CHECK_THROWS_AS(simulate(two, arr({0.5, 0.5}), 0.0, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(two, arr({0.5, 0.5}), 1.5, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("slot frequencies track the success and idle probabilities") {
  std::mt19937_64 gen(113);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = 2 + static_cast<Index>(gen() % 3);
    GameSpec spec(random_array(gen, n, 0.5, 2.0));
    const ArrayXd p = random_array(gen, n, 0.05, 0.9);
    const double p0 = (trial % 2 == 0) ? 0.0 : 0.3;
    const Index slots = 100000;
    const SlotTrace trace =
        simulate(spec, p, p0, slots, 1000 + static_cast<std::uint64_t>(trial));

    const Payoffs u = payoff(spec, p);
    const auto wins = trace.success_counts();
    for (Index i = 0; i < n; ++i) {
      const double expected = (1.0 - p0) * u[i] / spec.k[i];
      const double sigma =
          std::sqrt(expected * (1.0 - expected) / static_cast<double>(slots));
      const double observed = static_cast<double>(wins[static_cast<std::size_t>(i)]) /
                              static_cast<double>(slots);
      CHECK(std::abs(observed - expected) <= 3.0 * sigma + 1e-12);
    }
    const double idle_expected = (1.0 - p0) * (1.0 - p).prod();
    const double idle_sigma = std::sqrt(
        idle_expected * (1.0 - idle_expected) / static_cast<double>(slots));
    const double idle_observed =
        static_cast<double>(trace.idle_count()) / static_cast<double>(slots);
    CHECK(std::abs(idle_observed - idle_expected) <= 3.0 * idle_sigma + 1e-12);
  }
}

TEST_CASE("seeded traces are reproducible and thread-count invariant") {
  GameSpec spec = GameSpec::homogeneous(3);
  const ArrayXd p = arr({0.2, 0.5, 0.7});
  const SlotTrace a = simulate(spec, p, 0.1, 20000, 42);
  const SlotTrace b = simulate(spec, p, 0.1, 20000, 42);
  CHECK(a.outcomes == b.outcomes);
  const SlotTrace c = simulate(spec, p, 0.1, 20000, 42, 4);
  CHECK(a.outcomes == c.outcomes);
  const SlotTrace other = simulate(spec, p, 0.1, 20000, 43);
  CHECK(a.outcomes != other.outcomes);
}

TEST_CASE("estimator inverts the idle/success ratio") {
  SlotTrace trace;
  trace.n = 1;
  // 25% idle, 25% success: odds ratio 1, so p_hat = 1/2.
  for (int i = 0; i < 100; ++i) {
    trace.outcomes.push_back(i % 4 == 0 ? kIdleSlot
                                        : (i % 4 == 1 ? 0 : kCollisionSlot));
  }
  const EstimateReport report = estimate_probabilities(trace, 1);
  CHECK(report.defined[0]);
  CHECK(report.p_hat[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("estimator recovers the profile from a long run") {
  GameSpec spec = GameSpec::homogeneous(3);
  const ArrayXd p = ArrayXd::Constant(3, 1.0 / 3.0);
  const SlotTrace trace = simulate(spec, p, 0.0, 1000000, 7);
  const EstimateReport report = estimate_probabilities(trace, 3);
  REQUIRE(report.all_defined());
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(report.p_hat[i] - p[i]) < 0.01);
    CHECK(report.ci_halfwidth[i] > 0.0);
    CHECK(report.ci_halfwidth[i] < 0.01);
  }
}

TEST_CASE("estimator flags users it cannot identify") {
  GameSpec two = GameSpec::homogeneous(2);
  // One user always transmits: no idle slots, the other never succeeds.
  const SlotTrace trace = simulate(two, arr({1.0, 0.5}), 0.0, 2000, 11);
  const EstimateReport report = estimate_probabilities(trace, 2);
  CHECK_FALSE(report.all_defined());
  CHECK_FALSE(report.defined[1]);  // q_1 = q_idle = 0
  CHECK(report.defined[0]);
  CHECK(report.p_hat[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimation error shrinks like the square root of the run length") {
  GameSpec spec = GameSpec::homogeneous(3);
  const ArrayXd p = arr({0.15, 0.3, 0.45});
  double previous = -1.0;
  for (Index slots : {1000, 10000, 100000, 1000000}) {
    // Average over a few seeds to keep the decade comparison stable.
    double err = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SlotTrace trace = simulate(spec, p, 0.0, slots, 500 + seed);
      const EstimateReport report = estimate_probabilities(trace, 3);
      REQUIRE(report.all_defined());
      err += (report.p_hat - p).abs().maxCoeff();
    }
    err /= 5.0;
    if (previous >= 0.0) CHECK(err < 0.7 * previous);
    previous = err;
  }
}

TEST_CASE("observation models transform the profile as advertised") {
  const ArrayXd p = arr({0.2, 0.5});

  const Observation exact = observe(ObservationModel::exact(), p);
  CHECK(((*exact.profile) == p).all());

  const Observation quant = observe(ObservationModel::quantized(5), p);
  REQUIRE(quant.intervals.has_value());
  CHECK((*quant.intervals)[0] == 1);
  CHECK((*quant.intervals)[1] == 3);  // 0.5 lies in (0.4, 0.6]

  const Observation agg = observe(ObservationModel::aggregate_only(),
                                  arr({0.5, 0.5}));
  CHECK(*agg.idle_prob == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(observe(ObservationModel::noisy(0.1), arr({0.05, 0.5})),
                  std::invalid_argument);
}

TEST_CASE("interval observation is exact on right endpoints") {
  for (Index m : {2, 3, 5, 7, 15}) {
    for (Index j = 1; j <= m; ++j) {
      const double p = static_cast<double>(j) / static_cast<double>(m);
      CHECK(quantize_index(p, m) == j);
    }
  }
}

TEST_CASE("noisy observations are unbiased uniform draws") {
  const ArrayXd p = arr({0.5, 0.3});
  const ObservationModel model = ObservationModel::noisy(0.1);
  double mean0 = 0.0;
  double lo = 1.0, hi = 0.0;
  const Index draws = 100000;
  for (Index d = 0; d < draws; ++d) {
    const Observation obs =
        observe(model, p, 21, static_cast<std::uint64_t>(d));
    mean0 += (*obs.profile)[0];
    lo = std::min(lo, (*obs.profile)[0]);
    hi = std::max(hi, (*obs.profile)[0]);
  }
  mean0 /= static_cast<double>(draws);
  // Uniform on [0.4, 0.6]: sd of the mean is eps/sqrt(3)/sqrt(draws).
  const double sigma = 0.1 / std::sqrt(3.0) / std::sqrt(double(draws));
  CHECK(std::abs(mean0 - 0.5) <= 3.0 * sigma);
  CHECK(lo >= 0.4);
  CHECK(hi <= 0.6);
  CHECK(hi - lo > 0.19);
}

TEST_CASE("trace CSV encodes outcomes as I, C, and S<i>") {
  SlotTrace trace;
  trace.n = 2;
  trace.outcomes = {kIdleSlot, 0, 1, kCollisionSlot};
  std::ostringstream os;
  write_trace_csv(os, trace);
  CHECK(os.str() == "slot,outcome\n0,I\n1,S0\n2,S1\n3,C\n");
}

TEST_CASE("estimate report serializes with explicit undefined markers") {
  GameSpec two = GameSpec::homogeneous(2);
  const SlotTrace trace = simulate(two, arr({1.0, 0.5}), 0.0, 400, 3);
  const EstimateReport report = estimate_probabilities(trace, 2);
  const nlohmann::json j = report;
  CHECK(j.at("defined")[0] == true);
  CHECK(j.at("defined")[1] == false);
  CHECK(j.at("p_hat")[1] == -1.0);
  CHECK(j.at("slots") == 400);
}
