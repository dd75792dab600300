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

#include "contention/dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "test_helpers.hpp"

using namespace contention;
using namespace contention::testing;

TEST_CASE("adjustment walks the worked two-user instance to the target") {
  GameSpec spec = GameSpec::homogeneous(2);
  const ArrayXd target = arr({0.2, 0.2});
  const ArrayXd start = arr({0.8, 0.9});

  const DynamicsTrace trace = run_dynamics(spec, target, start, 40, 1e-8);
  CHECK(trace.hypotheses_hold);
  CHECK(trace.converged);
  REQUIRE(trace.steps.size() >= 3);

  // Round one: offset 5, profile (0.15, 0.2); round two: (0.175, 0.2).
  CHECK(trace.steps[1].offset == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(trace.steps[1].profile[0] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(trace.steps[1].profile[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(trace.steps[2].profile[0] == doctest::Approx(0.175).epsilon(1e-12));
  CHECK(trace.steps[2].profile[1] == doctest::Approx(0.2).epsilon(1e-12));

  const auto& last = trace.steps.back();
  CHECK((last.profile - target).abs().maxCoeff() < 1e-8);
  CHECK(last.offset == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("starting on the target is a fixed point") {
  GameSpec spec = GameSpec::homogeneous(3);
  const ArrayXd target = arr({0.2, 0.3, 0.25});
  const DynamicsTrace trace = run_dynamics(spec, target, target, 10, 1e-10);
  CHECK(trace.converged);
  CHECK(trace.iterations == 0);
  CHECK(trace.steps.size() == 1);
  CHECK(trace.hypotheses_hold);
}

TEST_CASE("violated hypotheses are flagged but the run proceeds") {
  GameSpec spec = GameSpec::homogeneous(2);
  const ArrayXd target = arr({0.2, 0.2});
  // Not a second-class profile: deviation sums fall short of 2.
  const DynamicsTrace trace =
      run_dynamics(spec, target, arr({0.3, 0.35}), 10, 1e-8);
  CHECK_FALSE(trace.hypotheses_hold);
  CHECK(!trace.hypothesis_note.empty());
  CHECK(trace.steps.size() > 1);
}

TEST_CASE("closed form: worked values, base case, and the limit") {
  const ArrayXd target = arr({0.2, 0.2});
  const ArrayXd start = arr({0.8, 0.9});

  const Profile at0 = closed_form_trajectory(target, start, 0);
  CHECK((at0 == start).all());

  const Profile at2 = closed_form_trajectory(target, start, 2);
  CHECK(at2[0] == doctest::Approx(0.175).epsilon(1e-12));
  CHECK(at2[1] == doctest::Approx(0.2).epsilon(1e-12));

  const Profile deep = closed_form_trajectory(target, start, 60);
  CHECK((deep - target).abs().maxCoeff() < 1e-12);
}

TEST_CASE("the largest-ratio user lands on its target in round one") {
  std::mt19937_64 gen(83);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 2 + static_cast<Index>(gen() % 5);
    const auto inst = make_second_class_instance(gen, n, true);
    GameSpec spec(inst.k);
    const DynamicsTrace trace =
        run_dynamics(spec, inst.target, inst.p_hat0, 5, 1e-8);
    REQUIRE(trace.hypotheses_hold);
    const ArrayXd ratios = inst.p_hat0 / inst.target;
    Index top = 0;
    for (Index i = 1; i < n; ++i) {
      if (ratios[i] >= ratios[top]) top = i;
    }
    CHECK(trace.steps[1].profile[top] ==
          doctest::Approx(inst.target[top]).epsilon(1e-12));
  }
}

TEST_CASE("recursion tracks the closed form step by step") {
  std::mt19937_64 gen(89);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + static_cast<Index>(gen() % 5);
    const auto inst = make_second_class_instance(gen, n, true);
    GameSpec spec(inst.k);
    const DynamicsTrace trace =
        run_dynamics(spec, inst.target, inst.p_hat0, 30, 1e-9);
    REQUIRE(trace.hypotheses_hold);
    CHECK(trace.converged);
    for (const auto& step : trace.steps) {
      const Profile expected =
          closed_form_trajectory(inst.target, inst.p_hat0, step.t);
      CHECK((step.profile - expected).abs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("ratio errors halve every round from round one on") {
  std::mt19937_64 gen(97);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(gen() % 5);
    const auto inst = make_second_class_instance(gen, n, true);
    GameSpec spec(inst.k);
    const DynamicsTrace trace =
        run_dynamics(spec, inst.target, inst.p_hat0, 25, 1e-9);
    REQUIRE(trace.hypotheses_hold);
    for (std::size_t s = 1; s + 1 < trace.steps.size(); ++s) {
      const double before =
          ((trace.steps[s].profile / inst.target) - 1.0).abs().maxCoeff();
      const double after =
          ((trace.steps[s + 1].profile / inst.target) - 1.0).abs().maxCoeff();
      if (before < 1e-13) break;
      CHECK(after == doctest::Approx(before / 2.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("offsets overshoot once and then climb back to the user count") {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(gen() % 5);
    const auto inst = make_second_class_instance(gen, n, true);
    GameSpec spec(inst.k);
    const DynamicsTrace trace =
        run_dynamics(spec, inst.target, inst.p_hat0, 40, 1e-10);
    REQUIRE(trace.hypotheses_hold);
    REQUIRE(trace.converged);
    const double user_count = static_cast<double>(n);
    CHECK(trace.steps[1].offset >= user_count + 2.0 - 1e-9);
    for (std::size_t s = 2; s < trace.steps.size(); ++s) {
      CHECK(trace.steps[s].offset <= user_count + 1e-9);
      if (s >= 3) CHECK(trace.steps[s].offset >= trace.steps[s - 1].offset - 1e-12);
    }
    CHECK(trace.steps.back().offset ==
          doctest::Approx(user_count).epsilon(1e-7));
  }
}

TEST_CASE("dynamics trace CSV layout") {
  GameSpec spec = GameSpec::homogeneous(2);
  const DynamicsTrace trace =
      run_dynamics(spec, arr({0.2, 0.2}), arr({0.8, 0.9}), 3, 1e-8);
  std::ostringstream os;
  write_dynamics_csv(os, trace);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,c_t,g_level,p_1,p_2\n", 0) == 0);
  Index newlines = 0;
  for (char c : csv) newlines += (c == '\n');
  CHECK(newlines == static_cast<Index>(trace.steps.size()) + 1);
}
