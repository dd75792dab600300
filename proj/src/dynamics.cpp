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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "contention/equilibrium.hpp"

namespace contention {

namespace {

void require_instance(const GameSpec& spec,
                      const Eigen::Ref<const ArrayXd>& target,
                      const Eigen::Ref<const ArrayXd>& p_hat0) {
  require_valid_profile(spec, p_hat0, "p_hat0");
  if (!is_interior(target) || target.size() != spec.n()) {
    throw std::invalid_argument("dynamics: target must be interior");
  }
}

// Users ordered by initial ratio p_hat0_i/t_i, ascending, ties by index.
std::vector<Index> ratio_order(const ArrayXd& ratios) {
  std::vector<Index> order(static_cast<std::size_t>(ratios.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return ratios[a] < ratios[b]; });
  return order;
}

std::string check_hypotheses(const GameSpec& spec,
                             const Eigen::Ref<const ArrayXd>& target,
                             const Eigen::Ref<const ArrayXd>& p_hat0,
                             const ArrayXd& ratios, Index last) {
  const EquilibriumVerdict verdict = is_nash_intervened(spec, target, p_hat0);
  if (verdict.cls != EquilibriumVerdict::Class::SecondClass) {
    return "initial profile is not a second-class equilibrium";
  }
  for (Index i = 0; i < spec.n(); ++i) {
    const double spread = ratios[last] - ratios[i];
    if (!(spread < 2.0 || ratios[i] <= 1.0)) {
      return "ratio spread >= 2 for a user with ratio > 1";
    }
  }
  return {};
}

}  // namespace

DynamicsTrace run_dynamics(const GameSpec& spec,
                           const Eigen::Ref<const ArrayXd>& target,
                           const Eigen::Ref<const ArrayXd>& p_hat0, int max_t,
                           double tol) {
  require_instance(spec, target, p_hat0);
  const Index n = spec.n();
  const double standard_offset = static_cast<double>(n);

  DynamicsTrace trace;
  Profile current = p_hat0;
  const InterventionRule standard_rule = make_trd(target);
  trace.steps.push_back(
      {0, standard_offset, current, evaluate(standard_rule, current)});

  const auto converged = [&](const Profile& p) {
    return (p - target).abs().maxCoeff() < tol;
  };
  if (converged(current)) {
    trace.converged = true;
    trace.hypotheses_hold = true;  // nothing to adjust; already at the target
    return trace;
  }

  const ArrayXd ratios = p_hat0 / target;
  const std::vector<Index> order = ratio_order(ratios);
  const Index last = order.back();

  trace.hypothesis_note = check_hypotheses(spec, target, p_hat0, ratios, last);
  trace.hypotheses_hold = trace.hypothesis_note.empty();

  Profile next(n);
  for (int t = 1; t <= max_t; ++t) {
    double offset = 1.0;
    for (Index j = 0; j < n; ++j) {
      if (j != last) offset += current[j] / target[j];
    }
    for (Index i = 0; i < n; ++i) {
      next[i] = best_response_trd(spec, target, offset, i, current,
                                  IndifferencePolicy::KeepPrevious)
                    .value;
    }
    current = next;
    TrdRule stepped{target, offset};
    trace.steps.push_back(
        {t, offset, current, evaluate(InterventionRule{stepped}, current)});
    trace.iterations = t;
    if (converged(current)) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

Profile closed_form_trajectory(const Eigen::Ref<const ArrayXd>& target,
                               const Eigen::Ref<const ArrayXd>& p_hat0,
                               int t) {
  if (target.size() != p_hat0.size()) {
    throw std::invalid_argument("closed_form_trajectory: dimension mismatch");
  }
  if (!is_interior(target)) {
    throw std::invalid_argument("closed_form_trajectory: target must be interior");
  }
  if (t < 0) {
    throw std::invalid_argument("closed_form_trajectory: t must be >= 0");
  }
  if (t == 0) return p_hat0;

  const Index n = target.size();
  const ArrayXd ratios = p_hat0 / target;
  const double top = ratios.maxCoeff();

  Profile out(n);
  for (Index i = 0; i < n; ++i) {
    const double spread = top - ratios[i];
    double ratio_t;
    if (spread < 2.0) {
      ratio_t = 1.0 - spread / std::exp2(t);
    } else {
      if (ratios[i] > 1.0) {
        throw std::invalid_argument(
            "closed_form_trajectory: hypotheses violated (spread >= 2 and "
            "ratio > 1)");
      }
      // Such a user is indifferent in round one and rejoins afterwards,
      // chasing the top user's ratio of exactly 1.
      ratio_t = 1.0 - (1.0 - ratios[i]) / std::exp2(t - 1);
    }
    out[i] = ratio_t * target[i];
  }
  return out;
}

void write_dynamics_csv(std::ostream& os, const DynamicsTrace& trace) {
  if (trace.steps.empty()) return;
  const Index n = trace.steps.front().profile.size();
  os << "t,c_t,g_level";
  for (Index i = 0; i < n; ++i) os << ",p_" << (i + 1);
  os << "\n";
  char buf[32];
  for (const auto& step : trace.steps) {
    os << step.t << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", step.offset);
    os << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", step.intervention);
    os << buf;
    for (Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", step.profile[i]);
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace contention
