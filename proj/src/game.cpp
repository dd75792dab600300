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

#include "contention/game.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "contention/optimize.hpp"
#include "contention/rng.hpp"

namespace contention {

Payoffs payoff(const GameSpec& spec, const Eigen::Ref<const ArrayXd>& p) {
  require_valid_profile(spec, p);
  return spec.k * p * exclusive_prod(1.0 - p);
}

double utilization(const Eigen::Ref<const ArrayXd>& p) {
  if (!is_valid_profile(p)) {
    throw std::invalid_argument("utilization: entries must lie in [0,1]");
  }
  return (p * exclusive_prod(1.0 - p)).sum();
}

bool is_nash_base(const GameSpec& spec, const Eigen::Ref<const ArrayXd>& p) {
  require_valid_profile(spec, p);
  return p.maxCoeff() == 1.0;
}

namespace {

// Row-major odometer over {0, 1/(m-1), ..., 1}^n.
template <typename Fn>
void for_each_grid_point(Index n, Index points_per_axis, Fn&& fn) {
  std::vector<Index> idx(static_cast<std::size_t>(n), 0);
  ArrayXd p = ArrayXd::Zero(n);
  const double step = 1.0 / static_cast<double>(points_per_axis - 1);
  for (;;) {
    for (Index i = 0; i < n; ++i) {
      p[i] = (idx[static_cast<std::size_t>(i)] == points_per_axis - 1)
                 ? 1.0
                 : static_cast<double>(idx[static_cast<std::size_t>(i)]) * step;
    }
    fn(p);
    Index axis = n - 1;
    while (axis >= 0 && ++idx[static_cast<std::size_t>(axis)] == points_per_axis) {
      idx[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
}

}  // namespace

void for_each_region_point(
    const GameSpec& spec, const SamplingPlan& plan,
    const std::function<void(const Profile&, const Payoffs&)>& fn) {
  const Index n = spec.n();
  if (plan.kind == SamplingPlan::Kind::Grid) {
    if (plan.points_per_axis < 2) {
      throw std::invalid_argument(
          "sampling plan: need at least two grid points per axis");
    }
    for_each_grid_point(n, plan.points_per_axis,
                        [&](const Profile& p) { fn(p, payoff(spec, p)); });
    return;
  }
  if (plan.count < 1) {
    throw std::invalid_argument("sampling plan: need at least one point");
  }
  CounterRng rng(plan.seed);
  Profile p(n);
  for (Index s = 0; s < plan.count; ++s) {
    for (Index i = 0; i < n; ++i) {
      p[i] = rng.uniform(static_cast<std::uint64_t>(i),
                         static_cast<std::uint64_t>(s));
    }
    fn(p, payoff(spec, p));
  }
}

std::vector<RegionPoint> sample_feasible_region(const GameSpec& spec,
                                                const SamplingPlan& plan) {
  std::vector<RegionPoint> points;
  for_each_region_point(spec, plan, [&](const Profile& p, const Payoffs& u) {
    points.push_back({p, u});
  });
  return points;
}

void write_region_csv(std::ostream& os,
                      const std::vector<RegionPoint>& points) {
  if (points.empty()) return;
  const Index n = points.front().p.size();
  for (Index i = 0; i < n; ++i) os << "p_" << (i + 1) << ",";
  for (Index i = 0; i < n; ++i) os << "u_" << (i + 1) << (i + 1 < n ? "," : "");
  os << "\n";
  char buf[32];
  for (const auto& pt : points) {
    for (Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", pt.p[i]);
      os << buf << ",";
    }
    for (Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", pt.u[i]);
      os << buf << (i + 1 < n ? "," : "");
    }
    os << "\n";
  }
}

ParetoResult is_pareto_efficient(const GameSpec& spec,
                                 const Eigen::Ref<const ArrayXd>& p,
                                 const SearchBudget& budget) {
  require_valid_profile(spec, p);
  const Index n = spec.n();
  const Payoffs base = payoff(spec, p);

  // Weak dominance with one strict improvement beyond tolerance.
  const auto dominates = [&](const Payoffs& u) {
    return (u >= base).all() && ((u - base) > budget.tol).any();
  };
  // Worst componentwise improvement; > 0 means strict dominance.
  const auto min_gain = [&](const ArrayXd& q) {
    return (payoff(spec, q) - base).minCoeff();
  };

  ParetoResult result;
  result.budget = budget;

  // Coarse scan. Only affordable for small n; the local stage below does
  // not depend on it.
  ArrayXd best_start = p;
  double best_start_gain = 0.0;
  if (n <= 4 && budget.grid_points_per_axis >= 2) {
    bool found = false;
    Profile witness;
    for_each_grid_point(n, budget.grid_points_per_axis, [&](const Profile& q) {
      if (found) return;
      const Payoffs u = payoff(spec, q);
      if (dominates(u)) {
        found = true;
        witness = q;
        return;
      }
      const double gain = (u - base).minCoeff();
      if (gain > best_start_gain) {
        best_start_gain = gain;
        best_start = q;
      }
    });
    if (found) {
      result.efficient = false;
      result.dominated_by = witness;
      return result;
    }
  }

  // Local max-min refinement from the profile itself and from the best
  // grid candidate.
  CompassConfig config;
  config.max_rounds = budget.refine_rounds;
  config.min_step = 1e-12;
  const ArrayXd self = p;
  for (const ArrayXd& start : {self, best_start}) {
    CompassResult local = compass_maximize(min_gain, start, 0.0, 1.0, config);
    if (local.value > budget.tol) {
      result.efficient = false;
      result.dominated_by = local.x;
      return result;
    }
    if (dominates(payoff(spec, local.x))) {
      result.efficient = false;
      result.dominated_by = local.x;
      return result;
    }
  }

  result.efficient = true;
  return result;
}

}  // namespace contention
