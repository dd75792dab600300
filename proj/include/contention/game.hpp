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

#ifndef CONTENTION_GAME_HPP
#define CONTENTION_GAME_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "contention/types.hpp"

namespace contention {

/// Expected payoffs u_i = k_i p_i prod_{j != i} (1 - p_j).
Payoffs payoff(const GameSpec& spec, const Eigen::Ref<const ArrayXd>& p);

/// System utilization ratio tau(p) = sum_i p_i prod_{j != i} (1 - p_j),
/// the probability that some user succeeds in a slot. Equals
/// sum_i u_i(p) / k_i.
double utilization(const Eigen::Ref<const ArrayXd>& p);

/// Nash equilibrium of the unmanaged game: holds iff max_i p_i = 1.
bool is_nash_base(const GameSpec& spec, const Eigen::Ref<const ArrayXd>& p);

/// How to walk the strategy space when sampling the feasible payoff set.
struct SamplingPlan {
  enum class Kind { Grid, Random };
  Kind kind = Kind::Grid;
  Index points_per_axis = 2;  // grid values {0, 1/(m-1), ..., 1}
  Index count = 0;            // number of random draws
  std::uint64_t seed = 0;

  static SamplingPlan grid(Index points_per_axis) {
    SamplingPlan plan;
    plan.kind = Kind::Grid;
    plan.points_per_axis = points_per_axis;
    return plan;
  }
  static SamplingPlan random(Index count, std::uint64_t seed) {
    SamplingPlan plan;
    plan.kind = Kind::Random;
    plan.count = count;
    plan.seed = seed;
    return plan;
  }
};

struct RegionPoint {
  Profile p;
  Payoffs u;
};

/// Evaluates the payoff map over the plan; grid plans visit points in
/// row-major order (last axis fastest). Grid plans with at least two
/// points per axis include every corner profile e_i.
std::vector<RegionPoint> sample_feasible_region(const GameSpec& spec,
                                                const SamplingPlan& plan);

/// Streaming variant for grids too large to materialize.
void for_each_region_point(
    const GameSpec& spec, const SamplingPlan& plan,
    const std::function<void(const Profile&, const Payoffs&)>& fn);

/// CSV with header p_1..p_n,u_1..u_n, one row per sample point.
void write_region_csv(std::ostream& os, const std::vector<RegionPoint>& points);

/// Effort cap for the numeric dominance and deviation searches. Verdicts
/// produced under a budget are budget-relative: "no improvement found
/// within this much work".
struct SearchBudget {
  Index grid_points_per_axis = 21;  // coarse scan, used for n <= 4
  int refine_rounds = 60;           // step-halving rounds of local search
  double tol = 1e-9;                // strict-improvement tolerance
};

struct ParetoResult {
  bool efficient = false;                // no dominating profile found
  std::optional<Profile> dominated_by;   // witness when dominated
  SearchBudget budget;
};

/// Numeric Pareto check: searches for q with payoff(q) >= payoff(p)
/// componentwise and at least one coordinate better by more than
/// budget.tol. Grid scan (small n) plus local max-min refinement.
ParetoResult is_pareto_efficient(const GameSpec& spec,
                                 const Eigen::Ref<const ArrayXd>& p,
                                 const SearchBudget& budget = {});

}  // namespace contention

#endif  // CONTENTION_GAME_HPP
