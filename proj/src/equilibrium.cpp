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

#include "contention/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contention/optimize.hpp"

namespace contention {

namespace {

constexpr double kValueTol = 1e-8;       // optimality slack in payoff units
constexpr double kConsistencyTol = 1e-9;  // conjecture-vs-observation match

double spectator_product(const Eigen::Ref<const ArrayXd>& p, Index i) {
  double prod = 1.0;
  for (Index j = 0; j < p.size(); ++j) {
    if (j != i) prod *= 1.0 - p[j];
  }
  return prod;
}

// Responder payoff under an offset-TRD rule, as a function of own p_i,
// with the rest of the profile fixed. s = sum_{j != i} p_j/t_j - offset.
double own_payoff(double k_i, double spectators, double t_i, double s,
                  double p_i) {
  return k_i * spectators * p_i * (1.0 - trim(p_i / t_i + s));
}

}  // namespace

BestResponse best_response_trd(const GameSpec& spec,
                               const Eigen::Ref<const ArrayXd>& target,
                               double offset, Index i,
                               const Eigen::Ref<const ArrayXd>& others,
                               IndifferencePolicy policy) {
  if (target.size() != spec.n() || others.size() != spec.n()) {
    throw std::invalid_argument("best_response_trd: dimension mismatch");
  }
  if (!is_interior(target)) {
    throw std::invalid_argument("best_response_trd: target must be interior");
  }
  if (i < 0 || i >= spec.n()) {
    throw std::invalid_argument("best_response_trd: user index out of range");
  }

  double s = -offset;
  for (Index j = 0; j < spec.n(); ++j) {
    if (j != i) s += others[j] / target[j];
  }
  const double spectators = spectator_product(others, i);
  const double t_i = target[i];

  const auto indifferent = [&] {
    BestResponse br;
    br.kind = BestResponse::Kind::Indifferent;
    br.value = policy == IndifferencePolicy::KeepPrevious
                   ? others[i]
                   : trim(t_i * (1.0 - s) / 2.0);
    br.payoff_at = 0.0;
    return br;
  };

  if (spectators == 0.0 || s >= 1.0) {
    return indifferent();
  }

  BestResponse br;
  br.kind = BestResponse::Kind::Unique;
  if (s >= -1.0) {
    br.value = trim(t_i * (1.0 - s) / 2.0);
  } else {
    br.value = std::min(-s * t_i, 1.0);
  }
  br.payoff_at = own_payoff(spec.k[i], spectators, t_i, s, br.value);
  return br;
}

EquilibriumVerdict is_nash_intervened(const GameSpec& spec,
                                      const Eigen::Ref<const ArrayXd>& target,
                                      const Eigen::Ref<const ArrayXd>& p_hat) {
  require_valid_profile(spec, p_hat, "p_hat");
  if (!is_interior(target) || target.size() != spec.n()) {
    throw std::invalid_argument("is_nash_intervened: bad target");
  }

  EquilibriumVerdict verdict;
  if (p_hat.maxCoeff() == 1.0) {
    verdict.cls = EquilibriumVerdict::Class::BoundaryPiEqualsOne;
    return verdict;
  }
  if ((p_hat == target).all()) {
    verdict.cls = EquilibriumVerdict::Class::Target;
    return verdict;
  }

  const ArrayXd deviations = (p_hat - target) / target;
  const double total = deviations.sum();
  bool second_class = true;
  for (Index i = 0; i < spec.n() && second_class; ++i) {
    second_class = total - deviations[i] >= 2.0;
  }
  if (second_class) {
    verdict.cls = EquilibriumVerdict::Class::SecondClass;
    return verdict;
  }

  verdict.cls = EquilibriumVerdict::Class::NotEquilibrium;
  const InterventionRule rule = make_trd(target);
  const Payoffs current = intervened_payoff(spec, rule, p_hat);
  Deviation witness;
  for (Index i = 0; i < spec.n(); ++i) {
    const BestResponse br = best_response_trd(
        spec, target, static_cast<double>(spec.n()), i, p_hat);
    const double gain = br.payoff_at - current[i];
    if (witness.user < 0 || gain > witness.gain) {
      witness = {i, br.value, gain};
    }
  }
  verdict.witness = witness;
  return verdict;
}

namespace {

// Highest payoff any single user can reach by a unilateral move, minus its
// current payoff. Grid scan plus golden-section polish; used for rule
// variants without a closed-form best response.
double max_unilateral_gain(const GameSpec& spec, const InterventionRule& rule,
                           const Eigen::Ref<const ArrayXd>& p, double step) {
  const Payoffs current = intervened_payoff(spec, rule, p);
  double max_gain = -std::numeric_limits<double>::infinity();
  ArrayXd trial = p;
  for (Index i = 0; i < spec.n(); ++i) {
    const auto value = [&](double x) {
      trial[i] = x;
      const double v = intervened_payoff(spec, rule, trial)[i];
      trial[i] = p[i];
      return v;
    };
    double best_x = 0.0;
    double best = value(0.0);
    const auto points = static_cast<Index>(std::lround(1.0 / step));
    for (Index g = 1; g <= points; ++g) {
      const double x = std::min(1.0, static_cast<double>(g) * step);
      const double v = value(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    const double refined = golden_section_max(value, best_x, step, 0.0, 1.0);
    best = std::max(best, value(refined));
    max_gain = std::max(max_gain, best - current[i]);
  }
  return max_gain;
}

}  // namespace

bool is_stackelberg(const GameSpec& spec, const InterventionRule& rule,
                    const Eigen::Ref<const ArrayXd>& p_hat,
                    const SearchBudget& budget) {
  require_valid_profile(spec, p_hat, "p_hat");
  const Profile target = rule_target(rule);
  if (!(p_hat == target).all()) return false;
  if (evaluate(rule, p_hat) != 0.0) return false;

  if (const auto* trd_rule = std::get_if<TrdRule>(&rule)) {
    // Exact: compare each user against its closed-form best response.
    const Payoffs current = intervened_payoff(spec, rule, p_hat);
    for (Index i = 0; i < spec.n(); ++i) {
      const BestResponse br = best_response_trd(spec, trd_rule->target,
                                                trd_rule->offset, i, p_hat);
      if (br.payoff_at > current[i] + budget.tol) return false;
    }
    return true;
  }
  return max_unilateral_gain(spec, rule, p_hat, 1e-3) <= budget.tol;
}

bool pair_coalition_proof(const Eigen::Ref<const ArrayXd>& target, Index i,
                          Index j) {
  if (i == j) {
    throw std::invalid_argument("pair_coalition_proof: need two distinct users");
  }
  if (i < 0 || j < 0 || i >= target.size() || j >= target.size()) {
    throw std::invalid_argument("pair_coalition_proof: user index out of range");
  }
  if (!is_interior(target)) {
    throw std::invalid_argument("pair_coalition_proof: target must be interior");
  }
  return target[i] + target[j] <= 1.0;
}

CoalitionResult find_coalition_deviation(const GameSpec& spec,
                                         const Eigen::Ref<const ArrayXd>& target,
                                         const std::vector<Index>& coalition,
                                         const SearchBudget& budget) {
  if (coalition.empty()) {
    throw std::invalid_argument("find_coalition_deviation: empty coalition");
  }
  for (Index i : coalition) {
    if (i < 0 || i >= spec.n()) {
      throw std::invalid_argument(
          "find_coalition_deviation: user index out of range");
    }
  }
  if (!is_interior(target) || target.size() != spec.n()) {
    throw std::invalid_argument("find_coalition_deviation: bad target");
  }

  const auto size = static_cast<Index>(coalition.size());
  const InterventionRule rule = make_trd(target);
  const Payoffs base = payoff(spec, target);  // rule is silent at its target

  ArrayXd full = target;
  const auto member_gains = [&](const ArrayXd& q) {
    for (Index s = 0; s < size; ++s) full[coalition[s]] = q[s];
    const Payoffs u = intervened_payoff(spec, rule, full);
    ArrayXd gains(size);
    for (Index s = 0; s < size; ++s) {
      gains[s] = u[coalition[s]] - base[coalition[s]];
    }
    for (Index s = 0; s < size; ++s) full[coalition[s]] = target[coalition[s]];
    return gains;
  };
  const auto improves = [&](const ArrayXd& gains) {
    return (gains >= 0.0).all() && (gains > budget.tol).any();
  };
  const auto min_gain = [&](const ArrayXd& q) {
    return member_gains(q).minCoeff();
  };

  CoalitionResult result;
  result.coalition = coalition;
  result.budget = budget;

  ArrayXd start(size);
  for (Index s = 0; s < size; ++s) start[s] = target[coalition[s]];

  // Coarse scan for small coalitions.
  ArrayXd best_start = start;
  double best_start_gain = 0.0;
  if (size <= 4 && budget.grid_points_per_axis >= 2) {
    const Index points = budget.grid_points_per_axis;
    const double step = 1.0 / static_cast<double>(points - 1);
    std::vector<Index> idx(static_cast<std::size_t>(size), 0);
    ArrayXd q(size);
    for (;;) {
      for (Index s = 0; s < size; ++s) {
        q[s] = std::min(1.0, static_cast<double>(idx[s]) * step);
      }
      const ArrayXd gains = member_gains(q);
      if (improves(gains)) {
        result.proof = false;
        result.deviation = q;
        return result;
      }
      const double gain = gains.minCoeff();
      if (gain > best_start_gain) {
        best_start_gain = gain;
        best_start = q;
      }
      Index axis = size - 1;
      while (axis >= 0 && ++idx[axis] == points) {
        idx[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  }

  CompassConfig config;
  config.max_rounds = budget.refine_rounds;
  config.min_step = 1e-12;
  for (const ArrayXd& x0 : {start, best_start}) {
    const CompassResult local = compass_maximize(min_gain, x0, 0.0, 1.0, config);
    if (local.value > budget.tol || improves(member_gains(local.x))) {
      result.proof = false;
      result.deviation = local.x;
      return result;
    }
  }

  result.proof = true;
  return result;
}

ParetoResult is_pareto_efficient_intervened(
    const GameSpec& spec, const Eigen::Ref<const ArrayXd>& target,
    const SearchBudget& budget) {
  std::vector<Index> everyone(static_cast<std::size_t>(spec.n()));
  for (Index i = 0; i < spec.n(); ++i) everyone[static_cast<std::size_t>(i)] = i;
  const CoalitionResult grand =
      find_coalition_deviation(spec, target, everyone, budget);
  ParetoResult result;
  result.budget = budget;
  result.efficient = grand.proof;
  if (grand.deviation) result.dominated_by = *grand.deviation;
  return result;
}

Conjecture Conjecture::linear(double a, double b) {
  if (a < 0.0 || b <= 0.0) {
    throw std::invalid_argument("conjecture: need a >= 0 and b > 0");
  }
  Conjecture c;
  c.linear_ = true;
  c.a_ = a;
  c.b_ = b;
  return c;
}

Conjecture Conjecture::point(double at, double value) {
  if (value < 0.0 || value > 1.0) {
    throw std::invalid_argument("conjecture: point value must lie in [0,1]");
  }
  Conjecture c;
  c.linear_ = false;
  c.at_ = at;
  c.value_ = value;
  return c;
}

double Conjecture::operator()(double p) const {
  if (linear_) return trim(a_ - b_ * p);
  return p == at_ ? value_ : 0.0;
}

bool is_conjectural_equilibrium(const GameSpec& spec,
                                const InterventionRule& rule,
                                const Eigen::Ref<const ArrayXd>& p_hat,
                                const std::vector<Conjecture>& conjectures) {
  require_valid_profile(spec, p_hat, "p_hat");
  if (static_cast<Index>(conjectures.size()) != spec.n()) {
    throw std::invalid_argument(
        "is_conjectural_equilibrium: need one conjecture per user");
  }
  const double g = evaluate(rule, p_hat);
  for (Index i = 0; i < spec.n(); ++i) {
    const Conjecture& f = conjectures[static_cast<std::size_t>(i)];

    // Consistency: the conjectured response matches the realized one.
    const double observed = (1.0 - g) * spectator_product(p_hat, i);
    if (std::abs(f(p_hat[i]) - observed) > kConsistencyTol) return false;

    // Optimality of p_hat_i against the conjecture.
    const auto value = [&](double x) { return spec.k[i] * x * f(x); };
    double best = value(p_hat[i]);
    double best_x = p_hat[i];
    constexpr Index kPoints = 1000;
    for (Index gidx = 0; gidx <= kPoints; ++gidx) {
      const double x = static_cast<double>(gidx) / kPoints;
      const double v = value(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    if (f.is_linear()) {
      const double refined =
          golden_section_max(value, best_x, 1.0 / kPoints, 0.0, 1.0);
      best = std::max(best, value(refined));
    } else {
      best = std::max(best, value(f.anchor()));
    }
    if (best > value(p_hat[i]) + kValueTol) return false;
  }
  return true;
}

LinearConsistency is_linearly_consistent(const InterventionRule& rule,
                                         const Eigen::Ref<const ArrayXd>& p_hat,
                                         Index i, const Conjecture& conj) {
  if (i < 0 || i >= p_hat.size()) {
    throw std::invalid_argument("is_linearly_consistent: index out of range");
  }
  constexpr double kStep = 1e-6;
  constexpr double kKinkTol = 1e-3;
  constexpr double kSlopeTol = 1e-4;

  ArrayXd probe = p_hat;
  const auto g_at = [&](double x) {
    probe[i] = x;
    const double g = evaluate(rule, probe);
    probe[i] = p_hat[i];
    return g;
  };
  const double x0 = p_hat[i];
  const double g0 = g_at(x0);
  const double g_plus = g_at(x0 + kStep);
  const double g_minus = g_at(x0 - kStep);
  const double slope_up = (g_plus - g0) / kStep;
  const double slope_down = (g0 - g_minus) / kStep;
  if (std::abs(slope_up - slope_down) > kKinkTol) {
    return LinearConsistency::NonEvaluable;
  }
  const double dg = (g_plus - g_minus) / (2.0 * kStep);

  const double f_plus = conj(x0 + kStep);
  const double f_minus = conj(x0 - kStep);
  const double f_up = (f_plus - conj(x0)) / kStep;
  const double f_down = (conj(x0) - f_minus) / kStep;
  if (std::abs(f_up - f_down) > kKinkTol) {
    return LinearConsistency::NonEvaluable;
  }
  const double df = (f_plus - f_minus) / (2.0 * kStep);

  const double spectators = spectator_product(p_hat, i);
  if (std::abs(conj(x0) - (1.0 - g0) * spectators) > kConsistencyTol) {
    return LinearConsistency::Inconsistent;
  }
  if (std::abs(df - (-dg * spectators)) > kSlopeTol) {
    return LinearConsistency::Inconsistent;
  }
  return LinearConsistency::Consistent;
}

bool ei_dominance_condition(const Eigen::Ref<const ArrayXd>& target, Index i) {
  if (i < 0 || i >= target.size()) {
    throw std::invalid_argument("ei_dominance_condition: index out of range");
  }
  if (!is_interior(target)) {
    throw std::invalid_argument("ei_dominance_condition: target must be interior");
  }
  const double n = static_cast<double>(target.size());
  return 1.0 + n - 1.0 / target[i] <
         target[i] * spectator_product(target, i);
}

void to_json(nlohmann::json& j, const EquilibriumVerdict& verdict) {
  static const char* kNames[] = {"target", "second_class",
                                 "boundary_pi_equals_1", "not_equilibrium"};
  j = {{"class", kNames[static_cast<int>(verdict.cls)]}};
  if (verdict.witness) {
    j["witness"] = {{"user", verdict.witness->user},
                    {"p_i", verdict.witness->p_i},
                    {"gain", verdict.witness->gain}};
  } else {
    j["witness"] = nullptr;
  }
}

void to_json(nlohmann::json& j, const CoalitionResult& result) {
  j = {{"proof", result.proof},
       {"coalition", result.coalition},
       {"budget",
        {{"grid_points_per_axis", result.budget.grid_points_per_axis},
         {"refine_rounds", result.budget.refine_rounds},
         {"tol", result.budget.tol}}}};
  if (result.deviation) {
    j["deviation"] = std::vector<double>(
        result.deviation->data(), result.deviation->data() + result.deviation->size());
  } else {
    j["deviation"] = nullptr;
  }
}

}  // namespace contention
