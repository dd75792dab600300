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

#ifndef CONTENTION_INTERVENTION_HPP
#define CONTENTION_INTERVENTION_HPP

#include <variant>

#include <json.hpp>

#include "contention/types.hpp"

namespace contention {

/// Total-relative-deviation rule g(p) = [sum_i p_i/t_i - offset]_0^1.
/// With the default offset n this is the standard rule whose value is the
/// trimmed total relative deviation of p from the target.
struct TrdRule {
  Profile target;
  double offset = 0.0;
};

/// Linear rule that stays exact in expectation when the manager sees each
/// p_i through independent uniform noise on [p_i - epsilon, p_i + epsilon].
/// Evaluates to epsilon*q/(1 + epsilon*q) at the target, q = sum_i 1/t_i.
struct NoiseRobustRule {
  Profile target;
  double epsilon = 0.0;
};

/// Rule for a manager who observes only the idle probability
/// prod_i (1 - p_i); forces a common per-user target.
struct AggregateRule {
  double target = 0.0;
  Index n = 0;
};

/// TRD evaluated on interval observations: each p_i is mapped to the right
/// endpoint r_i/m of the interval containing it before the deviation sum.
struct QuantizedTrdRule {
  Profile target;
  Index m = 0;
};

using InterventionRule =
    std::variant<TrdRule, NoiseRobustRule, AggregateRule, QuantizedTrdRule>;

// Validating constructors. Targets must be interior; the noise-robust rule
// additionally requires epsilon * sum_i 1/t_i <= 1 so that its trim stays
// inactive on the noise box around the target.
InterventionRule make_trd(Profile target);
InterventionRule make_trd(Profile target, double offset);
InterventionRule make_noise_robust(Profile target, double epsilon);
InterventionRule make_aggregate(double target, Index n);
InterventionRule make_quantized_trd(Profile target, Index m);

/// Total relative deviation h(p) = sum_i (p_i - t_i)/t_i, untrimmed.
double trd(const Eigen::Ref<const ArrayXd>& target,
           const Eigen::Ref<const ArrayXd>& p);

/// Manager transmission probability for an observed profile; always in
/// [0,1].
double evaluate(const InterventionRule& rule,
                const Eigen::Ref<const ArrayXd>& p);

/// Aggregate rule evaluated directly on the observed idle probability.
double evaluate_aggregate(const AggregateRule& rule, double idle_prob);

/// Payoffs in the managed game: (1 - g(p)) * payoff(spec, p).
Payoffs intervened_payoff(const GameSpec& spec, const InterventionRule& rule,
                          const Eigen::Ref<const ArrayXd>& p);

/// Manager objective: 1 - g(p) when p equals the rule target exactly
/// (componentwise, zero tolerance), else 0.
double manager_payoff(const InterventionRule& rule,
                      const Eigen::Ref<const ArrayXd>& p);

/// The rule's target profile; the aggregate rule expands to the constant
/// vector (t, ..., t).
Profile rule_target(const InterventionRule& rule);

Index rule_user_count(const InterventionRule& rule);

/// Interval index of p in the partition {0}, (0,1/m], ..., ((m-1)/m, 1]:
/// 0 for p = 0, otherwise the r with p in ((r-1)/m, r/m].
Index quantize_index(double p, Index m);

// JSON wire format, e.g. {"variant":"trd","target":[0.2,0.2],"offset":2.0}.
void to_json(nlohmann::json& j, const InterventionRule& rule);
void from_json(const nlohmann::json& j, InterventionRule& rule);

}  // namespace contention

#endif  // CONTENTION_INTERVENTION_HPP
