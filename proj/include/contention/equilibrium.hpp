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

#ifndef CONTENTION_EQUILIBRIUM_HPP
#define CONTENTION_EQUILIBRIUM_HPP

#include <optional>
#include <vector>

#include <json.hpp>

#include "contention/game.hpp"
#include "contention/intervention.hpp"
#include "contention/types.hpp"

namespace contention {

struct BestResponse {
  enum class Kind {
    Unique,       // single maximizer in [0,1]
    Indifferent,  // every p_i yields zero payoff
  };
  Kind kind = Kind::Unique;
  double value = 0.0;      // maximizer, or the canonical choice
  double payoff_at = 0.0;  // responder's payoff at `value`
};

/// What an indifferent user plays. KeepPrevious repeats the last value;
/// VertexFormula extends the interior-peak formula t_i*(1-s)/2 (trimmed
/// to [0,1]) to the indifferent region.
enum class IndifferencePolicy { KeepPrevious, VertexFormula };

/// Closed-form best response of user i under an offset-TRD rule, against
/// the other users' entries of `others`. With s = sum_{j != i}
/// others_j/t_j - offset:
///   any others_j = 1  -> indifferent (spectator product is zero)
///   s >= 1            -> indifferent (intervention saturates at 1)
///   -1 <= s < 1       -> p_i = t_i (1 - s)/2, trimmed to [0,1]
///   s < -1            -> p_i = min(-s t_i, 1)
/// others[i] is ignored except as the KeepPrevious canonical value.
BestResponse best_response_trd(
    const GameSpec& spec, const Eigen::Ref<const ArrayXd>& target,
    double offset, Index i, const Eigen::Ref<const ArrayXd>& others,
    IndifferencePolicy policy = IndifferencePolicy::KeepPrevious);

struct Deviation {
  Index user = -1;
  double p_i = 0.0;
  double gain = 0.0;
};

struct EquilibriumVerdict {
  enum class Class {
    Target,             // p_hat equals the target
    SecondClass,        // intervention saturates; no reduction is rewarded
    BoundaryPiEqualsOne,  // some p_hat_i = 1; inherited from the base game
    NotEquilibrium,
  };
  Class cls = Class::NotEquilibrium;
  std::optional<Deviation> witness;  // present iff NotEquilibrium
};

/// Classifies p_hat as a Nash equilibrium candidate of the TRD-managed
/// game. Interior profiles are the target, second class (for every i,
/// sum_{j != i} (p_hat_j - t_j)/t_j >= 2), or not an equilibrium with a
/// profitable unilateral deviation as witness.
EquilibriumVerdict is_nash_intervened(const GameSpec& spec,
                                      const Eigen::Ref<const ArrayXd>& target,
                                      const Eigen::Ref<const ArrayXd>& p_hat);

/// Stackelberg equilibrium test: p_hat equals the rule target, the rule is
/// silent there (g = 0), and p_hat is a Nash equilibrium of the managed
/// game. TRD rules use the closed-form classifier; other variants fall
/// back to a per-user grid deviation scan under the given budget.
bool is_stackelberg(const GameSpec& spec, const InterventionRule& rule,
                    const Eigen::Ref<const ArrayXd>& p_hat,
                    const SearchBudget& budget = {});

/// Two-user coalitions cannot jointly improve on the target iff
/// t_i + t_j <= 1.
bool pair_coalition_proof(const Eigen::Ref<const ArrayXd>& target, Index i,
                          Index j);

struct CoalitionResult {
  bool proof = false;  // no improving joint deviation found within budget
  std::vector<Index> coalition;
  std::optional<ArrayXd> deviation;  // coalition strategies, same order
  SearchBudget budget;
};

/// Numeric search for a joint deviation of the coalition that leaves every
/// member weakly better off and some member better by more than
/// budget.tol, under the standard TRD rule at `target`.
CoalitionResult find_coalition_deviation(
    const GameSpec& spec, const Eigen::Ref<const ArrayXd>& target,
    const std::vector<Index>& coalition, const SearchBudget& budget = {});

/// Pareto efficiency of the target inside the managed game: no profile's
/// intervened payoffs dominate the target's. This is the efficiency notion
/// that is equivalent to coalition-proofness for every coalition; it is
/// weaker than base-game efficiency because the rule's punishment carves
/// payoffs out of the feasible set.
ParetoResult is_pareto_efficient_intervened(
    const GameSpec& spec, const Eigen::Ref<const ArrayXd>& target,
    const SearchBudget& budget = {});

/// A user's model of how the rest of the system responds to its own
/// transmission probability: the conjectured value of
/// (1 - p_0) prod_{j != i} (1 - p_j) as a function of p_i. Either the
/// trimmed linear form [a - b p]_0^1 or a single-point conjecture that is
/// zero away from its anchor.
class Conjecture {
 public:
  static Conjecture linear(double a, double b);
  static Conjecture point(double at, double value);

  double operator()(double p) const;

  bool is_linear() const { return linear_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double anchor() const { return at_; }

 private:
  Conjecture() = default;
  bool linear_ = true;
  double a_ = 0.0, b_ = 0.0;   // trimmed linear coefficients
  double at_ = 0.0, value_ = 0.0;  // point form
};

/// Conjectural equilibrium test: each user's strategy maximizes
/// k_i p f_i(p) over [0,1] (1-D grid plus refinement, value tolerance
/// 1e-8) and each conjecture matches the realized observation
/// (1 - g(p_hat)) prod_{j != i} (1 - p_hat_j) to 1e-9.
bool is_conjectural_equilibrium(const GameSpec& spec,
                                const InterventionRule& rule,
                                const Eigen::Ref<const ArrayXd>& p_hat,
                                const std::vector<Conjecture>& conjectures);

enum class LinearConsistency {
  Consistent,
  Inconsistent,
  NonEvaluable,  // rule kinked at p_hat in coordinate i
};

/// Checks that the conjecture is locally correct up to first order at
/// p_hat: value match, and slope match f'_i = -(dg/dp_i) prod_{j != i}
/// (1 - p_hat_j) via central differences (h = 1e-6, tolerance 1e-4).
/// One-sided derivatives differing by more than 1e-3 flag a kink.
LinearConsistency is_linearly_consistent(const InterventionRule& rule,
                                         const Eigen::Ref<const ArrayXd>& p_hat,
                                         Index i, const Conjecture& conj);

/// Verbatim transcription of the text condition under which the
/// one-transmitter Nash point e_i is Pareto-dominated by the target:
/// 1 + n - 1/t_i < t_i prod_{j != i} (1 - t_j).
bool ei_dominance_condition(const Eigen::Ref<const ArrayXd>& target, Index i);

void to_json(nlohmann::json& j, const EquilibriumVerdict& verdict);
void to_json(nlohmann::json& j, const CoalitionResult& result);

}  // namespace contention

#endif  // CONTENTION_EQUILIBRIUM_HPP
