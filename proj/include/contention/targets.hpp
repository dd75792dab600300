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

#ifndef CONTENTION_TARGETS_HPP
#define CONTENTION_TARGETS_HPP

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "contention/types.hpp"

namespace contention {

/// Bargaining view of the game: feasible payoffs versus a disagreement
/// point (all-zero by default, the typical Nash outcome), with optional
/// positive per-user weights.
struct BargainingProblem {
  GameSpec spec;
  Payoffs disagreement;  // zero vector unless set
  std::optional<ArrayXd> weights;

  explicit BargainingProblem(GameSpec game)
      : spec(std::move(game)), disagreement(ArrayXd::Zero(spec.n())) {}
};

/// Symmetric Nash bargaining target: p_i = 1/n for every user, yielding
/// payoffs ((n-1)^(n-1)/n^n) k. For n = 1 the problem is degenerate and
/// the sole user simply transmits always.
Profile nash_bargaining_target(const BargainingProblem& problem);

/// Weighted (nonsymmetric) bargaining target: p_i = w_i / sum_j w_j.
Profile nonsymmetric_nash_target(const BargainingProblem& problem);

struct SolverConfig {
  int max_rounds = 200;      // step halvings per local search
  double tol = 1e-8;
  long max_evaluations = 0;  // 0 = unlimited
};

struct EgalitarianResult {
  Profile target;
  double common_payoff = 0.0;
  double payoff_spread = 0.0;  // max_i u_i - min_i u_i at the solution
  bool converged = false;
  long evaluations = 0;
};

/// Equal-payoff efficient target: maximizes min_i u_i(p) by multi-start
/// projected compass search. At the optimum all payoffs coincide, so a
/// low-valuation user is assigned a higher transmission probability.
EgalitarianResult egalitarian_target(const GameSpec& spec,
                                     const SolverConfig& config = {});

/// Targets available to a manager who observes probabilities only at
/// interval resolution 1/m: the grid {1/m, ..., (m-1)/m}^n.
class QuantizedTargetGrid {
 public:
  QuantizedTargetGrid(Index n, Index m);

  Index n() const { return n_; }
  Index m() const { return m_; }

  /// (m-1)^n; throws std::overflow_error when it exceeds Index range.
  Index size() const;

  /// Visits every profile in row-major order (last axis fastest) without
  /// materializing the grid.
  void for_each(const std::function<void(const Profile&)>& fn) const;

  /// Materializes the grid; intended for small n.
  std::vector<Profile> materialize() const;

 private:
  Index n_, m_;
};

inline std::vector<Profile> quantized_target_grid(Index n, Index m) {
  return QuantizedTargetGrid(n, m).materialize();
}

/// prod_i u_i(p)^(w_i), weights defaulting to 1. Accumulated in log space;
/// returns 0 whenever some payoff is zero or the product underflows.
double nash_product(const GameSpec& spec, const Eigen::Ref<const ArrayXd>& p,
                    const std::optional<ArrayXd>& weights = std::nullopt);

/// Log of the (generalized) Nash product; -infinity when some payoff is
/// zero. Usable at scales where the product itself underflows.
double log_nash_product(const GameSpec& spec,
                        const Eigen::Ref<const ArrayXd>& p,
                        const std::optional<ArrayXd>& weights = std::nullopt);

void to_json(nlohmann::json& j, const EgalitarianResult& result);

}  // namespace contention

#endif  // CONTENTION_TARGETS_HPP
