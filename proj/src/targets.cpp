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

#include "contention/targets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "contention/game.hpp"
#include "contention/optimize.hpp"

namespace contention {

Profile nash_bargaining_target(const BargainingProblem& problem) {
  if (problem.weights) {
    throw std::invalid_argument(
        "nash_bargaining_target: weighted problems go through "
        "nonsymmetric_nash_target");
  }
  const Index n = problem.spec.n();
  if (n == 1) {
    // Degenerate one-user problem: the frontier is p = 1.
    return ArrayXd::Constant(1, 1.0);
  }
  return ArrayXd::Constant(n, 1.0 / static_cast<double>(n));
}

Profile nonsymmetric_nash_target(const BargainingProblem& problem) {
  if (!problem.weights) {
    throw std::invalid_argument("nonsymmetric_nash_target: weights required");
  }
  const ArrayXd& w = *problem.weights;
  if (w.size() != problem.spec.n()) {
    throw std::invalid_argument("nonsymmetric_nash_target: weight dimension");
  }
  if (!(w > 0.0).all()) {
    throw std::invalid_argument(
        "nonsymmetric_nash_target: weights must be positive");
  }
  return w / w.sum();
}

EgalitarianResult egalitarian_target(const GameSpec& spec,
                                     const SolverConfig& config) {
  const Index n = spec.n();
  const auto min_payoff = [&](const ArrayXd& p) {
    return payoff(spec, p).minCoeff();
  };

  CompassConfig compass;
  compass.initial_step = 0.25;
  compass.min_step = config.tol * 1e-2;
  compass.max_rounds = config.max_rounds;
  compass.max_evaluations = config.max_evaluations;

  // Multi-start: uniform profiles at a few activity levels, plus a start
  // that hands low-valuation users the larger share.
  std::vector<ArrayXd> starts;
  for (double scale : {0.5, 1.0, 1.5}) {
    starts.push_back(
        ArrayXd::Constant(n, trim(scale / static_cast<double>(n), 0.0, 0.9)));
  }
  ArrayXd inverse = 1.0 / spec.k;
  starts.push_back(inverse / inverse.sum());

  EgalitarianResult result;
  double best = -std::numeric_limits<double>::infinity();
  for (const ArrayXd& x0 : starts) {
    const CompassResult local =
        compass_maximize(min_payoff, x0, 0.0, 1.0, compass);
    result.evaluations += local.evaluations;
    if (local.value > best) {
      best = local.value;
      result.target = local.x;
      result.converged = local.converged;
    }
  }

  const Payoffs u = payoff(spec, result.target);
  result.common_payoff = u.mean();
  result.payoff_spread = u.maxCoeff() - u.minCoeff();
  if (result.payoff_spread > 1e-6) result.converged = false;
  return result;
}

QuantizedTargetGrid::QuantizedTargetGrid(Index n, Index m) : n_(n), m_(m) {
  if (n < 1) throw std::invalid_argument("quantized grid: need n >= 1");
  if (m < 2) throw std::invalid_argument("quantized grid: need m >= 2");
}

Index QuantizedTargetGrid::size() const {
  Index total = 1;
  for (Index i = 0; i < n_; ++i) {
    if (total > std::numeric_limits<Index>::max() / (m_ - 1)) {
      throw std::overflow_error("quantized grid: size exceeds Index range");
    }
    total *= m_ - 1;
  }
  return total;
}

void QuantizedTargetGrid::for_each(
    const std::function<void(const Profile&)>& fn) const {
  std::vector<Index> idx(static_cast<std::size_t>(n_), 1);
  Profile p(n_);
  for (;;) {
    for (Index i = 0; i < n_; ++i) {
      p[i] = static_cast<double>(idx[static_cast<std::size_t>(i)]) /
             static_cast<double>(m_);
    }
    fn(p);
    Index axis = n_ - 1;
    while (axis >= 0 && ++idx[static_cast<std::size_t>(axis)] == m_) {
      idx[static_cast<std::size_t>(axis)] = 1;
      --axis;
    }
    if (axis < 0) break;
  }
}

std::vector<Profile> QuantizedTargetGrid::materialize() const {
  std::vector<Profile> grid;
  grid.reserve(static_cast<std::size_t>(size()));
  for_each([&](const Profile& p) { grid.push_back(p); });
  return grid;
}

double log_nash_product(const GameSpec& spec,
                        const Eigen::Ref<const ArrayXd>& p,
                        const std::optional<ArrayXd>& weights) {
  const Payoffs u = payoff(spec, p);
  if (weights && weights->size() != spec.n()) {
    throw std::invalid_argument("nash_product: weight dimension mismatch");
  }
  double log_sum = 0.0;
  for (Index i = 0; i < spec.n(); ++i) {
    if (u[i] <= 0.0) return -std::numeric_limits<double>::infinity();
    log_sum += (weights ? (*weights)[i] : 1.0) * std::log(u[i]);
  }
  return log_sum;
}

double nash_product(const GameSpec& spec, const Eigen::Ref<const ArrayXd>& p,
                    const std::optional<ArrayXd>& weights) {
  const double log_value = log_nash_product(spec, p, weights);
  if (log_value == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(log_value);  // underflows to 0 past ~1e-308
}

void to_json(nlohmann::json& j, const EgalitarianResult& result) {
  j = {{"target", std::vector<double>(result.target.data(),
                                      result.target.data() +
                                          result.target.size())},
       {"common_payoff", result.common_payoff},
       {"payoff_spread", result.payoff_spread},
       {"converged", result.converged},
       {"evaluations", result.evaluations}};
}

}  // namespace contention
