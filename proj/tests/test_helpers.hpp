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

#ifndef CONTENTION_TESTS_TEST_HELPERS_HPP
#define CONTENTION_TESTS_TEST_HELPERS_HPP

#include <initializer_list>
#include <random>
#include <vector>

#include "contention/intervention.hpp"
#include "contention/types.hpp"

namespace contention::testing {

inline ArrayXd arr(std::initializer_list<double> values) {
  ArrayXd a(static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) a[i++] = v;
  return a;
}

inline ArrayXd random_array(std::mt19937_64& gen, Index n, double lo,
                            double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ArrayXd a(n);
  for (Index i = 0; i < n; ++i) a[i] = dist(gen);
  return a;
}

// ---------------------------------------------------------------------------
// Independent brute-force oracles. These deliberately re-derive payoffs from
// first principles (plain loops, no shared library search code) so they can
// stand against the closed-form implementations.

// Payoff of user i from the definition, with an explicit product loop.
inline double oracle_payoff(const ArrayXd& k, const ArrayXd& p, Index i) {
  double prod = 1.0;
  for (Index j = 0; j < p.size(); ++j) {
    if (j != i) prod *= 1.0 - p[j];
  }
  return k[i] * p[i] * prod;
}

// Trimmed offset-deviation rule from the definition.
inline double oracle_trd_level(const ArrayXd& target, const ArrayXd& p,
                               double offset) {
  double sum = -offset;
  for (Index j = 0; j < p.size(); ++j) sum += p[j] / target[j];
  return sum < 0.0 ? 0.0 : (sum > 1.0 ? 1.0 : sum);
}

inline double oracle_intervened_payoff(const ArrayXd& k, const ArrayXd& target,
                                       double offset, const ArrayXd& p,
                                       Index i) {
  return (1.0 - oracle_trd_level(target, p, offset)) * oracle_payoff(k, p, i);
}

// Best unilateral improvement of any user in the base game, by grid scan.
inline double oracle_base_max_gain(const ArrayXd& k, const ArrayXd& p,
                                   double step) {
  double max_gain = 0.0;
  ArrayXd trial = p;
  for (Index i = 0; i < p.size(); ++i) {
    const double current = oracle_payoff(k, p, i);
    for (double x = 0.0; x <= 1.0 + 1e-12; x += step) {
      trial[i] = x > 1.0 ? 1.0 : x;
      max_gain = std::max(max_gain, oracle_payoff(k, trial, i) - current);
    }
    trial[i] = p[i];
  }
  return max_gain;
}

// Best unilateral improvement of any user under an offset-TRD rule, by grid
// scan with local ternary polish.
inline double oracle_trd_max_gain(const ArrayXd& k, const ArrayXd& target,
                                  double offset, const ArrayXd& p,
                                  double step) {
  double max_gain = 0.0;
  ArrayXd trial = p;
  for (Index i = 0; i < p.size(); ++i) {
    const double current = oracle_intervened_payoff(k, target, offset, p, i);
    double best_x = 0.0, best = -1.0;
    for (double x = 0.0; x <= 1.0 + 1e-12; x += step) {
      trial[i] = x > 1.0 ? 1.0 : x;
      const double v = oracle_intervened_payoff(k, target, offset, trial, i);
      if (v > best) {
        best = v;
        best_x = trial[i];
      }
    }
    double lo = std::max(0.0, best_x - step), hi = std::min(1.0, best_x + step);
    for (int round = 0; round < 120; ++round) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      trial[i] = m1;
      const double v1 = oracle_intervened_payoff(k, target, offset, trial, i);
      trial[i] = m2;
      const double v2 = oracle_intervened_payoff(k, target, offset, trial, i);
      if (v1 < v2) {
        lo = m1;
      } else {
        hi = m2;
      }
    }
    trial[i] = 0.5 * (lo + hi);
    best = std::max(best,
                    oracle_intervened_payoff(k, target, offset, trial, i));
    trial[i] = p[i];
    max_gain = std::max(max_gain, best - current);
  }
  return max_gain;
}

// Second-class instance generator: targets and a saturated profile
// satisfying the adjustment-dynamic hypotheses with comfortable margins.
struct SecondClassInstance {
  ArrayXd k;
  ArrayXd target;
  ArrayXd p_hat0;
};

inline SecondClassInstance make_second_class_instance(std::mt19937_64& gen,
                                                      Index n,
                                                      bool with_low_users) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (;;) {
    SecondClassInstance inst;
    inst.k = random_array(gen, n, 0.5, 3.0);
    inst.target = random_array(gen, n, 0.03, 0.12);
    const double top = 4.0 + 2.0 * coin(gen);  // largest ratio in [4,6]
    ArrayXd ratios(n);
    ratios[n - 1] = top;
    for (Index i = 0; i + 1 < n; ++i) {
      if (with_low_users && coin(gen) < 0.4) {
        // Indifferent in round one: spread >= 2 but ratio <= 1.
        ratios[i] = 0.95 * coin(gen);
      } else {
        // Spread strictly below 2.
        ratios[i] = top - 1.9 * coin(gen);
      }
    }
    inst.p_hat0 = ratios * inst.target;
    if ((inst.p_hat0 >= 0.995).any()) continue;

    // Saturation with margin: sum_{j != i} (p_j - t_j)/t_j >= 2.05.
    const ArrayXd dev = (inst.p_hat0 - inst.target) / inst.target;
    const double total = dev.sum();
    bool ok = true;
    for (Index i = 0; i < n && ok; ++i) ok = total - dev[i] >= 2.05;
    if (!ok) continue;
    // Margins on the hypothesis branches.
    for (Index i = 0; i < n && ok; ++i) {
      const double spread = ratios.maxCoeff() - ratios[i];
      ok = spread < 1.95 || ratios[i] <= 0.98;
    }
    if (ok) return inst;
  }
}

}  // namespace contention::testing

#endif  // CONTENTION_TESTS_TEST_HELPERS_HPP
