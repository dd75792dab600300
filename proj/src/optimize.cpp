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

#include "contention/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace contention {

CompassResult compass_maximize(const std::function<double(const ArrayXd&)>& f,
                               ArrayXd x0, double lo, double hi,
                               const CompassConfig& config) {
  const Index n = x0.size();
  CompassResult result;
  result.x = x0.cwiseMax(lo).cwiseMin(hi);
  result.value = f(result.x);
  result.evaluations = 1;

  const auto out_of_budget = [&] {
    return config.max_evaluations > 0 &&
           result.evaluations >= config.max_evaluations;
  };

  // Odds scaling x/(1-x) -> factor * x/(1-x); a logit-space diagonal that
  // follows the curved level sets which additive moves cut across. Only
  // meaningful on the unit box.
  const bool unit_box = lo == 0.0 && hi == 1.0;
  const auto scale_odds = [](const ArrayXd& x, double factor) {
    ArrayXd out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      if (x[i] <= 0.0 || x[i] >= 1.0) {
        out[i] = x[i];
      } else {
        const double odds = factor * x[i] / (1.0 - x[i]);
        out[i] = odds / (1.0 + odds);
      }
    }
    return out;
  };

  double step = config.initial_step;
  ArrayXd candidate(n);
  const Index directions = 2 * n + (unit_box ? 4 : 2);
  for (int round = 0; round < config.max_rounds; ++round) {
    bool improved = false;
    do {
      improved = false;
      for (Index d = 0; d < directions && !out_of_budget(); ++d) {
        candidate = result.x;
        if (d < 2 * n) {
          const Index axis = d / 2;
          const double sign = (d % 2 == 0) ? 1.0 : -1.0;
          candidate[axis] = trim(candidate[axis] + sign * step, lo, hi);
        } else if (d < 2 * n + 2) {
          const double sign = (d == 2 * n) ? 1.0 : -1.0;
          candidate = (candidate + sign * step).cwiseMax(lo).cwiseMin(hi);
        } else {
          const double factor =
              (d == 2 * n + 2) ? 1.0 + step : 1.0 / (1.0 + step);
          candidate = scale_odds(result.x, factor);
        }
        if ((candidate == result.x).all()) continue;
        const double value = f(candidate);
        ++result.evaluations;
        if (value > result.value) {
          result.value = value;
          result.x = candidate;
          improved = true;
        }
      }
    } while (improved && !out_of_budget());
    step *= 0.5;
    if (step < config.min_step || out_of_budget()) {
      result.converged = step < config.min_step;
      break;
    }
  }
  return result;
}

double golden_section_max(const std::function<double(double)>& f, double x0,
                          double width, double lo, double hi, double tol) {
  double a = std::max(lo, x0 - width);
  double b = std::min(hi, x0 + width);
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace contention
