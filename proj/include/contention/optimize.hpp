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

#ifndef CONTENTION_OPTIMIZE_HPP
#define CONTENTION_OPTIMIZE_HPP

#include <functional>

#include "contention/types.hpp"

namespace contention {

struct CompassConfig {
  double initial_step = 0.25;
  double min_step = 1e-10;
  int max_rounds = 60;        // step halvings
  long max_evaluations = 0;   // 0 = unlimited
};

struct CompassResult {
  ArrayXd x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;  // step shrank below min_step
};

/// Derivative-free maximization of f over the box [lo,hi]^n by compass
/// search. The direction set is {+-e_i} plus the all-ones diagonal, which
/// keeps the search from stalling on the ridge-shaped max-min objectives
/// that arise here (single-coordinate moves off an equal-payoff profile
/// all point downhill).
CompassResult compass_maximize(const std::function<double(const ArrayXd&)>& f,
                               ArrayXd x0, double lo, double hi,
                               const CompassConfig& config = {});

/// 1-D golden-section refinement of a maximizer of f on [lo,hi] around x0,
/// assuming f is unimodal on the bracket [x0 - width, x0 + width].
double golden_section_max(const std::function<double(double)>& f, double x0,
                          double width, double lo, double hi,
                          double tol = 1e-10);

}  // namespace contention

#endif  // CONTENTION_OPTIMIZE_HPP
