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

#ifndef CONTENTION_DYNAMICS_HPP
#define CONTENTION_DYNAMICS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "contention/types.hpp"

namespace contention {

struct DynamicsStep {
  int t = 0;
  double offset = 0.0;        // c_t of the offset-TRD rule in force
  Profile profile;            // p_hat after this round of best responses
  double intervention = 0.0;  // rule value at the profile
};

struct DynamicsTrace {
  std::vector<DynamicsStep> steps;  // step 0 is the initial profile under
                                    // the standard rule (offset n)
  bool converged = false;
  int iterations = 0;          // steps taken after t = 0
  bool hypotheses_hold = false;
  std::string hypothesis_note;  // empty when hypotheses hold
};

/// Adaptive intervention schedule that walks users from a saturated
/// second-class equilibrium to the target: each round the manager re-bases
/// the offset at c_t = sum over all users except the largest-ratio one of
/// p_hat_j^{t-1}/t_j, plus one, and every user simultaneously best-responds
/// to the previous profile. Indifferent users repeat their last value.
///
/// Guaranteed to converge when p_hat0 is second class and for each i
/// either p_hat0_n/t_n - p_hat0_i/t_i < 2 or p_hat0_i/t_i <= 1 (users
/// ordered by initial ratio); violations are flagged in the trace and the
/// run proceeds without the guarantee.
DynamicsTrace run_dynamics(const GameSpec& spec,
                           const Eigen::Ref<const ArrayXd>& target,
                           const Eigen::Ref<const ArrayXd>& p_hat0, int max_t,
                           double tol);

/// Closed-form profile after t rounds, used as an oracle for
/// run_dynamics. With users ordered by initial ratio r_i = p_hat0_i/t_i
/// and d_i = r_n - r_i:
///   d_i < 2:  r_i^t = 1 - d_i / 2^t
///   else (requires r_i <= 1):  r_i^t = 1 - (1 - r_i) / 2^(t-1)
/// t = 0 returns p_hat0.
Profile closed_form_trajectory(const Eigen::Ref<const ArrayXd>& target,
                               const Eigen::Ref<const ArrayXd>& p_hat0, int t);

/// CSV with header t,c_t,g_level,p_1..p_n.
void write_dynamics_csv(std::ostream& os, const DynamicsTrace& trace);

}  // namespace contention

#endif  // CONTENTION_DYNAMICS_HPP
