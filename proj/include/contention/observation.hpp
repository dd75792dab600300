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

#ifndef CONTENTION_OBSERVATION_HPP
#define CONTENTION_OBSERVATION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "contention/intervention.hpp"
#include "contention/types.hpp"

namespace contention {

/// Per-slot channel outcome encoding: user index for a success,
/// kIdleSlot when nobody (manager included) transmits, kCollisionSlot for
/// any other busy slot.
constexpr std::int32_t kIdleSlot = -1;
constexpr std::int32_t kCollisionSlot = -2;

struct SlotTrace {
  std::vector<std::int32_t> outcomes;
  Index n = 0;
  std::uint64_t seed = 0;

  Index slot_count() const { return static_cast<Index>(outcomes.size()); }
  Index idle_count() const;
  Index collision_count() const;
  std::vector<Index> success_counts() const;  // length n
};

/// Slot-level Monte Carlo: each slot, user i transmits independently with
/// probability p_i and the manager with probability manager_p0. A slot is
/// a success for user i iff user i alone transmits and the manager stays
/// idle; a manager transmission in a busy slot counts toward collisions.
/// Deterministic given the seed; slot ranges may be partitioned across
/// threads without changing the outcome sequence.
SlotTrace simulate(const GameSpec& spec, const Eigen::Ref<const ArrayXd>& p,
                   double manager_p0, Index slots, std::uint64_t seed,
                   int threads = 1);

struct EstimateReport {
  double q_idle = 0.0;           // frequency of idle slots
  ArrayXd q;                     // per-user success frequencies
  Profile p_hat;                 // NaN where undefined
  ArrayXd ci_halfwidth;          // 95% normal-approximation half-widths
  std::vector<bool> defined;     // q_i + q_idle > 0
  Index slots = 0;

  bool all_defined() const;
};

/// Channel-state estimator: p_hat_i = q_i / (q_i + q_idle), from the idle
/// and per-user success frequencies of the trace. A user with
/// q_i + q_idle = 0 is flagged undefined (its probability cannot be told
/// apart from the observations). Confidence half-widths use the normal
/// approximation and are approximate by construction.
EstimateReport estimate_probabilities(const SlotTrace& trace, Index n);

struct ObservationModel {
  enum class Kind { Exact, Quantized, Noisy, AggregateOnly };
  Kind kind = Kind::Exact;
  Index m = 0;          // Quantized: interval count, m >= 2
  double epsilon = 0.0;  // Noisy: uniform half-width, > 0

  static ObservationModel exact() { return {Kind::Exact, 0, 0.0}; }
  static ObservationModel quantized(Index m);
  static ObservationModel noisy(double epsilon);
  static ObservationModel aggregate_only() {
    return {Kind::AggregateOnly, 0, 0.0};
  }
};

/// What the manager sees under a given observation model; exactly one
/// field is set, matching the model kind.
struct Observation {
  std::optional<Profile> profile;          // Exact, Noisy
  std::optional<Eigen::ArrayXi> intervals; // Quantized
  std::optional<double> idle_prob;         // AggregateOnly
};

/// Applies the observation model to the true profile. Noisy draws are
/// uniform on [p_i - epsilon, p_i + epsilon] independently per user
/// (stream id = user index); `draw` indexes repeated observations of the
/// same profile. Noisy observation requires p_i in [epsilon, 1 - epsilon].
Observation observe(const ObservationModel& model,
                    const Eigen::Ref<const ArrayXd>& p,
                    std::uint64_t seed = 0, std::uint64_t draw = 0);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  Index samples = 0;
};

/// Monte Carlo estimate of the expected intervention level when the rule
/// is fed noisy observations of p (uniform, half-width epsilon).
MonteCarloEstimate expected_intervention(const InterventionRule& rule,
                                         const Eigen::Ref<const ArrayXd>& p,
                                         double epsilon, Index samples,
                                         std::uint64_t seed);

/// CSV with header slot,outcome; outcome is I, C, or S<i>.
void write_trace_csv(std::ostream& os, const SlotTrace& trace);

void to_json(nlohmann::json& j, const EstimateReport& report);

}  // namespace contention

#endif  // CONTENTION_OBSERVATION_HPP
