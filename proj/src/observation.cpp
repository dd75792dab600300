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

#include "contention/observation.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "contention/rng.hpp"

namespace contention {

Index SlotTrace::idle_count() const {
  Index count = 0;
  for (auto o : outcomes) count += (o == kIdleSlot);
  return count;
}

Index SlotTrace::collision_count() const {
  Index count = 0;
  for (auto o : outcomes) count += (o == kCollisionSlot);
  return count;
}

std::vector<Index> SlotTrace::success_counts() const {
  std::vector<Index> counts(static_cast<std::size_t>(n), 0);
  for (auto o : outcomes) {
    if (o >= 0) ++counts[static_cast<std::size_t>(o)];
  }
  return counts;
}

namespace {

void simulate_range(const ArrayXd& p, double manager_p0, const CounterRng& rng,
                    Index begin, Index end, std::int32_t* out) {
  const Index n = p.size();
  const auto manager_stream = static_cast<std::uint64_t>(n);
  for (Index slot = begin; slot < end; ++slot) {
    const auto counter = static_cast<std::uint64_t>(slot);
    Index transmitters = 0;
    Index who = -1;
    for (Index i = 0; i < n; ++i) {
      if (rng.uniform(static_cast<std::uint64_t>(i), counter) < p[i]) {
        ++transmitters;
        who = i;
        if (transmitters > 1) break;
      }
    }
    const bool manager_busy =
        manager_p0 > 0.0 && rng.uniform(manager_stream, counter) < manager_p0;
    if (transmitters == 0) {
      out[slot] = manager_busy ? kCollisionSlot : kIdleSlot;
    } else if (transmitters == 1 && !manager_busy) {
      out[slot] = static_cast<std::int32_t>(who);
    } else {
      out[slot] = kCollisionSlot;
    }
  }
}

}  // namespace

SlotTrace simulate(const GameSpec& spec, const Eigen::Ref<const ArrayXd>& p,
                   double manager_p0, Index slots, std::uint64_t seed,
                   int threads) {
  require_valid_profile(spec, p);
  if (manager_p0 < 0.0 || manager_p0 > 1.0) {
    throw std::invalid_argument("simulate: manager_p0 must lie in [0,1]");
  }
  if (slots < 1) {
    throw std::invalid_argument("simulate: need at least one slot");
  }

  SlotTrace trace;
  trace.n = spec.n();
  trace.seed = seed;
  trace.outcomes.resize(static_cast<std::size_t>(slots));
  const CounterRng rng(seed);
  const ArrayXd probs = p;

  threads = std::max(1, threads);
  if (threads == 1 || slots < 4096) {
    simulate_range(probs, manager_p0, rng, 0, slots, trace.outcomes.data());
    return trace;
  }
  // Draws are a pure function of (seed, stream, slot), so any slot
  // partition yields the same trace.
  std::vector<std::thread> workers;
  const Index chunk = (slots + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const Index begin = static_cast<Index>(w) * chunk;
    const Index end = std::min(slots, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back(simulate_range, std::cref(probs), manager_p0,
                         std::cref(rng), begin, end, trace.outcomes.data());
  }
  for (auto& worker : workers) worker.join();
  return trace;
}

bool EstimateReport::all_defined() const {
  for (bool d : defined) {
    if (!d) return false;
  }
  return true;
}

EstimateReport estimate_probabilities(const SlotTrace& trace, Index n) {
  if (n < 1 || trace.n != n) {
    throw std::invalid_argument("estimate_probabilities: user count mismatch");
  }
  const Index slots = trace.slot_count();
  if (slots < 1) {
    throw std::invalid_argument("estimate_probabilities: empty trace");
  }

  EstimateReport report;
  report.slots = slots;
  const double total = static_cast<double>(slots);
  report.q_idle = static_cast<double>(trace.idle_count()) / total;
  const std::vector<Index> wins = trace.success_counts();
  report.q = ArrayXd(n);
  report.p_hat = ArrayXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  report.ci_halfwidth =
      ArrayXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  report.defined.assign(static_cast<std::size_t>(n), false);

  constexpr double kZ95 = 1.959963984540054;
  for (Index i = 0; i < n; ++i) {
    const double q_i = static_cast<double>(wins[static_cast<std::size_t>(i)]) / total;
    report.q[i] = q_i;
    const double denom = q_i + report.q_idle;
    if (denom <= 0.0) continue;  // p_i indistinguishable from these slots
    report.defined[static_cast<std::size_t>(i)] = true;
    report.p_hat[i] = q_i / denom;
    // Delta method on the multinomial (success_i, idle) frequencies.
    const double var = q_i * report.q_idle / (total * denom * denom * denom);
    report.ci_halfwidth[i] = kZ95 * std::sqrt(var);
  }
  return report;
}

ObservationModel ObservationModel::quantized(Index m) {
  if (m < 2) throw std::invalid_argument("observation: need m >= 2");
  return {Kind::Quantized, m, 0.0};
}

ObservationModel ObservationModel::noisy(double epsilon) {
  if (epsilon <= 0.0) {
    throw std::invalid_argument("observation: epsilon must be positive");
  }
  return {Kind::Noisy, 0, epsilon};
}

Observation observe(const ObservationModel& model,
                    const Eigen::Ref<const ArrayXd>& p, std::uint64_t seed,
                    std::uint64_t draw) {
  if (!is_valid_profile(p)) {
    throw std::invalid_argument("observe: entries must lie in [0,1]");
  }
  Observation obs;
  switch (model.kind) {
    case ObservationModel::Kind::Exact:
      obs.profile = p;
      break;
    case ObservationModel::Kind::Quantized: {
      Eigen::ArrayXi r(p.size());
      for (Index i = 0; i < p.size(); ++i) {
        r[i] = static_cast<int>(quantize_index(p[i], model.m));
      }
      obs.intervals = r;
      break;
    }
    case ObservationModel::Kind::Noisy: {
      if (!((p >= model.epsilon).all() &&
            (p <= 1.0 - model.epsilon).all())) {
        throw std::invalid_argument(
            "observe: noisy model needs p in [epsilon, 1 - epsilon]");
      }
      const CounterRng rng(seed);
      Profile noisy(p.size());
      for (Index i = 0; i < p.size(); ++i) {
        const double u = rng.uniform(static_cast<std::uint64_t>(i), draw);
        noisy[i] = p[i] + model.epsilon * (2.0 * u - 1.0);
      }
      obs.profile = noisy;
      break;
    }
    case ObservationModel::Kind::AggregateOnly:
      obs.idle_prob = (1.0 - p).prod();
      break;
  }
  return obs;
}

MonteCarloEstimate expected_intervention(const InterventionRule& rule,
                                         const Eigen::Ref<const ArrayXd>& p,
                                         double epsilon, Index samples,
                                         std::uint64_t seed) {
  if (samples < 2) {
    throw std::invalid_argument("expected_intervention: need >= 2 samples");
  }
  const ObservationModel model = ObservationModel::noisy(epsilon);
  double mean = 0.0;
  double m2 = 0.0;
  for (Index s = 0; s < samples; ++s) {
    const Observation obs =
        observe(model, p, seed, static_cast<std::uint64_t>(s));
    const double g = evaluate(rule, *obs.profile);
    const double delta = g - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (g - mean);
  }
  MonteCarloEstimate estimate;
  estimate.mean = mean;
  estimate.samples = samples;
  const double variance = m2 / static_cast<double>(samples - 1);
  estimate.std_error = std::sqrt(variance / static_cast<double>(samples));
  return estimate;
}

void write_trace_csv(std::ostream& os, const SlotTrace& trace) {
  os << "slot,outcome\n";
  for (std::size_t slot = 0; slot < trace.outcomes.size(); ++slot) {
    const std::int32_t o = trace.outcomes[slot];
    os << slot << ",";
    if (o == kIdleSlot) {
      os << "I";
    } else if (o == kCollisionSlot) {
      os << "C";
    } else {
      os << "S" << o;
    }
    os << "\n";
  }
}

void to_json(nlohmann::json& j, const EstimateReport& report) {
  const auto vec = [](const ArrayXd& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
  };
  std::vector<double> p_hat, half;
  for (Index i = 0; i < report.q.size(); ++i) {
    const bool ok = report.defined[static_cast<std::size_t>(i)];
    p_hat.push_back(ok ? report.p_hat[i] : -1.0);
    half.push_back(ok ? report.ci_halfwidth[i] : -1.0);
  }
  j = {{"slots", report.slots},
       {"q_idle", report.q_idle},
       {"q", vec(report.q)},
       {"p_hat", p_hat},
       {"ci_halfwidth", half},
       {"defined", report.defined}};
}

}  // namespace contention
