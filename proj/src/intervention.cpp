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

#include "contention/intervention.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "contention/game.hpp"

namespace contention {

namespace {

void require_interior_target(const Eigen::Ref<const ArrayXd>& target) {
  if (!is_interior(target)) {
    throw std::invalid_argument(
        "intervention target entries must lie strictly in (0,1)");
  }
}

}  // namespace

InterventionRule make_trd(Profile target) {
  require_interior_target(target);
  const double offset = static_cast<double>(target.size());
  return TrdRule{std::move(target), offset};
}

InterventionRule make_trd(Profile target, double offset) {
  require_interior_target(target);
  return TrdRule{std::move(target), offset};
}

InterventionRule make_noise_robust(Profile target, double epsilon) {
  require_interior_target(target);
  if (epsilon <= 0.0) {
    throw std::invalid_argument("noise_robust: epsilon must be positive");
  }
  const double q = (1.0 / target).sum();
  if (epsilon * q > 1.0 + 1e-12) {
    throw std::invalid_argument(
        "noise_robust: epsilon * sum_i 1/t_i must not exceed 1 (rule would "
        "leave [0,1] on the noise box around the target)");
  }
  return NoiseRobustRule{std::move(target), epsilon};
}

InterventionRule make_aggregate(double target, Index n) {
  if (!(target > 0.0 && target < 1.0)) {
    throw std::invalid_argument("aggregate: target must lie in (0,1)");
  }
  if (n < 1) {
    throw std::invalid_argument("aggregate: need at least one user");
  }
  return AggregateRule{target, n};
}

InterventionRule make_quantized_trd(Profile target, Index m) {
  require_interior_target(target);
  if (m < 2) {
    throw std::invalid_argument("quantized_trd: need m >= 2 intervals");
  }
  return QuantizedTrdRule{std::move(target), m};
}

double trd(const Eigen::Ref<const ArrayXd>& target,
           const Eigen::Ref<const ArrayXd>& p) {
  require_interior_target(target);
  if (p.size() != target.size()) {
    throw std::invalid_argument("trd: profile/target dimension mismatch");
  }
  return ((p - target) / target).sum();
}

Index quantize_index(double p, Index m) {
  if (m < 2) throw std::invalid_argument("quantize_index: need m >= 2");
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("quantize_index: p must lie in [0,1]");
  }
  if (p == 0.0) return 0;
  // Right-closed intervals; the nudge keeps exact endpoints j/m from
  // spilling into the next interval after the multiply.
  const auto r = static_cast<Index>(
      std::ceil(p * static_cast<double>(m) - 1e-9));
  return std::max<Index>(Index{1}, std::min(r, m));
}

double evaluate(const InterventionRule& rule,
                const Eigen::Ref<const ArrayXd>& p) {
  return std::visit(
      [&](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, TrdRule>) {
          if (p.size() != r.target.size()) {
            throw std::invalid_argument("evaluate: dimension mismatch");
          }
          return trim((p / r.target).sum() - r.offset);
        } else if constexpr (std::is_same_v<R, NoiseRobustRule>) {
          if (p.size() != r.target.size()) {
            throw std::invalid_argument("evaluate: dimension mismatch");
          }
          const double q = (1.0 / r.target).sum();
          const double eq = r.epsilon * q;
          const double n = static_cast<double>(r.target.size());
          const double raw =
              ((p / (1.0 + eq) - r.target) / r.target).sum() +
              (n + 1.0) * eq / (1.0 + eq);
          return trim(raw);
        } else if constexpr (std::is_same_v<R, AggregateRule>) {
          if (p.size() != r.n) {
            throw std::invalid_argument("evaluate: dimension mismatch");
          }
          return evaluate_aggregate(r, (1.0 - p).prod());
        } else {
          if (p.size() != r.target.size()) {
            throw std::invalid_argument("evaluate: dimension mismatch");
          }
          ArrayXd snapped(p.size());
          for (Index i = 0; i < p.size(); ++i) {
            snapped[i] = static_cast<double>(quantize_index(p[i], r.m)) /
                         static_cast<double>(r.m);
          }
          return trim((snapped / r.target).sum() -
                      static_cast<double>(r.target.size()));
        }
      },
      rule);
}

double evaluate_aggregate(const AggregateRule& rule, double idle_prob) {
  if (!(rule.target > 0.0 && rule.target < 1.0)) {
    throw std::invalid_argument("aggregate: target must lie in (0,1)");
  }
  if (idle_prob < 0.0 || idle_prob > 1.0) {
    throw std::invalid_argument("aggregate: idle probability out of [0,1]");
  }
  const double n = static_cast<double>(rule.n);
  const double silent = std::pow(1.0 - rule.target, n);
  const double scale = rule.target * std::pow(1.0 - rule.target, n - 1.0);
  return trim((silent - idle_prob) / scale);
}

Payoffs intervened_payoff(const GameSpec& spec, const InterventionRule& rule,
                          const Eigen::Ref<const ArrayXd>& p) {
  return (1.0 - evaluate(rule, p)) * payoff(spec, p);
}

Profile rule_target(const InterventionRule& rule) {
  return std::visit(
      [](const auto& r) -> Profile {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, AggregateRule>) {
          return ArrayXd::Constant(r.n, r.target);
        } else {
          return r.target;
        }
      },
      rule);
}

Index rule_user_count(const InterventionRule& rule) {
  return std::visit(
      [](const auto& r) -> Index {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, AggregateRule>) {
          return r.n;
        } else {
          return r.target.size();
        }
      },
      rule);
}

double manager_payoff(const InterventionRule& rule,
                      const Eigen::Ref<const ArrayXd>& p) {
  const Profile target = rule_target(rule);
  if (p.size() != target.size()) {
    throw std::invalid_argument("manager_payoff: dimension mismatch");
  }
  if ((p == target).all()) {
    return 1.0 - evaluate(rule, p);
  }
  return 0.0;
}

namespace {

std::vector<double> to_vector(const ArrayXd& a) {
  return {a.data(), a.data() + a.size()};
}

ArrayXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const ArrayXd>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

void to_json(nlohmann::json& j, const InterventionRule& rule) {
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, TrdRule>) {
          j = {{"variant", "trd"},
               {"target", to_vector(r.target)},
               {"offset", r.offset}};
        } else if constexpr (std::is_same_v<R, NoiseRobustRule>) {
          j = {{"variant", "noise_robust"},
               {"target", to_vector(r.target)},
               {"epsilon", r.epsilon}};
        } else if constexpr (std::is_same_v<R, AggregateRule>) {
          j = {{"variant", "aggregate"}, {"target", r.target}, {"n", r.n}};
        } else {
          j = {{"variant", "quantized_trd"},
               {"target", to_vector(r.target)},
               {"m", r.m}};
        }
      },
      rule);
}

void from_json(const nlohmann::json& j, InterventionRule& rule) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "trd") {
    Profile target = from_vector(j.at("target").get<std::vector<double>>());
    if (j.contains("offset")) {
      rule = make_trd(std::move(target), j.at("offset").get<double>());
    } else {
      rule = make_trd(std::move(target));
    }
  } else if (variant == "noise_robust") {
    rule = make_noise_robust(
        from_vector(j.at("target").get<std::vector<double>>()),
        j.at("epsilon").get<double>());
  } else if (variant == "aggregate") {
    rule = make_aggregate(j.at("target").get<double>(),
                          j.at("n").get<Index>());
  } else if (variant == "quantized_trd") {
    rule = make_quantized_trd(
        from_vector(j.at("target").get<std::vector<double>>()),
        j.at("m").get<Index>());
  } else {
    throw std::invalid_argument("unknown intervention rule variant: " +
                                variant);
  }
}

}  // namespace contention
