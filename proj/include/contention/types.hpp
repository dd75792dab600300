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

#ifndef CONTENTION_TYPES_HPP
#define CONTENTION_TYPES_HPP

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace contention {

using Eigen::ArrayXd;
using Eigen::Index;

/// Per-user transmission probabilities, entries in [0,1]. Manager targets
/// and candidate equilibria are role-tagged instances of the same type.
using Profile = ArrayXd;

/// Expected per-user payoffs; always satisfies 0 <= u_i <= k_i.
using Payoffs = ArrayXd;

/// One-shot contention game: n users sharing a slotted channel, user i
/// valuing a successful transmission at k_i > 0.
struct GameSpec {
  ArrayXd k;

  explicit GameSpec(ArrayXd valuations) : k(std::move(valuations)) {
    if (k.size() < 1) {
      throw std::invalid_argument("GameSpec: need at least one user");
    }
    if (!(k > 0.0).all()) {
      throw std::invalid_argument("GameSpec: valuations must be positive");
    }
  }

  static GameSpec homogeneous(Index n, double value = 1.0) {
    return GameSpec(ArrayXd::Constant(n, value));
  }

  Index n() const { return k.size(); }
};

inline bool is_valid_profile(const Eigen::Ref<const ArrayXd>& p) {
  return p.size() >= 1 && (p >= 0.0).all() && (p <= 1.0).all();
}

/// All entries strictly inside (0,1); required of intervention targets.
inline bool is_interior(const Eigen::Ref<const ArrayXd>& p) {
  return p.size() >= 1 && (p > 0.0).all() && (p < 1.0).all();
}

inline void require_valid_profile(const GameSpec& spec,
                                  const Eigen::Ref<const ArrayXd>& p,
                                  const char* what = "profile") {
  if (p.size() != spec.n()) {
    throw std::invalid_argument(std::string(what) +
                                ": dimension mismatch with game spec");
  }
  if (!is_valid_profile(p)) {
    throw std::invalid_argument(std::string(what) +
                                ": entries must lie in [0,1]");
  }
}

/// prod_{j != i} x_j for every i, via prefix/suffix products. No division,
/// so profiles containing exact zeros or ones are handled exactly.
template <typename Derived>
ArrayXd exclusive_prod(const Eigen::ArrayBase<Derived>& x) {
  const Index n = x.size();
  ArrayXd out(n);
  double acc = 1.0;
  for (Index i = 0; i < n; ++i) {
    out[i] = acc;
    acc *= x[i];
  }
  acc = 1.0;
  for (Index i = n - 1; i >= 0; --i) {
    out[i] *= acc;
    acc *= x[i];
  }
  return out;
}

/// min(max(x, lo), hi); the trimming operator used by every intervention
/// rule to keep transmission probabilities in range.
inline double trim(double x, double lo = 0.0, double hi = 1.0) {
  return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace contention

#endif  // CONTENTION_TYPES_HPP
