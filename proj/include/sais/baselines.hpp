// Copyright 2026 The SAIS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SAIS_BASELINES_HPP
#define SAIS_BASELINES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sais/targets.hpp"

namespace sais {

/// Metropolis-Hastings output. Rejections repeat the current state.
struct Chain {
  std::size_t dim = 0;
  std::vector<double> states;  // row-major, one row per step
  std::size_t accepted = 0;

  [[nodiscard]] std::size_t size() const noexcept { return dim == 0 ? 0 : states.size() / dim; }
  [[nodiscard]] std::span<const double> state(std::size_t i) const { return {states.data() + i * dim, dim}; }
  [[nodiscard]] double acceptance_rate() const { return size() == 0 ? 0.0 : double(accepted) / double(size()); }
  /// Mean of the states after dropping the first `discard`.
  [[nodiscard]] std::vector<double> mean(std::size_t discard = 0) const;
};

/// Sample mean and covariance maintained by rank-one (Welford) updates.
class RunningCovariance {
 public:
  explicit RunningCovariance(std::size_t dim);
  void push(std::span<const double> x);
  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] const std::vector<double>& mean() const noexcept { return mean_; }
  /// Unbiased covariance (divides by count - 1), row-major dim x dim.
  [[nodiscard]] std::vector<double> covariance() const;

 private:
  std::size_t dim_;
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Random-walk MH with Gaussian increments of diagonal covariance `proposal_variances`.
/** Throws InputError if f_U(x0) = 0 or a variance is not positive. */
Chain run_rwmh(const Target& target, std::size_t n, std::span<const double> x0,
               std::span<const double> proposal_variances, std::uint64_t seed);

struct AmhOptions {
  /// First step using the adapted proposal.
  std::size_t adapt_start = 10000;
  /// Multiplier of the chain covariance; <= 0 selects 2.38^2 / d.
  double scale = 0.0;
  /// Ridge added to the scaled covariance.
  double epsilon = 1e-6;
  /// Random-walk variances before adaptation; empty selects 0.4 / d.
  std::vector<double> initial_variances;
};

/// Adaptive MH: random walk until adapt_start, then N(0, scale Cov(past states) + epsilon I) increments.
/** The covariance includes every past state, x0 and the pre-adaptation prefix included. */
Chain run_amh(const Target& target, std::size_t n, std::span<const double> x0, std::uint64_t seed,
              const AmhOptions& options = {});

}  // namespace sais

#endif  // SAIS_BASELINES_HPP
