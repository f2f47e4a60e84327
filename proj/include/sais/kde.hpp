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

#ifndef SAIS_KDE_HPP
#define SAIS_KDE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "sais/core.hpp"
#include "sais/random.hpp"
#include "sais/targets.hpp"

namespace sais {

/// Standard Gaussian product kernel K(u) = (2 pi)^{-d/2} exp(-|u|^2 / 2).
struct GaussianKernel {
  static double log_k(std::span<const double> u);
  static void sample_unit(Rng& rng, std::span<double> out);
  /// Integral of K^2 over R^d: (4 pi)^{-d/2}.
  static double sq_integral(std::size_t d);
  /// Integral of |u|^2 K(u) du: d.
  static double second_moment(std::size_t d);
};

/// Weighted mixture of kernels centred at a set of points.
/**
 * Positions are stored coordinate-major so that the kernel sum streams over
 * contiguous memory. Zero-weight centers are dropped at construction; they
 * contribute nothing to either evaluation or sampling.
 */
class KdeMixture {
 public:
  /// `positions` is row-major (`weights.size() * dim` entries); weights must sum to one.
  KdeMixture(std::size_t dim, std::span<const double> positions, std::span<const double> weights);

  /// Every particle of the cloud, with its normalized weight.
  static KdeMixture from_cloud(const ParticleCloud& cloud);
  /// Equal weights 1/count over the given row-major points.
  static KdeMixture uniform(std::size_t dim, std::span<const double> positions);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return log_weights_.size(); }
  [[nodiscard]] bool uniform_weights() const noexcept { return uniform_; }
  [[nodiscard]] std::vector<double> center(std::size_t i) const;
  [[nodiscard]] double weight(std::size_t i) const;

  /// log sum_k w_k K_h(x - X_k). Costs size() kernel evaluations.
  [[nodiscard]] double log_density(std::span<const double> x, double h) const;

  /// Draws X_c + h U with c ~ categorical(w) and U ~ K.
  void sample(double h, Rng& rng, std::span<double> out) const;

 private:
  KdeMixture() = default;
  void finish();

  std::size_t dim_ = 0;
  std::vector<std::vector<double>> coords_;  // coords_[j][k]
  std::vector<double> log_weights_;
  std::vector<double> cdf_;
  double max_log_weight_ = 0.0;
  bool uniform_ = false;
};

/// log f_n(x) for explicit (point, weight) centers. Throws InputError on empty centers or h <= 0.
double kde_log_density(std::size_t dim, std::span<const double> positions, std::span<const double> weights, double h,
                       std::span<const double> x);

/// Exact convolution f * K_h of a Gaussian-mixture target with the Gaussian kernel.
/** Throws UnsupportedError when the target carries no mixture parameters. */
Target smoothed_reference(const Target& target, double h);

namespace detail {

/// sum_k exp(lw_k - shift - inv_two_h2 |x - X_k|^2), coordinates given per dimension.
/** Implemented in a separately optimized translation unit. Inputs must be finite. */
double kernel_sum(std::span<const double* const> coords, std::span<const double> log_weights, std::span<const double> x,
                  double inv_two_h2, double shift);

/// max_k (lw_k - inv_two_h2 |x - X_k|^2), for the exact two-pass fallback.
double kernel_max_exponent(std::span<const double* const> coords, std::span<const double> log_weights,
                           std::span<const double> x, double inv_two_h2);

}  // namespace detail

}  // namespace sais

#endif  // SAIS_KDE_HPP
