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

#ifndef SAIS_CORE_HPP
#define SAIS_CORE_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

/**
 * \file
 * \brief Weighted particle storage shared by every sampler.
 *
 * Importance weights are kept as natural logarithms. The only linear-domain
 * quantity is the cumulative weight array used for multinomial resampling;
 * it is expressed relative to an internal reference scale so that weights of
 * Bayesian magnitude neither overflow nor underflow.
 */

namespace sais {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// A point with the logarithm of its importance weight.
struct Particle {
  std::vector<double> position;
  double log_weight = 0.0;
};

/// Growing collection of weighted particles of a fixed dimension.
class ParticleCloud {
 public:
  explicit ParticleCloud(std::size_t dim);

  /// Appends a particle. Amortized O(1).
  /**
   * Throws StructuralError when `position` has the wrong length and
   * InputError for a non-finite coordinate, a NaN or a +inf log weight.
   */
  void append(std::span<const double> position, double log_weight);
  void append(const Particle& p) { append(p.position, p.log_weight); }

  [[nodiscard]] std::size_t size() const noexcept { return log_weights_.size(); }
  [[nodiscard]] bool empty() const noexcept { return log_weights_.empty(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

  [[nodiscard]] std::span<const double> position(std::size_t i) const {
    return {positions_.data() + i * dim_, dim_};
  }
  /// Row-major positions, `size() * dim()` entries.
  [[nodiscard]] std::span<const double> positions() const noexcept { return positions_; }
  [[nodiscard]] double log_weight(std::size_t i) const { return log_weights_[i]; }
  [[nodiscard]] std::span<const double> log_weights() const noexcept { return log_weights_; }
  [[nodiscard]] Particle particle(std::size_t i) const;

  /// Cumulative weights, in units of exp(log_scale()).
  [[nodiscard]] std::span<const double> cumulative_weights() const noexcept { return cum_weight_; }
  [[nodiscard]] double total_weight() const noexcept { return cum_weight_.empty() ? 0.0 : cum_weight_.back(); }
  /// Log of the unit in which cumulative_weights() is expressed.
  [[nodiscard]] double log_scale() const noexcept { return log_scale_; }

  /// Re-sums cumulative weights from the stored log weights.
  void rebuild_cumulative();

 private:
  void push_cumulative(double log_weight);

  std::size_t dim_;
  std::vector<double> positions_;
  std::vector<double> log_weights_;
  std::vector<double> cum_weight_;
  double log_scale_ = 0.0;
  bool scale_fixed_ = false;
  // Neumaier running sum; cum_weight_ entries are sum_ + comp_.
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Normalized weights W_{n,k} via max-shifted exponentiation.
/** Throws DegenerateCloudError when every log weight is -inf (or the cloud is empty). */
std::vector<double> normalized_weights(std::span<const double> log_weights);
std::vector<double> normalized_weights(const ParticleCloud& cloud);

/// 1 / sum of squared normalized weights.
double effective_sample_size(const ParticleCloud& cloud);

/// Self-normalized mean of the positions.
std::vector<double> weighted_mean(const ParticleCloud& cloud);

/// log(exp(a) + exp(b)) without overflow; handles -inf operands.
double log_add_exp(double a, double b) noexcept;

/// log sum exp over a range, max-shifted. Returns -inf for an empty or all -inf range.
double log_sum_exp(std::span<const double> values) noexcept;

}  // namespace sais

#endif  // SAIS_CORE_HPP
