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

#ifndef SAIS_POLICY_HPP
#define SAIS_POLICY_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sais/core.hpp"
#include "sais/kde.hpp"
#include "sais/random.hpp"

namespace sais {

/// Heavy-tailed defensive component: a multivariate Student t.
/**
 * The shape matrix is `scale2() * I` with scale2 = (dof - 2) / dof * covariance_scale,
 * so the covariance is covariance_scale * I. Tails decay like |x|^{-(dof + d)}.
 */
class SafeDensity {
 public:
  inline static constexpr double kDefaultDof = 3.0;

  /// `covariance_scale <= 0` selects the default 5 / dim.
  explicit SafeDensity(std::size_t dim, double dof = kDefaultDof, double covariance_scale = 0.0,
                       std::vector<double> center = {});

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] double dof() const noexcept { return dof_; }
  [[nodiscard]] double covariance_scale() const noexcept { return cov_scale_; }
  [[nodiscard]] double scale2() const noexcept { return scale2_; }
  [[nodiscard]] const std::vector<double>& center() const noexcept { return center_; }

  [[nodiscard]] SafeDensity with_center(std::vector<double> center) const;

  [[nodiscard]] double log_density(std::span<const double> x) const;
  void sample(Rng& rng, std::span<double> out) const;

 private:
  std::size_t dim_;
  double dof_;
  double cov_scale_;
  double scale2_;
  double log_norm_;
  std::vector<double> center_;
};

enum class ScheduleMode { standard, subsampling };

/// Stage-indexed bandwidth, mixture weight and subsample size.
/**
 * Defaults reproduce the experimental protocol: T = 200 stages of m = 1000,
 * n0 = 1e4, burn-in T0 = 20 with eta = 3/4. During burn-in lambda is 1 for
 * t < T0/2 and 1/2 for T0/2 <= t < T0; afterwards
 *   h_t      = bandwidth_scale * (1 + s_t / n0)^{-1/(4+d)}
 *   lambda_t = lambda_scale    * (1 + s_t / n0)^{-p/(4+d)}
 * with (s_t, p) = (m t, 1) in standard mode and (l_t, 2) in subsampling mode,
 * l_t = 10 floor((n0 + m t)^delta) clamped to m t.
 */
struct Schedules {
  std::size_t d = 1;
  ScheduleMode mode = ScheduleMode::standard;
  std::size_t T = 200;
  std::size_t m = 1000;
  double n0 = 1e4;
  std::size_t T0 = 20;
  double eta = 0.75;
  double delta = 0.5;
  double lambda_scale = 0.25;
  /// <= 0 selects 0.4 / sqrt(d).
  double bandwidth_scale = 0.0;
  /// Constant lambda for every t >= 1, replacing formula and burn-in overrides.
  std::optional<double> fixed_lambda;
  /// Constant bandwidth for every t >= 1.
  std::optional<double> fixed_bandwidth;

  /// Protocol defaults for a budget n = m T.
  static Schedules defaults(std::size_t d, std::size_t budget, ScheduleMode mode = ScheduleMode::standard,
                            double delta = 0.5);

  /// Throws InputError on inconsistent settings.
  void validate() const;

  [[nodiscard]] std::size_t budget() const noexcept { return m * T; }
  [[nodiscard]] double bandwidth(std::size_t t) const;
  [[nodiscard]] double lambda(std::size_t t) const;
  /// Subsample size, clamped to the m t particles available at stage t.
  [[nodiscard]] std::size_t subsample_size(std::size_t t) const;
  /// Unclamped 10 floor((n0 + m t)^delta).
  [[nodiscard]] std::size_t subsample_size_formula(std::size_t t) const;

 private:
  void check_stage(std::size_t t) const;
  [[nodiscard]] double growth(std::size_t t) const;
};

/// One stage's proposal q = (1 - lambda) f_kde + lambda q0(. - mu).
class PolicyState {
 public:
  /// Pure safe density (lambda = 1), used before any particle exists.
  explicit PolicyState(SafeDensity safe);
  /// Throws InputError unless lambda in (0, 1] and h > 0; a KDE is required when lambda < 1.
  PolicyState(double lambda, double h, std::shared_ptr<const KdeMixture> kde, SafeDensity safe);

  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double bandwidth() const noexcept { return h_; }
  [[nodiscard]] const SafeDensity& safe() const noexcept { return safe_; }
  [[nodiscard]] const std::shared_ptr<const KdeMixture>& kde() const noexcept { return kde_; }
  /// Kernel evaluations spent by one log_density call.
  [[nodiscard]] std::size_t kernel_count() const noexcept { return lambda_ < 1.0 && kde_ ? kde_->size() : 0; }

  [[nodiscard]] double log_density(std::span<const double> x) const;
  void sample(Rng& rng, std::span<double> out) const;

 private:
  double lambda_;
  double h_;
  std::shared_ptr<const KdeMixture> kde_;
  SafeDensity safe_;
};

struct CenterUpdate {
  PolicyState state;
  std::optional<std::string> warning;
};

/// Moves the safe component to the cloud's self-normalized mean.
/** A degenerate cloud keeps the previous center and reports a warning. */
CenterUpdate update_center(const PolicyState& policy, const ParticleCloud& cloud);

}  // namespace sais

#endif  // SAIS_POLICY_HPP
