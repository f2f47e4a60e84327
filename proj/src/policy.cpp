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

#include "sais/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sais/errors.hpp"

namespace sais {

SafeDensity::SafeDensity(std::size_t dim, double dof, double covariance_scale, std::vector<double> center)
    : dim_(dim), dof_(dof), cov_scale_(covariance_scale), center_(std::move(center)) {
  if (dim == 0) throw StructuralError("safe density dimension must be positive");
  if (!(dof > 2.0) || !std::isfinite(dof)) throw InputError("Student t degrees of freedom must exceed 2");
  if (cov_scale_ <= 0.0) cov_scale_ = 5.0 / static_cast<double>(dim);
  if (center_.empty()) center_.assign(dim, 0.0);
  if (center_.size() != dim) throw StructuralError("safe density center has the wrong dimension");
  scale2_ = (dof_ - 2.0) / dof_ * cov_scale_;
  const double d = static_cast<double>(dim);
  log_norm_ = std::lgamma(0.5 * (dof_ + d)) - std::lgamma(0.5 * dof_) - 0.5 * d * std::log(dof_ * std::numbers::pi) -
              0.5 * d * std::log(scale2_);
}

SafeDensity SafeDensity::with_center(std::vector<double> center) const {
  return SafeDensity(dim_, dof_, cov_scale_, std::move(center));
}

double SafeDensity::log_density(std::span<const double> x) const {
  if (x.size() != dim_) throw StructuralError("safe density evaluation point has the wrong dimension");
  double q = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double u = x[j] - center_[j];
    q += u * u;
  }
  q /= scale2_;
  return log_norm_ - 0.5 * (dof_ + static_cast<double>(dim_)) * std::log1p(q / dof_);
}

void SafeDensity::sample(Rng& rng, std::span<double> out) const {
  if (out.size() != dim_) throw StructuralError("safe density sample buffer has the wrong dimension");
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi2(dof_);
  for (double& v : out) v = normal(rng);
  const double w = chi2(rng) / dof_;
  const double s = std::sqrt(scale2_ / w);
  for (std::size_t j = 0; j < dim_; ++j) out[j] = center_[j] + s * out[j];
}

Schedules Schedules::defaults(std::size_t d, std::size_t budget, ScheduleMode mode, double delta) {
  Schedules s;
  s.d = d;
  s.mode = mode;
  s.delta = delta;
  if (budget % s.m != 0) {
    throw InputError("budget " + std::to_string(budget) + " is not a multiple of the batch size " +
                     std::to_string(s.m));
  }
  s.T = budget / s.m;
  s.validate();
  return s;
}

void Schedules::validate() const {
  if (d == 0) throw InputError("schedule dimension must be positive");
  if (T == 0 || m == 0) throw InputError("stage count and batch size must be positive");
  if (T0 >= T) throw InputError("burn-in T0 must be smaller than the number of stages T");
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("regularization exponent eta must lie in (0, 1]");
  if (!(n0 > 0.0)) throw InputError("n0 must be positive");
  if (!(lambda_scale > 0.0 && lambda_scale <= 1.0)) throw InputError("lambda scale must lie in (0, 1]");
  if (mode == ScheduleMode::subsampling && !(delta > 0.0 && delta <= 0.5)) {
    throw InputError("subsampling exponent delta must lie in (0, 1/2]");
  }
  if (fixed_lambda && !(*fixed_lambda > 0.0 && *fixed_lambda <= 1.0)) {
    throw InputError("fixed lambda must lie in (0, 1]");
  }
  if (fixed_bandwidth && !(*fixed_bandwidth > 0.0)) throw InputError("fixed bandwidth must be positive");
}

void Schedules::check_stage(std::size_t t) const {
  if (t < 1 || t + 1 > T) {
    throw InputError("stage " + std::to_string(t) + " outside 1.." + std::to_string(T - 1));
  }
}

std::size_t Schedules::subsample_size_formula(std::size_t t) const {
  check_stage(t);
  const double base = n0 + static_cast<double>(m * t);
  return 10 * static_cast<std::size_t>(std::floor(std::pow(base, delta)));
}

std::size_t Schedules::subsample_size(std::size_t t) const {
  return std::min(subsample_size_formula(t), m * t);
}

double Schedules::growth(std::size_t t) const {
  const double s = mode == ScheduleMode::standard ? static_cast<double>(m * t)
                                                  : static_cast<double>(subsample_size(t));
  return 1.0 + s / n0;
}

double Schedules::bandwidth(std::size_t t) const {
  check_stage(t);
  if (fixed_bandwidth) return *fixed_bandwidth;
  const double dd = static_cast<double>(d);
  const double scale = bandwidth_scale > 0.0 ? bandwidth_scale : 0.4 / std::sqrt(dd);
  return scale * std::pow(growth(t), -1.0 / (4.0 + dd));
}

double Schedules::lambda(std::size_t t) const {
  check_stage(t);
  if (fixed_lambda) return *fixed_lambda;
  if (t < T0 / 2) return 1.0;
  if (t < T0) return 0.5;
  const double dd = static_cast<double>(d);
  const double power = mode == ScheduleMode::standard ? 1.0 : 2.0;
  return lambda_scale * std::pow(growth(t), -power / (4.0 + dd));
}

PolicyState::PolicyState(SafeDensity safe) : lambda_(1.0), h_(1.0), safe_(std::move(safe)) {}

PolicyState::PolicyState(double lambda, double h, std::shared_ptr<const KdeMixture> kde, SafeDensity safe)
    : lambda_(lambda), h_(h), kde_(std::move(kde)), safe_(std::move(safe)) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw InputError("mixture weight lambda must lie in (0, 1], got " + std::to_string(lambda));
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("bandwidth must be positive and finite");
  if (lambda < 1.0 && !kde_) throw InputError("a policy with lambda < 1 needs a kernel support");
  if (kde_ && kde_->dim() != safe_.dim()) throw StructuralError("kernel support and safe density disagree on dimension");
}

double PolicyState::log_density(std::span<const double> x) const {
  const double safe = safe_.log_density(x);
  if (lambda_ >= 1.0 || !kde_) return safe;
  return log_add_exp(std::log1p(-lambda_) + kde_->log_density(x, h_), std::log(lambda_) + safe);
}

void PolicyState::sample(Rng& rng, std::span<double> out) const {
  if (lambda_ >= 1.0 || !kde_) {
    safe_.sample(rng, out);
    return;
  }
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < lambda_) {
    safe_.sample(rng, out);
  } else {
    kde_->sample(h_, rng, out);
  }
}

CenterUpdate update_center(const PolicyState& policy, const ParticleCloud& cloud) {
  std::vector<double> mu;
  try {
    mu = weighted_mean(cloud);
  } catch (const DegenerateCloudError& e) {
    return {policy, std::string("center kept: ") + e.what()};
  }
  auto safe = policy.safe().with_center(std::move(mu));
  if (policy.lambda() >= 1.0 && !policy.kde()) return {PolicyState(std::move(safe)), std::nullopt};
  return {PolicyState(policy.lambda(), policy.bandwidth(), policy.kde(), std::move(safe)), std::nullopt};
}

}  // namespace sais
