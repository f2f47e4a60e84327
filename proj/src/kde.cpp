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

#include "sais/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sais/errors.hpp"

namespace sais {

namespace {

// Below this the shifted kernel sum has lost too much range to be trusted and
// the exact max-shifted pass is used instead.
constexpr double kMinShiftedSum = 1e-250;

}  // namespace

double GaussianKernel::log_k(std::span<const double> u) {
  double r = 0.0;
  for (double v : u) r += v * v;
  return -0.5 * r - 0.5 * static_cast<double>(u.size()) * std::log(2.0 * std::numbers::pi);
}

void GaussianKernel::sample_unit(Rng& rng, std::span<double> out) {
  std::normal_distribution<double> normal;
  for (double& v : out) v = normal(rng);
}

double GaussianKernel::sq_integral(std::size_t d) {
  return std::pow(4.0 * std::numbers::pi, -0.5 * static_cast<double>(d));
}

double GaussianKernel::second_moment(std::size_t d) { return static_cast<double>(d); }

KdeMixture::KdeMixture(std::size_t dim, std::span<const double> positions, std::span<const double> weights)
    : dim_(dim) {
  if (dim == 0) throw StructuralError("kde dimension must be positive");
  if (weights.empty()) throw InputError("kde needs at least one center");
  if (positions.size() != weights.size() * dim) {
    throw StructuralError("kde positions do not match weights and dimension");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("kde weights must be finite and non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InputError("kde weights must sum to one (got " + std::to_string(total) + ")");
  }
  coords_.assign(dim, {});
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = positions[k * dim + j];
      if (!std::isfinite(v)) throw InputError("kde center has a non-finite coordinate");
      coords_[j].push_back(v);
    }
    log_weights_.push_back(std::log(weights[k]));
  }
  if (log_weights_.empty()) throw InputError("kde needs a center with positive weight");
  finish();
}

KdeMixture KdeMixture::from_cloud(const ParticleCloud& cloud) {
  const auto w = normalized_weights(cloud);
  return KdeMixture(cloud.dim(), cloud.positions(), w);
}

KdeMixture KdeMixture::uniform(std::size_t dim, std::span<const double> positions) {
  if (dim == 0) throw StructuralError("kde dimension must be positive");
  if (positions.empty() || positions.size() % dim != 0) {
    throw InputError("uniform kde needs a non-empty whole number of points");
  }
  KdeMixture k;
  k.dim_ = dim;
  const std::size_t n = positions.size() / dim;
  k.coords_.assign(dim, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = positions[i * dim + j];
      if (!std::isfinite(v)) throw InputError("kde center has a non-finite coordinate");
      k.coords_[j][i] = v;
    }
  }
  k.log_weights_.assign(n, -std::log(static_cast<double>(n)));
  k.uniform_ = true;
  k.finish();
  return k;
}

void KdeMixture::finish() {
  max_log_weight_ = *std::max_element(log_weights_.begin(), log_weights_.end());
  if (uniform_) return;
  cdf_.resize(log_weights_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < log_weights_.size(); ++k) {
    acc += std::exp(log_weights_[k]);
    cdf_[k] = acc;
  }
}

std::vector<double> KdeMixture::center(std::size_t i) const {
  std::vector<double> c(dim_);
  for (std::size_t j = 0; j < dim_; ++j) c[j] = coords_[j][i];
  return c;
}

double KdeMixture::weight(std::size_t i) const { return std::exp(log_weights_[i]); }

double KdeMixture::log_density(std::span<const double> x, double h) const {
  if (x.size() != dim_) throw StructuralError("kde evaluation point has the wrong dimension");
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("bandwidth must be positive and finite");
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError("kde evaluation point has a non-finite coordinate");
  }
  std::vector<const double*> cols(dim_);
  for (std::size_t j = 0; j < dim_; ++j) cols[j] = coords_[j].data();
  const double inv_two_h2 = 0.5 / (h * h);

  // Kernel exponents never exceed the largest log weight, so shifting by it
  // cannot overflow; only far-away points need the exact shift.
  double shift = max_log_weight_;
  double s = detail::kernel_sum(cols, log_weights_, x, inv_two_h2, shift);
  if (!(s > kMinShiftedSum)) {
    shift = detail::kernel_max_exponent(cols, log_weights_, x, inv_two_h2);
    s = detail::kernel_sum(cols, log_weights_, x, inv_two_h2, shift);
  }
  const double d = static_cast<double>(dim_);
  return shift + std::log(s) - d * std::log(h) - 0.5 * d * std::log(2.0 * std::numbers::pi);
}

void KdeMixture::sample(double h, Rng& rng, std::span<double> out) const {
  if (out.size() != dim_) throw StructuralError("kde sample buffer has the wrong dimension");
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("bandwidth must be positive and finite");
  std::size_t c = 0;
  if (uniform_) {
    c = std::uniform_int_distribution<std::size_t>(0, size() - 1)(rng);
  } else {
    const double u = std::uniform_real_distribution<double>(0.0, cdf_.back())(rng);
    c = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    c = std::min(c, size() - 1);
  }
  GaussianKernel::sample_unit(rng, out);
  for (std::size_t j = 0; j < dim_; ++j) out[j] = coords_[j][c] + h * out[j];
}

double kde_log_density(std::size_t dim, std::span<const double> positions, std::span<const double> weights, double h,
                       std::span<const double> x) {
  return KdeMixture(dim, positions, weights).log_density(x, h);
}

Target smoothed_reference(const Target& target, double h) {
  if (!target.mixture) {
    throw UnsupportedError("smoothed reference needs a Gaussian or Gaussian-mixture target, got '" + target.name + "'");
  }
  if (!(h > 0.0)) throw InputError("bandwidth must be positive");
  GaussianMixture m = *target.mixture;
  for (auto& c : m.components) {
    for (double& v : c.variance) v += h * h;
  }
  auto t = mixture_target(std::move(m), target.name + "*K_h");
  t.true_mean = target.true_mean;
  return t;
}

}  // namespace sais
