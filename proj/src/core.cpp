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

#include "sais/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sais/errors.hpp"

namespace sais {

namespace {

// Largest exponent kept in linear scale before the reference is moved up.
constexpr double kMaxLinearExponent = 600.0;

}  // namespace

ParticleCloud::ParticleCloud(std::size_t dim) : dim_(dim) {
  if (dim == 0) {
    throw StructuralError("particle cloud dimension must be positive");
  }
}

void ParticleCloud::append(std::span<const double> position, double log_weight) {
  if (position.size() != dim_) {
    throw StructuralError("particle dimension " + std::to_string(position.size()) +
                          " does not match cloud dimension " + std::to_string(dim_));
  }
  for (double v : position) {
    if (!std::isfinite(v)) {
      throw InputError("particle position has a non-finite coordinate");
    }
  }
  if (std::isnan(log_weight) || log_weight == std::numeric_limits<double>::infinity()) {
    throw InputError("particle log weight must be finite or -inf");
  }
  positions_.insert(positions_.end(), position.begin(), position.end());
  log_weights_.push_back(log_weight);
  push_cumulative(log_weight);
}

Particle ParticleCloud::particle(std::size_t i) const {
  const auto p = position(i);
  return Particle{{p.begin(), p.end()}, log_weights_[i]};
}

void ParticleCloud::push_cumulative(double log_weight) {
  if (log_weight != kNegInf) {
    if (!scale_fixed_) {
      log_scale_ = log_weight;
      scale_fixed_ = true;
    } else if (log_weight - log_scale_ > kMaxLinearExponent) {
      // Move the reference up; every stored entry shrinks by the same factor.
      const double factor = std::exp(log_scale_ - log_weight);
      for (double& c : cum_weight_) c *= factor;
      sum_ *= factor;
      comp_ *= factor;
      log_scale_ = log_weight;
    }
  }
  const double w = log_weight == kNegInf ? 0.0 : std::exp(log_weight - log_scale_);
  const double t = sum_ + w;
  if (std::abs(sum_) >= std::abs(w)) {
    comp_ += (sum_ - t) + w;
  } else {
    comp_ += (w - t) + sum_;
  }
  sum_ = t;
  cum_weight_.push_back(sum_ + comp_);
}

void ParticleCloud::rebuild_cumulative() {
  cum_weight_.clear();
  sum_ = 0.0;
  comp_ = 0.0;
  scale_fixed_ = false;
  log_scale_ = 0.0;
  const double max_lw = log_weights_.empty() ? kNegInf : *std::max_element(log_weights_.begin(), log_weights_.end());
  if (max_lw != kNegInf) {
    log_scale_ = max_lw;
    scale_fixed_ = true;
  }
  for (double lw : log_weights_) push_cumulative(lw);
}

double log_add_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(std::span<const double> values) noexcept {
  if (values.empty()) return kNegInf;
  const double m = *std::max_element(values.begin(), values.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> normalized_weights(std::span<const double> log_weights) {
  const double lse = log_sum_exp(log_weights);
  if (lse == kNegInf) {
    throw DegenerateCloudError("cannot normalize: every importance weight is zero");
  }
  std::vector<double> w(log_weights.size());
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_weights[i] - m);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> normalized_weights(const ParticleCloud& cloud) {
  return normalized_weights(cloud.log_weights());
}

double effective_sample_size(const ParticleCloud& cloud) {
  const auto w = normalized_weights(cloud);
  double s = 0.0;
  for (double v : w) s += v * v;
  return 1.0 / s;
}

std::vector<double> weighted_mean(const ParticleCloud& cloud) {
  const auto w = normalized_weights(cloud);
  std::vector<double> mean(cloud.dim(), 0.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (w[i] == 0.0) continue;
    const auto x = cloud.position(i);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += w[i] * x[j];
  }
  return mean;
}

}  // namespace sais
