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

#include "sais/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sais/core.hpp"
#include "sais/errors.hpp"

namespace sais {

namespace {

constexpr double kBoxSd = 12.0;

double log_gaussian_diag(std::span<const double> x, const GaussianComponent& c) {
  double q = 0.0;
  double log_det = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double u = x[j] - c.mean[j];
    q += u * u / c.variance[j];
    log_det += std::log(c.variance[j]);
  }
  return -0.5 * (q + log_det + static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi));
}

std::vector<std::pair<double, double>> mixture_box(const GaussianMixture& m) {
  std::vector<std::pair<double, double>> box(m.dim(), {std::numeric_limits<double>::infinity(),
                                                       -std::numeric_limits<double>::infinity()});
  for (const auto& c : m.components) {
    for (std::size_t j = 0; j < box.size(); ++j) {
      const double sd = std::sqrt(c.variance[j]);
      box[j].first = std::min(box[j].first, c.mean[j] - kBoxSd * sd);
      box[j].second = std::max(box[j].second, c.mean[j] + kBoxSd * sd);
    }
  }
  return box;
}

void check_dim(std::size_t d) {
  if (d == 0) throw InputError("target dimension must be positive");
}

}  // namespace

double GaussianMixture::log_density(std::span<const double> x) const {
  double acc = kNegInf;
  for (const auto& c : components) {
    acc = log_add_exp(acc, std::log(c.weight) + log_gaussian_diag(x, c));
  }
  return acc;
}

std::vector<double> GaussianMixture::mean() const {
  std::vector<double> m(dim(), 0.0);
  for (const auto& c : components) {
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += c.weight * c.mean[j];
  }
  return m;
}

void GaussianMixture::sample(Rng& rng, std::span<double> out) const {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::size_t c = 0;
  while (c + 1 < components.size() && u >= components[c].weight) {
    u -= components[c].weight;
    ++c;
  }
  std::normal_distribution<double> normal;
  const auto& comp = components[c];
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = comp.mean[j] + std::sqrt(comp.variance[j]) * normal(rng);
}

Target mixture_target(GaussianMixture mixture, std::string name) {
  if (mixture.components.empty()) throw InputError("mixture needs at least one component");
  const std::size_t d = mixture.dim();
  double total = 0.0;
  for (const auto& c : mixture.components) {
    if (c.mean.size() != d || c.variance.size() != d) {
      throw StructuralError("mixture components disagree on dimension");
    }
    if (!(c.weight > 0.0)) throw InputError("mixture weights must be positive");
    for (double v : c.variance) {
      if (!(v > 0.0)) throw InputError("mixture variances must be positive");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("mixture weights must sum to one");

  Target t;
  t.name = std::move(name);
  t.dim = d;
  t.true_mean = mixture.mean();
  t.box = mixture_box(mixture);
  t.normalized = true;
  t.log_density_unnorm = [m = mixture](std::span<const double> x) { return m.log_density(x); };
  t.mixture = std::move(mixture);
  return t;
}

Target gaussian_target(std::vector<double> mean, double variance) {
  const std::size_t d = mean.size();
  check_dim(d);
  GaussianMixture m{{GaussianComponent{1.0, std::move(mean), std::vector<double>(d, variance)}}};
  return mixture_target(std::move(m), "gaussian");
}

Target gaussian_mixture_target(std::size_t d) {
  check_dim(d);
  const double a = 1.0 / (2.0 * std::sqrt(static_cast<double>(d)));
  const std::vector<double> var(d, 0.4 / static_cast<double>(d));
  GaussianMixture m{{GaussianComponent{0.5, std::vector<double>(d, a), var},
                     GaussianComponent{0.5, std::vector<double>(d, -a), var}}};
  auto t = mixture_target(std::move(m), "gaussian-mixture");
  // Exact zero rather than the rounding residue of +a/2 - a/2.
  t.true_mean = std::vector<double>(d, 0.0);
  return t;
}

Target cold_start_target(std::size_t d) {
  check_dim(d);
  const double dd = static_cast<double>(d);
  GaussianMixture m{{GaussianComponent{1.0, std::vector<double>(d, 5.0 / std::sqrt(dd)),
                                       std::vector<double>(d, 1.0 / dd)}}};
  return mixture_target(std::move(m), "cold-start");
}

double banana_log_density(std::span<const double> x, double curvature, double spread) {
  GaussianComponent base{1.0, std::vector<double>(x.size(), 0.0), std::vector<double>(x.size(), 1.0)};
  base.variance[0] = spread;
  std::vector<double> y(x.begin(), x.end());
  y[1] = x[1] + curvature * (x[0] * x[0] - spread);
  // The twist has unit Jacobian, so no correction term.
  return log_gaussian_diag(y, base);
}

Target banana_target(std::size_t d, double curvature, double spread) {
  if (d < 2) throw InputError("banana target needs d >= 2");
  if (!(spread > 0.0)) throw InputError("banana spread must be positive");
  std::vector<double> left(d, 0.0);
  std::vector<double> right(d, 0.0);
  left[0] = -8.0;
  left[1] = 8.0;
  right[0] = 8.0;
  right[1] = 8.0;
  GaussianMixture blobs{{GaussianComponent{0.5, left, std::vector<double>(d, 1.0)},
                         GaussianComponent{0.5, right, std::vector<double>(d, 1.0)}}};

  Target t;
  t.name = "banana";
  t.dim = d;
  t.normalized = false;
  t.log_density_unnorm = [=](std::span<const double> x) {
    return log_add_exp(std::log(0.5) + banana_log_density(x, curvature, spread),
                       std::log(0.5) + blobs.log_density(x));
  };
  t.box = mixture_box(blobs);
  const double sd0 = std::sqrt(spread);
  const double x0 = kBoxSd * sd0;
  t.box[0].first = std::min(t.box[0].first, -x0);
  t.box[0].second = std::max(t.box[0].second, x0);
  // x2 = z - curvature (x1^2 - spread) with |x1| <= x0.
  const double lo = -kBoxSd - std::max(0.0, curvature) * (x0 * x0 - spread) - std::max(0.0, -curvature) * spread;
  const double hi = kBoxSd + std::max(0.0, curvature) * spread + std::max(0.0, -curvature) * (x0 * x0 - spread);
  t.box[1].first = std::min(t.box[1].first, lo);
  t.box[1].second = std::max(t.box[1].second, hi);
  for (std::size_t j = 2; j < d; ++j) {
    t.box[j].first = std::min(t.box[j].first, -kBoxSd);
    t.box[j].second = std::max(t.box[j].second, kBoxSd);
  }
  return t;
}

Target with_log_offset(Target target, double log_offset) {
  target.log_density_unnorm = [f = std::move(target.log_density_unnorm), log_offset](std::span<const double> x) {
    return f(x) + log_offset;
  };
  target.normalized = target.normalized && log_offset == 0.0;
  return target;
}

Target make_target(const std::string& name, std::size_t d) {
  if (name == "gaussian-mixture") return gaussian_mixture_target(d);
  if (name == "cold-start") return cold_start_target(d);
  if (name == "banana") return banana_target(d);
  throw InputError("unknown target '" + name + "'");
}

std::vector<double> default_mu_start(const std::string& name, std::size_t d) {
  std::vector<double> mu(d, 0.0);
  if (name == "gaussian-mixture") {
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    mu[0] = s;
    if (d > 1) mu[1] = -s;
  }
  return mu;
}

}  // namespace sais
