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

#ifndef SAIS_TARGETS_HPP
#define SAIS_TARGETS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sais/random.hpp"

namespace sais {

using LogDensityFn = std::function<double(std::span<const double>)>;

/// Gaussian with diagonal covariance, carrying its mixture weight.
struct GaussianComponent {
  double weight = 1.0;
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Finite mixture of diagonal Gaussians. Weights sum to one.
struct GaussianMixture {
  std::vector<GaussianComponent> components;

  [[nodiscard]] std::size_t dim() const { return components.front().mean.size(); }
  [[nodiscard]] double log_density(std::span<const double> x) const;
  [[nodiscard]] std::vector<double> mean() const;
  /// Exact draw: pick a component by weight, then a Gaussian.
  void sample(Rng& rng, std::span<double> out) const;
};

/// A density to explore, known up to a constant.
/**
 * `log_density_unnorm` returns a finite value or -inf on finite input.
 * `mixture` is set for the Gaussian families, whose parameters the
 * diagnostics use for exact smoothing and quadrature boxes. `box` gives, per
 * coordinate, an interval holding all but a negligible part of the mass
 * (12 standard deviations around every component).
 */
struct Target {
  std::string name;
  std::size_t dim = 0;
  LogDensityFn log_density_unnorm;
  std::optional<std::vector<double>> true_mean;
  std::optional<GaussianMixture> mixture;
  bool normalized = false;
  std::vector<std::pair<double, double>> box;

  [[nodiscard]] double log_density(std::span<const double> x) const { return log_density_unnorm(x); }
};

/// Normalized target built from a Gaussian mixture.
Target mixture_target(GaussianMixture mixture, std::string name);

/// N(mean, variance * I).
Target gaussian_target(std::vector<double> mean, double variance);

/// Two-component mixture 0.5 N(mu, S) + 0.5 N(-mu, S), mu = (1,...,1)/(2 sqrt d), S = (0.4/d) I.
Target gaussian_mixture_target(std::size_t d);

/// N(mu, (1/d) I) with mu = (5,...,5)/sqrt d, far from a start at the origin.
Target cold_start_target(std::size_t d);

/// Log density of the twisted Gaussian: x1 ~ N(0, spread), x2 + curvature (x1^2 - spread) ~ N(0, 1),
/// remaining coordinates N(0, 1).
double banana_log_density(std::span<const double> x, double curvature, double spread);

inline constexpr double kBananaCurvature = 0.03;
inline constexpr double kBananaSpread = 100.0;

/// Illustration target: banana component (weight 1/2) plus two unit Gaussians (1/4 each)
/// centred at (-8, 8, 0, ...) and (8, 8, 0, ...). Treated as unnormalized; no true mean.
Target banana_target(std::size_t d, double curvature = kBananaCurvature, double spread = kBananaSpread);

/// Same target with log_density_unnorm shifted by `log_offset` (f_U multiplied by exp(log_offset)).
Target with_log_offset(Target target, double log_offset);

/// Built-in target by configuration name: "gaussian-mixture", "cold-start", "banana".
Target make_target(const std::string& name, std::size_t d);

/// Starting mean used in the experiments for a named target.
std::vector<double> default_mu_start(const std::string& name, std::size_t d);

}  // namespace sais

#endif  // SAIS_TARGETS_HPP
