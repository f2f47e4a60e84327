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

#ifndef SAIS_DIAGNOSTICS_HPP
#define SAIS_DIAGNOSTICS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "sais/core.hpp"
#include "sais/policy.hpp"
#include "sais/targets.hpp"

/**
 * \file
 * \brief Variance functionals of importance sampling and the Monte Carlo
 * checks of the central limit theorems they govern.
 *
 * For a normalized target f, a proposal q and an integrand g:
 *   sigma_q^2(x) = f(x)^2 / q(x)            (0/0 = 0)
 *   C(q)         = integral of sigma_q^2
 *   V(q, g)      = integral g^2 f^2 / q - (integral g f)^2
 * C(q) >= 1 with equality only at q = f. V(q, g) is the asymptotic variance
 * of the self-normalized estimate under the fixed policy q, and V(f, g) is the
 * variance SAIS attains asymptotically.
 */

namespace sais {

using Box = std::vector<std::pair<double, double>>;
using ScalarFn = std::function<double(std::span<const double>)>;

struct QuadratureResult {
  double value = 0.0;
  /// Self-reported absolute error estimate.
  double error = 0.0;
  /// The integral kept growing as the box was enlarged.
  bool divergent = false;
};

/// Adaptive Gauss-Kronrod quadrature over a box in dimension 1 or 2.
QuadratureResult integrate(const ScalarFn& integrand, const Box& box, double tolerance = 1e-12);

/// Integral over R^d (d <= 2) of a function concentrated in `box`.
/**
 * The box is enlarged by 1.5x until two consecutive values agree to 1e-9
 * relative; after four enlargements without agreement the result is +inf with
 * `divergent` set.
 */
QuadratureResult integrate_whole_space(const ScalarFn& integrand, const Box& box, double tolerance = 1e-12);

/// f(x)^2 / q(x) for a normalized target f.
double sigma_q2(const Target& f, const LogDensityFn& log_q, std::span<const double> x);

/// V(q, g). +inf (flagged divergent) when q is too light-tailed for g^2 f^2.
QuadratureResult variance_functional(const Target& f, const LogDensityFn& log_q, const ScalarFn& g);

/// C(q) = integral of the sigma_q^2 field.
QuadratureResult criterion_c(const Target& f, const LogDensityFn& log_q);

/// Sum of normalized weights times g(X_k). Throws DegenerateCloudError on a zero-weight cloud.
double self_normalized_estimate(const ParticleCloud& cloud, const ScalarFn& g);

/// Squared Euclidean distance to the target's true mean. Throws UnsupportedError without one.
double mse_metric(std::span<const double> estimate, const Target& target);

struct CltCheckResult {
  double empirical_variance = 0.0;
  double oracle_variance = 0.0;
  /// (empirical - oracle) / (oracle sqrt(2 / (R - 1))).
  double z_score = 0.0;
  std::size_t replicates = 0;
  [[nodiscard]] double relative_error() const { return empirical_variance / oracle_variance - 1.0; }
};

/// Runs `statistic(seed_r)` for R replicates and compares its sample variance to `oracle`.
/** R >= 200 is enforced. Replicates run on `jobs` threads; the result does not depend on it. */
CltCheckResult clt_variance_check(const std::function<double(std::uint64_t)>& statistic, double oracle,
                                  std::size_t replicates, std::uint64_t seed, std::size_t jobs = 1);

/// Direct sampling from f (q = f).
struct DirectSampling {};
/// i.i.d. importance sampling from a fixed Gaussian-mixture proposal.
struct FixedProposal {
  Target proposal;
};
/// A full SAIS run; the budget is schedules.budget().
struct SaisSampler {
  Schedules schedules;
  SafeDensity q0;
  std::vector<double> mu_start;
};
using SamplerSpec = std::variant<DirectSampling, FixedProposal, SaisSampler>;

/// Variance of sqrt(n) (sum W_{n,k} g(X_k) - integral g f) for a d = 1 normalized target.
/**
 * The oracle is V(f, g) for direct sampling and SAIS, V(q, g) for a fixed
 * proposal q. `n` is ignored for SAIS (the schedules fix the budget).
 */
CltCheckResult clt_variance_check_integral(const Target& f, const SamplerSpec& method, const ScalarFn& g,
                                           std::size_t n, std::size_t replicates, std::uint64_t seed,
                                           std::size_t jobs = 1);

/// Variance of sqrt(n h) (f_n(x) - (f * K_h)(x)) for a d = 1 Gaussian-mixture target.
/**
 * f_n is the self-normalized weighted kernel estimate with bandwidth h. The
 * oracle is sigma_q^2(x) int K^2 for a fixed proposal q (q = f for direct
 * sampling) and f(x) int K^2 for SAIS.
 */
CltCheckResult clt_variance_check_kde(const Target& f, const SamplerSpec& method, double x, std::size_t n, double h,
                                      std::size_t replicates, std::uint64_t seed, std::size_t jobs = 1);

struct MartingaleCheckResult {
  double mean = 0.0;
  double sd = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  std::size_t replicates = 0;
};

/// Mean increment of S_n = sum (W_k g(X_k) - integral g f) under a fixed safe policy.
/**
 * Each replicate runs the SAIS driver with lambda = 1 and a frozen center, so
 * every W_k = f(X_k) / q0(X_k) uses the raw (unregularized) weights of a
 * normalized target. The per-replicate statistic S_n / n is tested against
 * zero with a two-sided t test.
 */
MartingaleCheckResult martingale_increment_check(const Target& f, const SafeDensity& q0, const ScalarFn& g,
                                                 std::size_t n, std::size_t replicates, std::uint64_t seed);

/// Evaluates fn(0..count-1) on `jobs` threads, results in index order.
std::vector<double> parallel_map(std::size_t count, std::size_t jobs, const std::function<double(std::size_t)>& fn);

}  // namespace sais

#endif  // SAIS_DIAGNOSTICS_HPP
