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

#include "sais/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "sais/errors.hpp"
#include "sais/kde.hpp"
#include "sais/random.hpp"
#include "sais/sais.hpp"

namespace sais {

namespace {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
constexpr unsigned kMaxDepth = 20;
constexpr double kInf = std::numeric_limits<double>::infinity();

double integral_of_g_f(const Target& f, const ScalarFn& g) {
  const auto r = integrate_whole_space(
      [&](std::span<const double> x) {
        const double lf = f.log_density(x);
        return lf == kNegInf ? 0.0 : g(x) * std::exp(lf);
      },
      f.box);
  return r.value;
}

void require_normalized(const Target& f) {
  if (!f.normalized) throw UnsupportedError("variance functionals need a normalized target, got '" + f.name + "'");
  if (f.dim == 0 || f.dim > 2) throw UnsupportedError("quadrature supports d <= 2 only");
}

double sample_variance(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

// i.i.d. weighted sample from q for target f; returns positions and normalized weights.
struct WeightedSample {
  std::vector<double> positions;
  std::vector<double> weights;
};

WeightedSample iid_weighted_sample(const Target& f, const GaussianMixture& q, std::size_t n, Rng& rng) {
  const std::size_t d = f.dim;
  WeightedSample s;
  s.positions.resize(n * d);
  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = std::span(s.positions).subspan(i * d, d);
    q.sample(rng, x);
    lw[i] = f.log_density(x) - q.log_density(x);
  }
  s.weights = normalized_weights(lw);
  return s;
}

const GaussianMixture& proposal_of(const Target& f, const SamplerSpec& method) {
  if (std::holds_alternative<FixedProposal>(method)) {
    const auto& q = std::get<FixedProposal>(method).proposal;
    if (!q.mixture) throw UnsupportedError("fixed proposals must be Gaussian mixtures");
    if (q.dim != f.dim) throw StructuralError("proposal and target disagree on dimension");
    return *q.mixture;
  }
  if (!f.mixture) throw UnsupportedError("direct sampling needs a Gaussian-mixture target");
  return *f.mixture;
}

}  // namespace

QuadratureResult integrate(const ScalarFn& integrand, const Box& box, double tolerance) {
  QuadratureResult r;
  if (box.size() == 1) {
    auto fn = [&](double x) {
      const std::array<double, 1> p{x};
      return integrand(p);
    };
    r.value = Quadrature::integrate(fn, box[0].first, box[0].second, kMaxDepth, tolerance, &r.error);
    return r;
  }
  if (box.size() == 2) {
    double inner_err = 0.0;
    auto outer = [&](double x) {
      auto inner = [&](double y) {
        const std::array<double, 2> p{x, y};
        return integrand(p);
      };
      double e = 0.0;
      const double v = Quadrature::integrate(inner, box[1].first, box[1].second, kMaxDepth, tolerance, &e);
      inner_err = std::max(inner_err, e);
      return v;
    };
    r.value = Quadrature::integrate(outer, box[0].first, box[0].second, kMaxDepth, tolerance, &r.error);
    r.error += inner_err * (box[0].second - box[0].first);
    return r;
  }
  throw UnsupportedError("quadrature supports dimension 1 or 2, got " + std::to_string(box.size()));
}

QuadratureResult integrate_whole_space(const ScalarFn& integrand, const Box& box, double tolerance) {
  Box current = box;
  QuadratureResult prev = integrate(integrand, current, tolerance);
  for (int grow = 0; grow < 4; ++grow) {
    for (auto& [lo, hi] : current) {
      const double mid = 0.5 * (lo + hi);
      const double half = 0.75 * (hi - lo);
      lo = mid - half;
      hi = mid + half;
    }
    QuadratureResult next = integrate(integrand, current, tolerance);
    if (std::abs(next.value - prev.value) <= 1e-9 * std::abs(next.value) + 1e-300) return next;
    prev = next;
  }
  return {kInf, kInf, true};
}

double sigma_q2(const Target& f, const LogDensityFn& log_q, std::span<const double> x) {
  const double lf = f.log_density(x);
  if (lf == kNegInf) return 0.0;
  const double lq = log_q(x);
  if (lq == kNegInf) return kInf;
  return std::exp(2.0 * lf - lq);
}

QuadratureResult variance_functional(const Target& f, const LogDensityFn& log_q, const ScalarFn& g) {
  require_normalized(f);
  auto second = integrate_whole_space(
      [&](std::span<const double> x) {
        const double s = sigma_q2(f, log_q, x);
        if (s == 0.0) return 0.0;
        const double gv = g(x);
        return gv * gv * s;
      },
      f.box);
  if (second.divergent || !std::isfinite(second.value)) return {kInf, kInf, true};
  const double mean = integral_of_g_f(f, g);
  return {second.value - mean * mean, second.error, false};
}

QuadratureResult criterion_c(const Target& f, const LogDensityFn& log_q) {
  require_normalized(f);
  auto r = integrate_whole_space([&](std::span<const double> x) { return sigma_q2(f, log_q, x); }, f.box);
  if (!std::isfinite(r.value)) return {kInf, kInf, true};
  return r;
}

double self_normalized_estimate(const ParticleCloud& cloud, const ScalarFn& g) {
  const auto w = normalized_weights(cloud);
  double s = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (w[i] != 0.0) s += w[i] * g(cloud.position(i));
  }
  return s;
}

double mse_metric(std::span<const double> estimate, const Target& target) {
  if (!target.true_mean) throw UnsupportedError("target '" + target.name + "' has no known mean");
  const auto& mu = *target.true_mean;
  if (estimate.size() != mu.size()) throw StructuralError("estimate has the wrong dimension");
  double s = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) s += (estimate[j] - mu[j]) * (estimate[j] - mu[j]);
  return s;
}

std::vector<double> parallel_map(std::size_t count, std::size_t jobs, const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(count);
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += jobs) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

CltCheckResult clt_variance_check(const std::function<double(std::uint64_t)>& statistic, double oracle,
                                  std::size_t replicates, std::uint64_t seed, std::size_t jobs) {
  if (replicates < 200) throw InputError("CLT variance checks need at least 200 replicates");
  if (!(oracle > 0.0) || !std::isfinite(oracle)) throw InputError("oracle variance must be positive and finite");
  const auto values = parallel_map(replicates, jobs, [&](std::size_t r) { return statistic(derive_seed(seed, r)); });
  CltCheckResult out;
  out.replicates = replicates;
  out.oracle_variance = oracle;
  out.empirical_variance = sample_variance(values);
  out.z_score = (out.empirical_variance - oracle) / (oracle * std::sqrt(2.0 / static_cast<double>(replicates - 1)));
  return out;
}

CltCheckResult clt_variance_check_integral(const Target& f, const SamplerSpec& method, const ScalarFn& g,
                                           std::size_t n, std::size_t replicates, std::uint64_t seed,
                                           std::size_t jobs) {
  require_normalized(f);
  const double truth = integral_of_g_f(f, g);
  const LogDensityFn log_f = f.log_density_unnorm;

  if (const auto* sais = std::get_if<SaisSampler>(&method)) {
    const double oracle = variance_functional(f, log_f, g).value;
    const double budget = static_cast<double>(sais->schedules.budget());
    return clt_variance_check(
        [&](std::uint64_t s) {
          const auto run = run_sais(f, sais->schedules, sais->q0, sais->mu_start, s);
          return std::sqrt(budget) * (self_normalized_estimate(run.cloud, g) - truth);
        },
        oracle, replicates, seed, jobs);
  }

  if (n == 0) throw InputError("sample size must be positive");
  const GaussianMixture& q = proposal_of(f, method);
  const LogDensityFn log_q = [&q](std::span<const double> x) { return q.log_density(x); };
  const double oracle = variance_functional(f, log_q, g).value;
  const std::size_t d = f.dim;
  return clt_variance_check(
      [&](std::uint64_t s) {
        Rng rng = make_rng(s);
        const auto sample = iid_weighted_sample(f, q, n, rng);
        double est = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          est += sample.weights[i] * g(std::span<const double>(sample.positions).subspan(i * d, d));
        }
        return std::sqrt(static_cast<double>(n)) * (est - truth);
      },
      oracle, replicates, seed, jobs);
}

CltCheckResult clt_variance_check_kde(const Target& f, const SamplerSpec& method, double x, std::size_t n, double h,
                                      std::size_t replicates, std::uint64_t seed, std::size_t jobs) {
  if (f.dim != 1) throw UnsupportedError("kernel CLT checks are one-dimensional");
  if (!(h > 0.0)) throw InputError("bandwidth must be positive");
  const Target smoothed = smoothed_reference(f, h);
  const std::array<double, 1> point{x};
  const double reference = std::exp(smoothed.log_density(point));
  const double k2 = GaussianKernel::sq_integral(1);

  if (const auto* sais = std::get_if<SaisSampler>(&method)) {
    const double budget = static_cast<double>(sais->schedules.budget());
    const double oracle = std::exp(f.log_density(point)) * k2;
    return clt_variance_check(
        [&](std::uint64_t s) {
          const auto run = run_sais(f, sais->schedules, sais->q0, sais->mu_start, s);
          const double fn = std::exp(KdeMixture::from_cloud(run.cloud).log_density(point, h));
          return std::sqrt(budget * h) * (fn - reference);
        },
        oracle, replicates, seed, jobs);
  }

  if (n == 0) throw InputError("sample size must be positive");
  const GaussianMixture& q = proposal_of(f, method);
  const LogDensityFn log_q = [&q](std::span<const double> p) { return q.log_density(p); };
  const double oracle = sigma_q2(f, log_q, point) * k2;
  return clt_variance_check(
      [&](std::uint64_t s) {
        Rng rng = make_rng(s);
        const auto sample = iid_weighted_sample(f, q, n, rng);
        const double fn = std::exp(KdeMixture(1, sample.positions, sample.weights).log_density(point, h));
        return std::sqrt(static_cast<double>(n) * h) * (fn - reference);
      },
      oracle, replicates, seed, jobs);
}

MartingaleCheckResult martingale_increment_check(const Target& f, const SafeDensity& q0, const ScalarFn& g,
                                                 std::size_t n, std::size_t replicates, std::uint64_t seed) {
  require_normalized(f);
  if (replicates < 2 || n == 0) throw InputError("martingale check needs n >= 1 and at least two replicates");
  const double truth = integral_of_g_f(f, g);
  Schedules s;
  s.d = f.dim;
  s.T = 1;
  s.m = n;
  s.T0 = 0;
  s.eta = 1.0;
  s.fixed_lambda = 1.0;
  SaisOptions options;
  options.update_center = false;

  std::vector<double> increments(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto run = run_standard_sais(f, s, q0, q0.center(), derive_seed(seed, r), options);
    double sum = 0.0;
    for (std::size_t k = 0; k < run.cloud.size(); ++k) {
      sum += std::exp(run.raw_log_weights[k]) * g(run.cloud.position(k)) - truth;
    }
    increments[r] = sum / static_cast<double>(n);
  }
  MartingaleCheckResult out;
  out.replicates = replicates;
  for (double v : increments) out.mean += v;
  out.mean /= static_cast<double>(replicates);
  out.sd = std::sqrt(sample_variance(increments));
  out.t_statistic = out.mean / (out.sd / std::sqrt(static_cast<double>(replicates)));
  const boost::math::students_t dist(static_cast<double>(replicates - 1));
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t_statistic)));
  return out;
}

}  // namespace sais
