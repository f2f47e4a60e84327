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

#include "sais/sais.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>
#include <thread>

#include "sais/errors.hpp"
#include "sais/random.hpp"
#include "sais/resample.hpp"

namespace sais {

namespace {

// Substream keys; stage t uses kDrawStream + t and kBootstrapStream + t.
constexpr std::uint64_t kDrawStream = 0;
constexpr std::uint64_t kBootstrapStream = 1ULL << 32;

std::string digest(const Schedules& s, const SafeDensity& q0, std::span<const double> mu_start,
                   const SaisOptions& options) {
  std::ostringstream os;
  os.precision(17);
  os << "mode=" << (s.mode == ScheduleMode::standard ? "standard" : "subsampling") << ";d=" << s.d << ";T=" << s.T
     << ";m=" << s.m << ";n0=" << s.n0 << ";T0=" << s.T0 << ";eta=" << s.eta << ";delta=" << s.delta
     << ";lambda_scale=" << s.lambda_scale << ";bandwidth_scale=" << s.bandwidth_scale
     << ";fixed_lambda=" << (s.fixed_lambda ? *s.fixed_lambda : -1.0)
     << ";fixed_bandwidth=" << (s.fixed_bandwidth ? *s.fixed_bandwidth : -1.0) << ";dof=" << q0.dof()
     << ";cov=" << q0.covariance_scale() << ";update_center=" << options.update_center << ";mu_start=";
  for (double v : mu_start) os << v << ',';
  std::ostringstream hex;
  hex << std::hex << hash_name(os.str());
  return hex.str();
}

// Evaluates log q over a batch of row-major points, optionally split over threads.
void evaluate_policy(const PolicyState& policy, std::span<const double> points, std::size_t dim,
                     std::span<double> out, std::size_t threads) {
  const std::size_t n = out.size();
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = policy.log_density(points.subspan(i * dim, dim));
  };
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    work(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  for (auto& th : pool) th.join();
}

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x[j];
  os << ')';
  return os.str();
}

RunResult run(const Target& target, const Schedules& s, const SafeDensity& q0, std::span<const double> mu_start,
              std::uint64_t seed, const SaisOptions& options) {
  s.validate();
  const std::size_t dim = target.dim;
  if (s.d != dim) throw StructuralError("schedule dimension does not match the target");
  if (q0.dim() != dim) throw StructuralError("safe density dimension does not match the target");
  if (mu_start.size() != dim) throw StructuralError("mu_start dimension does not match the target");
  const bool subsampling = s.mode == ScheduleMode::subsampling;

  RunResult result{ParticleCloud(dim), {}, {}, {}, {}, seed, digest(s, q0, mu_start, options), 0};
  result.raw_log_weights.reserve(s.budget());
  std::vector<double> center(mu_start.begin(), mu_start.end());
  PolicyState policy(q0.with_center(center));
  std::optional<std::size_t> support_size;
  std::uint64_t ops = 0;

  std::vector<double> points(s.m * dim);
  std::vector<double> log_q(s.m);
  for (std::size_t t = 0; t < s.T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = make_rng(seed, kDrawStream + t);
    for (std::size_t i = 0; i < s.m; ++i) policy.sample(rng, std::span(points).subspan(i * dim, dim));
    evaluate_policy(policy, points, dim, log_q, options.threads);
    ops += static_cast<std::uint64_t>(s.m) * policy.kernel_count();

    const bool regularize = t <= s.T0;
    for (std::size_t i = 0; i < s.m; ++i) {
      const auto x = std::span<const double>(points).subspan(i * dim, dim);
      const double log_f = target.log_density(x);
      if (std::isnan(log_f) || log_f == std::numeric_limits<double>::infinity()) {
        throw InputError("target log density is not finite at " + format_point(x));
      }
      const double raw = log_f - log_q[i];
      result.raw_log_weights.push_back(raw);
      result.cloud.append(x, regularize ? s.eta * raw : raw);
    }
    if (regularize) result.burn_in_particles = result.cloud.size();

    StageRecord rec;
    rec.t = t;
    rec.lambda = policy.lambda();
    rec.bandwidth = t > 0 ? policy.bandwidth() : 0.0;
    rec.subsample_size = support_size;
    rec.center = policy.safe().center();
    rec.ess = effective_sample_size(result.cloud);
    result.estimate_trace.push_back(weighted_mean(result.cloud));

    if (t + 1 < s.T) {
      const std::size_t next = t + 1;
      if (options.update_center) center = result.estimate_trace.back();
      const double lambda = s.lambda(next);
      const double h = s.bandwidth(next);
      std::shared_ptr<const KdeMixture> kde;
      support_size.reset();
      if (subsampling && lambda < 1.0) {
        const std::size_t l = s.subsample_size(next);
        Rng boot = make_rng(seed, kBootstrapStream + next);
        kde = std::make_shared<const KdeMixture>(bootstrap_kde_support(result.cloud, l, boot, &ops));
        support_size = l;
      } else if (lambda < 1.0) {
        kde = std::make_shared<const KdeMixture>(KdeMixture::from_cloud(result.cloud));
      }
      policy = PolicyState(lambda, h, std::move(kde), q0.with_center(center));
    }
    rec.op_count = ops;
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.stages.push_back(std::move(rec));
  }
  return result;
}

}  // namespace

std::vector<double> RunResult::estimate(bool exclude_burn_in) const {
  if (!exclude_burn_in || burn_in_particles == 0) return weighted_mean(cloud);
  const auto lw = cloud.log_weights().subspan(burn_in_particles);
  const auto w = normalized_weights(lw);
  std::vector<double> mean(cloud.dim(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto x = cloud.position(burn_in_particles + i);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += w[i] * x[j];
  }
  return mean;
}

RunResult run_standard_sais(const Target& target, const Schedules& schedules, const SafeDensity& q0,
                            std::span<const double> mu_start, std::uint64_t seed, const SaisOptions& options) {
  if (schedules.mode != ScheduleMode::standard) throw InputError("standard SAIS needs standard-mode schedules");
  return run(target, schedules, q0, mu_start, seed, options);
}

RunResult run_subsampling_sais(const Target& target, const Schedules& schedules, const SafeDensity& q0,
                               std::span<const double> mu_start, std::uint64_t seed, const SaisOptions& options) {
  if (schedules.mode != ScheduleMode::subsampling) {
    throw InputError("subsampling SAIS needs subsampling-mode schedules");
  }
  return run(target, schedules, q0, mu_start, seed, options);
}

RunResult run_sais(const Target& target, const Schedules& schedules, const SafeDensity& q0,
                   std::span<const double> mu_start, std::uint64_t seed, const SaisOptions& options) {
  return run(target, schedules, q0, mu_start, seed, options);
}

}  // namespace sais
