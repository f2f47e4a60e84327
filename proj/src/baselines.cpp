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

#include "sais/baselines.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "sais/errors.hpp"
#include "sais/random.hpp"

namespace sais {

std::vector<double> Chain::mean(std::size_t discard) const {
  if (discard >= size()) throw InputError("cannot discard the whole chain");
  std::vector<double> m(dim, 0.0);
  for (std::size_t i = discard; i < size(); ++i) {
    const auto x = state(i);
    for (std::size_t j = 0; j < dim; ++j) m[j] += x[j];
  }
  for (double& v : m) v /= static_cast<double>(size() - discard);
  return m;
}

RunningCovariance::RunningCovariance(std::size_t dim) : dim_(dim), mean_(dim, 0.0), m2_(dim * dim, 0.0) {}

void RunningCovariance::push(std::span<const double> x) {
  ++n_;
  std::vector<double> delta(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    delta[j] = x[j] - mean_[j];
    mean_[j] += delta[j] / static_cast<double>(n_);
  }
  for (std::size_t a = 0; a < dim_; ++a) {
    const double after = x[a] - mean_[a];
    for (std::size_t b = 0; b < dim_; ++b) m2_[a * dim_ + b] += after * delta[b];
  }
}

std::vector<double> RunningCovariance::covariance() const {
  std::vector<double> c(m2_);
  const double denom = n_ > 1 ? static_cast<double>(n_ - 1) : 1.0;
  for (double& v : c) v /= denom;
  // Symmetrize the rounding residue of the asymmetric update.
  for (std::size_t a = 0; a < dim_; ++a) {
    for (std::size_t b = a + 1; b < dim_; ++b) {
      const double s = 0.5 * (c[a * dim_ + b] + c[b * dim_ + a]);
      c[a * dim_ + b] = s;
      c[b * dim_ + a] = s;
    }
  }
  return c;
}

namespace {

Chain mh_chain(const Target& target, std::size_t n, std::span<const double> x0, std::uint64_t seed,
               std::span<const double> rw_variances, std::size_t adapt_start, double scale, double epsilon) {
  const std::size_t d = target.dim;
  if (x0.size() != d) throw StructuralError("chain start has the wrong dimension");
  if (n == 0) throw InputError("chain length must be at least 1");
  if (rw_variances.size() != d) throw StructuralError("proposal variances have the wrong dimension");
  for (double v : rw_variances) {
    if (!(v > 0.0)) throw InputError("proposal variances must be positive");
  }
  std::vector<double> x(x0.begin(), x0.end());
  double log_fx = target.log_density(x);
  if (!(log_fx > -std::numeric_limits<double>::infinity()) || std::isnan(log_fx)) {
    throw InputError("invalid chain start: target density is zero at x0");
  }

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  RunningCovariance running(d);
  running.push(x);

  Chain chain;
  chain.dim = d;
  chain.states.reserve(n * d);
  std::vector<double> z(d);
  std::vector<double> y(d);
  Eigen::MatrixXd chol;
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : z) v = normal(rng);
    if (i >= adapt_start) {
      const auto c = running.covariance();
      Eigen::MatrixXd cov = Eigen::Map<const Eigen::MatrixXd>(c.data(), static_cast<Eigen::Index>(d),
                                                              static_cast<Eigen::Index>(d));
      cov *= scale;
      cov.diagonal().array() += epsilon;
      chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
      const Eigen::VectorXd step = chol * Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(d));
      for (std::size_t j = 0; j < d; ++j) y[j] = x[j] + step[static_cast<Eigen::Index>(j)];
    } else {
      for (std::size_t j = 0; j < d; ++j) y[j] = x[j] + std::sqrt(rw_variances[j]) * z[j];
    }
    const double log_fy = target.log_density(y);
    const double u = uniform(rng);
    if (std::isnan(log_fy)) throw InputError("target log density is NaN at a proposed point");
    if (log_fy - log_fx >= 0.0 || std::log(u) < log_fy - log_fx) {
      x = y;
      log_fx = log_fy;
      ++chain.accepted;
    }
    chain.states.insert(chain.states.end(), x.begin(), x.end());
    running.push(x);
  }
  return chain;
}

}  // namespace

Chain run_rwmh(const Target& target, std::size_t n, std::span<const double> x0,
               std::span<const double> proposal_variances, std::uint64_t seed) {
  return mh_chain(target, n, x0, seed, proposal_variances, std::numeric_limits<std::size_t>::max(), 1.0, 0.0);
}

Chain run_amh(const Target& target, std::size_t n, std::span<const double> x0, std::uint64_t seed,
              const AmhOptions& options) {
  if (options.adapt_start < 2) throw InputError("adapt_start must be at least 2");
  const double d = static_cast<double>(target.dim);
  std::vector<double> rw = options.initial_variances;
  if (rw.empty()) rw.assign(target.dim, 0.4 / d);
  const double scale = options.scale > 0.0 ? options.scale : 2.38 * 2.38 / d;
  return mh_chain(target, n, x0, seed, rw, options.adapt_start, scale, options.epsilon);
}

}  // namespace sais
