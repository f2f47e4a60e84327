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

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "sais/core.hpp"
#include "sais/diagnostics.hpp"
#include "sais/errors.hpp"
#include "sais/kde.hpp"
#include "sais/policy.hpp"
#include "sais/random.hpp"
#include "sais/targets.hpp"
#include "support.hpp"

using sais::ScheduleMode;
using sais::Schedules;

namespace {

// Multivariate Student t with shape s2 * I, evaluated independently of the library.
double student_pdf(const std::vector<double>& x, double nu, double s2) {
  const double d = static_cast<double>(x.size());
  double q = 0.0;
  for (double v : x) q += v * v / s2;
  return std::tgamma((nu + d) / 2.0) / (std::tgamma(nu / 2.0) * std::pow(nu * std::numbers::pi * s2, d / 2.0)) *
         std::pow(1.0 + q / nu, -(nu + d) / 2.0);
}

Schedules standard4() {
  Schedules s;
  s.d = 4;
  return s;
}

}  // namespace

TEST_CASE("safe density") {
  for (std::size_t d : {1u, 3u, 4u}) {
    const sais::SafeDensity q0(d);
    CHECK(q0.dof() == 3.0);
    CHECK(q0.covariance_scale() == doctest::Approx(5.0 / d).epsilon(1e-15));
    CHECK(q0.scale2() == doctest::Approx((1.0 / 3.0) * 5.0 / d).epsilon(1e-15));
    std::vector<double> x(d, 0.4);
    CHECK(std::exp(q0.log_density(x)) == doctest::Approx(student_pdf(x, 3.0, q0.scale2())).epsilon(1e-12));
    const auto shifted = q0.with_center(std::vector<double>(d, 1.0));
    std::vector<double> y(d, 1.4);
    CHECK(shifted.log_density(y) == doctest::Approx(q0.log_density(x)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(sais::SafeDensity(2, 2.0), sais::InputError);
  CHECK_THROWS_AS(sais::SafeDensity(2, 3.0, 0.0, {1.0}), sais::StructuralError);
}

TEST_CASE("safe density integrates to one in d = 1") {
  const sais::SafeDensity q0(1);
  const auto r = sais::integrate([&](std::span<const double> x) { return std::exp(q0.log_density(x)); },
                                 {{-1e4, 1e4}}, 1e-12);
  // Tail mass beyond 1e4 for nu = 3 is about 1e-11.
  CHECK(std::abs(r.value - 1.0) <= 1e-6);
}

TEST_CASE("safe density samples have covariance (5/d) I") {
  const std::size_t d = 2;
  const sais::SafeDensity q0(d, 5.0, 0.0, {1.0, -2.0});
  sais::Rng rng = sais::make_rng(31);
  const int n = 100000;
  double s0 = 0, s1 = 0, s00 = 0, s11 = 0, s01 = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(d);
    q0.sample(rng, x);
    const double a = x[0] - 1.0, b = x[1] + 2.0;
    s0 += a;
    s1 += b;
    s00 += a * a;
    s11 += b * b;
    s01 += a * b;
  }
  // dof 5 keeps the fourth moment finite: Var(X^2) = 3 sigma^4 (nu-2)/(nu-4) - sigma^4.
  const double sigma2 = 2.5;
  const double sd_var = std::sqrt((3.0 * 3.0 - 1.0) * sigma2 * sigma2 / n);
  CHECK(std::abs(s0 / n) <= 5.0 * std::sqrt(sigma2 / n));
  CHECK(std::abs(s00 / n - sigma2) <= 5.0 * sd_var);
  CHECK(std::abs(s11 / n - sigma2) <= 5.0 * sd_var);
  CHECK(std::abs(s01 / n) <= 5.0 * std::sqrt(3.0 * sigma2 * sigma2 / n));
}

TEST_CASE("bandwidth schedule") {
  auto s = standard4();
  CHECK(s.bandwidth(10) == doctest::Approx(0.2 * std::pow(2.0, -1.0 / 8.0)).epsilon(1e-14));
  CHECK(s.bandwidth(10) == doctest::Approx(0.1834008).epsilon(1e-7));
  for (std::size_t t = 2; t < s.T; ++t) CHECK(s.bandwidth(t) < s.bandwidth(t - 1));
  CHECK_THROWS_AS((void)s.bandwidth(0), sais::InputError);
  CHECK_THROWS_AS((void)s.bandwidth(s.T), sais::InputError);

  s.mode = ScheduleMode::subsampling;
  CHECK(s.bandwidth(10) == doctest::Approx(0.2 * std::pow(1.141, -1.0 / 8.0)).epsilon(1e-14));
  CHECK(s.bandwidth(10) == doctest::Approx(0.1967).epsilon(1e-4));
  for (std::size_t t = 2; t < s.T; ++t) CHECK(s.bandwidth(t) <= s.bandwidth(t - 1));

  s.fixed_bandwidth = 0.3;
  CHECK(s.bandwidth(7) == 0.3);
}

TEST_CASE("lambda schedule") {
  auto s = standard4();
  for (std::size_t t = 1; t <= 9; ++t) CHECK(s.lambda(t) == 1.0);
  for (std::size_t t = 10; t <= 19; ++t) CHECK(s.lambda(t) == 0.5);
  CHECK(s.lambda(5) == 1.0);
  CHECK(s.lambda(15) == 0.5);
  CHECK(s.lambda(20) == doctest::Approx(0.25 * std::pow(3.0, -1.0 / 8.0)).epsilon(1e-14));
  CHECK(s.lambda(20) == doctest::Approx(0.2179214).epsilon(1e-7));
  for (std::size_t t = 21; t < s.T; ++t) CHECK(s.lambda(t) < s.lambda(t - 1));
  CHECK_THROWS_AS((void)s.lambda(0), sais::InputError);

  s.mode = ScheduleMode::subsampling;
  const double l20 = s.subsample_size(20);
  CHECK(s.lambda(20) == doctest::Approx(0.25 * std::pow(1.0 + l20 / 1e4, -2.0 / 8.0)).epsilon(1e-14));
  for (std::size_t t = 21; t < s.T; ++t) CHECK(s.lambda(t) <= s.lambda(t - 1));

  s.fixed_lambda = 0.5;
  CHECK(s.lambda(3) == 0.5);
  CHECK(s.lambda(150) == 0.5);
}

TEST_CASE("subsample size schedule") {
  auto s = standard4();
  s.mode = ScheduleMode::subsampling;
  s.delta = 0.5;
  CHECK(s.subsample_size(10) == 1410);
  CHECK(s.subsample_size_formula(1) == 1040);
  CHECK(s.subsample_size(1) == 1000);
  s.delta = 0.25;
  CHECK(s.subsample_size(10) == 110);
  for (double delta : {0.25, 0.5}) {
    s.delta = delta;
    for (std::size_t t = 2; t < s.T; ++t) {
      CHECK(s.subsample_size(t) >= s.subsample_size(t - 1));
      CHECK(s.subsample_size(t) <= s.m * t);
    }
  }
  CHECK_THROWS_AS((void)s.subsample_size(0), sais::InputError);
}

TEST_CASE("schedule validation") {
  auto s = standard4();
  CHECK_NOTHROW(s.validate());
  CHECK(s.budget() == 200000);
  s.T0 = s.T;
  CHECK_THROWS_AS(s.validate(), sais::InputError);
  s = standard4();
  s.eta = 0.0;
  CHECK_THROWS_AS(s.validate(), sais::InputError);
  s = standard4();
  s.mode = ScheduleMode::subsampling;
  s.delta = 0.6;
  CHECK_THROWS_AS(s.validate(), sais::InputError);
  CHECK_THROWS_AS(Schedules::defaults(4, 150500), sais::InputError);
  const auto p = Schedules::defaults(4, 50000, ScheduleMode::subsampling, 0.25);
  CHECK(p.T == 50);
  CHECK(p.m == 1000);
  CHECK(p.T0 == 20);
  CHECK(p.eta == 0.75);
  CHECK(p.n0 == 1e4);
}

TEST_CASE("policy log density") {
  const sais::SafeDensity q0(1);
  SUBCASE("lambda 1 is the safe density") {
    const sais::PolicyState p(q0);
    const std::vector<double> x{0.7};
    CHECK(p.log_density(x) == q0.log_density(x));
    CHECK(p.kernel_count() == 0);
  }
  SUBCASE("single center at zero") {
    const std::vector<double> c{0.0};
    auto kde = std::make_shared<const sais::KdeMixture>(sais::KdeMixture::uniform(1, c));
    const sais::PolicyState p(0.5, 1.0, kde, q0);
    const std::vector<double> x{0.0};
    const double expected = std::log(0.5 / std::sqrt(2.0 * std::numbers::pi) + 0.5 * student_pdf({0.0}, 3.0, 5.0 / 3.0));
    CHECK(p.log_density(x) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(p.kernel_count() == 1);
    const std::vector<double> far{80.0};
    const double floor = std::log(0.5) + q0.log_density(far);
    CHECK(p.log_density(far) >= floor);
    CHECK(p.log_density(far) - floor < 1e-12);
  }
  SUBCASE("invalid states") {
    const std::vector<double> c{0.0};
    auto kde = std::make_shared<const sais::KdeMixture>(sais::KdeMixture::uniform(1, c));
    CHECK_THROWS_AS(sais::PolicyState(0.0, 1.0, kde, q0), sais::InputError);
    CHECK_THROWS_AS(sais::PolicyState(1.2, 1.0, kde, q0), sais::InputError);
    CHECK_THROWS_AS(sais::PolicyState(0.5, 0.0, kde, q0), sais::InputError);
    CHECK_THROWS_AS(sais::PolicyState(0.5, 1.0, nullptr, q0), sais::InputError);
  }
}

TEST_CASE("policy defensive bound and normalization") {
  sais::Rng rng = sais::make_rng(32);
  std::normal_distribution<double> normal;
  std::vector<double> c(50);
  for (auto& v : c) v = normal(rng);
  auto kde = std::make_shared<const sais::KdeMixture>(sais::KdeMixture::uniform(1, c));
  const sais::SafeDensity q0 = sais::SafeDensity(1).with_center({0.5});
  const sais::PolicyState p(0.3, 0.4, kde, q0);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{20.0 * normal(rng)};
    CHECK(std::exp(p.log_density(x)) >= 0.3 * std::exp(q0.log_density(x)) - 1e-15);
  }
  const auto r = sais::integrate([&](std::span<const double> x) { return std::exp(p.log_density(x)); },
                                 {{-1e4, 1e4}}, 1e-12);
  CHECK(std::abs(r.value - 1.0) <= 1e-6);
}

TEST_CASE("policy sampling") {
  SUBCASE("lambda 1 covariance") {
    const sais::SafeDensity q0(3, 6.0, 0.0, {1.0, 2.0, 3.0});
    const sais::PolicyState p(q0);
    sais::Rng rng = sais::make_rng(33);
    const int n = 100000;
    std::vector<double> s2(3, 0.0);
    for (int i = 0; i < n; ++i) {
      std::vector<double> x(3);
      p.sample(rng, x);
      for (int j = 0; j < 3; ++j) s2[j] += (x[j] - (j + 1.0)) * (x[j] - (j + 1.0));
    }
    // nu = 6: Var(X^2) = sigma^4 (3 (nu-2)/(nu-4) - 1).
    const double sigma2 = 5.0 / 3.0;
    for (double v : s2) CHECK(std::abs(v / n - sigma2) <= 5.0 * std::sqrt(5.0 * sigma2 * sigma2 / n));
  }
  SUBCASE("lambda 1/2 histogram") {
    const std::vector<double> c{-2.0, 1.0, 1.5};
    auto kde = std::make_shared<const sais::KdeMixture>(sais::KdeMixture::uniform(1, c));
    const sais::PolicyState p(0.5, 0.5, kde, sais::SafeDensity(1));
    sais::Rng rng = sais::make_rng(34);
    const int n = 100000, bins = 20;
    const double lo = -5.0, hi = 5.0;
    std::vector<double> obs(bins + 2, 0.0), expect(bins + 2, 0.0);
    for (int i = 0; i < n; ++i) {
      double x = 0.0;
      p.sample(rng, std::span(&x, 1));
      const int b = x < lo ? 0 : x >= hi ? bins + 1 : 1 + static_cast<int>((x - lo) / (hi - lo) * bins);
      obs[b] += 1.0;
    }
    auto mass = [&](double a, double b) {
      return sais::integrate([&](std::span<const double> x) { return std::exp(p.log_density(x)); }, {{a, b}}).value;
    };
    expect[0] = n * mass(-1e4, lo);
    expect[bins + 1] = n * mass(hi, 1e4);
    for (int b = 0; b < bins; ++b) expect[b + 1] = n * mass(lo + (hi - lo) * b / bins, lo + (hi - lo) * (b + 1) / bins);
    CHECK(sais::testing::chi_square_p(obs, expect) > 0.001);
  }
}

TEST_CASE("update center") {
  const sais::PolicyState p(sais::SafeDensity(1));
  auto cloud_of = [](std::vector<double> xs, std::vector<double> ws) {
    sais::ParticleCloud c(1);
    for (std::size_t i = 0; i < xs.size(); ++i) c.append(std::span(&xs[i], 1), std::log(ws[i]));
    return c;
  };
  CHECK(sais::update_center(p, cloud_of({-1.0, 1.0}, {1.0, 1.0})).state.safe().center()[0] == 0.0);
  CHECK(sais::update_center(p, cloud_of({0.0, 4.0}, {0.25, 0.75})).state.safe().center()[0] ==
        doctest::Approx(3.0).epsilon(1e-15));
  CHECK(sais::update_center(p, cloud_of({2.5}, {1.0})).state.safe().center()[0] == 2.5);

  const auto moved = sais::update_center(p, cloud_of({2.5}, {1.0})).state;
  const auto kept = sais::update_center(moved, cloud_of({7.0}, {0.0}));
  CHECK(kept.warning);
  CHECK(kept.state.safe().center()[0] == 2.5);
}

TEST_CASE("importance weights stay bounded by the safe floor") {
  const auto f = sais::gaussian_mixture_target(1);
  const std::vector<double> c{3.0};
  auto kde = std::make_shared<const sais::KdeMixture>(sais::KdeMixture::uniform(1, c));
  auto sup_ratio = [&](double lambda) {
    const sais::PolicyState p(lambda, 0.2, kde, sais::SafeDensity(1));
    double worst = 0.0;
    for (int i = -4000; i <= 4000; ++i) {
      const std::vector<double> x{0.005 * i};
      worst = std::max(worst, std::exp(f.log_density(x) - p.log_density(x)));
    }
    return worst;
  };
  const double r1 = sup_ratio(0.2);
  const double r2 = sup_ratio(0.1);
  CHECK(std::isfinite(r1));
  CHECK(std::isfinite(r2));
  const double c_bound = r1 * 0.2;
  CHECK(r2 <= 10.0 * c_bound / 0.1);
}
