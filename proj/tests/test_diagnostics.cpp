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
#include <numbers>
#include <vector>

#include "sais/core.hpp"
#include "sais/diagnostics.hpp"
#include "sais/errors.hpp"
#include "sais/kde.hpp"
#include "sais/policy.hpp"
#include "sais/targets.hpp"

namespace {

sais::LogDensityFn log_of(const sais::Target& q) { return q.log_density_unnorm; }

double identity(std::span<const double> x) { return x[0]; }
double one(std::span<const double>) { return 1.0; }

}  // namespace

TEST_CASE("self-normalized estimate") {
  sais::ParticleCloud c(1);
  const std::vector<double> xs{1.0, 2.0, 6.0};
  for (double x : xs) c.append(std::span(&x, 1), 0.7);
  CHECK(sais::self_normalized_estimate(c, identity) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(sais::self_normalized_estimate(c, [](auto) { return 2.5; }) == doctest::Approx(2.5).epsilon(1e-15));

  sais::ParticleCloud w(1);
  const double a = 0.0, b = 4.0;
  w.append(std::span(&a, 1), std::log(0.25));
  w.append(std::span(&b, 1), std::log(0.75));
  CHECK(sais::self_normalized_estimate(w, identity) == doctest::Approx(3.0).epsilon(1e-15));

  sais::ParticleCloud dead(1);
  dead.append(std::span(&a, 1), sais::kNegInf);
  CHECK_THROWS_AS(sais::self_normalized_estimate(dead, identity), sais::DegenerateCloudError);
}

TEST_CASE("quadrature accuracy on Gaussian integrands") {
  const auto f = sais::gaussian_target({0.3}, 0.7);
  const auto r = sais::integrate([&](auto x) { return std::exp(f.log_density(x)); }, f.box);
  CHECK(std::abs(r.value - 1.0) < 1e-10);
  CHECK(r.error / r.value < 1e-6);
  const auto g = sais::gaussian_target({0.3, -1.0}, 0.4);
  const auto r2 = sais::integrate([&](auto x) { return x[0] * x[1] * std::exp(g.log_density(x)); }, g.box);
  CHECK(r2.value == doctest::Approx(-0.3).epsilon(1e-9));
  CHECK_THROWS_AS(sais::integrate(one, {{0, 1}, {0, 1}, {0, 1}}), sais::UnsupportedError);
}

TEST_CASE("variance functional") {
  const auto f = sais::gaussian_target({0.0}, 1.0);
  CHECK(sais::variance_functional(f, log_of(f), identity).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(sais::variance_functional(f, log_of(f), one).value) <= 1e-8);
  const auto q2 = sais::gaussian_target({0.0}, 2.0);
  const double expected = 4.0 / (3.0 * std::sqrt(3.0));
  CHECK(expected == doctest::Approx(0.76980).epsilon(1e-5));
  CHECK(sais::variance_functional(f, log_of(q2), identity).value == doctest::Approx(expected).epsilon(1e-9));

  const auto light = sais::gaussian_target({0.0}, 0.49);
  const auto v = sais::variance_functional(f, log_of(light), identity);
  CHECK(v.divergent);
  CHECK(std::isinf(v.value));

  for (std::size_t d : {1u, 2u}) {
    const auto m = sais::gaussian_mixture_target(d);
    CHECK(std::abs(sais::variance_functional(m, log_of(m), one).value) <= 1e-8);
  }
  CHECK_THROWS_AS(sais::variance_functional(sais::banana_target(2), log_of(f), one), sais::UnsupportedError);
  CHECK_THROWS_AS(sais::variance_functional(sais::gaussian_mixture_target(3), log_of(f), one), sais::UnsupportedError);
}

TEST_CASE("criterion C") {
  const auto f = sais::gaussian_target({0.0}, 1.0);
  CHECK(std::abs(sais::criterion_c(f, log_of(f)).value - 1.0) <= 1e-6);
  const auto q2 = sais::gaussian_target({0.0}, 2.0);
  const double c2 = sais::criterion_c(f, log_of(q2)).value;
  CHECK(c2 == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));
  CHECK(c2 == doctest::Approx(1.15470).epsilon(1e-5));
  const auto light = sais::criterion_c(f, log_of(sais::gaussian_target({0.0}, 0.49)));
  CHECK(light.value > 1.0);
  CHECK(light.value > c2);

  const auto s2 = sais::integrate_whole_space(
      [&](auto x) { return sais::sigma_q2(f, log_of(q2), x); }, f.box);
  CHECK(std::abs(s2.value - c2) <= 1e-10);

  const auto m = sais::gaussian_mixture_target(2);
  CHECK(std::abs(sais::criterion_c(m, log_of(m)).value - 1.0) <= 1e-6);
  const sais::SafeDensity q0(2);
  CHECK(sais::criterion_c(m, [&](auto x) { return q0.log_density(x); }).value > 1.0);
}

TEST_CASE("criterion C is uniquely minimized at q = f") {
  const auto f = sais::gaussian_target({0.0}, 1.0);
  double best = std::numeric_limits<double>::infinity();
  int best_i = -1;
  for (int i = 7; i <= 20; ++i) {
    const double sigma = 0.1 * i;
    const double c = sais::criterion_c(f, log_of(sais::gaussian_target({0.0}, sigma * sigma))).value;
    CHECK(c >= 1.0 - 1e-6);
    if (i != 10) CHECK(c > 1.0 + 1e-4);
    if (c < best) {
      best = c;
      best_i = i;
    }
  }
  CHECK(best_i == 10);
  CHECK(std::abs(best - 1.0) <= 1e-6);
}

TEST_CASE("sigma_q2 conventions") {
  const auto f = sais::gaussian_target({0.0}, 1.0);
  sais::Target zero_f = f;
  zero_f.log_density_unnorm = [](auto) { return sais::kNegInf; };
  const std::vector<double> x{0.0};
  CHECK(sais::sigma_q2(zero_f, log_of(f), x) == 0.0);
  CHECK(std::isinf(sais::sigma_q2(f, [](auto) { return sais::kNegInf; }, x)));
  CHECK(sais::sigma_q2(f, log_of(sais::gaussian_target({0.0}, 2.0)), x) ==
        doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("mse metric") {
  const auto f = sais::cold_start_target(4);
  CHECK(sais::mse_metric(*f.true_mean, f) == 0.0);
  auto off = *f.true_mean;
  off[0] += 1.0;
  CHECK(sais::mse_metric(off, f) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sais::mse_metric(std::vector<double>(4, 0.0), f) == doctest::Approx(25.0).epsilon(1e-13));
  CHECK_THROWS_AS(sais::mse_metric(std::vector<double>(2, 0.0), sais::banana_target(2)), sais::UnsupportedError);
  CHECK_THROWS_AS(sais::mse_metric(std::vector<double>(3, 0.0), f), sais::StructuralError);
}

TEST_CASE("CLT check for integrals under fixed policies") {
  const auto f = sais::gaussian_target({0.0}, 1.0);
  SUBCASE("direct sampling") {
    const auto r = sais::clt_variance_check_integral(f, sais::DirectSampling{}, identity, 2000, 500, 301);
    CHECK(r.oracle_variance == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(r.z_score) <= 3.0);
  }
  SUBCASE("fixed Gaussian proposal") {
    const auto r = sais::clt_variance_check_integral(
        f, sais::FixedProposal{sais::gaussian_target({0.0}, 2.0)}, identity, 2000, 500, 302, 2);
    CHECK(r.oracle_variance == doctest::Approx(0.76980).epsilon(1e-5));
    CHECK(std::abs(r.z_score) <= 3.0);
  }
  CHECK_THROWS_AS(sais::clt_variance_check_integral(f, sais::DirectSampling{}, identity, 100, 199, 1),
                  sais::InputError);
}

TEST_CASE("CLT check for the kernel estimate under fixed policies") {
  const auto f = sais::gaussian_target({0.0}, 1.0);
  const auto q = sais::FixedProposal{sais::gaussian_target({0.0}, 2.0)};
  const std::size_t n = 100000;
  const auto r1 = sais::clt_variance_check_kde(f, q, 0.0, n, 0.02, 300, 303);
  CHECK(r1.oracle_variance == doctest::Approx(0.159155).epsilon(1e-6));
  CHECK(std::abs(r1.z_score) <= 3.0);
  const auto r2 = sais::clt_variance_check_kde(f, q, 0.0, n, 0.04, 300, 304);
  CHECK(r2.oracle_variance == r1.oracle_variance);
  CHECK(std::abs(r2.z_score) <= 3.0);
  const auto direct = sais::clt_variance_check_kde(f, sais::DirectSampling{}, 0.0, n, 0.02, 300, 305);
  CHECK(direct.oracle_variance == doctest::Approx(0.112540).epsilon(1e-5));
  CHECK(std::abs(direct.z_score) <= 3.0);
}

TEST_CASE("martingale increments have mean zero") {
  const auto f = sais::gaussian_target({0.0}, 1.0);
  const auto r = sais::martingale_increment_check(f, sais::SafeDensity(1), identity, 200, 1000, 306);
  CHECK(r.replicates == 1000);
  CHECK(r.p_value > 0.001);
}

TEST_CASE("parallel map keeps index order and propagates failures") {
  const auto v = sais::parallel_map(100, 4, [](std::size_t i) { return 2.0 * static_cast<double>(i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == 2.0 * static_cast<double>(i));
  CHECK_THROWS_AS(sais::parallel_map(10, 3,
                                     [](std::size_t i) -> double {
                                       if (i == 7) throw sais::InputError("boom");
                                       return 0.0;
                                     }),
                  sais::InputError);
}
