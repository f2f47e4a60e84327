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

#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "sais/bench.hpp"
#include "sais/core.hpp"
#include "sais/diagnostics.hpp"
#include "sais/kde.hpp"
#include "sais/resample.hpp"
#include "sais/sais.hpp"
#include "sais/targets.hpp"

namespace {

bool check_normalization() {
  std::vector<double> lw;
  for (int i = 0; i < 1000; ++i) lw.push_back(-700.0 + 1.4 * i);
  const auto w = sais::normalized_weights(lw);
  double s = 0.0;
  for (double x : w) s += x;
  return std::abs(s - 1.0) <= 1e-12;
}

bool check_scale_invariance() {
  sais::Schedules s;
  s.d = 2;
  s.T = 6;
  s.m = 200;
  s.T0 = 0;
  s.eta = 1.0;
  const sais::SafeDensity q0(2);
  const std::vector<double> mu{0.3, -0.2};
  const auto f = sais::gaussian_mixture_target(2);
  const auto a = sais::run_sais(f, s, q0, mu, 7).estimate();
  const auto b = sais::run_sais(sais::with_log_offset(f, 50.0), s, q0, mu, 7).estimate();
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a[j] - b[j]) > 1e-9) return false;
  }
  return true;
}

bool check_kde_mass() {
  const std::vector<double> pos{-1.0, 0.2, 0.5, 2.0};
  const std::vector<double> w{0.1, 0.4, 0.3, 0.2};
  const double h = 0.3;
  const auto r = sais::integrate(
      [&](std::span<const double> x) { return std::exp(sais::kde_log_density(1, pos, w, h, x)); }, {{-10.0, 12.0}});
  return std::abs(r.value - 1.0) <= 1e-6;
}

bool check_search_bound() {
  sais::ParticleCloud cloud(1);
  sais::Rng rng = sais::make_rng(11);
  std::normal_distribution<double> normal;
  const std::size_t n = 5000;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = normal(rng);
    cloud.append(std::span(&x, 1), normal(rng));
  }
  std::uint64_t comparisons = 0;
  const std::size_t draws = 2000;
  (void)sais::multinomial_draw(cloud, draws, rng, &comparisons);
  const auto bound = static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
  return comparisons <= draws * bound;
}

bool check_cell_determinism() {
  sais::ExperimentConfig c;
  c.d = 2;
  c.m = 100;
  c.T0 = 2;
  const auto a = sais::run_cell(c, "sais-sub2", 1000, 3);
  const auto b = sais::run_cell(c, "sais-sub2", 1000, 3);
  return a.error.empty() && a.sq_error == b.sq_error && a.op_count == b.op_count && a.seed == b.seed;
}

}  // namespace

int run_selftest() {
  const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"weight normalization", check_normalization},
      {"target scale invariance", check_scale_invariance},
      {"kernel estimate integrates to one", check_kde_mass},
      {"binary search comparison bound", check_search_bound},
      {"cell determinism", check_cell_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      std::cout << "  error: " << e.what() << '\n';
    }
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
