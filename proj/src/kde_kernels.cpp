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

// Built with relaxed floating point (see src/CMakeLists.txt). Nothing here may
// see an infinity or NaN: callers pass finite log weights and positions.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "sais/kde.hpp"

namespace sais::detail {

namespace {

template <std::size_t D>
double kernel_sum_fixed(const double* const* coords, const double* lw, std::size_t n, const double* x,
                        double inv_two_h2, double shift) {
  std::array<double, D> xs{};
  std::array<const double*, D> cs{};
  for (std::size_t j = 0; j < D; ++j) {
    xs[j] = x[j];
    cs[j] = coords[j];
  }
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double r = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
      const double u = xs[j] - cs[j][k];
      r += u * u;
    }
    s += std::exp(lw[k] - shift - inv_two_h2 * r);
  }
  return s;
}

double kernel_sum_any(const double* const* coords, const double* lw, std::size_t n, std::size_t d, const double* x,
                      double inv_two_h2, double shift) {
  thread_local std::vector<double> buf;
  buf.resize(n);
  double* r = buf.data();
  for (std::size_t k = 0; k < n; ++k) r[k] = lw[k] - shift;
  for (std::size_t j = 0; j < d; ++j) {
    const double xj = x[j];
    const double* c = coords[j];
    for (std::size_t k = 0; k < n; ++k) {
      const double u = xj - c[k];
      r[k] -= inv_two_h2 * u * u;
    }
  }
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::exp(r[k]);
  return s;
}

}  // namespace

double kernel_sum(std::span<const double* const> coords, std::span<const double> log_weights,
                  std::span<const double> x, double inv_two_h2, double shift) {
  const double* const* c = coords.data();
  const double* lw = log_weights.data();
  const std::size_t n = log_weights.size();
  switch (coords.size()) {
    case 1: return kernel_sum_fixed<1>(c, lw, n, x.data(), inv_two_h2, shift);
    case 2: return kernel_sum_fixed<2>(c, lw, n, x.data(), inv_two_h2, shift);
    case 3: return kernel_sum_fixed<3>(c, lw, n, x.data(), inv_two_h2, shift);
    case 4: return kernel_sum_fixed<4>(c, lw, n, x.data(), inv_two_h2, shift);
    case 8: return kernel_sum_fixed<8>(c, lw, n, x.data(), inv_two_h2, shift);
    case 12: return kernel_sum_fixed<12>(c, lw, n, x.data(), inv_two_h2, shift);
    default: return kernel_sum_any(c, lw, n, coords.size(), x.data(), inv_two_h2, shift);
  }
}

double kernel_max_exponent(std::span<const double* const> coords, std::span<const double> log_weights,
                           std::span<const double> x, double inv_two_h2) {
  const std::size_t n = log_weights.size();
  const std::size_t d = coords.size();
  double best = -1e300;
  for (std::size_t k = 0; k < n; ++k) {
    double r = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double u = x[j] - coords[j][k];
      r += u * u;
    }
    best = std::max(best, log_weights[k] - inv_two_h2 * r);
  }
  return best;
}

}  // namespace sais::detail
