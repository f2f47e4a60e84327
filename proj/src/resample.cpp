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

#include "sais/resample.hpp"

#include <algorithm>

#include "sais/errors.hpp"

namespace sais {

std::vector<std::size_t> multinomial_draw(const ParticleCloud& cloud, std::size_t count, Rng& rng,
                                          std::uint64_t* comparisons) {
  const double total = cloud.total_weight();
  if (!(total > 0.0)) {
    throw DegenerateCloudError("cannot resample: total weight is zero");
  }
  const auto cum = cloud.cumulative_weights();
  std::uniform_real_distribution<double> uniform(0.0, total);
  std::uint64_t n_cmp = 0;
  auto less = [&n_cmp](double u, double c) {
    ++n_cmp;
    return u < c;
  };

  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform(rng);
    auto it = std::upper_bound(cum.begin(), cum.end(), u, less);
    if (it == cum.end()) {
      // u rounded up to the total; take the last particle carrying weight.
      it = std::lower_bound(cum.begin(), cum.end(), total);
    }
    out.push_back(static_cast<std::size_t>(it - cum.begin()));
  }
  if (comparisons != nullptr) *comparisons += n_cmp;
  return out;
}

KdeMixture bootstrap_kde_support(const ParticleCloud& cloud, std::size_t count, Rng& rng,
                                 std::uint64_t* comparisons) {
  const auto idx = multinomial_draw(cloud, count, rng, comparisons);
  std::vector<double> points;
  points.reserve(idx.size() * cloud.dim());
  for (std::size_t i : idx) {
    const auto p = cloud.position(i);
    points.insert(points.end(), p.begin(), p.end());
  }
  return KdeMixture::uniform(cloud.dim(), points);
}

}  // namespace sais
