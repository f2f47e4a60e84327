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

#ifndef SAIS_RESAMPLE_HPP
#define SAIS_RESAMPLE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sais/core.hpp"
#include "sais/kde.hpp"
#include "sais/random.hpp"

namespace sais {

/// Multinomial bootstrap indices drawn from the cloud's weighted empirical measure.
/**
 * Each draw is a uniform over [0, total weight) located by binary search in
 * the cumulative weights: the returned index is the first whose cumulative
 * weight strictly exceeds the uniform, so zero-weight particles are never
 * selected. When `comparisons` is non-null the number of binary-search
 * comparisons is added to it.
 *
 * Throws DegenerateCloudError when the total weight is zero.
 */
std::vector<std::size_t> multinomial_draw(const ParticleCloud& cloud, std::size_t count, Rng& rng,
                                          std::uint64_t* comparisons = nullptr);

/// Equal-weight kernel support made of `count` bootstrap copies of the cloud's positions.
KdeMixture bootstrap_kde_support(const ParticleCloud& cloud, std::size_t count, Rng& rng,
                                 std::uint64_t* comparisons = nullptr);

}  // namespace sais

#endif  // SAIS_RESAMPLE_HPP
