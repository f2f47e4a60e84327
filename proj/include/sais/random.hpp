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

#ifndef SAIS_RANDOM_HPP
#define SAIS_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace sais {

/// Engine used everywhere in the library. Pinned so that a (config, seed)
/// pair reproduces the same streams.
using Rng = std::mt19937_64;

inline constexpr std::string_view kRngName = "mt19937_64";

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of an independent substream identified by `stream` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// 64-bit FNV-1a hash of a string, used to key substreams by name.
std::uint64_t hash_name(std::string_view name) noexcept;

/// Engine for substream `stream` of `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace sais

#endif  // SAIS_RANDOM_HPP
