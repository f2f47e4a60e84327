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

#ifndef SAIS_SAIS_HPP
#define SAIS_SAIS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sais/core.hpp"
#include "sais/policy.hpp"
#include "sais/targets.hpp"

/**
 * \file
 * \brief Mini-batch safe adaptive importance sampling drivers.
 *
 * Stage t = 0..T-1 draws the batch B_{t+1} of m particles from the frozen
 * policy q_t, weights them by f_U / q_t, and raises the weights to the power
 * eta while t <= T0. The next policy mixes a kernel estimate of the weighted
 * cloud (all particles in standard mode, an equal-weight bootstrap subsample
 * in subsampling mode) with the safe density recentred at the weighted mean.
 * Stage 0 uses the safe density alone, centred at mu_start.
 */

namespace sais {

struct SaisOptions {
  /// Recentre the safe density at the weighted mean after every stage.
  bool update_center = true;
  /// Worker threads for evaluating q_t over a batch. Results do not depend on it.
  std::size_t threads = 1;
};

struct StageRecord {
  std::size_t t = 0;
  double lambda = 1.0;
  double bandwidth = 0.0;
  std::optional<std::size_t> subsample_size;
  double ess = 0.0;
  std::vector<double> center;
  double wall_time_s = 0.0;
  /// Cumulative kernel evaluations plus binary-search comparisons.
  std::uint64_t op_count = 0;
};

struct RunResult {
  ParticleCloud cloud;
  /// log f_U(X_k) - log q(X_k) before burn-in regularization.
  std::vector<double> raw_log_weights;
  std::vector<StageRecord> stages;
  /// Self-normalized mean after each stage.
  std::vector<std::vector<double>> estimate_trace;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  std::string config_digest;
  /// Particles drawn during burn-in (stages t <= T0).
  std::size_t burn_in_particles = 0;

  [[nodiscard]] std::uint64_t op_count() const { return stages.empty() ? 0 : stages.back().op_count; }
  /// Final weighted mean, optionally ignoring the burn-in batches.
  [[nodiscard]] std::vector<double> estimate(bool exclude_burn_in = false) const;
};

/// Standard SAIS: kernel support is the whole weighted cloud, O(m t) per evaluation.
RunResult run_standard_sais(const Target& target, const Schedules& schedules, const SafeDensity& q0,
                            std::span<const double> mu_start, std::uint64_t seed, const SaisOptions& options = {});

/// Subsampling SAIS: kernel support is a bootstrap sample of l_t particles drawn once per stage.
RunResult run_subsampling_sais(const Target& target, const Schedules& schedules, const SafeDensity& q0,
                               std::span<const double> mu_start, std::uint64_t seed, const SaisOptions& options = {});

/// Dispatches on schedules.mode.
RunResult run_sais(const Target& target, const Schedules& schedules, const SafeDensity& q0,
                   std::span<const double> mu_start, std::uint64_t seed, const SaisOptions& options = {});

}  // namespace sais

#endif  // SAIS_SAIS_HPP
