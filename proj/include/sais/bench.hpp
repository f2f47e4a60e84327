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

#ifndef SAIS_BENCH_HPP
#define SAIS_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sais/baselines.hpp"
#include "sais/policy.hpp"

/**
 * \file
 * \brief Replicated sampler comparisons: configuration, execution, CSV
 * results, per-cell medians and SVG plots.
 *
 * A cell is one (method, budget, replicate) triple. Its seed depends only on
 * the base seed and the cell's own coordinates:
 *
 *     key  = mix64(mix64(fnv1a(method) ^ budget) ^ replicate)
 *     seed = mix64(base_seed ^ key)
 *
 * with mix64 the SplitMix64 finalizer, so any cell can be re-run alone.
 */

namespace sais {

inline constexpr std::string_view kResultsHeader =
    "method,target,d,budget,replicate,seed,sq_error,wall_time_ns,op_count,ess_final,error";
inline constexpr std::string_view kSummaryHeader =
    "method,target,d,budget,cells,median_log10_sq_error,median_op_count,median_wall_time_ns";

/// Methods understood by the harness.
inline const std::vector<std::string> kKnownMethods = {"sais", "sais-sub2", "sais-sub4", "mh", "amh"};

struct ExperimentConfig {
  std::string target = "gaussian-mixture";
  std::size_t d = 4;
  std::vector<std::string> methods = {"sais", "sais-sub2", "sais-sub4", "amh"};
  std::vector<std::size_t> budgets = {50000, 100000, 150000, 200000};
  std::size_t replicates = 50;
  std::uint64_t base_seed = 20260101;
  /// Empty selects the target's default start.
  std::vector<double> mu_start;
  std::string rng = "mt19937_64";
  std::string output = "results.csv";

  // Schedule constants; the stage count is budget / m.
  std::size_t m = 1000;
  double n0 = 1e4;
  std::size_t T0 = 20;
  double eta = 0.75;
  double lambda_scale = 0.25;
  double bandwidth_scale = 0.0;
  double delta_sub2 = 0.5;
  double delta_sub4 = 0.25;
  double dof = SafeDensity::kDefaultDof;
  double q0_covariance_scale = 0.0;
  bool exclude_burn_in = false;

  AmhOptions amh;

  /// Parses a JSON document; unknown keys are rejected. Throws ParseError.
  static ExperimentConfig from_json(std::string_view text);
  static ExperimentConfig load(const std::string& path);
  [[nodiscard]] std::string to_json() const;
  /// Throws InputError describing the first violated constraint.
  void validate() const;
  /// Schedules for one method and budget.
  [[nodiscard]] Schedules schedules_for(const std::string& method, std::size_t budget) const;
};

struct CellResult {
  std::string method;
  std::string target;
  std::size_t d = 0;
  std::size_t budget = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double sq_error = 0.0;
  std::int64_t wall_time_ns = 0;
  std::uint64_t op_count = 0;
  /// NaN for Markov chains.
  double ess_final = 0.0;
  /// Empty on success.
  std::string error;
};

std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view method, std::size_t budget, std::size_t replicate);

/// Runs one cell; failures are reported in CellResult::error, not thrown.
CellResult run_cell(const ExperimentConfig& config, const std::string& method, std::size_t budget,
                    std::size_t replicate);

/// Every cell, ordered by (method, budget, replicate) as listed in the config.
std::vector<CellResult> run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

void write_results(std::ostream& out, const std::vector<CellResult>& rows);
/// Throws ParseError with the offending line number.
std::vector<CellResult> read_results(std::istream& in);

struct SummaryRow {
  std::string method;
  std::string target;
  std::size_t d = 0;
  std::size_t budget = 0;
  std::size_t cells = 0;
  double median_log10_sq_error = 0.0;
  double median_op_count = 0.0;
  double median_wall_time_ns = 0.0;
};

/// Groups successful rows by (method, target, d, budget) in order of first appearance.
std::vector<SummaryRow> summarize(const std::vector<CellResult>& rows);

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary(std::istream& in);

enum class PlotKind { mse_vs_budget, mse_vs_ops };
PlotKind parse_plot_kind(std::string_view name);

/// Static SVG with log-scaled axes and one polyline per (method, target, d).
/** Throws InputError on an empty summary. */
std::string plot_svg(const std::vector<SummaryRow>& rows, PlotKind kind);

double median(std::vector<double> values);

}  // namespace sais

#endif  // SAIS_BENCH_HPP
