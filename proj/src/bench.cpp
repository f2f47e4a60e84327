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

#include "sais/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "sais/diagnostics.hpp"
#include "sais/errors.hpp"
#include "sais/random.hpp"
#include "sais/sais.hpp"
#include "sais/targets.hpp"

namespace sais {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
void take(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->template get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError("unknown key '" + key + "' in " + where);
    }
  }
}

bool is_sais(const std::string& method) { return method.rfind("sais", 0) == 0; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

template <class T>
T parse_number(const std::string& s, std::size_t line, const char* column) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    if (s == "nan") return std::numeric_limits<T>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<T>::infinity();
    if (s == "-inf") return -std::numeric_limits<T>::infinity();
    try {
      std::size_t used = 0;
      value = static_cast<T>(std::stod(s, &used));
      if (used == s.size()) return value;
    } catch (const std::exception&) {
    }
  } else {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc() && ptr == s.data() + s.size()) return value;
  }
  throw ParseError("line " + std::to_string(line) + ": bad value '" + s + "' in column " + column);
}

std::vector<std::string> expect_header(std::istream& in, std::string_view header, std::string& line) {
  if (!std::getline(in, line)) throw ParseError("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ParseError("line 1: header does not match '" + std::string(header) + "'");
  return split_csv_line(line);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  ExperimentConfig c;
  try {
    reject_unknown(doc,
                   {"target", "d", "methods", "budgets", "replicates", "base_seed", "mu_start", "rng", "output",
                    "exclude_burn_in", "schedule", "q0", "amh"},
                   "config");
    take(doc, "target", c.target);
    take(doc, "d", c.d);
    take(doc, "methods", c.methods);
    take(doc, "budgets", c.budgets);
    take(doc, "replicates", c.replicates);
    take(doc, "base_seed", c.base_seed);
    take(doc, "mu_start", c.mu_start);
    take(doc, "rng", c.rng);
    take(doc, "output", c.output);
    take(doc, "exclude_burn_in", c.exclude_burn_in);
    if (auto it = doc.find("schedule"); it != doc.end()) {
      reject_unknown(*it, {"m", "n0", "T0", "eta", "lambda_scale", "bandwidth_scale", "delta_sub2", "delta_sub4"},
                     "schedule");
      take(*it, "m", c.m);
      take(*it, "n0", c.n0);
      take(*it, "T0", c.T0);
      take(*it, "eta", c.eta);
      take(*it, "lambda_scale", c.lambda_scale);
      take(*it, "bandwidth_scale", c.bandwidth_scale);
      take(*it, "delta_sub2", c.delta_sub2);
      take(*it, "delta_sub4", c.delta_sub4);
    }
    if (auto it = doc.find("q0"); it != doc.end()) {
      reject_unknown(*it, {"dof", "covariance_scale"}, "q0");
      take(*it, "dof", c.dof);
      take(*it, "covariance_scale", c.q0_covariance_scale);
    }
    if (auto it = doc.find("amh"); it != doc.end()) {
      reject_unknown(*it, {"adapt_start", "scale", "epsilon", "initial_variances"}, "amh");
      take(*it, "adapt_start", c.amh.adapt_start);
      take(*it, "scale", c.amh.scale);
      take(*it, "epsilon", c.amh.epsilon);
      take(*it, "initial_variances", c.amh.initial_variances);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config has a field of the wrong type: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string ExperimentConfig::to_json() const {
  json doc = {
      {"target", target},
      {"d", d},
      {"methods", methods},
      {"budgets", budgets},
      {"replicates", replicates},
      {"base_seed", base_seed},
      {"mu_start", mu_start},
      {"rng", rng},
      {"output", output},
      {"exclude_burn_in", exclude_burn_in},
      {"schedule",
       {{"m", m},
        {"n0", n0},
        {"T0", T0},
        {"eta", eta},
        {"lambda_scale", lambda_scale},
        {"bandwidth_scale", bandwidth_scale},
        {"delta_sub2", delta_sub2},
        {"delta_sub4", delta_sub4}}},
      {"q0", {{"dof", dof}, {"covariance_scale", q0_covariance_scale}}},
      {"amh",
       {{"adapt_start", amh.adapt_start},
        {"scale", amh.scale},
        {"epsilon", amh.epsilon},
        {"initial_variances", amh.initial_variances}}},
  };
  return doc.dump(2);
}

void ExperimentConfig::validate() const {
  if (d == 0) throw InputError("d must be positive");
  const Target t = make_target(target, d);
  if (!t.true_mean) throw InputError("target '" + target + "' has no known mean, so no error can be scored");
  if (methods.empty()) throw InputError("at least one method is required");
  for (const auto& method : methods) {
    if (std::find(kKnownMethods.begin(), kKnownMethods.end(), method) == kKnownMethods.end()) {
      throw InputError("unknown method '" + method + "'");
    }
  }
  if (budgets.empty()) throw InputError("at least one budget is required");
  if (replicates < 1) throw InputError("replicates must be at least 1");
  if (rng != kRngName) throw InputError("unsupported rng '" + rng + "', only '" + std::string(kRngName) + "'");
  if (!mu_start.empty() && mu_start.size() != d) throw InputError("mu_start must have d entries");
  if (!(dof > 2.0)) throw InputError("q0 dof must exceed 2");
  for (const auto& method : methods) {
    for (std::size_t budget : budgets) {
      if (is_sais(method)) {
        (void)schedules_for(method, budget);
      } else if (budget <= amh.adapt_start) {
        throw InputError("budget " + std::to_string(budget) + " leaves no chain states after discarding " +
                         std::to_string(amh.adapt_start));
      }
    }
  }
  if (std::find(methods.begin(), methods.end(), "amh") != methods.end() && amh.adapt_start < 2) {
    throw InputError("amh adapt_start must be at least 2");
  }
}

Schedules ExperimentConfig::schedules_for(const std::string& method, std::size_t budget) const {
  Schedules s;
  s.d = d;
  s.m = m;
  if (m == 0) throw InputError("batch size m must be positive");
  if (budget % m != 0) {
    throw InputError("budget " + std::to_string(budget) + " is not a multiple of m = " + std::to_string(m));
  }
  s.T = budget / m;
  s.n0 = n0;
  s.T0 = T0;
  s.eta = eta;
  s.lambda_scale = lambda_scale;
  s.bandwidth_scale = bandwidth_scale;
  if (method == "sais") {
    s.mode = ScheduleMode::standard;
  } else if (method == "sais-sub2") {
    s.mode = ScheduleMode::subsampling;
    s.delta = delta_sub2;
  } else if (method == "sais-sub4") {
    s.mode = ScheduleMode::subsampling;
    s.delta = delta_sub4;
  } else {
    throw InputError("'" + method + "' is not a SAIS method");
  }
  s.validate();
  return s;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view method, std::size_t budget,
                        std::size_t replicate) {
  std::uint64_t key = mix64(hash_name(method) ^ static_cast<std::uint64_t>(budget));
  key = mix64(key ^ static_cast<std::uint64_t>(replicate));
  return mix64(base_seed ^ key);
}

CellResult run_cell(const ExperimentConfig& config, const std::string& method, std::size_t budget,
                    std::size_t replicate) {
  CellResult r;
  r.method = method;
  r.target = config.target;
  r.d = config.d;
  r.budget = budget;
  r.replicate = replicate;
  r.seed = cell_seed(config.base_seed, method, budget, replicate);
  r.sq_error = kNaN;
  r.ess_final = kNaN;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Target target = make_target(config.target, config.d);
    const std::vector<double> mu =
        config.mu_start.empty() ? default_mu_start(config.target, config.d) : config.mu_start;
    if (is_sais(method)) {
      const Schedules s = config.schedules_for(method, budget);
      const SafeDensity q0(config.d, config.dof, config.q0_covariance_scale);
      const RunResult run = run_sais(target, s, q0, mu, r.seed);
      r.sq_error = mse_metric(run.estimate(config.exclude_burn_in), target);
      r.op_count = run.op_count();
      r.ess_final = run.stages.back().ess;
    } else {
      Chain chain;
      if (method == "mh") {
        const std::vector<double> var = config.amh.initial_variances.empty()
                                            ? std::vector<double>(config.d, 0.4 / static_cast<double>(config.d))
                                            : config.amh.initial_variances;
        chain = run_rwmh(target, budget, mu, var, r.seed);
      } else if (method == "amh") {
        chain = run_amh(target, budget, mu, r.seed, config.amh);
      } else {
        throw InputError("unknown method '" + method + "'");
      }
      r.sq_error = mse_metric(chain.mean(config.amh.adapt_start), target);
      r.op_count = budget;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    if (r.error.empty()) r.error = "unknown failure";
  }
  r.wall_time_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CellResult> run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  struct Cell {
    const std::string* method;
    std::size_t budget;
    std::size_t replicate;
  };
  std::vector<Cell> cells;
  for (const auto& method : config.methods) {
    for (std::size_t budget : config.budgets) {
      for (std::size_t r = 0; r < config.replicates; ++r) cells.push_back({&method, budget, r});
    }
  }
  std::vector<CellResult> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      rows[i] = run_cell(config, *cells[i].method, cells[i].budget, cells[i].replicate);
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

void write_results(std::ostream& out, const std::vector<CellResult>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << csv_escape(r.method) << ',' << csv_escape(r.target) << ',' << r.d << ',' << r.budget << ','
        << r.replicate << ',' << r.seed << ',' << format_double(r.sq_error) << ',' << r.wall_time_ns << ','
        << r.op_count << ',' << format_double(r.ess_final) << ',' << csv_escape(r.error) << '\n';
  }
}

std::vector<CellResult> read_results(std::istream& in) {
  std::string line;
  expect_header(in, kResultsHeader, line);
  std::vector<CellResult> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 11 fields, found " + std::to_string(f.size()));
    }
    CellResult r;
    r.method = f[0];
    r.target = f[1];
    r.d = parse_number<std::size_t>(f[2], lineno, "d");
    r.budget = parse_number<std::size_t>(f[3], lineno, "budget");
    r.replicate = parse_number<std::size_t>(f[4], lineno, "replicate");
    r.seed = parse_number<std::uint64_t>(f[5], lineno, "seed");
    r.sq_error = parse_number<double>(f[6], lineno, "sq_error");
    r.wall_time_ns = parse_number<std::int64_t>(f[7], lineno, "wall_time_ns");
    r.op_count = parse_number<std::uint64_t>(f[8], lineno, "op_count");
    r.ess_final = parse_number<double>(f[9], lineno, "ess_final");
    r.error = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

double median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> summarize(const std::vector<CellResult>& rows) {
  struct Group {
    SummaryRow row;
    std::vector<double> log_err, ops, wall;
  };
  std::vector<Group> groups;
  std::map<std::tuple<std::string, std::string, std::size_t, std::size_t>, std::size_t> index;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    const auto key = std::make_tuple(r.method, r.target, r.d, r.budget);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      Group g;
      g.row.method = r.method;
      g.row.target = r.target;
      g.row.d = r.d;
      g.row.budget = r.budget;
      groups.push_back(std::move(g));
    }
    auto& g = groups[it->second];
    g.log_err.push_back(std::log10(r.sq_error));
    g.ops.push_back(static_cast<double>(r.op_count));
    g.wall.push_back(static_cast<double>(r.wall_time_ns));
  }
  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (auto& g : groups) {
    g.row.cells = g.log_err.size();
    g.row.median_log10_sq_error = median(g.log_err);
    g.row.median_op_count = median(g.ops);
    g.row.median_wall_time_ns = median(g.wall);
    out.push_back(g.row);
  }
  return out;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << csv_escape(r.method) << ',' << csv_escape(r.target) << ',' << r.d << ',' << r.budget << ',' << r.cells
        << ',' << format_double(r.median_log10_sq_error) << ',' << format_double(r.median_op_count) << ','
        << format_double(r.median_wall_time_ns) << '\n';
  }
}

std::vector<SummaryRow> read_summary(std::istream& in) {
  std::string line;
  expect_header(in, kSummaryHeader, line);
  std::vector<SummaryRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 8 fields, found " + std::to_string(f.size()));
    }
    SummaryRow r;
    r.method = f[0];
    r.target = f[1];
    r.d = parse_number<std::size_t>(f[2], lineno, "d");
    r.budget = parse_number<std::size_t>(f[3], lineno, "budget");
    r.cells = parse_number<std::size_t>(f[4], lineno, "cells");
    r.median_log10_sq_error = parse_number<double>(f[5], lineno, "median_log10_sq_error");
    r.median_op_count = parse_number<double>(f[6], lineno, "median_op_count");
    r.median_wall_time_ns = parse_number<double>(f[7], lineno, "median_wall_time_ns");
    rows.push_back(std::move(r));
  }
  return rows;
}

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "mse-vs-budget") return PlotKind::mse_vs_budget;
  if (name == "mse-vs-ops") return PlotKind::mse_vs_ops;
  throw InputError("unknown plot kind '" + std::string(name) + "', expected mse-vs-budget or mse-vs-ops");
}

std::string plot_svg(const std::vector<SummaryRow>& rows, PlotKind kind) {
  if (rows.empty()) throw InputError("summary is empty, nothing to plot");

  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (log10 x, log10 mse)
  };
  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  bool many_targets = false;
  for (const auto& r : rows) {
    if (r.target != rows.front().target || r.d != rows.front().d) many_targets = true;
  }
  for (const auto& r : rows) {
    const double x = kind == PlotKind::mse_vs_budget ? static_cast<double>(r.budget) : r.median_op_count;
    if (!(x > 0.0) || !std::isfinite(r.median_log10_sq_error)) continue;
    std::string label = r.method;
    if (many_targets) label += " (" + r.target + ", d=" + std::to_string(r.d) + ")";
    auto [it, inserted] = index.try_emplace(label, series.size());
    if (inserted) series.push_back({label, {}});
    series[it->second].points.emplace_back(std::log10(x), r.median_log10_sq_error);
  }
  if (series.empty()) throw InputError("summary has no plottable rows");
  for (auto& s : series) std::sort(s.points.begin(), s.points.end());

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  x_lo = std::floor(x_lo * 10.0) / 10.0 - 0.05;
  x_hi = std::ceil(x_hi * 10.0) / 10.0 + 0.05;
  y_lo = std::floor(y_lo) - 0.25;
  y_hi = std::ceil(y_hi) + 0.25;

  constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 180, kTop = 20, kBottom = 50;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph
     << "\" stroke=\"black\"/>\n";
  for (double e = std::ceil(y_lo); e <= y_hi; e += 1.0) {
    os << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << py(e) << "\" x2=\"" << kLeft << "\" y2=\"" << py(e)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << static_cast<int>(e)
       << "</text>\n";
  }
  const double step = x_hi - x_lo > 1.5 ? 1.0 : 0.1;
  for (double e = std::ceil(x_lo / step) * step; e <= x_hi + 1e-9; e += step) {
    std::ostringstream tick;
    tick << std::setprecision(2) << std::pow(10.0, e);
    os << "<line x1=\"" << px(e) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(e) << "\" y2=\"" << kTop + ph + 4
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(e) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << tick.str()
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
     << (kind == PlotKind::mse_vs_budget ? "budget (target evaluations, log scale)" : "operation count (log scale)")
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kTop + ph / 2 << ")\">median squared error (log scale)</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[k].points.size(); ++i) {
      if (i) os << ' ';
      os << px(series[k].points[i].first) << ',' << py(series[k].points[i].second);
    }
    os << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 32 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly + 4 << "\">" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sais
