// Copyright 2026 The aktmatch Authors
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

// aktmatch: exact matching costs, Fourier bounds, series and Monte Carlo
// experiments from the command line.
//
// Exit codes: 0 success, 1 I/O or input error, 2 configuration or usage
// error, 3 invariant violation during an experiment.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "akt/exact_transport.hpp"
#include "akt/experiments.hpp"
#include "akt/fourier_bound.hpp"
#include "akt/lower_bounds.hpp"
#include "akt/point_io.hpp"
#include "akt/series.hpp"
#include "json.hpp"

namespace {

using akt::Metric;
using nlohmann::json;

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

Metric parse_metric(const std::string& name) {
  if (name == "euclidean") return akt::Metric::Euclidean;
  if (name == "torus") return akt::Metric::Torus;
  throw akt::ConfigError("unknown metric '" + name + "'");
}

json report_json(const akt::FourierBoundReport& r) {
  return {{"t", r.t},
          {"m_max", r.m_max},
          {"m_max_cap", r.m_max_cap},
          {"main_sum", r.main_sum},
          {"tail_bound", r.tail_bound},
          {"smoothing_term", r.smoothing_term},
          {"total", r.total},
          {"total_unit_cube", r.total / akt::kPi}};
}

int run_match(const std::string& x_path, const std::string& y_path, const std::string& metric_name,
              const std::string& frame, bool show_perm) {
  const Metric metric = parse_metric(metric_name);
  if (frame != "unit" && frame != "torus") throw akt::ConfigError("frame must be unit or torus");
  auto x = akt::read_points_csv(x_path);
  auto y = akt::read_points_csv(y_path);
  if (x.dimension() != y.dimension()) {
    throw std::invalid_argument("point files have different dimensions");
  }
  // Torus comparisons run on the pi-scaled points in the half torus.
  const double scale = metric == Metric::Torus && frame == "unit" ? 1.0 / akt::kPi : 1.0;
  if (metric == Metric::Torus) {
    x = akt::to_half_torus(x);
    y = akt::to_half_torus(y);
  }
  json out = {{"metric", std::string(akt::to_string(metric))},
              {"frame", frame},
              {"n_x", x.size()},
              {"n_y", y.size()},
              {"d", x.dimension()}};
  if (x.size() != y.size()) {
    out["w1"] = akt::w1_exact_unbalanced(x, y, metric) * scale;
  } else if (x.dimension() == 1 && (x.size() > akt::kMaxExactSize || !show_perm)) {
    out["w1"] = akt::w1_1d(x.coords(), y.coords()) * scale;
  } else {
    const auto result = akt::w1_exact(x, y, metric);
    out["w1"] = result.value * scale;
    if (show_perm) out["permutation"] = result.permutation;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_bound(const std::string& x_path, const std::string& y_path, const std::string& t_arg,
              const std::string& mmax_arg) {
  const auto x = akt::to_half_torus(akt::read_points_csv(x_path));
  const auto y = akt::to_half_torus(akt::read_points_csv(y_path));
  if (x.dimension() != y.dimension()) {
    throw std::invalid_argument("point files have different dimensions");
  }
  akt::MMaxPolicy policy = akt::MMaxPolicy::automatic();
  if (mmax_arg != "auto") {
    long m = 0;
    try {
      m = std::stol(mmax_arg);
    } catch (const std::exception&) {
      throw akt::ConfigError("--mmax must be auto or a positive integer");
    }
    if (m < 1) throw akt::ConfigError("--mmax must be auto or a positive integer");
    policy = akt::MMaxPolicy::fixed_at(m);
  }
  akt::FourierBoundReport report;
  if (t_arg == "auto") {
    const auto grid = akt::default_t_grid(std::max(x.size(), y.size()));
    report = akt::optimize_t(x, y, grid, policy).report;
  } else {
    double t = 0.0;
    try {
      t = akt::parse_double(t_arg);
    } catch (const std::exception&) {
      throw akt::ConfigError("--t must be auto or a positive number");
    }
    if (!(t > 0.0) || !std::isfinite(t)) throw akt::ConfigError("--t must be positive");
    report = akt::prop2_bound(x, y, t, policy);
  }
  std::cout << report_json(report).dump(2) << '\n';
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_path,
                       const std::string& format, std::size_t jobs, bool timing) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open " + config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw akt::ConfigError(config_path + ": " + e.what());
  }
  const akt::ExperimentConfig config = akt::parse_config(j);
  akt::OutputFormat fmt = akt::OutputFormat::Csv;
  if (format == "json") {
    fmt = akt::OutputFormat::Json;
  } else if (format != "csv") {
    throw akt::ConfigError("--format must be csv or json");
  }
  const auto result = akt::run_experiment(config, akt::RunOptions{jobs, timing});
  akt::emit_results(result, fmt, out_path, timing);
  return 0;
}

int run_fit(const std::string& in_path, const std::string& model_name) {
  const akt::RateModel model = akt::parse_rate_model(model_name);
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  in.clear();
  in.seekg(0);
  std::vector<akt::AggregateRow> rows;
  if (header == akt::kAggregateCsvHeader) {
    rows = akt::read_aggregates_csv(in);
  } else if (header == akt::kTrialCsvHeader) {
    std::map<std::size_t, std::pair<double, std::size_t>> sums;
    for (const auto& r : akt::read_trials_csv(in)) {
      sums[r.n].first += r.w1;
      sums[r.n].second += 1;
    }
    for (const auto& [n, s] : sums) {
      akt::AggregateRow row;
      row.n = n;
      row.mean = s.first / static_cast<double>(s.second);
      rows.push_back(row);
    }
  } else {
    throw std::invalid_argument(in_path + ": not a trial or aggregate CSV");
  }
  const auto fit = akt::fit_rate(rows, model);
  json residuals = json::array();
  for (std::size_t i = 0; i < fit.n.size(); ++i) {
    residuals.push_back({{"n", fit.n[i]}, {"relative_residual", fit.relative_residuals[i]}});
  }
  json out = {{"model", std::string(akt::to_string(fit.model))},
              {"C", fit.constant},
              {"beta", fit.exponent},
              {"r2", fit.r_squared},
              {"mean_sq_rel_residual", fit.mean_sq_relative_residual},
              {"residuals", residuals}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_series(const std::string& fn, std::size_t d, double t, std::size_t n) {
  if (!(t > 0.0) || !std::isfinite(t)) throw akt::ConfigError("--t must be positive");
  if (d == 0) throw akt::ConfigError("--d must be >= 1");
  akt::SeriesValue v;
  if (fn == "t1") {
    v = akt::t1_series(t);
  } else if (fn == "td") {
    v = akt::t_d_series(t, d);
  } else if (fn == "sd") {
    v = akt::s_d_series(t, d);
  } else if (fn == "c" || fn == "e") {
    if (n == 0) throw akt::ConfigError("--n is required for c and e");
    v = fn == "c" ? akt::c_series(n, t, d) : akt::e_series(n, t, d);
  } else {
    throw akt::ConfigError("--fn must be one of t1, td, sd, c, e");
  }
  json out = {{"fn", fn}, {"d", d}, {"t", t}, {"value", v.value}, {"error_bound", v.error_bound}};
  if (n) out["n"] = n;
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact matching costs, Fourier bounds and Monte Carlo rate experiments"};
  app.require_subcommand(1);

  std::string x_path, y_path, metric = "euclidean", frame = "unit";
  bool show_perm = false;
  auto* match = app.add_subcommand("match", "Exact W1 between two point files");
  match->add_option("--x", x_path, "First point CSV")->required();
  match->add_option("--y", y_path, "Second point CSV")->required();
  match->add_option("--metric", metric, "euclidean or torus");
  match->add_option("--frame", frame, "Report in unit-cube units (unit) or torus units (torus)");
  match->add_flag("--perm", show_perm, "Also print the optimal permutation");

  std::string t_arg, mmax = "auto";
  auto* bound = app.add_subcommand("bound", "Smoothed Fourier upper bound on torus W1");
  bound->add_option("--x", x_path, "First point CSV")->required();
  bound->add_option("--y", y_path, "Second point CSV")->required();
  bound->add_option("--t", t_arg, "Smoothing time, or auto")->required();
  bound->add_option("--mmax", mmax, "Truncation radius, or auto");

  std::string config_path, out_path, format = "csv";
  std::size_t jobs = 1;
  bool timing = false;
  auto* experiment = app.add_subcommand("experiment", "Run a seeded Monte Carlo experiment");
  experiment->add_option("--config", config_path, "Experiment JSON")->required();
  experiment->add_option("--out", out_path, "Output path")->required();
  experiment->add_option("--format", format, "csv or json");
  experiment->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  experiment->add_flag("--timing", timing, "Record per-trial wall time (breaks byte stability)");
  experiment->footer(
      "rotation_sequence defaults (our choice): d = 1 uses U = V = identity. d = 2 uses U(s) = "
      "(even binary digits of s, odd binary digits of s) and V(s) = the same pair swapped. "
      "Other dimensions need maps supplied through the library API.");

  std::string in_path, model;
  auto* fit = app.add_subcommand("fit", "Fit a rate model to trial or aggregate CSV");
  fit->add_option("--in", in_path, "CSV from the experiment command")->required();
  fit->add_option("--model", model, "power or sqrtlog")->required();

  std::string fn;
  std::size_t d = 1, n = 0;
  double t = 0.0;
  auto* series = app.add_subcommand("series", "Evaluate a truncated lattice series");
  series->add_option("--fn", fn, "t1, td, sd, c or e")->required();
  series->add_option("--d", d, "Dimension")->required();
  series->add_option("--t", t, "Series parameter")->required();
  series->add_option("--n", n, "Sample size for c and e");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*match) return run_match(x_path, y_path, metric, frame, show_perm);
    if (*bound) return run_bound(x_path, y_path, t_arg, mmax);
    if (*experiment) return run_experiment_cmd(config_path, out_path, format, jobs, timing);
    if (*fit) return run_fit(in_path, model);
    if (*series) return run_series(fn, d, t, n);
  } catch (const akt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const akt::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
