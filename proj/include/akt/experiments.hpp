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

#ifndef AKT_EXPERIMENTS_HPP_
#define AKT_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "akt/exact_transport.hpp"
#include "akt/measures.hpp"
#include "json.hpp"

namespace akt {

// Bad experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A per-trial sandwich lower <= exact <= bound failed (CLI exit code 3).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class SamplerKind { IidUniform, IidCustom, RotationSequence, RenewalMixing, SubsetOfAtoms };

struct SamplerSpec {
  SamplerKind kind = SamplerKind::IidUniform;
  PointSampler custom;                   // IidCustom only; not expressible in JSON
  std::optional<RotationMaps> rotation;  // RotationSequence; defaults by dimension
  double retain = 0.5;                   // RenewalMixing
  // SubsetOfAtoms: fixed atoms if given, else N = atom_multiplier * n atoms
  // drawn uniformly once per n.
  std::optional<DiscreteMeasure> atoms;
  std::size_t atom_multiplier = 2;
};

enum class Comparison { TwoSamples, SampleVsAtomAverage };

struct TPolicy {
  enum class Kind { HalfInvN, Fixed, Grid };
  Kind kind = Kind::HalfInvN;
  double fixed = 0.0;
  std::vector<double> grid;
};

struct ExperimentConfig {
  std::size_t dimension = 2;
  std::vector<std::size_t> n_values;
  std::size_t trials = 1;
  SamplerSpec sampler;
  Metric metric = Metric::Euclidean;
  Comparison comparison = Comparison::TwoSamples;
  TPolicy t_policy;
  std::uint64_t seed = 0;
  bool compute_bounds = false;
  bool compute_lower = false;
};

// Throws ConfigError when an invariant fails.
void validate(const ExperimentConfig& config);

// JSON mirror of ExperimentConfig. Unknown keys are errors.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

struct TrialRecord {
  std::size_t n = 0;
  std::size_t trial = 0;
  double w1 = 0.0;
  std::optional<double> bound_total;
  std::optional<double> lower;
  std::optional<double> t_used;
  double wall_ms = 0.0;
};

struct AggregateRow {
  std::size_t n = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::optional<double> bound_mean;
  std::optional<double> paper_bound;
  std::optional<bool> pass;
};

enum class RateModel { Power, SqrtLog };

std::string_view to_string(RateModel model);
RateModel parse_rate_model(std::string_view name);

struct RateFit {
  RateModel model = RateModel::Power;
  double constant = 0.0;  // C
  double exponent = 0.0;  // beta for Power (mean ~ C n^-beta); 0.5 for SqrtLog
  double r_squared = 0.0;
  std::vector<std::size_t> n;
  std::vector<double> relative_residuals;  // (mean - fit) / mean
  double mean_sq_relative_residual = 0.0;
};

// Power: least squares of log mean on log n. SqrtLog: C sqrt(log n / n) with
// C minimizing squared relative residuals. Needs >= 3 distinct n and
// positive means.
RateFit fit_rate(const std::vector<AggregateRow>& rows, RateModel model);

// C n^-beta with beta held fixed, C minimizing squared relative residuals.
RateFit fit_power_fixed_exponent(const std::vector<AggregateRow>& rows, double beta);

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<AggregateRow> aggregates;
  std::optional<RateFit> fit;
};

struct RunOptions {
  std::size_t jobs = 1;
  bool record_timing = false;
};

// Trial (n, k) draws from the stream derive(seed, {n, k}); records come back
// ordered by (n, trial) regardless of jobs. W1 values are in unit-cube
// units. Throws ConfigError or InvariantViolation.
ExperimentResult run_experiment(const ExperimentConfig& config, RunOptions options = {});

std::vector<AggregateRow> aggregate(const ExperimentConfig& config,
                                    const std::vector<TrialRecord>& records);

// Sum over the rows of the explicit bound for this configuration (from the
// two-sample, subset, or mixing constants); nullopt when none applies.
std::optional<double> paper_bound_for(const ExperimentConfig& config, std::size_t n);

// One trial of the subset-vs-average comparison: exact W1(mu_tau, mu).
double subset_vs_average_w1(const DiscreteMeasure& atoms, std::span<const std::size_t> tau,
                            Metric metric);

// Fixed column orders:
//   trials:     n,trial,w1,bound_total,t,lower,wall_ms
//   aggregates: n,mean,stderr,min,max,bound_mean,paper_bound,pass
// Missing optionals are empty fields; wall_ms is empty unless timing was
// recorded, so that reruns are byte-identical.
inline constexpr std::string_view kTrialCsvHeader = "n,trial,w1,bound_total,t,lower,wall_ms";
inline constexpr std::string_view kAggregateCsvHeader =
    "n,mean,stderr,min,max,bound_mean,paper_bound,pass";

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                      bool include_timing);
void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_fit_csv(std::ostream& out, const RateFit& fit);
nlohmann::json results_to_json(const ExperimentResult& result, bool include_timing);

std::vector<TrialRecord> read_trials_csv(std::istream& in);
std::vector<AggregateRow> read_aggregates_csv(std::istream& in);

enum class OutputFormat { Csv, Json };

// CSV writes the trial table to `path`, aggregates to <stem>_aggregate.csv
// and the fit (when present) to <stem>_fit.csv next to it. JSON writes one
// document. Throws std::runtime_error naming the path on I/O failure.
void emit_results(const ExperimentResult& result, OutputFormat format,
                  const std::filesystem::path& path, bool include_timing = false);

}  // namespace akt

#endif  // AKT_EXPERIMENTS_HPP_
