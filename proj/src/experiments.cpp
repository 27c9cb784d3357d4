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

#include "akt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "akt/fourier_bound.hpp"
#include "akt/lower_bounds.hpp"
#include "akt/point_io.hpp"

namespace akt {
namespace {

using nlohmann::json;

// Stream index for the per-n atom draw; trial indices never reach it.
constexpr std::uint64_t kAtomStreamTag = ~std::uint64_t{0};

constexpr double kSandwichTolerance = 1e-9;

std::string normalize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string_view sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::IidUniform: return "iid_uniform";
    case SamplerKind::IidCustom: return "iid_custom";
    case SamplerKind::RotationSequence: return "rotation_sequence";
    case SamplerKind::RenewalMixing: return "renewal_mixing";
    case SamplerKind::SubsetOfAtoms: return "subset_of_atoms";
  }
  return "?";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  const std::string key = normalize_name(name);
  for (SamplerKind kind : {SamplerKind::IidUniform, SamplerKind::IidCustom,
                           SamplerKind::RotationSequence, SamplerKind::RenewalMixing,
                           SamplerKind::SubsetOfAtoms}) {
    if (normalize_name(sampler_name(kind)) == key) {
      if (kind == SamplerKind::IidCustom) {
        throw ConfigError("sampler iid_custom needs a point sampler function and is only "
                          "available through the library API");
      }
      return kind;
    }
  }
  throw ConfigError("unknown sampler kind '" + name + "'");
}

std::string_view comparison_name(Comparison c) {
  return c == Comparison::TwoSamples ? "two_samples" : "sample_vs_atom_average";
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

RotationMaps rotation_maps_for(const ExperimentConfig& config) {
  if (config.sampler.rotation) return *config.sampler.rotation;
  if (config.dimension == 1) return identity_rotation_maps();
  return default_rotation_maps();
}

// Number of atoms used at sample size n for SubsetOfAtoms.
std::size_t atom_count(const SamplerSpec& sampler, std::size_t n) {
  return sampler.atoms ? sampler.atoms->size() : sampler.atom_multiplier * n;
}

DiscreteMeasure atoms_for(const ExperimentConfig& config, std::size_t n) {
  if (config.sampler.atoms) return *config.sampler.atoms;
  RngStream rng = RngStream::derive(config.seed, {n, kAtomStreamTag});
  const std::size_t count = config.sampler.atom_multiplier * n;
  std::vector<double> coords(count * config.dimension);
  for (double& c : coords) c = rng.uniform01();
  return DiscreteMeasure(config.dimension, Frame::UnitCube, std::move(coords));
}

// W1 between two equal-size UnitCube measures, reported in unit-cube units.
double two_sample_w1(const DiscreteMeasure& x, const DiscreteMeasure& y, Metric metric) {
  if (x.dimension() == 1 && x.size() == y.size()) {
    // Unit-cube points sit in the half torus, where the torus and Euclidean
    // distances agree, so the sorted matching serves both metrics.
    if (metric == Metric::Euclidean) return w1_1d(x.coords(), y.coords());
    const auto tx = to_half_torus(x);
    const auto ty = to_half_torus(y);
    return w1_1d(tx.coords(), ty.coords()) / kPi;
  }
  if (metric == Metric::Euclidean) return w1_exact(x, y, Metric::Euclidean).value;
  return w1_exact(to_half_torus(x), to_half_torus(y), Metric::Torus).value / kPi;
}

double balanced_or_unbalanced(const DiscreteMeasure& x, const DiscreteMeasure& y, Metric metric) {
  if (x.size() == y.size()) return two_sample_w1(x, y, metric);
  if (metric == Metric::Euclidean) return w1_exact_unbalanced(x, y, Metric::Euclidean);
  return w1_exact_unbalanced(to_half_torus(x), to_half_torus(y), Metric::Torus) / kPi;
}

std::vector<double> t_candidates(const TPolicy& policy, std::size_t n) {
  switch (policy.kind) {
    case TPolicy::Kind::HalfInvN: return {1.0 / (2.0 * static_cast<double>(n))};
    case TPolicy::Kind::Fixed: return {policy.fixed};
    case TPolicy::Kind::Grid: return policy.grid;
  }
  return {};
}

struct TrialDraw {
  DiscreteMeasure x;
  DiscreteMeasure y;
  double w1;
};

TrialDraw draw_and_match(const ExperimentConfig& config, const DiscreteMeasure* atoms,
                         std::size_t n, RngStream& rng) {
  const std::size_t d = config.dimension;
  if (config.comparison == Comparison::SampleVsAtomAverage) {
    const auto tau = sample_subset_indices(atoms->size(), n, rng);
    double w1 = subset_vs_average_w1(*atoms, tau, config.metric);
    return TrialDraw{select_atoms(*atoms, tau), *atoms, w1};
  }
  MeasurePair pair = [&]() -> MeasurePair {
    switch (config.sampler.kind) {
      case SamplerKind::IidUniform: return sample_iid_uniform(n, d, rng);
      case SamplerKind::IidCustom: return sample_iid_custom(n, d, config.sampler.custom, rng);
      case SamplerKind::RotationSequence:
        return sample_rotation_sequence(n, rotation_maps_for(config), rng);
      case SamplerKind::RenewalMixing:
        return sample_renewal_mixing(n, d, config.sampler.retain, rng);
      case SamplerKind::SubsetOfAtoms: {
        auto x = subset_empirical(*atoms, n, rng);
        auto y = subset_empirical(*atoms, n, rng);
        return {std::move(x), std::move(y)};
      }
    }
    throw ConfigError("unknown sampler");
  }();
  const double w1 = two_sample_w1(pair.first, pair.second, config.metric);
  return TrialDraw{std::move(pair.first), std::move(pair.second), w1};
}

std::string describe_trial(std::size_t n, std::size_t trial) {
  return "n=" + std::to_string(n) + " trial=" + std::to_string(trial);
}

TrialRecord run_trial(const ExperimentConfig& config, const DiscreteMeasure* atoms, std::size_t n,
                      std::size_t trial, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  RngStream rng = RngStream::derive(config.seed, {n, trial});
  TrialDraw draw = draw_and_match(config, atoms, n, rng);

  TrialRecord record;
  record.n = n;
  record.trial = trial;
  record.w1 = draw.w1;

  if (config.compute_bounds) {
    const auto hx = to_half_torus(draw.x);
    const auto hy = to_half_torus(draw.y);
    const auto ts = t_candidates(config.t_policy, n);
    const OptimizedBound best = optimize_t(hx, hy, ts);
    record.bound_total = best.report.total / kPi;
    record.t_used = best.t;
  }
  if (config.compute_lower) {
    if (config.dimension == 1 && draw.x.size() == draw.y.size()) {
      record.lower = lower_1d_statistic(draw.x.coords(), draw.y.coords()).value;
    } else {
      record.lower = nearest_neighbor_lower(draw.x, draw.y).value;
    }
  }

  const double scale = std::max(1.0, std::abs(record.w1));
  if (record.lower && *record.lower > record.w1 + kSandwichTolerance * scale) {
    throw InvariantViolation("lower bound " + format_double(*record.lower) + " exceeds W1 " +
                             format_double(record.w1) + " at " + describe_trial(n, trial));
  }
  if (record.bound_total && record.w1 > *record.bound_total + kSandwichTolerance * scale) {
    throw InvariantViolation("W1 " + format_double(record.w1) + " exceeds the Fourier bound " +
                             format_double(*record.bound_total) + " at " +
                             describe_trial(n, trial));
  }
  if (timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    record.wall_ms = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  return record;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return parse_double(field);
}

std::size_t parse_count(const std::string& field) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::invalid_argument("not a count: '" + field + "'");
  }
  return value;
}

std::vector<std::vector<std::string>> read_table(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw std::invalid_argument("CSV: unexpected header '" + line + "', expected '" +
                                std::string(header) + "'");
  }
  const std::size_t columns = split_csv_line(header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(columns) + " fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

void check_fit_rows(const std::vector<AggregateRow>& rows) {
  if (rows.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 distinct n");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].n < 2) throw std::invalid_argument("fit_rate: n must be >= 2");
    if (!(rows[i].mean > 0.0) || !std::isfinite(rows[i].mean)) {
      throw std::invalid_argument("fit_rate: means must be positive and finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (rows[i].n == rows[j].n) throw std::invalid_argument("fit_rate: repeated n");
    }
  }
}

// Scalar C minimizing sum ((y - C g) / y)^2, with residuals and a log-space R^2.
RateFit fit_scalar_multiple(const std::vector<AggregateRow>& rows, RateModel model,
                            double exponent, const std::vector<double>& shape) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double r = shape[i] / rows[i].mean;
    num += r;
    den += r * r;
  }
  RateFit fit;
  fit.model = model;
  fit.constant = num / den;
  fit.exponent = exponent;
  double log_mean = 0.0;
  for (const auto& row : rows) log_mean += std::log(row.mean);
  log_mean /= static_cast<double>(rows.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  double sq_rel = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double predicted = fit.constant * shape[i];
    const double rel = (rows[i].mean - predicted) / rows[i].mean;
    fit.n.push_back(rows[i].n);
    fit.relative_residuals.push_back(rel);
    sq_rel += rel * rel;
    const double lr = std::log(rows[i].mean) - std::log(predicted);
    ss_res += lr * lr;
    const double lt = std::log(rows[i].mean) - log_mean;
    ss_tot += lt * lt;
  }
  fit.mean_sq_relative_residual = sq_rel / static_cast<double>(rows.size());
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0)
                               : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json fit_to_json(const RateFit& fit) {
  json residuals = json::array();
  for (std::size_t i = 0; i < fit.n.size(); ++i) {
    residuals.push_back({{"n", fit.n[i]}, {"relative_residual", fit.relative_residuals[i]}});
  }
  return {{"model", std::string(to_string(fit.model))},
          {"C", fit.constant},
          {"beta", fit.exponent},
          {"r2", fit.r_squared},
          {"mean_sq_rel_residual", fit.mean_sq_relative_residual},
          {"residuals", residuals}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace

void validate(const ExperimentConfig& config) {
  const std::size_t d = config.dimension;
  if (d == 0) throw ConfigError("dimension must be >= 1");
  if (config.n_values.empty()) throw ConfigError("n_values must be nonempty");
  for (std::size_t i = 0; i < config.n_values.size(); ++i) {
    if (config.n_values[i] < 2) throw ConfigError("every n must be >= 2");
    if (i > 0 && config.n_values[i] <= config.n_values[i - 1]) {
      throw ConfigError("n_values must be strictly ascending");
    }
  }
  if (config.trials == 0) throw ConfigError("trials must be >= 1");

  const SamplerSpec& s = config.sampler;
  switch (s.kind) {
    case SamplerKind::IidUniform: break;
    case SamplerKind::IidCustom:
      if (!s.custom) throw ConfigError("iid_custom sampler has no point sampler");
      break;
    case SamplerKind::RotationSequence: {
      if (!s.rotation && d > 2) {
        throw ConfigError("rotation_sequence has default maps for d = 1 and d = 2 only");
      }
      if (s.rotation && s.rotation->dimension != d) {
        throw ConfigError("rotation maps dimension does not match the config dimension");
      }
      break;
    }
    case SamplerKind::RenewalMixing:
      if (!(s.retain > 0.0 && s.retain < 1.0)) throw ConfigError("retain must lie in (0,1)");
      break;
    case SamplerKind::SubsetOfAtoms:
      if (s.atoms) {
        if (s.atoms->dimension() != d) throw ConfigError("atoms dimension mismatch");
        if (s.atoms->frame() != Frame::UnitCube) throw ConfigError("atoms must lie in [0,1]^d");
      } else if (s.atom_multiplier < 1) {
        throw ConfigError("atom_multiplier must be >= 1");
      }
      break;
  }
  if (config.comparison == Comparison::SampleVsAtomAverage &&
      s.kind != SamplerKind::SubsetOfAtoms) {
    throw ConfigError("sample_vs_atom_average requires the subset_of_atoms sampler");
  }

  for (std::size_t n : config.n_values) {
    std::size_t solver_size = n;
    if (s.kind == SamplerKind::SubsetOfAtoms) {
      const std::size_t count = atom_count(s, n);
      if (n > count) {
        throw ConfigError("n=" + std::to_string(n) + " exceeds the atom count " +
                          std::to_string(count));
      }
      if (config.comparison == Comparison::SampleVsAtomAverage && count != 2 * n) {
        solver_size = std::lcm(n, count);
      }
    }
    const bool sorted_path = d == 1 && solver_size == n;
    if (!sorted_path && solver_size > kMaxExactSize) {
      throw ConfigError("n=" + std::to_string(n) + " needs an assignment of size " +
                        std::to_string(solver_size) + ", above the cap " +
                        std::to_string(kMaxExactSize));
    }
  }

  switch (config.t_policy.kind) {
    case TPolicy::Kind::HalfInvN: break;
    case TPolicy::Kind::Fixed:
      if (!(config.t_policy.fixed > 0.0) || !std::isfinite(config.t_policy.fixed)) {
        throw ConfigError("fixed t must be positive and finite");
      }
      break;
    case TPolicy::Kind::Grid:
      if (config.t_policy.grid.empty()) throw ConfigError("t grid must be nonempty");
      for (double t : config.t_policy.grid) {
        if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t grid values must be positive");
      }
      break;
  }
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig config;
  try {
    reject_unknown_keys(j,
                        {"dimension", "n_values", "trials", "sampler", "metric", "comparison",
                         "t_policy", "seed", "compute_bounds", "compute_lower"},
                        "config");
    if (!j.contains("dimension")) throw ConfigError("config: missing 'dimension'");
    if (!j.contains("n_values")) throw ConfigError("config: missing 'n_values'");
    config.dimension = j.at("dimension").get<std::size_t>();
    config.n_values = j.at("n_values").get<std::vector<std::size_t>>();
    if (j.contains("trials")) config.trials = j.at("trials").get<std::size_t>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("compute_bounds")) config.compute_bounds = j.at("compute_bounds").get<bool>();
    if (j.contains("compute_lower")) config.compute_lower = j.at("compute_lower").get<bool>();

    if (j.contains("metric")) {
      const std::string m = normalize_name(j.at("metric").get<std::string>());
      if (m == "euclidean") {
        config.metric = Metric::Euclidean;
      } else if (m == "torus") {
        config.metric = Metric::Torus;
      } else {
        throw ConfigError("unknown metric '" + j.at("metric").get<std::string>() + "'");
      }
    }
    if (j.contains("comparison")) {
      const std::string c = normalize_name(j.at("comparison").get<std::string>());
      if (c == "twosamples") {
        config.comparison = Comparison::TwoSamples;
      } else if (c == "samplevsatomaverage") {
        config.comparison = Comparison::SampleVsAtomAverage;
      } else {
        throw ConfigError("unknown comparison '" + j.at("comparison").get<std::string>() + "'");
      }
    }

    if (j.contains("sampler")) {
      const json& s = j.at("sampler");
      if (s.is_string()) {
        config.sampler.kind = parse_sampler_kind(s.get<std::string>());
      } else {
        reject_unknown_keys(s, {"kind", "retain", "atom_multiplier", "atoms"}, "sampler");
        if (!s.contains("kind")) throw ConfigError("sampler: missing 'kind'");
        config.sampler.kind = parse_sampler_kind(s.at("kind").get<std::string>());
        if (s.contains("retain")) config.sampler.retain = s.at("retain").get<double>();
        if (s.contains("atom_multiplier")) {
          config.sampler.atom_multiplier = s.at("atom_multiplier").get<std::size_t>();
        }
        if (s.contains("atoms")) {
          const auto rows = s.at("atoms").get<std::vector<std::vector<double>>>();
          if (rows.empty()) throw ConfigError("sampler: 'atoms' is empty");
          std::vector<double> coords;
          for (const auto& row : rows) {
            if (row.size() != config.dimension) {
              throw ConfigError("sampler: every atom needs " + std::to_string(config.dimension) +
                                " coordinates");
            }
            coords.insert(coords.end(), row.begin(), row.end());
          }
          try {
            config.sampler.atoms.emplace(config.dimension, Frame::UnitCube, std::move(coords));
          } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("sampler: ") + e.what());
          }
        }
      }
    }

    if (j.contains("t_policy")) {
      const json& p = j.at("t_policy");
      std::string kind;
      if (p.is_string()) {
        kind = normalize_name(p.get<std::string>());
      } else {
        reject_unknown_keys(p, {"kind", "t", "values"}, "t_policy");
        if (!p.contains("kind")) throw ConfigError("t_policy: missing 'kind'");
        kind = normalize_name(p.at("kind").get<std::string>());
      }
      if (kind == "halfinvn") {
        config.t_policy.kind = TPolicy::Kind::HalfInvN;
      } else if (kind == "fixed") {
        if (!p.is_object() || !p.contains("t")) throw ConfigError("t_policy fixed needs 't'");
        config.t_policy.kind = TPolicy::Kind::Fixed;
        config.t_policy.fixed = p.at("t").get<double>();
      } else if (kind == "grid") {
        if (!p.is_object() || !p.contains("values")) {
          throw ConfigError("t_policy grid needs 'values'");
        }
        config.t_policy.kind = TPolicy::Kind::Grid;
        config.t_policy.grid = p.at("values").get<std::vector<double>>();
      } else {
        throw ConfigError("unknown t_policy kind");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(config);
  return config;
}

json to_json(const ExperimentConfig& config) {
  json sampler = {{"kind", std::string(sampler_name(config.sampler.kind))}};
  if (config.sampler.kind == SamplerKind::RenewalMixing) sampler["retain"] = config.sampler.retain;
  if (config.sampler.kind == SamplerKind::SubsetOfAtoms) {
    if (config.sampler.atoms) {
      json atoms = json::array();
      for (std::size_t k = 0; k < config.sampler.atoms->size(); ++k) {
        const auto p = config.sampler.atoms->point(k);
        atoms.push_back(std::vector<double>(p.begin(), p.end()));
      }
      sampler["atoms"] = atoms;
    } else {
      sampler["atom_multiplier"] = config.sampler.atom_multiplier;
    }
  }
  json t_policy;
  switch (config.t_policy.kind) {
    case TPolicy::Kind::HalfInvN: t_policy = {{"kind", "half_inv_n"}}; break;
    case TPolicy::Kind::Fixed: t_policy = {{"kind", "fixed"}, {"t", config.t_policy.fixed}}; break;
    case TPolicy::Kind::Grid:
      t_policy = {{"kind", "grid"}, {"values", config.t_policy.grid}};
      break;
  }
  return {{"dimension", config.dimension},
          {"n_values", config.n_values},
          {"trials", config.trials},
          {"sampler", sampler},
          {"metric", std::string(to_string(config.metric))},
          {"comparison", std::string(comparison_name(config.comparison))},
          {"t_policy", t_policy},
          {"seed", config.seed},
          {"compute_bounds", config.compute_bounds},
          {"compute_lower", config.compute_lower}};
}

std::string_view to_string(RateModel model) {
  return model == RateModel::Power ? "power" : "sqrtlog";
}

RateModel parse_rate_model(std::string_view name) {
  const std::string key = normalize_name(name);
  if (key == "power") return RateModel::Power;
  if (key == "sqrtlog") return RateModel::SqrtLog;
  throw std::invalid_argument("unknown rate model '" + std::string(name) + "'");
}

RateFit fit_rate(const std::vector<AggregateRow>& rows, RateModel model) {
  check_fit_rows(rows);
  std::vector<double> shape(rows.size());
  if (model == RateModel::SqrtLog) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double n = static_cast<double>(rows[i].n);
      shape[i] = std::sqrt(std::log(n) / n);
    }
    return fit_scalar_multiple(rows, model, 0.5, shape);
  }
  // Ordinary least squares of log mean = log C - beta log n.
  const double count = static_cast<double>(rows.size());
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& row : rows) {
    sx += std::log(static_cast<double>(row.n));
    sy += std::log(row.mean);
  }
  const double mx = sx / count;
  const double my = sy / count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& row : rows) {
    const double dx = std::log(static_cast<double>(row.n)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(row.mean) - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  RateFit fit;
  fit.model = RateModel::Power;
  fit.constant = std::exp(intercept);
  fit.exponent = -slope;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  double sq_rel = 0.0;
  for (const auto& row : rows) {
    const double ln = std::log(static_cast<double>(row.n));
    const double predicted_log = intercept + slope * ln;
    const double r = std::log(row.mean) - predicted_log;
    ss_res += r * r;
    const double t = std::log(row.mean) - my;
    ss_tot += t * t;
    const double rel = (row.mean - std::exp(predicted_log)) / row.mean;
    fit.n.push_back(row.n);
    fit.relative_residuals.push_back(rel);
    sq_rel += rel * rel;
  }
  fit.mean_sq_relative_residual = sq_rel / count;
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0)
                               : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

RateFit fit_power_fixed_exponent(const std::vector<AggregateRow>& rows, double beta) {
  check_fit_rows(rows);
  std::vector<double> shape(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    shape[i] = std::pow(static_cast<double>(rows[i].n), -beta);
  }
  return fit_scalar_multiple(rows, RateModel::Power, beta, shape);
}

double subset_vs_average_w1(const DiscreteMeasure& atoms, std::span<const std::size_t> tau,
                            Metric metric) {
  const std::size_t count = atoms.size();
  const std::size_t n = tau.size();
  if (n == 0 || n > count) throw std::invalid_argument("subset_vs_average_w1: bad subset size");
  const DiscreteMeasure chosen = select_atoms(atoms, tau);
  if (count == 2 * n) {
    // mu - mu_tau = (mu_tau^c - mu_tau) / 2, so W1(mu_tau, mu) is half the
    // matching cost between tau and its complement.
    std::vector<char> in_tau(count, 0);
    for (std::size_t i : tau) in_tau[i] = 1;
    std::vector<std::size_t> rest;
    rest.reserve(n);
    for (std::size_t i = 0; i < count; ++i) {
      if (!in_tau[i]) rest.push_back(i);
    }
    if (rest.size() != n) throw std::invalid_argument("subset_vs_average_w1: repeated indices");
    return 0.5 * two_sample_w1(chosen, select_atoms(atoms, rest), metric);
  }
  return balanced_or_unbalanced(chosen, atoms, metric);
}

std::optional<double> paper_bound_for(const ExperimentConfig& config, std::size_t n) {
  const std::size_t d = config.dimension;
  if (config.comparison == Comparison::SampleVsAtomAverage) return subset_constants(n, d);
  switch (config.sampler.kind) {
    case SamplerKind::IidUniform:
    case SamplerKind::RotationSequence:
      return akt_upper_constants(n, d);
    case SamplerKind::SubsetOfAtoms:
      // Both subsets are within subset_constants of the atom average.
      return 2.0 * subset_constants(n, d);
    case SamplerKind::RenewalMixing: {
      const double rho = config.sampler.retain;
      const double delta2 = (4.0 + 128.0 * rho / (1.0 - rho)) / static_cast<double>(n);
      const double delta = std::sqrt(delta2);
      if (delta > 2.0) return std::nullopt;
      return quantitative_bound(delta, d);
    }
    case SamplerKind::IidCustom:
      return std::nullopt;
  }
  return std::nullopt;
}

ExperimentResult run_experiment(const ExperimentConfig& config, RunOptions options) {
  validate(config);

  std::vector<std::optional<DiscreteMeasure>> atoms(config.n_values.size());
  if (config.sampler.kind == SamplerKind::SubsetOfAtoms) {
    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
      atoms[i] = atoms_for(config, config.n_values[i]);
    }
  }

  struct Task {
    std::size_t n_index;
    std::size_t trial;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < config.n_values.size(); ++i) {
    for (std::size_t k = 0; k < config.trials; ++k) tasks.push_back({i, k});
  }
  std::vector<TrialRecord> records(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());

  auto work = [&](std::size_t index) {
    const Task& task = tasks[index];
    const DiscreteMeasure* task_atoms = atoms[task.n_index] ? &*atoms[task.n_index] : nullptr;
    try {
      records[index] = run_trial(config, task_atoms, config.n_values[task.n_index], task.trial,
                                 options.record_timing);
    } catch (...) {
      errors[index] = std::current_exception();
    }
  };

  std::size_t jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : options.jobs;
  jobs = std::min(jobs, tasks.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      work(i);
      if (errors[i]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        while (!failed.load(std::memory_order_relaxed)) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) break;
          work(i);
          if (errors[i]) failed.store(true);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  // Report the earliest failing trial so the error does not depend on jobs.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.records = std::move(records);
  result.aggregates = aggregate(config, result.records);
  bool fittable = result.aggregates.size() >= 3;
  for (const auto& row : result.aggregates) fittable = fittable && row.mean > 0.0;
  if (fittable) {
    result.fit = fit_rate(result.aggregates,
                          config.dimension == 2 ? RateModel::SqrtLog : RateModel::Power);
  }
  return result;
}

std::vector<AggregateRow> aggregate(const ExperimentConfig& config,
                                    const std::vector<TrialRecord>& records) {
  std::vector<AggregateRow> rows;
  for (std::size_t n : config.n_values) {
    std::vector<const TrialRecord*> group;
    for (const auto& r : records) {
      if (r.n == n) group.push_back(&r);
    }
    if (group.empty()) continue;
    AggregateRow row;
    row.n = n;
    const double count = static_cast<double>(group.size());
    double sum = 0.0;
    double bound_sum = 0.0;
    bool all_bounds = true;
    row.min = group.front()->w1;
    row.max = group.front()->w1;
    for (const auto* r : group) {
      sum += r->w1;
      row.min = std::min(row.min, r->w1);
      row.max = std::max(row.max, r->w1);
      if (r->bound_total) {
        bound_sum += *r->bound_total;
      } else {
        all_bounds = false;
      }
    }
    row.mean = sum / count;
    if (group.size() > 1) {
      double ss = 0.0;
      for (const auto* r : group) ss += (r->w1 - row.mean) * (r->w1 - row.mean);
      row.stderr_mean = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    if (all_bounds) row.bound_mean = bound_sum / count;
    row.paper_bound = paper_bound_for(config, n);
    if (row.paper_bound) row.pass = row.mean <= *row.paper_bound;
    rows.push_back(row);
  }
  return rows;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                      bool include_timing) {
  out << kTrialCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.trial << ',' << format_double(r.w1) << ','
        << optional_field(r.bound_total) << ',' << optional_field(r.t_used) << ','
        << optional_field(r.lower) << ',';
    if (include_timing) out << format_double(r.wall_ms);
    out << '\n';
  }
}

void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.mean) << ',' << format_double(r.stderr_mean) << ','
        << format_double(r.min) << ',' << format_double(r.max) << ','
        << optional_field(r.bound_mean) << ',' << optional_field(r.paper_bound) << ',';
    if (r.pass) out << (*r.pass ? "true" : "false");
    out << '\n';
  }
}

void write_fit_csv(std::ostream& out, const RateFit& fit) {
  out << "model,C,beta,r2,mean_sq_rel_residual,n,relative_residual\n";
  for (std::size_t i = 0; i < fit.n.size(); ++i) {
    out << to_string(fit.model) << ',' << format_double(fit.constant) << ','
        << format_double(fit.exponent) << ',' << format_double(fit.r_squared) << ','
        << format_double(fit.mean_sq_relative_residual) << ',' << fit.n[i] << ','
        << format_double(fit.relative_residuals[i]) << '\n';
  }
}

json results_to_json(const ExperimentResult& result, bool include_timing) {
  json records = json::array();
  for (const auto& r : result.records) {
    records.push_back({{"n", r.n},
                       {"trial", r.trial},
                       {"w1", r.w1},
                       {"bound_total", optional_json(r.bound_total)},
                       {"t", optional_json(r.t_used)},
                       {"lower", optional_json(r.lower)},
                       {"wall_ms", include_timing ? json(r.wall_ms) : json(nullptr)}});
  }
  json aggregates = json::array();
  for (const auto& a : result.aggregates) {
    aggregates.push_back({{"n", a.n},
                          {"mean", a.mean},
                          {"stderr", a.stderr_mean},
                          {"min", a.min},
                          {"max", a.max},
                          {"bound_mean", optional_json(a.bound_mean)},
                          {"paper_bound", optional_json(a.paper_bound)},
                          {"pass", a.pass ? json(*a.pass) : json(nullptr)}});
  }
  return {{"records", records},
          {"aggregates", aggregates},
          {"fit", result.fit ? fit_to_json(*result.fit) : json(nullptr)}};
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::vector<TrialRecord> records;
  for (const auto& f : read_table(in, kTrialCsvHeader)) {
    TrialRecord r;
    r.n = parse_count(f[0]);
    r.trial = parse_count(f[1]);
    r.w1 = parse_double(f[2]);
    r.bound_total = parse_optional(f[3]);
    r.t_used = parse_optional(f[4]);
    r.lower = parse_optional(f[5]);
    r.wall_ms = parse_optional(f[6]).value_or(0.0);
    records.push_back(r);
  }
  return records;
}

std::vector<AggregateRow> read_aggregates_csv(std::istream& in) {
  std::vector<AggregateRow> rows;
  for (const auto& f : read_table(in, kAggregateCsvHeader)) {
    AggregateRow r;
    r.n = parse_count(f[0]);
    r.mean = parse_double(f[1]);
    r.stderr_mean = parse_double(f[2]);
    r.min = parse_double(f[3]);
    r.max = parse_double(f[4]);
    r.bound_mean = parse_optional(f[5]);
    r.paper_bound = parse_optional(f[6]);
    if (f[7] == "true") {
      r.pass = true;
    } else if (f[7] == "false") {
      r.pass = false;
    } else if (!f[7].empty()) {
      throw std::invalid_argument("CSV: pass must be true, false or empty");
    }
    rows.push_back(r);
  }
  return rows;
}

void emit_results(const ExperimentResult& result, OutputFormat format,
                  const std::filesystem::path& path, bool include_timing) {
  if (format == OutputFormat::Json) {
    write_file(path, results_to_json(result, include_timing).dump(2) + "\n");
    return;
  }
  std::ostringstream trials;
  write_trials_csv(trials, result.records, include_timing);
  write_file(path, trials.str());

  const std::filesystem::path stem = path.parent_path() / path.stem();
  std::ostringstream aggregates;
  write_aggregates_csv(aggregates, result.aggregates);
  write_file(stem.string() + "_aggregate.csv", aggregates.str());
  if (result.fit) {
    std::ostringstream fit;
    write_fit_csv(fit, *result.fit);
    write_file(stem.string() + "_fit.csv", fit.str());
  }
}

}  // namespace akt
