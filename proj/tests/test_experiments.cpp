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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "akt/experiments.hpp"
#include "akt/fourier_bound.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using akt::ConfigError;
using akt::ExperimentConfig;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.dimension = 2;
  c.n_values = {16, 32, 64};
  c.trials = 5;
  c.seed = 2024;
  c.compute_bounds = true;
  c.compute_lower = true;
  return c;
}

std::string trials_csv(const akt::ExperimentResult& r) {
  std::ostringstream out;
  akt::write_trials_csv(out, r.records, false);
  return out.str();
}

// Brute-force W1(mu_tau, mu) by replicating both measures to a common size
// and solving the assignment with the reference Hungarian method.
double subset_average_oracle(const oracle::Cloud& atoms, const std::vector<std::size_t>& tau) {
  const std::size_t N = atoms.size();
  const std::size_t n = tau.size();
  const std::size_t L = std::lcm(N, n);
  oracle::Cloud left, right;
  for (std::size_t r = 0; r < L / n; ++r) {
    for (std::size_t i : tau) left.push_back(atoms[i]);
  }
  for (std::size_t r = 0; r < L / N; ++r) {
    for (const auto& a : atoms) right.push_back(a);
  }
  return oracle::hungarian_total(oracle::cost(left, right, oracle::euclid)) /
         static_cast<double>(L);
}

std::vector<akt::AggregateRow> rows_from(const std::vector<std::size_t>& ns,
                                         const std::vector<double>& means) {
  std::vector<akt::AggregateRow> rows;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    akt::AggregateRow r;
    r.n = ns[i];
    r.mean = means[i];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("experiments are deterministic and independent of the job count") {
  const auto config = small_config();
  const auto a = akt::run_experiment(config, {1, false});
  const auto b = akt::run_experiment(config, {1, false});
  const auto c = akt::run_experiment(config, {4, false});
  CHECK(trials_csv(a) == trials_csv(b));
  CHECK(trials_csv(a) == trials_csv(c));
  REQUIRE(a.records.size() == 15);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].n == config.n_values[i / 5]);
    CHECK(a.records[i].trial == i % 5);
  }
  auto other = config;
  other.seed = 2025;
  CHECK(trials_csv(akt::run_experiment(other)) != trials_csv(a));
}

TEST_CASE("every trial satisfies the sandwich") {
  for (auto metric : {akt::Metric::Euclidean, akt::Metric::Torus}) {
    for (std::size_t d : {1u, 2u, 3u}) {
      auto config = small_config();
      config.dimension = d;
      config.metric = metric;
      const auto result = akt::run_experiment(config, {2, false});
      for (const auto& r : result.records) {
        REQUIRE(r.lower);
        REQUIRE(r.bound_total);
        CHECK(*r.lower <= r.w1 + 1e-9);
        CHECK(r.w1 <= *r.bound_total + 1e-9);
        CHECK(*r.t_used == doctest::Approx(1.0 / (2.0 * r.n)));
      }
    }
  }
}

TEST_CASE("trial W1 matches a direct recomputation") {
  auto config = small_config();
  config.compute_bounds = false;
  config.compute_lower = false;
  config.n_values = {6, 7, 8};
  config.trials = 2;
  const auto result = akt::run_experiment(config);
  for (const auto& r : result.records) {
    akt::RngStream rng = akt::RngStream::derive(config.seed, {r.n, r.trial});
    const auto pair = akt::sample_iid_uniform(r.n, 2, rng);
    const auto x = testing_util::to_cloud(pair.first);
    const auto y = testing_util::to_cloud(pair.second);
    CHECK(r.w1 == doctest::Approx(oracle::permutation_min(oracle::cost(x, y, oracle::euclid)))
                      .epsilon(1e-12));
  }
}

TEST_CASE("subset against atom average matches brute force") {
  std::mt19937_64 gen(77);
  for (auto [N, n] : std::vector<std::pair<std::size_t, std::size_t>>{
           {8, 4}, {6, 3}, {6, 4}, {8, 2}, {9, 6}, {5, 5}}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto atoms = oracle::random_cloud(gen, N, 2, 0.0, 1.0);
      std::vector<std::size_t> idx(N);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::shuffle(idx.begin(), idx.end(), gen);
      std::vector<std::size_t> tau(idx.begin(), idx.begin() + static_cast<long>(n));
      const auto mu = testing_util::to_measure(atoms, akt::Frame::UnitCube);
      CHECK(akt::subset_vs_average_w1(mu, tau, akt::Metric::Euclidean) ==
            doctest::Approx(subset_average_oracle(atoms, tau)).epsilon(1e-10));
    }
  }
}

TEST_CASE("subset experiment runs with generated atoms") {
  auto config = small_config();
  config.sampler.kind = akt::SamplerKind::SubsetOfAtoms;
  config.comparison = akt::Comparison::SampleVsAtomAverage;
  const auto result = akt::run_experiment(config, {3, false});
  REQUIRE(result.aggregates.size() == 3);
  for (const auto& row : result.aggregates) {
    REQUIRE(row.paper_bound);
    CHECK(*row.paper_bound == doctest::Approx(akt::subset_constants(row.n, 2)));
    CHECK(row.pass.value());
  }
}

TEST_CASE("reference bound column per sampler") {
  auto config = small_config();
  CHECK(*akt::paper_bound_for(config, 1024) == doctest::Approx(akt::akt_upper_constants(1024, 2)));
  config.sampler.kind = akt::SamplerKind::RotationSequence;
  CHECK(*akt::paper_bound_for(config, 64) == doctest::Approx(akt::akt_upper_constants(64, 2)));
  config.sampler.kind = akt::SamplerKind::SubsetOfAtoms;
  CHECK(*akt::paper_bound_for(config, 64) == doctest::Approx(2.0 * akt::subset_constants(64, 2)));
  config.sampler.kind = akt::SamplerKind::RenewalMixing;
  config.sampler.retain = 0.5;
  CHECK_FALSE(akt::paper_bound_for(config, 16));  // delta > 2
  const double delta = std::sqrt(132.0 / 4000.0);
  CHECK(*akt::paper_bound_for(config, 4000) == doctest::Approx(akt::quantitative_bound(delta, 2)));
  config.sampler.kind = akt::SamplerKind::IidCustom;
  CHECK_FALSE(akt::paper_bound_for(config, 64));
}

TEST_CASE("other samplers run") {
  for (auto kind : {akt::SamplerKind::RotationSequence, akt::SamplerKind::RenewalMixing,
                    akt::SamplerKind::SubsetOfAtoms}) {
    auto config = small_config();
    config.sampler.kind = kind;
    const auto result = akt::run_experiment(config, {2, false});
    CHECK(result.records.size() == 15);
    CHECK(result.fit);
  }
  auto custom = small_config();
  custom.sampler.kind = akt::SamplerKind::IidCustom;
  custom.sampler.custom = [](akt::RngStream& rng, std::span<double> out) {
    for (double& v : out) v = rng.uniform01() * rng.uniform01();
  };
  CHECK(akt::run_experiment(custom).records.size() == 15);
}

TEST_CASE("config validation") {
  auto expect_error = [](ExperimentConfig c) { CHECK_THROWS_AS(akt::validate(c), ConfigError); };
  auto c = small_config();
  CHECK_NOTHROW(akt::validate(c));
  c.dimension = 0;
  expect_error(c);
  c = small_config();
  c.n_values = {};
  expect_error(c);
  c.n_values = {8, 4};
  expect_error(c);
  c.n_values = {1, 4};
  expect_error(c);
  c = small_config();
  c.trials = 0;
  expect_error(c);
  c = small_config();
  c.sampler.kind = akt::SamplerKind::RenewalMixing;
  c.sampler.retain = 1.0;
  expect_error(c);
  c = small_config();
  c.dimension = 3;
  c.sampler.kind = akt::SamplerKind::RotationSequence;
  expect_error(c);
  c = small_config();
  c.comparison = akt::Comparison::SampleVsAtomAverage;
  expect_error(c);
  c = small_config();
  c.sampler.kind = akt::SamplerKind::IidCustom;
  expect_error(c);
  c = small_config();
  c.n_values = {10000};
  expect_error(c);
  c.dimension = 1;
  CHECK_NOTHROW(akt::validate(c));
  c = small_config();
  c.t_policy.kind = akt::TPolicy::Kind::Fixed;
  c.t_policy.fixed = -1.0;
  expect_error(c);
  c.t_policy.kind = akt::TPolicy::Kind::Grid;
  expect_error(c);
}

TEST_CASE("JSON config parsing") {
  const json j = json::parse(R"({
    "dimension": 2, "n_values": [16, 32], "trials": 3, "seed": 9,
    "sampler": {"kind": "renewal_mixing", "retain": 0.25},
    "metric": "torus", "t_policy": {"kind": "grid", "values": [0.01, 0.02]},
    "compute_bounds": true
  })");
  const auto c = akt::parse_config(j);
  CHECK(c.dimension == 2);
  CHECK(c.n_values == std::vector<std::size_t>{16, 32});
  CHECK(c.trials == 3);
  CHECK(c.seed == 9);
  CHECK(c.sampler.kind == akt::SamplerKind::RenewalMixing);
  CHECK(c.sampler.retain == 0.25);
  CHECK(c.metric == akt::Metric::Torus);
  CHECK(c.t_policy.kind == akt::TPolicy::Kind::Grid);
  CHECK(c.compute_bounds);
  CHECK_FALSE(c.compute_lower);

  const auto again = akt::parse_config(akt::to_json(c));
  CHECK(akt::to_json(again) == akt::to_json(c));

  CHECK(akt::parse_config(json::parse(R"({"dimension":1,"n_values":[4],"sampler":"IID-Uniform"})"))
            .sampler.kind == akt::SamplerKind::IidUniform);

  auto bad = [](const char* text) {
    CHECK_THROWS_AS(akt::parse_config(json::parse(text)), ConfigError);
  };
  bad(R"({"dimension":2,"n_values":[4],"bogus":1})");
  bad(R"({"dimension":2,"n_values":[4],"sampler":{"kind":"iid_uniform","extra":1}})");
  bad(R"({"dimension":2,"n_values":[4],"t_policy":{"kind":"fixed"}})");
  bad(R"({"n_values":[4]})");
  bad(R"({"dimension":2})");
  bad(R"({"dimension":"two","n_values":[4]})");
  bad(R"({"dimension":2,"n_values":[4],"sampler":"iid_custom"})");
  bad(R"({"dimension":2,"n_values":[4],"sampler":"sobol"})");
  bad(R"({"dimension":2,"n_values":[4],"metric":"manhattan"})");
  bad(R"([1,2])");
}

TEST_CASE("rate fits recover exact models") {
  const std::vector<std::size_t> ns{100, 200, 400, 800, 1600};
  std::vector<double> power, sqrtlog;
  for (std::size_t n : ns) {
    const double x = static_cast<double>(n);
    power.push_back(5.0 * std::pow(x, -1.0 / 3.0));
    sqrtlog.push_back(0.4 * std::sqrt(std::log(x) / x));
  }
  const auto p = akt::fit_rate(rows_from(ns, power), akt::RateModel::Power);
  CHECK(p.exponent == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(p.constant == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(p.r_squared == doctest::Approx(1.0));
  CHECK(p.mean_sq_relative_residual < 1e-20);

  const auto s = akt::fit_rate(rows_from(ns, sqrtlog), akt::RateModel::SqrtLog);
  CHECK(s.constant == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(s.mean_sq_relative_residual < 1e-20);
  const auto s_as_power = akt::fit_power_fixed_exponent(rows_from(ns, sqrtlog), 0.5);
  CHECK(s_as_power.mean_sq_relative_residual > s.mean_sq_relative_residual);

  const auto f = akt::fit_power_fixed_exponent(rows_from(ns, power), 1.0 / 3.0);
  CHECK(f.constant == doctest::Approx(5.0).epsilon(1e-12));

  CHECK_THROWS_AS(akt::fit_rate(rows_from({10, 20}, {1.0, 0.5}), akt::RateModel::Power),
                  std::invalid_argument);
  CHECK_THROWS_AS(akt::fit_rate(rows_from({10, 20, 40}, {1.0, 0.0, 0.5}), akt::RateModel::Power),
                  std::invalid_argument);
  CHECK_THROWS_AS(akt::fit_rate(rows_from({10, 10, 40}, {1.0, 1.0, 0.5}), akt::RateModel::Power),
                  std::invalid_argument);
  CHECK(akt::parse_rate_model("SqrtLog") == akt::RateModel::SqrtLog);
  CHECK_THROWS_AS(akt::parse_rate_model("exp"), std::invalid_argument);
}

TEST_CASE("CSV round trips") {
  const auto result = akt::run_experiment(small_config(), {2, false});
  std::stringstream trials;
  akt::write_trials_csv(trials, result.records, false);
  const auto back = akt::read_trials_csv(trials);
  REQUIRE(back.size() == result.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].n == result.records[i].n);
    CHECK(back[i].trial == result.records[i].trial);
    CHECK(back[i].w1 == result.records[i].w1);
    CHECK(back[i].bound_total == result.records[i].bound_total);
    CHECK(back[i].lower == result.records[i].lower);
    CHECK(back[i].t_used == result.records[i].t_used);
  }
  std::stringstream agg;
  akt::write_aggregates_csv(agg, result.aggregates);
  const auto rows = akt::read_aggregates_csv(agg);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].mean == result.aggregates[i].mean);
    CHECK(rows[i].stderr_mean == result.aggregates[i].stderr_mean);
    CHECK(rows[i].paper_bound == result.aggregates[i].paper_bound);
    CHECK(rows[i].pass == result.aggregates[i].pass);
  }

  std::ostringstream empty;
  akt::write_trials_csv(empty, {}, false);
  CHECK(empty.str() == std::string(akt::kTrialCsvHeader) + "\n");
  std::istringstream empty_in(empty.str());
  CHECK(akt::read_trials_csv(empty_in).empty());

  std::istringstream wrong("n,w1\n1,2\n");
  CHECK_THROWS_AS(akt::read_trials_csv(wrong), std::invalid_argument);
  std::istringstream short_row(std::string(akt::kTrialCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(akt::read_trials_csv(short_row), std::invalid_argument);
}

TEST_CASE("emit_results writes files and reports I/O errors") {
  const auto result = akt::run_experiment(small_config(), {2, false});
  const auto dir = std::filesystem::temp_directory_path() / "akt_emit_test";
  std::filesystem::create_directories(dir);
  akt::emit_results(result, akt::OutputFormat::Csv, dir / "run.csv");
  CHECK(std::filesystem::exists(dir / "run.csv"));
  CHECK(std::filesystem::exists(dir / "run_aggregate.csv"));
  CHECK(std::filesystem::exists(dir / "run_fit.csv"));
  std::ifstream fit_in(dir / "run_fit.csv");
  std::string header;
  std::getline(fit_in, header);
  CHECK(header == "model,C,beta,r2,mean_sq_rel_residual,n,relative_residual");

  akt::emit_results(result, akt::OutputFormat::Json, dir / "run.json");
  std::ifstream json_in(dir / "run.json");
  const json doc = json::parse(json_in);
  CHECK(doc.at("records").size() == 15);
  CHECK(doc.at("aggregates").size() == 3);
  CHECK(doc.at("fit").at("model") == "sqrtlog");
  CHECK(doc.at("records")[0].at("wall_ms").is_null());

  try {
    akt::emit_results(result, akt::OutputFormat::Csv, "/nonexistent/dir/run.csv");
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/run.csv") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("timing is recorded only on request") {
  auto config = small_config();
  config.trials = 2;
  const auto timed = akt::run_experiment(config, {1, true});
  for (const auto& r : timed.records) CHECK(r.wall_ms > 0.0);
  std::ostringstream out;
  akt::write_trials_csv(out, akt::run_experiment(config).records, false);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) CHECK(line.back() == ',');
}
