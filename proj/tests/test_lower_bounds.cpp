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

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "akt/exact_transport.hpp"
#include "akt/lower_bounds.hpp"
#include "akt/series.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using akt::DiscreteMeasure;
using akt::Frame;
using akt::RngStream;

TEST_CASE("one-dimensional sum statistic") {
  const std::vector<double> xs{0.2, 0.7, 0.4};
  CHECK(akt::lower_1d_statistic(xs, xs).value == 0.0);
  const std::vector<double> zeros{0.0, 0.0};
  const std::vector<double> ones{1.0, 1.0};
  CHECK(akt::lower_1d_statistic(zeros, ones).value == 1.0);
  CHECK(akt::w1_1d(zeros, ones) == 1.0);
  CHECK(akt::lower_1d_statistic(zeros, ones).kind == akt::LowerBoundReport::Kind::OneDimSum);
  CHECK_THROWS_AS(akt::lower_1d_statistic(xs, zeros), std::invalid_argument);
}

TEST_CASE("one-dimensional sandwich on random instances") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 1 + rep % 50;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = unif(gen);
    for (auto& v : y) v = unif(gen);
    CHECK(akt::lower_1d_statistic(x, y).value <= akt::w1_1d(x, y) + 1e-12);
  }
}

TEST_CASE("one-dimensional statistic has the normal-approximation mean") {
  const std::size_t n = 500;
  const int trials = 10000;
  double sum = 0.0;
  for (int k = 0; k < trials; ++k) {
    RngStream rng = RngStream::derive(17, {n, static_cast<std::uint64_t>(k)});
    const auto pair = akt::sample_iid_uniform(n, 1, rng);
    sum += akt::lower_1d_statistic(pair.first.coords(), pair.second.coords()).value;
  }
  const double expected = std::sqrt(1.0 / (3.0 * oracle::kPi)) / std::sqrt(static_cast<double>(n));
  CHECK(sum / trials == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("distance-to-sample integral closed forms") {
  const DiscreteMeasure center(1, Frame::UnitCube, {0.5});
  const auto r = akt::dist_to_sample_integral(center, 1000);
  CHECK(r.kind == akt::LowerBoundReport::Kind::DistToSample);
  CHECK(std::abs(r.value - 0.25) <= r.quadrature_error);
  CHECK(r.quadrature_error == doctest::Approx(0.0005));

  // n points at the centres of n equal cells: the integral is 1/(4n).
  const std::size_t n = 16;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = (static_cast<double>(i) + 0.5) / n;
  const DiscreteMeasure centres(1, Frame::UnitCube, grid);
  const auto g = akt::dist_to_sample_integral(centres, 64 * n);
  CHECK(std::abs(g.value - 1.0 / (4.0 * n)) <= g.quadrature_error);
  CHECK(g.certified() <= 1.0 / (4.0 * n));

  CHECK_THROWS_AS(akt::dist_to_sample_integral(center, 1), std::invalid_argument);
  const DiscreteMeasure five(5, Frame::UnitCube, {0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK_THROWS_AS(akt::dist_to_sample_integral(five, 4), std::invalid_argument);
  CHECK_THROWS_AS(akt::dist_to_sample_integral(center.embedded_in_torus(), 10),
                  std::invalid_argument);
}

TEST_CASE("distance-to-sample integral matches a brute-force quadrature") {
  std::mt19937_64 gen(5);
  const auto cloud = oracle::random_cloud(gen, 37, 2, 0.0, 1.0);
  const auto mu = testing_util::to_measure(cloud, Frame::UnitCube);
  const std::size_t res = 40;
  double sum = 0.0;
  for (std::size_t i = 0; i < res; ++i) {
    for (std::size_t j = 0; j < res; ++j) {
      const std::vector<double> x{(i + 0.5) / res, (j + 0.5) / res};
      double best = 1e300;
      for (const auto& p : cloud) best = std::min(best, oracle::euclid(x, p));
      sum += best;
    }
  }
  CHECK(akt::dist_to_sample_integral(mu, res).value ==
        doctest::Approx(sum / (res * res)).epsilon(1e-12));
}

TEST_CASE("distance-to-sample integral does not grow when points are added") {
  RngStream rng(8);
  std::vector<double> coords;
  double previous = 1e300;
  for (int step = 0; step < 10; ++step) {
    for (int k = 0; k < 3 * 5; ++k) coords.push_back(rng.uniform01());
    const DiscreteMeasure mu(3, Frame::UnitCube, coords);
    const double v = akt::dist_to_sample_integral(mu, 24).value;
    CHECK(v <= previous);
    previous = v;
  }
}

TEST_CASE("distance-to-sample integral scales like n^(-1/3) in d = 3") {
  std::vector<double> normalized;
  for (std::size_t n : {128u, 256u, 512u, 1024u, 2048u}) {
    double sum = 0.0;
    const int trials = 3;
    for (int k = 0; k < trials; ++k) {
      RngStream rng = RngStream::derive(90, {n, static_cast<std::uint64_t>(k)});
      const auto pair = akt::sample_iid_uniform(n, 3, rng);
      sum += akt::dist_to_sample_integral(pair.first, 48).certified();
    }
    normalized.push_back(sum / trials * std::cbrt(static_cast<double>(n)));
  }
  const auto [lo, hi] = std::minmax_element(normalized.begin(), normalized.end());
  CHECK(*lo > 0.0);
  CHECK(*hi / *lo < 1.5);
}

TEST_CASE("nearest-neighbour lower bound never exceeds the exact cost") {
  std::mt19937_64 gen(13);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 5 + rep * 3;
    const std::size_t d = 1 + rep % 3;
    const auto x = oracle::random_cloud(gen, n, d, 0.0, 1.0);
    const auto y = oracle::random_cloud(gen, n, d, 0.0, 1.0);
    const auto mu = testing_util::to_measure(x, Frame::UnitCube);
    const auto nu = testing_util::to_measure(y, Frame::UnitCube);
    const auto lb = akt::nearest_neighbor_lower(mu, nu);
    CHECK(lb.kind == akt::LowerBoundReport::Kind::NearestNeighbor);
    CHECK(lb.value <= akt::w1_exact(mu, nu, akt::Metric::Euclidean).value + 1e-12);
    // Brute-force nearest distances.
    double fwd = 0.0, bwd = 0.0;
    for (const auto& p : y) {
      double best = 1e300;
      for (const auto& q : x) best = std::min(best, oracle::euclid(p, q));
      fwd += best;
    }
    for (const auto& p : x) {
      double best = 1e300;
      for (const auto& q : y) best = std::min(best, oracle::euclid(p, q));
      bwd += best;
    }
    CHECK(lb.value == doctest::Approx(std::max(fwd, bwd) / n).epsilon(1e-12));
  }
  const DiscreteMeasure a(1, Frame::UnitCube, {0.5});
  CHECK_THROWS_AS(akt::nearest_neighbor_lower(a, a.embedded_in_torus()), std::invalid_argument);
}

TEST_CASE("c(n, t) series") {
  const double t = 0.01;
  CHECK(akt::c_series(100, t, 2).value ==
        doctest::Approx(2.0 / 100.0 * akt::s_d_series(2.0 * t, 2).value).epsilon(1e-15));
  CHECK(akt::c_series(200, t, 2).value ==
        doctest::Approx(akt::c_series(100, t, 2).value / 2.0).epsilon(1e-15));
  double previous = 0.0;
  for (int k = 7; k <= 13; ++k) {
    const std::size_t n = std::size_t{1} << k;
    const double nn = static_cast<double>(n);
    const double scaled = nn * akt::c_series(n, 1.0 / (2.0 * nn), 2).value;
    CHECK(scaled / std::log(nn) >= 0.5);
    CHECK(scaled / std::log(nn) <= 8.0);
    CHECK(scaled > previous);
    previous = scaled;
  }
  CHECK_THROWS_AS(akt::c_series(0, t, 2), std::invalid_argument);
  CHECK_THROWS_AS(akt::c_series(10, 0.0, 2), std::invalid_argument);
}

TEST_CASE("e(n, t) series") {
  const double t = 0.02;
  CHECK(akt::e_series(64, t, 2).value / akt::e_series(32, t, 2).value ==
        doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  double previous = 1e300;
  for (double s = 0.005; s < 2.0; s *= 1.7) {
    const double v = akt::e_series(100, s, 2).value;
    CHECK(v < previous);
    previous = v;
  }
  // Direct fourth power of the 1/|m|-weighted sum over a large box.
  const double tt = 0.05;
  const double inner = oracle::lattice_box_sum(tt, 2, 40, 1);
  const auto e = akt::e_series(50, tt, 2);
  CHECK(std::abs(e.value - std::pow(inner, 4.0) / std::pow(50.0, 3.0)) <=
        e.error_bound + 1e-12 * e.value);
  CHECK_THROWS_AS(akt::e_series(10, -1.0, 2), std::invalid_argument);
}

TEST_CASE("e(n, t) relative to c(n, t)^2 at t = 1/(2n)") {
  // With the fourth-power definition the ratio grows like n / log(n)^2 in
  // d = 2, so e is not small against c^2 at moderate n.
  for (std::size_t n : {1024u, 4096u}) {
    const double nn = static_cast<double>(n);
    const double t = 1.0 / (2.0 * nn);
    const double c = akt::c_series(n, t, 2).value;
    const double e = akt::e_series(n, t, 2).value;
    const double ratio = e / (c * c);
    CHECK(ratio > 1.0);
    CHECK(ratio * std::log(nn) * std::log(nn) / nn > 10.0);
    CHECK(ratio * std::log(nn) * std::log(nn) / nn < 1000.0);
  }
}
