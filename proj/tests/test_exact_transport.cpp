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

#include "akt/exact_transport.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using akt::DiscreteMeasure;
using akt::Frame;
using akt::kPi;
using akt::Metric;
using testing_util::to_measure;

TEST_CASE("identical multisets have zero cost") {
  const DiscreteMeasure mu(2, Frame::UnitCube, {0.1, 0.2, 0.9, 0.8, 0.5, 0.5});
  const DiscreteMeasure shuffled(2, Frame::UnitCube, {0.5, 0.5, 0.1, 0.2, 0.9, 0.8});
  CHECK(akt::w1_exact(mu, shuffled, Metric::Euclidean).value == 0.0);
  CHECK(akt::w1_exact(mu.embedded_in_torus(), shuffled.embedded_in_torus(), Metric::Torus).value ==
        0.0);
}

TEST_CASE("one-dimensional sorted example") {
  const DiscreteMeasure xs(1, Frame::UnitCube, {0.0, 0.5});
  const DiscreteMeasure ys(1, Frame::UnitCube, {0.25, 0.75});
  CHECK(akt::w1_exact(xs, ys, Metric::Euclidean).value == doctest::Approx(0.25));
  CHECK(akt::w1_1d(xs.coords(), ys.coords()) == doctest::Approx(0.25));
  CHECK(akt::w1_1d(xs.coords(), xs.coords()) == 0.0);
  const std::vector<double> three{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(akt::w1_1d(xs.coords(), three), std::invalid_argument);
}

TEST_CASE("brute force examples and limits") {
  const DiscreteMeasure x1(2, Frame::UnitCube, {0.0, 0.0});
  const DiscreteMeasure y1(2, Frame::UnitCube, {0.3, 0.4});
  CHECK(akt::w1_bruteforce(x1, y1, Metric::Euclidean).value == doctest::Approx(0.5));
  const DiscreteMeasure x(2, Frame::UnitCube, {0.0, 0.0, 1.0, 1.0});
  const DiscreteMeasure y(2, Frame::UnitCube, {1.0, 0.0, 0.0, 1.0});
  CHECK(akt::w1_bruteforce(x, y, Metric::Euclidean).value == doctest::Approx(1.0));
  CHECK(akt::w1_exact(x, y, Metric::Euclidean).value == doctest::Approx(1.0));
  const DiscreteMeasure ten(1, Frame::UnitCube, std::vector<double>(10, 0.5));
  CHECK_THROWS_AS(akt::w1_bruteforce(ten, ten, Metric::Euclidean), std::invalid_argument);
}

TEST_CASE("input compatibility") {
  const DiscreteMeasure a(1, Frame::UnitCube, {0.1, 0.2});
  const DiscreteMeasure b(1, Frame::UnitCube, {0.1});
  const DiscreteMeasure c(2, Frame::UnitCube, {0.1, 0.2});
  CHECK_THROWS_AS(akt::w1_exact(a, b, Metric::Euclidean), std::invalid_argument);
  CHECK_THROWS_AS(akt::w1_exact(b, c, Metric::Euclidean), std::invalid_argument);
  CHECK_THROWS_AS(akt::w1_exact(a, a, Metric::Torus), std::invalid_argument);
  CHECK_THROWS_AS(akt::w1_exact(a, a.embedded_in_torus(), Metric::Euclidean),
                  std::invalid_argument);
  const DiscreteMeasure full(1, Frame::FullTorus, {-1.0, 2.0});
  CHECK_NOTHROW(akt::w1_exact(a.embedded_in_torus(), full, Metric::Torus));
}

TEST_CASE("exact solver agrees with the permutation oracle") {
  std::mt19937_64 gen(101);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rep % 7;
    const std::size_t d = 1 + rep % 3;
    const auto xc = oracle::random_cloud(gen, n, d, -kPi, kPi);
    const auto yc = oracle::random_cloud(gen, n, d, -kPi, kPi);
    oracle::Cloud xw = xc, yw = yc;
    for (auto* cloud : {&xw, &yw}) {
      for (auto& p : *cloud) {
        for (auto& v : p) v = akt::wrap(v);
      }
    }
    const auto mu = to_measure(xw, Frame::FullTorus);
    const auto nu = to_measure(yw, Frame::FullTorus);
    const auto torus = akt::w1_exact(mu, nu, Metric::Torus);
    CHECK(std::abs(torus.value - oracle::permutation_min(oracle::cost(xw, yw, oracle::torus))) <
          1e-9);
    const auto euclid = akt::w1_exact(mu, nu, Metric::Euclidean);
    CHECK(std::abs(euclid.value - oracle::permutation_min(oracle::cost(xw, yw, oracle::euclid))) <
          1e-9);
    CHECK(torus.value <= euclid.value + 1e-12);
  }
}

TEST_CASE("permutation is a bijection reproducing the value") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 40 + rep;
    const auto mu = to_measure(oracle::random_cloud(gen, n, 2, 0.0, 1.0), Frame::UnitCube);
    const auto nu = to_measure(oracle::random_cloud(gen, n, 2, 0.0, 1.0), Frame::UnitCube);
    const auto r = akt::w1_exact(mu, nu, Metric::Euclidean);
    std::vector<std::size_t> sorted = r.permutation;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += akt::euclidean_distance(mu.point(i), nu.point(r.permutation[i]));
    }
    CHECK(std::abs(sum / n - r.value) < 1e-12);
  }
}

TEST_CASE("metric axioms on random equal-size measures") {
  std::mt19937_64 gen(19);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 20;
    const auto a = to_measure(oracle::random_cloud(gen, n, 2, 0.0, 1.0), Frame::UnitCube);
    const auto b = to_measure(oracle::random_cloud(gen, n, 2, 0.0, 1.0), Frame::UnitCube);
    const auto c = to_measure(oracle::random_cloud(gen, n, 2, 0.0, 1.0), Frame::UnitCube);
    const double ab = akt::w1_exact(a, b, Metric::Euclidean).value;
    const double ba = akt::w1_exact(b, a, Metric::Euclidean).value;
    const double bc = akt::w1_exact(b, c, Metric::Euclidean).value;
    const double ac = akt::w1_exact(a, c, Metric::Euclidean).value;
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(ac <= ab + bc + 1e-10);
    CHECK(akt::w1_exact(a, a, Metric::Euclidean).value == 0.0);
  }
}

TEST_CASE("half-torus equality and pi scaling") {
  std::mt19937_64 gen(29);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 25;
    const auto mu = to_measure(oracle::random_cloud(gen, n, 3, 0.0, 1.0), Frame::UnitCube);
    const auto nu = to_measure(oracle::random_cloud(gen, n, 3, 0.0, 1.0), Frame::UnitCube);
    const auto hm = akt::to_half_torus(mu);
    const auto hn = akt::to_half_torus(nu);
    const double unit = akt::w1_exact(mu, nu, Metric::Euclidean).value;
    const double torus = akt::w1_exact(hm, hn, Metric::Torus).value;
    const double euclid = akt::w1_exact(hm, hn, Metric::Euclidean).value;
    CHECK(torus == doctest::Approx(euclid).epsilon(1e-13));
    CHECK(torus == doctest::Approx(kPi * unit).epsilon(1e-13));
  }
}

TEST_CASE("sorted fast path agrees with the assignment solver") {
  std::mt19937_64 gen(37);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rep % 64;
    const auto mu = to_measure(oracle::random_cloud(gen, n, 1, 0.0, 1.0), Frame::UnitCube);
    const auto nu = to_measure(oracle::random_cloud(gen, n, 1, 0.0, 1.0), Frame::UnitCube);
    CHECK(std::abs(akt::w1_1d(mu.coords(), nu.coords()) -
                   akt::w1_exact(mu, nu, Metric::Euclidean).value) <= 1e-10);
  }
}

TEST_CASE("unbalanced measures through replication") {
  const DiscreteMeasure two(1, Frame::UnitCube, {0.0, 1.0});
  const DiscreteMeasure one(1, Frame::UnitCube, {0.5});
  CHECK(akt::w1_exact_unbalanced(two, one, Metric::Euclidean) == doctest::Approx(0.5));
  const DiscreteMeasure three(1, Frame::UnitCube, {0.0, 0.5, 1.0});
  // Quantile functions differ by 1/2 on [1/3, 2/3), so the cost is 1/6.
  CHECK(akt::w1_exact_unbalanced(two, three, Metric::Euclidean) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("size cap") {
  const DiscreteMeasure big(1, Frame::UnitCube, std::vector<double>(akt::kMaxExactSize + 1, 0.5));
  CHECK_THROWS_AS(akt::w1_exact(big, big, Metric::Euclidean), std::invalid_argument);
}
