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
#include <random>
#include <vector>

#include "akt/rng.hpp"
#include "doctest.h"

using akt::RngStream;

TEST_CASE("streams are deterministic per seed and path") {
  RngStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  auto s = RngStream::derive(7, {256, 3});
  auto t = RngStream::derive(7, {256, 3});
  auto u = RngStream::derive(7, {256, 4});
  auto v = RngStream::derive(7, {3, 256});
  const auto first = s.next_u64();
  CHECK(first == t.next_u64());
  CHECK(first != u.next_u64());
  CHECK(first != v.next_u64());
}

TEST_CASE("split does not advance the parent") {
  RngStream a(1), b(1);
  auto child = a.split(5);
  (void)child.next_u64();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 moments and range") {
  RngStream rng(123);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform01();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("uniform_index is unbiased over a small range") {
  RngStream rng(99);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 22.46);  // 6 dof, 0.999 quantile
}

TEST_CASE("normal has unit variance") {
  RngStream rng(5);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 0.015);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("neighbouring streams look uncorrelated") {
  const int n = 50000;
  double cross = 0.0;
  auto a = RngStream::derive(0, {1, 0});
  auto b = RngStream::derive(0, {1, 1});
  for (int i = 0; i < n; ++i) cross += (a.uniform01() - 0.5) * (b.uniform01() - 0.5);
  // Each product has standard deviation 1/12.
  CHECK(std::abs(cross / n) < 5.0 / 12.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("satisfies UniformRandomBitGenerator") {
  RngStream rng(8);
  std::uniform_int_distribution<int> dist(1, 6);
  const int v = dist(rng);
  CHECK(v >= 1);
  CHECK(v <= 6);
}
