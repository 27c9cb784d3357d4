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
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "akt/point_io.hpp"
#include "doctest.h"

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> unif(-1e6, 1e6);
  for (int k = 0; k < 10000; ++k) {
    const double x = k % 3 == 0 ? std::ldexp(unif(gen), -(k % 900)) : unif(gen);
    CHECK(akt::parse_double(akt::format_double(x)) == x);
  }
  CHECK(akt::format_double(0.5) == "0.5");
  CHECK(akt::parse_double("+0.25") == 0.25);
  CHECK_THROWS_AS(akt::parse_double("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(akt::parse_double(""), std::invalid_argument);
}

TEST_CASE("split_csv_line trims and keeps empty fields") {
  const auto f = akt::split_csv_line(" 1, 2 ,,3\r");
  REQUIRE(f.size() == 4);
  CHECK(f[0] == "1");
  CHECK(f[1] == "2");
  CHECK(f[2].empty());
  CHECK(f[3] == "3");
}

TEST_CASE("point CSV round trip") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> coords(3 * 40);
  for (auto& c : coords) c = unif(gen);
  const akt::DiscreteMeasure mu(3, akt::Frame::UnitCube, coords);
  std::stringstream buf;
  akt::write_points_csv(buf, mu);
  const auto back = akt::read_points_csv(buf, "buf");
  CHECK(back.dimension() == 3);
  CHECK(back.size() == 40);
  CHECK(std::ranges::equal(back.coords(), mu.coords()));
}

TEST_CASE("point CSV skips blank lines and accepts CRLF") {
  std::istringstream in("0.1,0.2\r\n\n   \n0.3,0.4\n");
  const auto mu = akt::read_points_csv(in, "in");
  CHECK(mu.size() == 2);
  CHECK(std::ranges::equal(mu.coords(), std::vector<double>{0.1, 0.2, 0.3, 0.4}));
}

TEST_CASE("point CSV errors carry source and line") {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      akt::read_points_csv(in, "pts.csv");
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("0.1,0.2\n0.3\n").find("pts.csv:2") != std::string::npos);
  CHECK(message("0.1\n1.5\n").find("outside") != std::string::npos);
  CHECK(message("0.1\n-0.0001\n").find("pts.csv:2") != std::string::npos);
  CHECK(message("0.1\nabc\n").find("not a number") != std::string::npos);
  CHECK(message("nan\n").find("outside") != std::string::npos);
  CHECK(message("\n\n").find("no points") != std::string::npos);
  CHECK_THROWS_AS(akt::read_points_csv(std::filesystem::path("/nonexistent/x.csv")),
                  std::runtime_error);
}
