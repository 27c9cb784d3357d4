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

#include "akt/point_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace akt {

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    fields.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view field) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::invalid_argument("not a number: '" + std::string(field) + "'");
  }
  return value;
}

DiscreteMeasure read_points_csv(std::istream& in, const std::string& source) {
  std::vector<double> coords;
  std::size_t dimension = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (dimension == 0) dimension = fields.size();
    if (fields.size() != dimension) {
      throw std::invalid_argument(source + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(dimension) + " columns, got " +
                                  std::to_string(fields.size()));
    }
    for (const auto& field : fields) {
      double value = 0.0;
      try {
        value = parse_double(field);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(source + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(source + ":" + std::to_string(line_no) + ": value " + field +
                                    " outside [0,1]");
      }
      coords.push_back(value);
    }
  }
  if (coords.empty()) throw std::invalid_argument(source + ": no points");
  return DiscreteMeasure(dimension, Frame::UnitCube, std::move(coords));
}

DiscreteMeasure read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_points_csv(in, path.string());
}

void write_points_csv(std::ostream& out, const DiscreteMeasure& mu) {
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto p = mu.point(k);
    for (std::size_t l = 0; l < p.size(); ++l) {
      if (l) out << ',';
      out << format_double(p[l]);
    }
    out << '\n';
  }
}

}  // namespace akt
