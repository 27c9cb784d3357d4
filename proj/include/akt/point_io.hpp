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

#ifndef AKT_POINT_IO_HPP_
#define AKT_POINT_IO_HPP_

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "akt/measures.hpp"

namespace akt {

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

std::vector<std::string> split_csv_line(std::string_view line);

double parse_double(std::string_view field);

// Point list: CSV, no header, one point per row, d columns, values in [0,1].
// Blank lines are skipped. The result is in the UnitCube frame.
DiscreteMeasure read_points_csv(std::istream& in, const std::string& source = "<stream>");
DiscreteMeasure read_points_csv(const std::filesystem::path& path);

void write_points_csv(std::ostream& out, const DiscreteMeasure& mu);

}  // namespace akt

#endif  // AKT_POINT_IO_HPP_
