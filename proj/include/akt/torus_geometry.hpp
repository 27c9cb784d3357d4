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

#ifndef AKT_TORUS_GEOMETRY_HPP_
#define AKT_TORUS_GEOMETRY_HPP_

#include <numbers>
#include <span>
#include <string_view>
#include <vector>

namespace akt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Coordinate frame carried by every point and measure.
//   UnitCube  : [0,1]^d
//   HalfTorus : [0,pi]^d, the image of UnitCube under x -> pi x
//   FullTorus : (-pi,pi]^d with the flat torus metric
// HalfTorus points are valid FullTorus points.
enum class Frame { UnitCube, HalfTorus, FullTorus };

std::string_view to_string(Frame frame);

bool is_torus_frame(Frame frame);

// True when the coordinate lies in the frame's range.
bool in_frame(Frame frame, double coordinate);

class Point {
 public:
  // Throws std::invalid_argument on empty coordinates or out-of-range values.
  Point(std::vector<double> coords, Frame frame);

  std::size_t dimension() const { return coords_.size(); }
  Frame frame() const { return frame_; }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  std::vector<double> coords_;
  Frame frame_;
};

// Periodization map M(y) = y - 2 pi k with pi(2k-1) < y <= pi(2k+1).
// The result lies in (-pi, pi]; wrap(-pi) == pi.
double wrap(double y);

// rho(x, y) = min(|x - y|, 2 pi - |x - y|) for x, y in (-pi, pi].
double circle_distance(double x, double y);

// Flat torus distance: Euclidean combination of per-axis circle distances.
double torus_distance(std::span<const double> x, std::span<const double> y);
double torus_distance(const Point& x, const Point& y);

double euclidean_distance(std::span<const double> x, std::span<const double> y);
double euclidean_distance(const Point& x, const Point& y);

// Multiplies every coordinate by pi. Requires a UnitCube point.
Point to_half_torus(const Point& p);

}  // namespace akt

#endif  // AKT_TORUS_GEOMETRY_HPP_
