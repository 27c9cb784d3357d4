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

#include "akt/torus_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace akt {

std::string_view to_string(Frame frame) {
  switch (frame) {
    case Frame::UnitCube:
      return "unit";
    case Frame::HalfTorus:
      return "half_torus";
    case Frame::FullTorus:
      return "torus";
  }
  return "?";
}

bool is_torus_frame(Frame frame) {
  return frame == Frame::HalfTorus || frame == Frame::FullTorus;
}

bool in_frame(Frame frame, double c) {
  switch (frame) {
    case Frame::UnitCube:
      return c >= 0.0 && c <= 1.0;
    case Frame::HalfTorus:
      return c >= 0.0 && c <= kPi;
    case Frame::FullTorus:
      return c > -kPi && c <= kPi;
  }
  return false;
}

Point::Point(std::vector<double> coords, Frame frame)
    : coords_(std::move(coords)), frame_(frame) {
  if (coords_.empty()) throw std::invalid_argument("point must have dimension >= 1");
  for (double c : coords_) {
    if (!in_frame(frame_, c)) {
      throw std::invalid_argument("coordinate " + std::to_string(c) +
                                  " outside frame " + std::string(to_string(frame_)));
    }
  }
}

double wrap(double y) {
  if (!std::isfinite(y)) throw std::invalid_argument("wrap: non-finite input");
  if (y > -kPi && y <= kPi) return y;
  const double k = std::ceil((y - kPi) / kTwoPi);
  double r = y - kTwoPi * k;
  // Rounding in the quotient can land one window off.
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

double circle_distance(double x, double y) {
  if (!in_frame(Frame::FullTorus, x) || !in_frame(Frame::FullTorus, y)) {
    throw std::invalid_argument("circle_distance: inputs must lie in (-pi, pi]");
  }
  const double delta = std::abs(x - y);
  return std::min(delta, kTwoPi - delta);
}

double torus_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("torus_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = std::abs(x[i] - y[i]);
    const double r = std::min(delta, kTwoPi - delta);
    sum += r * r;
  }
  return std::sqrt(sum);
}

double torus_distance(const Point& x, const Point& y) {
  if (!is_torus_frame(x.frame()) || !is_torus_frame(y.frame())) {
    throw std::invalid_argument("torus_distance: points must be in a torus frame");
  }
  return torus_distance(x.coords(), y.coords());
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("euclidean_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - y[i];
    sum += delta * delta;
  }
  return std::sqrt(sum);
}

double euclidean_distance(const Point& x, const Point& y) {
  if (x.frame() != y.frame()) throw std::invalid_argument("euclidean_distance: frame mismatch");
  return euclidean_distance(x.coords(), y.coords());
}

Point to_half_torus(const Point& p) {
  if (p.frame() != Frame::UnitCube) {
    throw std::invalid_argument("to_half_torus: point must be in the unit cube frame");
  }
  std::vector<double> scaled(p.coords().begin(), p.coords().end());
  for (double& c : scaled) c *= kPi;
  return Point(std::move(scaled), Frame::HalfTorus);
}

}  // namespace akt
