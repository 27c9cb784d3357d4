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

#include "akt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace akt {
namespace {

void require_count(std::size_t n, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
}

void require_dimension(std::size_t d, const char* what) {
  if (d == 0) throw std::invalid_argument(std::string(what) + ": dimension must be >= 1");
}

std::vector<double> uniform_coords(std::size_t count, RngStream& rng) {
  std::vector<double> coords(count);
  for (double& c : coords) c = rng.uniform01();
  return coords;
}

// Even-position binary digits of `bits` (52 of them, MSB first) into one
// coordinate, odd-position digits into the other.
std::pair<double, double> split_digits(double s) {
  const auto bits = static_cast<std::uint64_t>(std::ldexp(std::clamp(s, 0.0, 1.0), 52));
  std::uint64_t even = 0;
  std::uint64_t odd = 0;
  for (int pos = 51; pos >= 1; pos -= 2) {
    even = (even << 1) | ((bits >> pos) & 1u);
    odd = (odd << 1) | ((bits >> (pos - 1)) & 1u);
  }
  // bits == 2^52 only when s == 1; map it to the corner.
  if (bits >> 52) return {1.0, 1.0};
  return {std::ldexp(static_cast<double>(even), -26), std::ldexp(static_cast<double>(odd), -26)};
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::size_t dimension, Frame frame, std::vector<double> coords)
    : dimension_(dimension), frame_(frame), coords_(std::move(coords)) {
  if (dimension_ == 0) throw std::invalid_argument("measure dimension must be >= 1");
  if (coords_.empty() || coords_.size() % dimension_ != 0) {
    throw std::invalid_argument("measure needs a positive whole number of points");
  }
  for (double c : coords_) {
    if (!in_frame(frame_, c)) {
      throw std::invalid_argument("measure coordinate " + std::to_string(c) + " outside frame " +
                                  std::string(to_string(frame_)));
    }
  }
}

DiscreteMeasure DiscreteMeasure::from_points(std::span<const Point> points) {
  if (points.empty()) throw std::invalid_argument("measure needs at least one point");
  const std::size_t d = points.front().dimension();
  const Frame frame = points.front().frame();
  std::vector<double> coords;
  coords.reserve(points.size() * d);
  for (const Point& p : points) {
    if (p.dimension() != d) throw std::invalid_argument("points differ in dimension");
    if (p.frame() != frame) throw std::invalid_argument("points differ in frame");
    coords.insert(coords.end(), p.coords().begin(), p.coords().end());
  }
  return DiscreteMeasure(d, frame, std::move(coords));
}

Point DiscreteMeasure::point_at(std::size_t k) const {
  const auto p = point(k);
  return Point(std::vector<double>(p.begin(), p.end()), frame_);
}

DiscreteMeasure DiscreteMeasure::embedded_in_torus() const {
  if (frame_ != Frame::UnitCube) {
    throw std::invalid_argument("embedded_in_torus: measure must be in the unit cube frame");
  }
  return DiscreteMeasure(dimension_, Frame::HalfTorus, coords_);
}

DiscreteMeasure to_half_torus(const DiscreteMeasure& mu) {
  if (mu.frame() != Frame::UnitCube) {
    throw std::invalid_argument("to_half_torus: measure must be in the unit cube frame");
  }
  std::vector<double> scaled(mu.coords().begin(), mu.coords().end());
  for (double& c : scaled) c *= kPi;
  return DiscreteMeasure(mu.dimension(), Frame::HalfTorus, std::move(scaled));
}

MeasurePair sample_iid_uniform(std::size_t n, std::size_t d, RngStream& rng) {
  require_count(n, "sample_iid_uniform");
  require_dimension(d, "sample_iid_uniform");
  auto xs = uniform_coords(n * d, rng);
  auto ys = uniform_coords(n * d, rng);
  return {DiscreteMeasure(d, Frame::UnitCube, std::move(xs)),
          DiscreteMeasure(d, Frame::UnitCube, std::move(ys))};
}

MeasurePair sample_iid_custom(std::size_t n, std::size_t d, const PointSampler& sampler,
                              RngStream& rng) {
  require_count(n, "sample_iid_custom");
  require_dimension(d, "sample_iid_custom");
  if (!sampler) throw std::invalid_argument("sample_iid_custom: empty sampler");
  std::vector<double> xs(n * d);
  std::vector<double> ys(n * d);
  for (std::size_t k = 0; k < n; ++k) sampler(rng, std::span<double>(xs).subspan(k * d, d));
  for (std::size_t k = 0; k < n; ++k) sampler(rng, std::span<double>(ys).subspan(k * d, d));
  return {DiscreteMeasure(d, Frame::UnitCube, std::move(xs)),
          DiscreteMeasure(d, Frame::UnitCube, std::move(ys))};
}

RotationMaps default_rotation_maps() {
  return RotationMaps{
      2,
      [](double s, std::span<double> out) {
        const auto [a, b] = split_digits(s);
        out[0] = a;
        out[1] = b;
      },
      [](double s, std::span<double> out) {
        const auto [a, b] = split_digits(s);
        out[0] = b;
        out[1] = a;
      },
  };
}

RotationMaps identity_rotation_maps() {
  auto identity = [](double s, std::span<double> out) { out[0] = s; };
  return RotationMaps{1, identity, identity};
}

MeasurePair sample_rotation_sequence(std::size_t n, const RotationMaps& maps, RngStream& rng) {
  require_count(n, "sample_rotation_sequence");
  require_dimension(maps.dimension, "sample_rotation_sequence");
  if (!maps.u || !maps.v) throw std::invalid_argument("sample_rotation_sequence: empty map");
  const std::size_t d = maps.dimension;
  const double w1 = rng.uniform01();
  const double w2 = rng.uniform01();
  std::vector<double> xs(n * d);
  std::vector<double> ys(n * d);
  for (std::size_t k = 1; k <= n; ++k) {
    const double phase = std::fma(static_cast<double>(k), w1, w2);
    const double s = phase - std::floor(phase);
    maps.u(s, std::span<double>(xs).subspan((k - 1) * d, d));
    maps.v(s, std::span<double>(ys).subspan((k - 1) * d, d));
  }
  return {DiscreteMeasure(d, Frame::UnitCube, std::move(xs)),
          DiscreteMeasure(d, Frame::UnitCube, std::move(ys))};
}

MeasurePair sample_renewal_mixing(std::size_t n, std::size_t d, double retain, RngStream& rng) {
  require_count(n, "sample_renewal_mixing");
  require_dimension(d, "sample_renewal_mixing");
  if (!(retain > 0.0 && retain < 1.0)) {
    throw std::invalid_argument("sample_renewal_mixing: retention probability must be in (0,1)");
  }
  std::vector<double> xs(n * d);
  std::vector<double> ys(n * d);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && rng.bernoulli(retain)) {
      std::copy_n(xs.begin() + (k - 1) * d, d, xs.begin() + k * d);
      std::copy_n(ys.begin() + (k - 1) * d, d, ys.begin() + k * d);
      continue;
    }
    for (std::size_t l = 0; l < d; ++l) xs[k * d + l] = rng.uniform01();
    for (std::size_t l = 0; l < d; ++l) ys[k * d + l] = rng.uniform01();
  }
  return {DiscreteMeasure(d, Frame::UnitCube, std::move(xs)),
          DiscreteMeasure(d, Frame::UnitCube, std::move(ys))};
}

std::vector<std::size_t> sample_subset_indices(std::size_t atom_count, std::size_t n,
                                               RngStream& rng) {
  if (n == 0 || n > atom_count) {
    throw std::invalid_argument("subset size must satisfy 1 <= n <= N");
  }
  std::vector<std::size_t> pool(atom_count);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: the first n slots end up a uniform n-subset.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_index(atom_count - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

DiscreteMeasure select_atoms(const DiscreteMeasure& atoms, std::span<const std::size_t> indices) {
  const std::size_t d = atoms.dimension();
  std::vector<double> coords;
  coords.reserve(indices.size() * d);
  for (std::size_t idx : indices) {
    if (idx >= atoms.size()) throw std::out_of_range("select_atoms: index out of range");
    const auto p = atoms.point(idx);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return DiscreteMeasure(d, atoms.frame(), std::move(coords));
}

DiscreteMeasure subset_empirical(const DiscreteMeasure& atoms, std::size_t n, RngStream& rng) {
  if (atoms.frame() != Frame::UnitCube) {
    throw std::invalid_argument("subset_empirical: atoms must be in the unit cube frame");
  }
  const auto tau = sample_subset_indices(atoms.size(), n, rng);
  return select_atoms(atoms, tau);
}

DiscreteMeasure average_measure(std::span<const Point> atoms) {
  if (atoms.empty()) throw std::invalid_argument("average_measure: empty atom list");
  return DiscreteMeasure::from_points(atoms);
}

DiscreteMeasure smooth_sample(const DiscreteMeasure& mu, double t, RngStream& rng) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("smooth_sample: t must be positive");
  }
  if (!is_torus_frame(mu.frame())) {
    throw std::invalid_argument("smooth_sample: measure must be in a torus frame");
  }
  const double sigma = std::sqrt(2.0 * t);
  std::vector<double> coords(mu.coords().begin(), mu.coords().end());
  for (double& c : coords) c = wrap(c + sigma * rng.normal());
  return DiscreteMeasure(mu.dimension(), Frame::FullTorus, std::move(coords));
}

}  // namespace akt
