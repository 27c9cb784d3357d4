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

#ifndef AKT_MEASURES_HPP_
#define AKT_MEASURES_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "akt/rng.hpp"
#include "akt/torus_geometry.hpp"

namespace akt {

// Uniform empirical measure (1/n) sum_k delta_{x_k}. Coordinates are stored
// row-major: point k occupies coords[k*d, (k+1)*d). Repeated points allowed.
class DiscreteMeasure {
 public:
  // Throws std::invalid_argument if dimension is 0, the coordinate count is
  // not a positive multiple of dimension, or a value falls outside the frame.
  DiscreteMeasure(std::size_t dimension, Frame frame, std::vector<double> coords);

  static DiscreteMeasure from_points(std::span<const Point> points);

  std::size_t size() const { return coords_.size() / dimension_; }
  std::size_t dimension() const { return dimension_; }
  Frame frame() const { return frame_; }
  double weight() const { return 1.0 / static_cast<double>(size()); }

  std::span<const double> point(std::size_t k) const {
    return std::span<const double>(coords_).subspan(k * dimension_, dimension_);
  }
  std::span<const double> coords() const { return coords_; }
  Point point_at(std::size_t k) const;

  // Same coordinates, HalfTorus label. Valid because [0,1]^d sits inside
  // [0,pi]^d; no rescaling happens. Requires UnitCube.
  DiscreteMeasure embedded_in_torus() const;

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  std::size_t dimension_;
  Frame frame_;
  std::vector<double> coords_;
};

using MeasurePair = std::pair<DiscreteMeasure, DiscreteMeasure>;

// Every coordinate multiplied by pi. Requires UnitCube.
DiscreteMeasure to_half_torus(const DiscreteMeasure& mu);

// Two independent n-point iid uniform samples on [0,1]^d.
MeasurePair sample_iid_uniform(std::size_t n, std::size_t d, RngStream& rng);

// Draws one point of [0,1]^d into `out` (out.size() == d).
using PointSampler = std::function<void(RngStream&, std::span<double>)>;

// Two independent n-point iid samples from a caller-supplied law on [0,1]^d.
MeasurePair sample_iid_custom(std::size_t n, std::size_t d, const PointSampler& sampler,
                              RngStream& rng);

// Measurable map [0,1] -> [0,1]^d, writing into `out`.
using UnitIntervalMap = std::function<void(double, std::span<double>)>;

struct RotationMaps {
  std::size_t dimension;
  UnitIntervalMap u;
  UnitIntervalMap v;
};

// Default maps for the rotation sequence: d = 2, U splits the binary digits
// of s into even/odd positions (pushing Lebesgue measure on [0,1] to the
// uniform law on the square) and V does the same with the coordinates
// swapped, so U(s) and V(s) share a distribution.
RotationMaps default_rotation_maps();
RotationMaps identity_rotation_maps();  // d = 1, U = V = identity

// X_k = U(frac(k w1 + w2)), Y_k = V(frac(k w1 + w2)), k = 1..n, with
// (w1, w2) uniform on the unit square. Pairwise independent, not independent.
MeasurePair sample_rotation_sequence(std::size_t n, const RotationMaps& maps, RngStream& rng);

// Stationary renewal chain of pairs Z_k = (X_k, Y_k): Z_1 fresh; afterwards
// Z_k = Z_{k-1} with probability retain, else a fresh draw with X_k, Y_k
// independent uniform on [0,1]^d. Strong mixing coefficients obey
// alpha(l) <= retain^l. Requires retain in (0,1).
MeasurePair sample_renewal_mixing(std::size_t n, std::size_t d, double retain, RngStream& rng);

// Uniformly random n-subset of {0..N-1}, returned sorted.
std::vector<std::size_t> sample_subset_indices(std::size_t atom_count, std::size_t n,
                                               RngStream& rng);

DiscreteMeasure select_atoms(const DiscreteMeasure& atoms, std::span<const std::size_t> indices);

// mu_tau for tau uniform among the C(N, n) subsets. Requires UnitCube atoms
// and 1 <= n <= N.
DiscreteMeasure subset_empirical(const DiscreteMeasure& atoms, std::size_t n, RngStream& rng);

// (1/N) sum_j delta_{x_j}.
DiscreteMeasure average_measure(std::span<const Point> atoms);

// One draw from mu * gamma_t: each point is shifted by a centered Gaussian
// with per-axis variance 2t and wrapped back into (-pi, pi]. Requires a torus
// frame and t > 0. The result is in the FullTorus frame.
DiscreteMeasure smooth_sample(const DiscreteMeasure& mu, double t, RngStream& rng);

}  // namespace akt

#endif  // AKT_MEASURES_HPP_
