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

#include "akt/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace akt {
namespace {

constexpr std::size_t kMaxQuadratureNodes = std::size_t{1} << 24;

// Uniform bucket grid over the bounding box of a point set, answering exact
// Euclidean nearest-distance queries by expanding Chebyshev rings of cells.
class NearestNeighborIndex {
 public:
  explicit NearestNeighborIndex(const DiscreteMeasure& points)
      : d_(points.dimension()), points_(points.coords().begin(), points.coords().end()) {
    const std::size_t n = points.size();
    lo_.assign(d_, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d_, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < d_; ++l) {
        lo_[l] = std::min(lo_[l], points_[k * d_ + l]);
        hi[l] = std::max(hi[l], points_[k * d_ + l]);
      }
    }
    per_axis_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 1.0 / d_))));
    width_.resize(d_);
    min_width_ = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < d_; ++l) {
      const double span = hi[l] - lo_[l];
      width_[l] = span > 0.0 ? span / static_cast<double>(per_axis_) : 1.0;
      min_width_ = std::min(min_width_, width_[l]);
    }
    std::size_t cells = 1;
    for (std::size_t l = 0; l < d_; ++l) cells *= per_axis_;
    start_.assign(cells + 1, 0);
    std::vector<std::size_t> cell_of(n);
    std::vector<long> idx(d_);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < d_; ++l) idx[l] = axis_cell(l, points_[k * d_ + l]);
      cell_of[k] = flatten(idx);
      ++start_[cell_of[k] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) start_[c + 1] += start_[c];
    members_.resize(n);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t k = 0; k < n; ++k) members_[fill[cell_of[k]]++] = k;
  }

  double nearest_distance(std::span<const double> q) const {
    std::vector<long> center(d_);
    for (std::size_t l = 0; l < d_; ++l) center[l] = axis_cell(l, q[l]);
    double best2 = std::numeric_limits<double>::infinity();
    const auto max_ring = static_cast<long>(per_axis_);
    std::vector<long> idx(d_);
    for (long ring = 0; ring <= max_ring; ++ring) {
      // Cells at ring r are at least (r - 1) cell widths away.
      if (ring >= 1) {
        const double reach = static_cast<double>(ring - 1) * min_width_;
        if (reach * reach > best2) break;
      }
      scan_ring(center, ring, 0, false, idx, q, best2);
    }
    return std::sqrt(best2);
  }

 private:
  long axis_cell(std::size_t l, double x) const {
    const auto c = static_cast<long>(std::floor((x - lo_[l]) / width_[l]));
    return std::clamp(c, 0L, static_cast<long>(per_axis_) - 1);
  }

  std::size_t flatten(const std::vector<long>& idx) const {
    std::size_t flat = 0;
    for (std::size_t l = 0; l < d_; ++l) flat = flat * per_axis_ + static_cast<std::size_t>(idx[l]);
    return flat;
  }

  void scan_ring(const std::vector<long>& center, long ring, std::size_t axis, bool on_edge,
                 std::vector<long>& idx, std::span<const double> q, double& best2) const {
    if (axis == d_) {
      if (!on_edge && ring > 0) return;
      const std::size_t cell = flatten(idx);
      for (std::size_t s = start_[cell]; s < start_[cell + 1]; ++s) {
        const std::size_t k = members_[s];
        double dist2 = 0.0;
        for (std::size_t l = 0; l < d_; ++l) {
          const double delta = points_[k * d_ + l] - q[l];
          dist2 += delta * delta;
        }
        best2 = std::min(best2, dist2);
      }
      return;
    }
    const long lo = std::max(0L, center[axis] - ring);
    const long hi = std::min(static_cast<long>(per_axis_) - 1, center[axis] + ring);
    for (long c = lo; c <= hi; ++c) {
      idx[axis] = c;
      const bool edge = std::abs(c - center[axis]) == ring;
      scan_ring(center, ring, axis + 1, on_edge || edge, idx, q, best2);
    }
  }

  std::size_t d_;
  std::vector<double> points_;
  std::vector<double> lo_;
  std::vector<double> width_;
  double min_width_ = 1.0;
  std::size_t per_axis_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> members_;
};

double mean_nearest_distance(const DiscreteMeasure& from, const NearestNeighborIndex& to) {
  double sum = 0.0;
  for (std::size_t k = 0; k < from.size(); ++k) sum += to.nearest_distance(from.point(k));
  return sum / static_cast<double>(from.size());
}

}  // namespace

LowerBoundReport lower_1d_statistic(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("lower_1d_statistic: length mismatch");
  if (xs.empty()) throw std::invalid_argument("lower_1d_statistic: empty input");
  double sum = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) sum += xs[k] - ys[k];
  return LowerBoundReport{LowerBoundReport::Kind::OneDimSum,
                          std::abs(sum) / static_cast<double>(xs.size()), 0.0};
}

LowerBoundReport dist_to_sample_integral(const DiscreteMeasure& sample,
                                         std::size_t grid_resolution) {
  if (sample.frame() != Frame::UnitCube) {
    throw std::invalid_argument("dist_to_sample_integral: sample must be in the unit cube frame");
  }
  const std::size_t d = sample.dimension();
  if (d > kMaxQuadratureDimension) {
    throw std::invalid_argument("dist_to_sample_integral: dimension " + std::to_string(d) +
                                " exceeds " + std::to_string(kMaxQuadratureDimension));
  }
  if (grid_resolution < 2) {
    throw std::invalid_argument("dist_to_sample_integral: grid resolution must be >= 2");
  }
  std::size_t nodes = 1;
  for (std::size_t l = 0; l < d; ++l) {
    nodes *= grid_resolution;
    if (nodes > kMaxQuadratureNodes) {
      throw std::invalid_argument("dist_to_sample_integral: grid has too many nodes");
    }
  }
  const NearestNeighborIndex index(sample);
  const double h = 1.0 / static_cast<double>(grid_resolution);
  std::vector<std::size_t> cell(d, 0);
  std::vector<double> center(d);
  double sum = 0.0;
  for (std::size_t node = 0; node < nodes; ++node) {
    for (std::size_t l = 0; l < d; ++l) center[l] = (static_cast<double>(cell[l]) + 0.5) * h;
    sum += index.nearest_distance(center);
    for (std::size_t l = d; l-- > 0;) {
      if (++cell[l] < grid_resolution) break;
      cell[l] = 0;
    }
  }
  const double value = sum / static_cast<double>(nodes);
  const double error = h * std::sqrt(static_cast<double>(d)) / 2.0;
  return LowerBoundReport{LowerBoundReport::Kind::DistToSample, value, error};
}

LowerBoundReport nearest_neighbor_lower(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dimension() != nu.dimension() || mu.frame() != nu.frame()) {
    throw std::invalid_argument("nearest_neighbor_lower: frame or dimension mismatch");
  }
  const NearestNeighborIndex mu_index(mu);
  const NearestNeighborIndex nu_index(nu);
  const double forward = mean_nearest_distance(nu, mu_index);
  const double backward = mean_nearest_distance(mu, nu_index);
  return LowerBoundReport{LowerBoundReport::Kind::NearestNeighbor, std::max(forward, backward),
                          0.0};
}

SeriesValue c_series(std::size_t n, double t, std::size_t d) {
  if (n == 0) throw std::invalid_argument("c_series: n must be >= 1");
  const SeriesValue s = s_d_series(2.0 * t, d);
  const double scale = 2.0 / static_cast<double>(n);
  return SeriesValue{scale * s.value, scale * s.error_bound};
}

SeriesValue e_series(std::size_t n, double t, std::size_t d) {
  if (n == 0) throw std::invalid_argument("e_series: n must be >= 1");
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("e_series: t must be positive");
  const SeriesValue inner = weighted_lattice_sum(t, d, 1);
  const double n3 = std::pow(static_cast<double>(n), 3.0);
  const double value = std::pow(inner.value, 4.0) / n3;
  const double upper = std::pow(inner.value + inner.error_bound, 4.0) / n3;
  return SeriesValue{value, (upper - value) + 8.0 * std::numeric_limits<double>::epsilon() * value};
}

}  // namespace akt
