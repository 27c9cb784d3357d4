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

#ifndef AKT_LOWER_BOUNDS_HPP_
#define AKT_LOWER_BOUNDS_HPP_

#include <cstddef>
#include <span>

#include "akt/measures.hpp"
#include "akt/series.hpp"

namespace akt {

struct LowerBoundReport {
  enum class Kind { OneDimSum, DistToSample, NearestNeighbor };
  Kind kind = Kind::OneDimSum;
  double value = 0.0;
  double quadrature_error = 0.0;

  // value - quadrature_error, clamped at zero.
  double certified() const { return value > quadrature_error ? value - quadrature_error : 0.0; }
};

// (1/n) |sum_k (x_k - y_k)|. Never exceeds W1 of the two empirical measures
// on the line: the CDF-difference integrand dominates its own integral.
LowerBoundReport lower_1d_statistic(std::span<const double> xs, std::span<const double> ys);

inline constexpr std::size_t kMaxQuadratureDimension = 4;

// Midpoint-rule integral of x -> min_k |x - X_k| over [0,1]^d with
// grid_resolution cells per axis. The integrand is 1-Lipschitz, so
// quadrature_error = h sqrt(d) / 2 and value - quadrature_error bounds
// W1(sample, uniform) from below. Requires d <= 4 and resolution >= 2.
LowerBoundReport dist_to_sample_integral(const DiscreteMeasure& sample,
                                         std::size_t grid_resolution);

// Discrete analogue for two atomic measures: with u = dist(., supp mu), the
// Kantorovich-Rubinstein dual gives W1(mu, nu) >= int u dnu, and symmetrically.
// Returns the larger of the two one-sided nearest-neighbour means under the
// Euclidean metric. Measures must share frame and dimension.
LowerBoundReport nearest_neighbor_lower(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// c(n, t) = (1/n) sum_{m != 0} 2 exp(-2|m|^2 t) / |m|^2 = (2/n) S~_d(2t).
SeriesValue c_series(std::size_t n, double t, std::size_t d);

// e(n, t) = n^-3 ( sum_{m != 0} exp(-|m|^2 t) / |m| )^4.
SeriesValue e_series(std::size_t n, double t, std::size_t d);

}  // namespace akt

#endif  // AKT_LOWER_BOUNDS_HPP_
