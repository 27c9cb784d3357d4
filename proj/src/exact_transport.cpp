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

#include "akt/exact_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace akt {
namespace {

void check_compatible(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric,
                      bool equal_size) {
  if (equal_size && mu.size() != nu.size()) {
    throw std::invalid_argument("measures differ in size (" + std::to_string(mu.size()) + " vs " +
                                std::to_string(nu.size()) + ")");
  }
  if (mu.dimension() != nu.dimension()) throw std::invalid_argument("measures differ in dimension");
  if (mu.frame() != nu.frame()) {
    // HalfTorus sits inside FullTorus; mixing them is fine for the torus metric.
    const bool both_torus = is_torus_frame(mu.frame()) && is_torus_frame(nu.frame());
    if (!(both_torus && metric == Metric::Torus)) {
      throw std::invalid_argument("measures differ in frame");
    }
  }
  if (metric == Metric::Torus && (!is_torus_frame(mu.frame()) || !is_torus_frame(nu.frame()))) {
    throw std::invalid_argument("torus metric requires a torus frame");
  }
}

double ground_distance(std::span<const double> x, std::span<const double> y, Metric metric) {
  return metric == Metric::Torus ? torus_distance(x, y) : euclidean_distance(x, y);
}

Frame result_frame(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return mu.frame() == nu.frame() ? mu.frame() : Frame::FullTorus;
}

DiscreteMeasure replicate(const DiscreteMeasure& mu, std::size_t copies) {
  std::vector<double> coords;
  coords.reserve(mu.coords().size() * copies);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto p = mu.point(k);
    for (std::size_t c = 0; c < copies; ++c) coords.insert(coords.end(), p.begin(), p.end());
  }
  return DiscreteMeasure(mu.dimension(), mu.frame(), std::move(coords));
}

}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::Torus ? "torus" : "euclidean";
}

CostMatrix build_cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric) {
  check_compatible(mu, nu, metric, true);
  const std::size_t n = mu.size();
  CostMatrix cost(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = mu.point(i);
    for (std::size_t j = 0; j < n; ++j) cost(i, j) = ground_distance(x, nu.point(j), metric);
  }
  return cost;
}

MatchingResult w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric) {
  check_compatible(mu, nu, metric, true);
  if (mu.size() > kMaxExactSize) {
    throw std::invalid_argument("w1_exact: n = " + std::to_string(mu.size()) +
                                " exceeds the dense solver cap of " +
                                std::to_string(kMaxExactSize));
  }
  const CostMatrix cost = build_cost_matrix(mu, nu, metric);
  Assignment assignment = solve_assignment(cost);
  MatchingResult result;
  result.value = assignment.total_cost / static_cast<double>(mu.size());
  result.permutation = std::move(assignment.row_to_col);
  result.metric = metric;
  result.frame = result_frame(mu, nu);
  return result;
}

MatchingResult w1_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric) {
  check_compatible(mu, nu, metric, true);
  const std::size_t n = mu.size();
  if (n > kMaxBruteForceSize) {
    throw std::invalid_argument("w1_bruteforce: n = " + std::to_string(n) + " exceeds " +
                                std::to_string(kMaxBruteForceSize));
  }
  const CostMatrix cost = build_cost_matrix(mu, nu, metric);
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  std::vector<std::size_t> best = sigma;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost(i, sigma[i]);
    if (total < best_cost) {
      best_cost = total;
      best = sigma;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return MatchingResult{best_cost / static_cast<double>(n), std::move(best), metric,
                        result_frame(mu, nu)};
}

double w1_1d(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("w1_1d: length mismatch");
  if (xs.empty()) throw std::invalid_argument("w1_1d: empty input");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) total += std::abs(a[k] - b[k]);
  return total / static_cast<double>(a.size());
}

double w1_exact_unbalanced(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric) {
  check_compatible(mu, nu, metric, false);
  const std::size_t common = std::lcm(mu.size(), nu.size());
  if (common > kMaxExactSize) {
    throw std::invalid_argument("w1_exact_unbalanced: lcm of sizes exceeds the solver cap");
  }
  const auto lhs = replicate(mu, common / mu.size());
  const auto rhs = replicate(nu, common / nu.size());
  return w1_exact(lhs, rhs, metric).value;
}

}  // namespace akt
