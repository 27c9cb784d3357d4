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

#ifndef AKT_EXACT_TRANSPORT_HPP_
#define AKT_EXACT_TRANSPORT_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "akt/assignment.hpp"
#include "akt/measures.hpp"

namespace akt {

enum class Metric { Euclidean, Torus };

std::string_view to_string(Metric metric);

// Largest n accepted by the dense solver (cost matrix is n^2 doubles).
inline constexpr std::size_t kMaxExactSize = 8192;
inline constexpr std::size_t kMaxBruteForceSize = 9;

struct MatchingResult {
  double value = 0.0;                    // (1/n) sum_k dist(x_k, y_sigma(k))
  std::vector<std::size_t> permutation;  // sigma, 0-based
  Metric metric = Metric::Euclidean;
  Frame frame = Frame::UnitCube;
};

// Ground cost between point k of mu and point l of nu. Validates frames.
CostMatrix build_cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric);

// Exact W1 between equal-size uniform measures by optimal assignment.
// Throws std::invalid_argument on size, dimension or frame mismatch, on the
// torus metric with a UnitCube frame, and for n > kMaxExactSize.
MatchingResult w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric);

// Test oracle: minimum over all n! permutations. n <= kMaxBruteForceSize.
MatchingResult w1_bruteforce(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric);

// Sorted-order matching on the line: (1/n) sum_k |x_(k) - y_(k)|.
double w1_1d(std::span<const double> xs, std::span<const double> ys);

// W1 between uniform measures of sizes n and N, by replicating atoms up to
// lcm(n, N) and solving the balanced problem.
double w1_exact_unbalanced(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Metric metric);

}  // namespace akt

#endif  // AKT_EXACT_TRANSPORT_HPP_
