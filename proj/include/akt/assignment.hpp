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

#ifndef AKT_ASSIGNMENT_HPP_
#define AKT_ASSIGNMENT_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace akt {

// Dense square cost matrix, row-major.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * n_, n_);
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

struct Assignment {
  std::vector<std::size_t> row_to_col;
  double total_cost = 0.0;
};

// Minimum-cost perfect matching via Jonker-Volgenant: column reduction,
// reduction transfer, two passes of augmenting row reduction, then
// Dijkstra-style shortest augmenting paths with column potentials.
// O(n^3) worst case. Costs must be finite.
Assignment solve_assignment(const CostMatrix& cost);

}  // namespace akt

#endif  // AKT_ASSIGNMENT_HPP_
