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

#include "akt/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace akt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Augmenting row reduction is a heuristic warm start; cap its work so that
// floating-point near-ties cannot make it crawl. Rows left over are handled
// by the exact augmentation phase.
constexpr std::size_t kRowReductionStepsPerRow = 32;

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
  const int n = static_cast<int>(cost.size());
  Assignment result;
  if (n == 0) return result;
  for (int i = 0; i < n; ++i) {
    for (double c : cost.row(i)) {
      if (!std::isfinite(c)) throw std::invalid_argument("solve_assignment: non-finite cost");
    }
  }
  if (n == 1) {
    result.row_to_col = {0};
    result.total_cost = cost(0, 0);
    return result;
  }

  std::vector<int> rowsol(n, -1);
  std::vector<int> colsol(n, -1);
  std::vector<double> v(n, 0.0);
  std::vector<int> matches(n, 0);
  std::vector<int> free_rows;
  free_rows.reserve(n);

  // Column reduction, reverse order.
  for (int j = n - 1; j >= 0; --j) {
    double min = cost(0, j);
    int imin = 0;
    for (int i = 1; i < n; ++i) {
      if (cost(i, j) < min) {
        min = cost(i, j);
        imin = i;
      }
    }
    v[j] = min;
    if (++matches[imin] == 1) {
      rowsol[imin] = j;
      colsol[j] = imin;
    } else if (v[j] < v[rowsol[imin]]) {
      const int j1 = rowsol[imin];
      rowsol[imin] = j;
      colsol[j] = imin;
      colsol[j1] = -1;
    } else {
      colsol[j] = -1;
    }
  }

  // Reduction transfer.
  for (int i = 0; i < n; ++i) {
    if (matches[i] == 0) {
      free_rows.push_back(i);
    } else if (matches[i] == 1) {
      const int j1 = rowsol[i];
      double min = kInf;
      const auto row = cost.row(i);
      for (int j = 0; j < n; ++j) {
        if (j != j1 && row[j] - v[j] < min) min = row[j] - v[j];
      }
      v[j1] -= min;
    } else {
      // Row picked by several columns keeps only its last column; the
      // others were released above.
    }
  }

  // Augmenting row reduction, two passes.
  for (int pass = 0; pass < 2 && !free_rows.empty(); ++pass) {
    std::vector<int> pending = std::move(free_rows);
    free_rows.clear();
    std::size_t k = 0;
    std::size_t steps = 0;
    const std::size_t step_limit = kRowReductionStepsPerRow * static_cast<std::size_t>(n);
    while (k < pending.size()) {
      if (++steps > step_limit) {
        for (; k < pending.size(); ++k) free_rows.push_back(pending[k]);
        break;
      }
      const int i = pending[k++];
      const auto row = cost.row(i);
      double umin = row[0] - v[0];
      int j1 = 0;
      int j2 = -1;
      double usubmin = kInf;
      for (int j = 1; j < n; ++j) {
        const double h = row[j] - v[j];
        if (h < usubmin) {
          if (h >= umin) {
            usubmin = h;
            j2 = j;
          } else {
            usubmin = umin;
            umin = h;
            j2 = j1;
            j1 = j;
          }
        }
      }
      int i0 = colsol[j1];
      if (umin < usubmin) {
        v[j1] -= usubmin - umin;
      } else if (i0 >= 0) {
        j1 = j2;
        i0 = colsol[j2];
      }
      if (rowsol[i] >= 0 && colsol[rowsol[i]] == i) colsol[rowsol[i]] = -1;
      rowsol[i] = j1;
      colsol[j1] = i;
      if (i0 >= 0) {
        rowsol[i0] = -1;
        if (umin < usubmin) {
          pending[--k] = i0;
        } else {
          free_rows.push_back(i0);
        }
      }
    }
  }

  // Shortest augmenting path for each remaining free row.
  std::vector<double> dist(n);
  std::vector<int> pred(n);
  std::vector<int> collist(n);
  for (const int free_row : free_rows) {
    const auto frow = cost.row(free_row);
    for (int j = 0; j < n; ++j) {
      dist[j] = frow[j] - v[j];
      pred[j] = free_row;
      collist[j] = j;
    }
    int low = 0;  // collist[0, low): settled
    int up = 0;   // collist[low, up): at current minimum, to scan
    int last = 0;
    int end_of_path = -1;
    double min = 0.0;
    while (end_of_path < 0) {
      if (up == low) {
        last = low - 1;
        min = dist[collist[up++]];
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = dist[j];
          if (h <= min) {
            if (h < min) {
              up = low;
              min = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        for (int k = low; k < up; ++k) {
          if (colsol[collist[k]] < 0) {
            end_of_path = collist[k];
            break;
          }
        }
      }
      if (end_of_path >= 0) break;

      const int j1 = collist[low++];
      const int i = colsol[j1];
      const auto row = cost.row(i);
      const double h = row[j1] - v[j1] - min;
      for (int k = up; k < n; ++k) {
        const int j = collist[k];
        const double v2 = row[j] - v[j] - h;
        if (v2 < dist[j]) {
          pred[j] = i;
          dist[j] = v2;
          if (v2 == min) {
            if (colsol[j] < 0) {
              end_of_path = j;
              break;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
      }
    }

    // Update prices of settled columns.
    for (int k = 0; k <= last; ++k) {
      const int j1 = collist[k];
      v[j1] += dist[j1] - min;
    }

    // Flip the alternating path.
    int i = -1;
    do {
      i = pred[end_of_path];
      colsol[end_of_path] = i;
      const int j1 = end_of_path;
      end_of_path = rowsol[i];
      rowsol[i] = j1;
    } while (i != free_row);
  }

  result.row_to_col.resize(n);
  for (int i = 0; i < n; ++i) {
    result.row_to_col[i] = static_cast<std::size_t>(rowsol[i]);
    result.total_cost += cost(i, rowsol[i]);
  }
  return result;
}

}  // namespace akt
