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

#ifndef AKT_SERIES_HPP_
#define AKT_SERIES_HPP_

#include <cstddef>

namespace akt {

// A truncated series: the exact infinite sum lies within
// [value - error_bound, value + error_bound].
struct SeriesValue {
  double value = 0.0;
  double error_bound = 0.0;
};

// Jacobi theta partial sum 1 + 2 sum_{m=1}^{M} exp(-s m^2).
double theta_partial(double s, long m_max);

// Upper bound on sum_{|m| > M} exp(-s m^2) from the integral comparison:
// sqrt(pi/s) * exp(-s M^2).
double theta_tail_bound(double s, long m_max);

// Upper bound on sum over m in Z^d with |m|_inf > M of exp(-s |m|^2) / |m|^p,
// namely M^-p [ (Theta_M(s) + R_M(s))^d - Theta_M(s)^d ].
double lattice_tail_bound(double s, std::size_t d, long m_max, int power);

// sum_{m in Z^d, m != 0} exp(-s |m|^2) / |m|^power for power in {0, 1, 2},
// enumerated over the sup-norm ball and truncated once the tail bound falls
// below a relative 1e-14, or at a work cap. The error bound covers the
// truncation tail and rounding.
SeriesValue weighted_lattice_sum(double s, std::size_t d, int power);

// T_1(t) = sum_{m != 0} exp(-m^2 t).
SeriesValue t1_series(double t);

// (2 + sqrt(pi/t)) exp(-t), the closed-form majorant of T_1.
double t1_upper_bound(double t);

// T_d(t) = sum_{m in Z^d, m != 0} exp(-|m|^2 t) = (1 + T_1(t))^d - 1.
SeriesValue t_d_series(double t, std::size_t d);

// S~_d(t) = sum_{m != 0} exp(-|m|^2 t) / |m|^2.
SeriesValue s_d_series(double t, std::size_t d);

}  // namespace akt

#endif  // AKT_SERIES_HPP_
