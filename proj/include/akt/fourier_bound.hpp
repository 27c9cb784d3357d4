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

#ifndef AKT_FOURIER_BOUND_HPP_
#define AKT_FOURIER_BOUND_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "akt/measures.hpp"

namespace akt {

struct LatticeIndex {
  std::vector<long> m;

  std::size_t dimension() const { return m.size(); }
  long norm2() const {
    long s = 0;
    for (long c : m) s += c * c;
    return s;
  }
};

using FourierCoefficient = std::complex<double>;

// f_mu(m) = (1/n) sum_k exp(i <m, x_k>). Requires a torus frame.
FourierCoefficient char_fn(const DiscreteMeasure& mu, const LatticeIndex& m);

// Characteristic function of a UnitCube measure at frequency pi m, i.e. the
// transform of the pi-scaled measure at m.
FourierCoefficient char_fn_unit(const DiscreteMeasure& mu, const LatticeIndex& m);

// Square root of sum_{0 < |m|_inf <= m_max} |f_mu(m) - f_nu(m)|^2 / |m|^2.
// Diagnostic only: without smoothing the full series can diverge, so this
// truncation is not an upper bound on W1.
double lemma1_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, long m_max);

struct MMaxPolicy {
  enum class Kind { Auto, Fixed };
  Kind kind = Kind::Auto;
  long fixed = 0;

  static MMaxPolicy automatic() { return {}; }
  static MMaxPolicy fixed_at(long m_max) { return {Kind::Fixed, m_max}; }
};

// Auto policy: grow m_max one sup-norm shell at a time until
// tail_bound <= kAutoTailRatio * main_sum, stopping at ceil(8 / sqrt(t)).
inline constexpr double kAutoTailRatio = 1e-3;

struct FourierBoundReport {
  double t = 0.0;
  long m_max = 0;
  long m_max_cap = 0;
  double main_sum = 0.0;        // sum over 0 < |m|_inf <= m_max
  double tail_bound = 0.0;      // rigorous bound on the discarded terms
  double smoothing_term = 0.0;  // 2 sqrt(2 d t)
  double total = 0.0;           // sqrt(main_sum + tail_bound) + smoothing_term
};

// Certified upper bound on the torus Kantorovich distance:
//   W1~(mu, nu) <= ( sum_{m != 0} exp(-2|m|^2 t) |f_mu(m) - f_nu(m)|^2 / |m|^2 )^{1/2}
//                  + 2 sqrt(2 d t).
// The sum is truncated to the sup-norm ball and the remainder bounded with
// |f_mu - f_nu| <= 2 and the product theta tail. Measures may differ in size.
FourierBoundReport prop2_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double t,
                               MMaxPolicy policy = MMaxPolicy::automatic());

// Tail term of prop2_bound at (t, d, m_max), before the running minimum over
// smaller radii is taken.
double prop2_tail_bound(double t, std::size_t d, long m_max);

long prop2_m_max_cap(double t);

struct OptimizedBound {
  double t = 0.0;
  FourierBoundReport report;
};

// Grid point with the smallest certified total; the first one wins ties.
OptimizedBound optimize_t(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          std::span<const double> t_grid,
                          MMaxPolicy policy = MMaxPolicy::automatic());

// Log-spaced grid 2^k / (2n), k = -4..8, capped at 1.
std::vector<double> default_t_grid(std::size_t n);

// Unit-cube bound on E W1(mu, nu) when E|f_mu(pi m) - f_nu(pi m)|^2 <= delta^2:
//   delta                              d = 1
//   5 delta sqrt(1 + log(4/delta^2))   d = 2
//   10 sqrt(d) delta^(2/d)             d >= 3
double quantitative_bound(double delta, std::size_t d);

// Explicit two-sample constants: 2/sqrt(n), 10 sqrt((1 + log n)/n),
// 16 sqrt(d) / n^(1/d). Requires n >= 2.
double akt_upper_constants(std::size_t n, std::size_t d);

// Subset-measure constants: sqrt(2/n), 8 sqrt((1 + log 2n)/n),
// 13 sqrt(d) / n^(1/d). Requires n >= 1.
double subset_constants(std::size_t n, std::size_t d);

// Variance of L_u(tau) = (1/n) sum_{j in tau} u_j for tau uniform among the
// n-subsets of {1..N}:
//   (N - n) / (2 n N^2 (N - 1)) * sum_{i,j} |u_i - u_j|^2,
// and 0 when n = N.
double subset_variance(std::span<const std::complex<double>> u, std::size_t n);
double subset_variance(std::span<const double> u, std::size_t n);

}  // namespace akt

#endif  // AKT_FOURIER_BOUND_HPP_
