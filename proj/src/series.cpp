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

#include "akt/series.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "akt/torus_geometry.hpp"

namespace akt {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kRelativeTarget = 1e-14;
// Orthant points visited by weighted_lattice_sum before giving up on the
// relative target and reporting a wider error bound instead.
constexpr double kLatticeWorkCap = 4.0e7;

void require_positive_t(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(what) + ": t must be positive and finite");
  }
}

void require_dimension(std::size_t d, const char* what) {
  if (d == 0) throw std::invalid_argument(std::string(what) + ": d must be >= 1");
}

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// (a + r)^d - a^d expanded so that small r does not cancel.
double power_difference(double a, double r, std::size_t d) {
  double total = 0.0;
  double binom = 1.0;
  for (std::size_t j = 1; j <= d; ++j) {
    binom = binom * static_cast<double>(d - j + 1) / static_cast<double>(j);
    total += binom * std::pow(a, static_cast<double>(d - j)) * std::pow(r, static_cast<double>(j));
  }
  return total;
}

double inverse_power(double norm2, int power) {
  switch (power) {
    case 0:
      return 1.0;
    case 1:
      return 1.0 / std::sqrt(norm2);
    case 2:
      return 1.0 / norm2;
    default:
      throw std::invalid_argument("weighted_lattice_sum: power must be 0, 1 or 2");
  }
}

// Sums over the nonnegative orthant [0,M]^d with multiplicity 2^(nonzero axes).
void orthant_sum(const std::vector<double>& gauss, std::size_t axis, std::size_t d, long m_max,
                 long norm2, double product, double multiplicity, int power,
                 CompensatedSum& acc) {
  if (axis == d) {
    if (norm2 > 0) acc.add(multiplicity * product * inverse_power(static_cast<double>(norm2), power));
    return;
  }
  for (long m = 0; m <= m_max; ++m) {
    const double g = gauss[static_cast<std::size_t>(m)];
    if (g == 0.0 && m > 0) break;
    orthant_sum(gauss, axis + 1, d, m_max, norm2 + m * m, product * g,
                m == 0 ? multiplicity : 2.0 * multiplicity, power, acc);
  }
}

}  // namespace

double theta_partial(double s, long m_max) {
  CompensatedSum acc;
  for (long m = m_max; m >= 1; --m) acc.add(2.0 * std::exp(-s * static_cast<double>(m * m)));
  acc.add(1.0);
  return acc.value();
}

double theta_tail_bound(double s, long m_max) {
  const double mm = static_cast<double>(m_max);
  return std::sqrt(kPi / s) * std::exp(-s * mm * mm);
}

double lattice_tail_bound(double s, std::size_t d, long m_max, int power) {
  if (m_max < 1) throw std::invalid_argument("lattice_tail_bound: m_max must be >= 1");
  const double theta = theta_partial(s, m_max);
  const double rest = theta_tail_bound(s, m_max);
  const double scale = std::pow(static_cast<double>(m_max), -static_cast<double>(power));
  return scale * power_difference(theta, rest, d);
}

SeriesValue weighted_lattice_sum(double s, std::size_t d, int power) {
  require_positive_t(s, "weighted_lattice_sum");
  require_dimension(d, "weighted_lattice_sum");
  (void)inverse_power(1.0, power);

  // The 2d nearest lattice points alone contribute 2d exp(-s); use that as
  // the scale for the relative truncation target.
  const double floor_value = 2.0 * static_cast<double>(d) * std::exp(-s);
  long m_max = 1;
  while (lattice_tail_bound(s, d, m_max, power) > kRelativeTarget * floor_value) {
    const double next_work = std::pow(static_cast<double>(m_max + 2), static_cast<double>(d));
    if (next_work > kLatticeWorkCap) break;
    ++m_max;
  }

  std::vector<double> gauss(static_cast<std::size_t>(m_max) + 1);
  for (long m = 0; m <= m_max; ++m) gauss[static_cast<std::size_t>(m)] = std::exp(-s * static_cast<double>(m * m));
  CompensatedSum acc;
  orthant_sum(gauss, 0, d, m_max, 0, 1.0, 1.0, power, acc);
  const double value = acc.value();
  const double tail = lattice_tail_bound(s, d, m_max, power);
  return SeriesValue{value, tail + 8.0 * kEps * value};
}

SeriesValue t1_series(double t) {
  require_positive_t(t, "t1_series");
  // Smallest K with sqrt(pi/t) exp(-t K^2) below the target relative to the
  // leading term 2 exp(-t).
  const double lead = 2.0 * std::exp(-t);
  long k = 1;
  while (theta_tail_bound(t, k) > 1e-17 * lead && k < 100000000) ++k;
  CompensatedSum acc;
  for (long m = k; m >= 1; --m) acc.add(2.0 * std::exp(-t * static_cast<double>(m) * static_cast<double>(m)));
  const double value = acc.value();
  return SeriesValue{value, theta_tail_bound(t, k) + 8.0 * kEps * value};
}

double t1_upper_bound(double t) {
  require_positive_t(t, "t1_upper_bound");
  return (2.0 + std::sqrt(kPi / t)) * std::exp(-t);
}

SeriesValue t_d_series(double t, std::size_t d) {
  require_dimension(d, "t_d_series");
  const SeriesValue t1 = t1_series(t);
  if (d == 1) return t1;
  const double dd = static_cast<double>(d);
  // (1 + T1)^d - 1 without cancellation for small T1.
  const double value = std::expm1(dd * std::log1p(t1.value));
  const double lo = std::max(0.0, t1.value - t1.error_bound);
  const double hi = t1.value + t1.error_bound;
  const double spread = std::max(std::expm1(dd * std::log1p(hi)) - value,
                                 value - std::expm1(dd * std::log1p(lo)));
  return SeriesValue{value, spread + 8.0 * dd * kEps * (value + 1.0)};
}

SeriesValue s_d_series(double t, std::size_t d) {
  require_positive_t(t, "s_d_series");
  require_dimension(d, "s_d_series");
  return weighted_lattice_sum(t, d, 2);
}

}  // namespace akt
