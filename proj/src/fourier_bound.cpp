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

#include "akt/fourier_bound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "akt/series.hpp"

namespace akt {
namespace {

void require_torus(const DiscreteMeasure& mu, const char* what) {
  if (!is_torus_frame(mu.frame())) {
    throw std::invalid_argument(std::string(what) + ": measure must be in a torus frame");
  }
}

void require_same_dimension(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            const char* what) {
  if (mu.dimension() != nu.dimension()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

FourierCoefficient char_fn_scaled(const DiscreteMeasure& mu, const LatticeIndex& m, double scale) {
  if (m.dimension() != mu.dimension()) throw std::invalid_argument("char_fn: dimension mismatch");
  double re = 0.0;
  double im = 0.0;
  const std::size_t d = mu.dimension();
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto x = mu.point(k);
    double phase = 0.0;
    for (std::size_t l = 0; l < d; ++l) phase += static_cast<double>(m.m[l]) * x[l];
    phase *= scale;
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const double w = mu.weight();
  return {re * w, im * w};
}

// f_mu(m) - f_nu(m) over the integer lattice. Per-axis phase tables
// cos(j x), sin(j x) for j >= 0 are grown on demand; negative frequencies use
// conjugation. Lattice boxes are enumerated with the product over leading
// axes cached per depth, and all reductions run in a fixed order.
class DifferenceTransform {
 public:
  DifferenceTransform(const DiscreteMeasure& mu, const DiscreteMeasure& nu)
      : d_(mu.dimension()), npts_(mu.size() + nu.size()) {
    coords_.reserve(npts_ * d_);
    weights_.reserve(npts_);
    coords_.insert(coords_.end(), mu.coords().begin(), mu.coords().end());
    coords_.insert(coords_.end(), nu.coords().begin(), nu.coords().end());
    weights_.insert(weights_.end(), mu.size(), mu.weight());
    weights_.insert(weights_.end(), nu.size(), -nu.weight());
    cos_.resize(d_);
    sin_.resize(d_);
    prefix_re_.assign(d_ + 1, std::vector<double>(npts_));
    prefix_im_.assign(d_ + 1, std::vector<double>(npts_));
    ensure(0);
  }

  std::size_t dimension() const { return d_; }

  void ensure(long m_max) {
    const auto needed = static_cast<std::size_t>(m_max) + 1;
    for (std::size_t l = 0; l < d_; ++l) {
      std::size_t have = cos_[l].size() / npts_;
      if (have >= needed) continue;
      cos_[l].resize(needed * npts_);
      sin_[l].resize(needed * npts_);
      for (std::size_t j = have; j < needed; ++j) {
        for (std::size_t k = 0; k < npts_; ++k) {
          const double phase = static_cast<double>(j) * coords_[k * d_ + l];
          cos_[l][j * npts_ + k] = std::cos(phase);
          sin_[l][j * npts_ + k] = std::sin(phase);
        }
      }
    }
  }

  using Visitor = std::function<void(const std::vector<long>&, double re, double im)>;

  // Visits every m in the box prod_l [lo_l, hi_l].
  void visit_box(const std::vector<long>& lo, const std::vector<long>& hi, const Visitor& visit) {
    std::vector<long> m(d_);
    std::copy(weights_.begin(), weights_.end(), prefix_re_[0].begin());
    std::fill(prefix_im_[0].begin(), prefix_im_[0].end(), 0.0);
    recurse(0, lo, hi, m, visit);
  }

  // Half of the sup-norm shell |m|_inf == radius: each visited m stands for
  // itself and -m, which carry the same |f_mu - f_nu|.
  void visit_half_shell(long radius, const Visitor& visit) {
    std::vector<long> lo(d_);
    std::vector<long> hi(d_);
    for (std::size_t j = 0; j < d_; ++j) {
      for (std::size_t l = 0; l < d_; ++l) {
        if (l < j) {
          lo[l] = -(radius - 1);
          hi[l] = radius - 1;
        } else if (l == j) {
          lo[l] = radius;
          hi[l] = radius;
        } else {
          lo[l] = -radius;
          hi[l] = radius;
        }
      }
      visit_box(lo, hi, visit);
    }
  }

 private:
  void recurse(std::size_t axis, const std::vector<long>& lo, const std::vector<long>& hi,
               std::vector<long>& m, const Visitor& visit) {
    const double* pre_re = prefix_re_[axis].data();
    const double* pre_im = prefix_im_[axis].data();
    const bool last = axis + 1 == d_;
    for (long v = lo[axis]; v <= hi[axis]; ++v) {
      m[axis] = v;
      const auto j = static_cast<std::size_t>(v < 0 ? -v : v);
      const double sign = v < 0 ? -1.0 : 1.0;
      const double* c = cos_[axis].data() + j * npts_;
      const double* s = sin_[axis].data() + j * npts_;
      if (last) {
        double re0 = 0.0, re1 = 0.0, im0 = 0.0, im1 = 0.0;
        std::size_t k = 0;
        for (; k + 1 < npts_; k += 2) {
          re0 += pre_re[k] * c[k] - pre_im[k] * sign * s[k];
          im0 += pre_re[k] * sign * s[k] + pre_im[k] * c[k];
          re1 += pre_re[k + 1] * c[k + 1] - pre_im[k + 1] * sign * s[k + 1];
          im1 += pre_re[k + 1] * sign * s[k + 1] + pre_im[k + 1] * c[k + 1];
        }
        for (; k < npts_; ++k) {
          re0 += pre_re[k] * c[k] - pre_im[k] * sign * s[k];
          im0 += pre_re[k] * sign * s[k] + pre_im[k] * c[k];
        }
        visit(m, re0 + re1, im0 + im1);
      } else {
        double* out_re = prefix_re_[axis + 1].data();
        double* out_im = prefix_im_[axis + 1].data();
        for (std::size_t k = 0; k < npts_; ++k) {
          const double sv = sign * s[k];
          out_re[k] = pre_re[k] * c[k] - pre_im[k] * sv;
          out_im[k] = pre_re[k] * sv + pre_im[k] * c[k];
        }
        recurse(axis + 1, lo, hi, m, visit);
      }
    }
  }

  std::size_t d_;
  std::size_t npts_;
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> cos_;
  std::vector<std::vector<double>> sin_;
  std::vector<std::vector<double>> prefix_re_;
  std::vector<std::vector<double>> prefix_im_;
};

// sum over |m|_inf == radius of weight(|m|^2) |f_mu(m) - f_nu(m)|^2.
double shell_sum(DifferenceTransform& transform, long radius, double t) {
  transform.ensure(radius);
  double acc = 0.0;
  transform.visit_half_shell(radius, [&](const std::vector<long>& m, double re, double im) {
    long norm2 = 0;
    for (long c : m) norm2 += c * c;
    const auto r2 = static_cast<double>(norm2);
    acc += 2.0 * std::exp(-2.0 * r2 * t) / r2 * (re * re + im * im);
  });
  return acc;
}

}  // namespace

FourierCoefficient char_fn(const DiscreteMeasure& mu, const LatticeIndex& m) {
  require_torus(mu, "char_fn");
  return char_fn_scaled(mu, m, 1.0);
}

FourierCoefficient char_fn_unit(const DiscreteMeasure& mu, const LatticeIndex& m) {
  if (mu.frame() != Frame::UnitCube) {
    throw std::invalid_argument("char_fn_unit: measure must be in the unit cube frame");
  }
  return char_fn_scaled(mu, m, kPi);
}

double lemma1_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, long m_max) {
  require_torus(mu, "lemma1_bound");
  require_torus(nu, "lemma1_bound");
  require_same_dimension(mu, nu, "lemma1_bound");
  if (m_max < 1) throw std::invalid_argument("lemma1_bound: m_max must be >= 1");
  DifferenceTransform transform(mu, nu);
  double sum = 0.0;
  for (long r = 1; r <= m_max; ++r) sum += shell_sum(transform, r, 0.0);
  return std::sqrt(sum);
}

double prop2_tail_bound(double t, std::size_t d, long m_max) {
  // |f_mu - f_nu|^2 <= 4.
  return 4.0 * lattice_tail_bound(2.0 * t, d, m_max, 2);
}

long prop2_m_max_cap(double t) {
  return std::max(1L, static_cast<long>(std::ceil(8.0 / std::sqrt(t))));
}

FourierBoundReport prop2_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double t,
                               MMaxPolicy policy) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("prop2_bound: t must be positive and finite");
  }
  require_torus(mu, "prop2_bound");
  require_torus(nu, "prop2_bound");
  require_same_dimension(mu, nu, "prop2_bound");
  if (policy.kind == MMaxPolicy::Kind::Fixed && policy.fixed < 1) {
    throw std::invalid_argument("prop2_bound: fixed m_max must be >= 1");
  }
  const std::size_t d = mu.dimension();
  FourierBoundReport report;
  report.t = t;
  report.m_max_cap = prop2_m_max_cap(t);
  report.smoothing_term = 2.0 * std::sqrt(2.0 * static_cast<double>(d) * t);

  DifferenceTransform transform(mu, nu);
  const long limit = policy.kind == MMaxPolicy::Kind::Fixed ? policy.fixed : report.m_max_cap;
  double main_sum = 0.0;
  double tail = std::numeric_limits<double>::infinity();
  long radius = 0;
  while (radius < limit) {
    ++radius;
    main_sum += shell_sum(transform, radius, t);
    // A bound for a smaller radius also covers everything beyond this one.
    tail = std::min(tail, prop2_tail_bound(t, d, radius));
    if (policy.kind == MMaxPolicy::Kind::Auto && tail <= kAutoTailRatio * main_sum) break;
  }
  report.m_max = radius;
  report.main_sum = main_sum;
  report.tail_bound = tail;
  report.total = std::sqrt(main_sum + tail) + report.smoothing_term;
  return report;
}

OptimizedBound optimize_t(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          std::span<const double> t_grid, MMaxPolicy policy) {
  if (t_grid.empty()) throw std::invalid_argument("optimize_t: empty grid");
  OptimizedBound best;
  bool have = false;
  for (double t : t_grid) {
    FourierBoundReport report = prop2_bound(mu, nu, t, policy);
    if (!have || report.total < best.report.total) {
      best = OptimizedBound{t, report};
      have = true;
    }
  }
  return best;
}

std::vector<double> default_t_grid(std::size_t n) {
  if (n == 0) throw std::invalid_argument("default_t_grid: n must be >= 1");
  std::vector<double> grid;
  const double base = 1.0 / (2.0 * static_cast<double>(n));
  for (int k = -4; k <= 8; ++k) {
    const double t = std::ldexp(base, k);
    if (t > 1.0) break;
    grid.push_back(t);
  }
  return grid;
}

double quantitative_bound(double delta, std::size_t d) {
  if (!(delta >= 0.0 && delta <= 2.0)) {
    throw std::invalid_argument("quantitative_bound: delta must lie in [0, 2]");
  }
  if (d == 0) throw std::invalid_argument("quantitative_bound: d must be >= 1");
  if (d == 1) return delta;
  if (delta == 0.0) return 0.0;
  if (d == 2) return 5.0 * delta * std::sqrt(1.0 + std::log(4.0 / (delta * delta)));
  const double dd = static_cast<double>(d);
  return 10.0 * std::sqrt(dd) * std::pow(delta, 2.0 / dd);
}

double akt_upper_constants(std::size_t n, std::size_t d) {
  if (n < 2) throw std::invalid_argument("akt_upper_constants: n must be >= 2");
  if (d == 0) throw std::invalid_argument("akt_upper_constants: d must be >= 1");
  const double nn = static_cast<double>(n);
  if (d == 1) return 2.0 / std::sqrt(nn);
  if (d == 2) return 10.0 * std::sqrt((1.0 + std::log(nn)) / nn);
  const double dd = static_cast<double>(d);
  return 16.0 * std::sqrt(dd) / std::pow(nn, 1.0 / dd);
}

double subset_constants(std::size_t n, std::size_t d) {
  if (n < 1) throw std::invalid_argument("subset_constants: n must be >= 1");
  if (d == 0) throw std::invalid_argument("subset_constants: d must be >= 1");
  const double nn = static_cast<double>(n);
  if (d == 1) return std::sqrt(2.0 / nn);
  if (d == 2) return 8.0 * std::sqrt((1.0 + std::log(2.0 * nn)) / nn);
  const double dd = static_cast<double>(d);
  return 13.0 * std::sqrt(dd) / std::pow(nn, 1.0 / dd);
}

double subset_variance(std::span<const std::complex<double>> u, std::size_t n) {
  const std::size_t count = u.size();
  if (n < 1 || n > count) throw std::invalid_argument("subset_variance: need 1 <= n <= N");
  // n = N leaves a single subset; this also covers N = 1.
  if (n == count) return 0.0;
  std::complex<double> mean = 0.0;
  for (const auto& x : u) mean += x;
  mean /= static_cast<double>(count);
  double spread = 0.0;
  for (const auto& x : u) spread += std::norm(x - mean);
  // sum_{i,j} |u_i - u_j|^2 = 2 N sum_i |u_i - mean|^2
  const double nn = static_cast<double>(n);
  const double big_n = static_cast<double>(count);
  return (big_n - nn) * spread / (nn * big_n * (big_n - 1.0));
}

double subset_variance(std::span<const double> u, std::size_t n) {
  std::vector<std::complex<double>> values(u.begin(), u.end());
  return subset_variance(values, n);
}

}  // namespace akt
