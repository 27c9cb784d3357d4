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

#ifndef AKT_RNG_HPP_
#define AKT_RNG_HPP_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace akt {

// Counter-based Philox4x32-10 stream. The key is derived from a root seed
// and a path of stream indices, so any (seed, n, trial) triple names an
// independent stream without touching shared state.
//
// Satisfies UniformRandomBitGenerator, but the helpers below are preferred:
// the standard distributions are implementation-defined and would make output
// depend on the standard library.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  // Child stream keyed by (this stream's key, index). Does not advance *this.
  RngStream split(std::uint64_t index) const;

  static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t seed() const { return seed_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);
  // Standard normal via Box-Muller.
  double normal();
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  RngStream(std::uint64_t seed, std::array<std::uint32_t, 2> key);
  void refill();

  std::uint64_t seed_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace akt

#endif  // AKT_RNG_HPP_
