// SPDX-License-Identifier: Apache-2.0
//
// rissec — secrecy-rate analysis and optimization for artificial-noise-aided,
// RIS-assisted multiuser massive MIMO downlinks under correlated Rayleigh fading.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RISSEC_RNG_HPP
#define RISSEC_RNG_HPP

#include <cstdint>
#include <random>

#include "rissec/common.hpp"

namespace rissec {

/// splitmix64 finalizer; used both as a bit mixer for seed derivation and to
/// expand a single master seed into independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream. mt19937_64 output is fully specified by the
/// standard and the Gaussian transform below is our own, so sequences are
/// bit-identical across platforms and standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(mix64(seed)), seed_base_(mix64(seed)) {}

  /// Independent child stream; (seed, id) pairs never collide in practice
  /// because both words pass through the mixer.
  RngStream derive(std::uint64_t id) const {
    return RngStream(seed_base_ ^ mix64(id + 0x632be59bd9b4e019ULL));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Standard real normal via Box-Muller (cached spare).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Circularly symmetric complex normal CN(0, 1): |z|^2 ~ Exp(1), phase uniform.
  Complex cgaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double a = 2.0 * kPi * uniform();
    return Complex(r * std::cos(a), r * std::sin(a));
  }

  /// Column vector of i.i.d. CN(0, 1) entries.
  CVec cgaussian_vector(Eigen::Index n) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cgaussian();
    return v;
  }

  /// Matrix of i.i.d. CN(0, 1) entries, filled column-major.
  CMat cgaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMat m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = cgaussian();
    return m;
  }

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_base_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rissec

#endif  // RISSEC_RNG_HPP
