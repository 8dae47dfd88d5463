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

#ifndef RISSEC_COMMON_HPP
#define RISSEC_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rissec {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Scenario/config problems. The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failures (loss of PSD, rank deficiency, non-finite objective).
/// The CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// sin(pi x)/(pi x), the normalized sinc.
inline double sinc(double x) {
  if (std::abs(x) < 1e-9) {
    const double px = kPi * x;
    return 1.0 - px * px / 6.0;
  }
  return std::sin(kPi * x) / (kPi * x);
}

/// log2(1 + x), accurate for x near 0 and defined (+inf) for x = +inf.
inline double log2_1p(double x) {
  if (std::isinf(x)) return std::numeric_limits<double>::infinity();
  return std::log1p(x) / std::numbers::ln2;
}

inline bool is_hermitian(const CMat& a, double rel_tol = 1e-12) {
  const double scale = a.norm();
  if (scale == 0.0) return true;
  return (a - a.adjoint()).norm() <= rel_tol * scale;
}

/// (A + A^H)/2 — removes round-off drift from products that are Hermitian
/// in exact arithmetic.
inline CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

/// Trace of the product of two Hermitian matrices via the Frobenius inner
/// product; O(n^2) instead of forming the product.
inline double trace_product_hermitian(const CMat& a, const CMat& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

}  // namespace rissec

#endif  // RISSEC_COMMON_HPP
