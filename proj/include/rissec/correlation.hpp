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

#ifndef RISSEC_CORRELATION_HPP
#define RISSEC_CORRELATION_HPP

#include <Eigen/Eigenvalues>

#include "rissec/common.hpp"

namespace rissec {

/// Rectangular RIS panel, n_h columns by n_v rows of elements.
struct RisGrid {
  int n_h = 1;
  int n_v = 1;
  int count() const { return n_h * n_v; }
};

/// Exponential antenna correlation: entry (i, j) = rho^|i-j|.
/// Real symmetric, unit diagonal, positive definite for 0 <= rho < 1.
inline RMat exp_correlation(int n, double rho) {
  if (n < 1) throw std::domain_error("exp_correlation: dimension must be >= 1");
  if (rho < 0.0 || rho >= 1.0)
    throw std::domain_error("exp_correlation: rho must lie in [0, 1)");
  RMat r(n, n);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      const double v = std::pow(rho, i - j);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

namespace detail {

/// Eigenvalues in [neg_tol, 0) are round-off and get clipped to zero; anything
/// below neg_tol means the input was not PSD to begin with.
inline RMat clip_to_psd(const RMat& r, double neg_tol, const char* what) {
  Eigen::SelfAdjointEigenSolver<RMat> es(r);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig >= 0.0) return r;
  if (min_eig < neg_tol)
    throw NumericalError(std::string(what) + ": matrix is not PSD (min eigenvalue " +
                         std::to_string(min_eig) + ")");
  RVec d = es.eigenvalues().cwiseMax(0.0);
  RMat repaired = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (repaired + repaired.transpose());
}

}  // namespace detail

/// Isotropic-scattering spatial correlation across a rectangular RIS panel:
/// entry (m, n) = sinc(2 * ||u_m - u_n|| / lambda) with u_m the element
/// position on the grid. Elements are indexed row-major, n = iv * n_h + ih.
inline RMat ris_correlation(const RisGrid& grid, double d_h, double d_v, double lambda) {
  if (grid.n_h < 1 || grid.n_v < 1)
    throw ConfigError("ris_correlation: grid dimensions must be positive");
  if (d_h <= 0.0 || d_v <= 0.0 || lambda <= 0.0)
    throw ConfigError("ris_correlation: spacings and wavelength must be positive");
  const int n = grid.count();
  RMat r(n, n);
  for (int a = 0; a < n; ++a) {
    const int ah = a % grid.n_h, av = a / grid.n_h;
    r(a, a) = 1.0;
    for (int b = 0; b < a; ++b) {
      const int bh = b % grid.n_h, bv = b / grid.n_h;
      const double dx = (ah - bh) * d_h;
      const double dz = (av - bv) * d_v;
      const double v = sinc(2.0 * std::sqrt(dx * dx + dz * dz) / lambda);
      r(a, b) = v;
      r(b, a) = v;
    }
  }
  return detail::clip_to_psd(r, -1e-10, "ris_correlation");
}

/// Hermitian PSD square root via eigendecomposition. Eigenvalues in
/// [-1e-10, 0) are treated as round-off and clipped.
inline CMat sqrt_psd(const CMat& r) {
  if (!is_hermitian(r, 1e-10)) throw NumericalError("sqrt_psd: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(r));
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10)
    throw NumericalError("sqrt_psd: matrix is not PSD (min eigenvalue " +
                         std::to_string(min_eig) + ")");
  RVec d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  CMat s = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
  return hermitize(s);
}

}  // namespace rissec

#endif  // RISSEC_CORRELATION_HPP
