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

#ifndef RISSEC_GEOMETRY_HPP
#define RISSEC_GEOMETRY_HPP

#include <Eigen/QR>

#include "rissec/common.hpp"
#include "rissec/correlation.hpp"
#include "rissec/rng.hpp"

namespace rissec {

/// Distance-power-law path gain: c0 * (d / d0)^(-exponent), linear scale.
inline double path_loss(double d, double exponent, double c0, double d0) {
  if (d <= 0.0) throw std::domain_error("path_loss: distance must be positive");
  return c0 * std::pow(d / d0, -exponent);
}

/// Node placement. BS is a uniform linear array along the y axis at the
/// origin; the RIS panel sits broadside at bs_ris_distance on the x axis,
/// elements spread in the y-z plane (optionally rotated about z). Users and
/// the eavesdropper live in a disk in the z = 0 plane.
struct Geometry {
  Eigen::Matrix3Xd bs_positions;    // meters, one column per BS antenna
  Eigen::Matrix3Xd ris_positions;   // meters, one column per RIS element
  Eigen::Matrix3Xd user_positions;  // meters, one column per user
  Eigen::Vector3d eve_position = Eigen::Vector3d::Zero();
  RisGrid grid;
  double ris_spacing_h = 0.0;  // meters
  double ris_spacing_v = 0.0;  // meters
  double wavelength = 0.1;     // meters

  int bs_antennas() const { return static_cast<int>(bs_positions.cols()); }
  int ris_elements() const { return static_cast<int>(ris_positions.cols()); }
  int users() const { return static_cast<int>(user_positions.cols()); }

  void validate() const {
    if (grid.count() != ris_elements())
      throw ConfigError("Geometry: RIS grid dimensions do not match element count");
    if (ris_spacing_h <= 0.0 || ris_spacing_v <= 0.0 || wavelength <= 0.0)
      throw ConfigError("Geometry: spacings and wavelength must be positive");
  }
};

struct GeometryParams {
  int bs_antennas = 128;
  RisGrid grid{16, 16};
  int users = 8;
  double wavelength = 0.1;           // meters
  double bs_spacing_wl = 0.5;        // BS element spacing, wavelengths
  double ris_spacing_h_wl = 0.25;    // RIS horizontal spacing, wavelengths
  double ris_spacing_v_wl = 0.25;    // RIS vertical spacing, wavelengths
  double bs_ris_distance = 20.0;     // meters, center to center
  double ris_rotation_rad = 0.0;     // panel rotation about the z axis
  double bs_height = 1.0;            // meters; distinct mounting heights break
  double ris_height = 3.0;           // the mirror symmetry that degenerates H1
  double user_center_from_bs = 60.0; // meters
  double user_center_from_ris = 50.0;// meters
  double disk_radius = 3.0;          // meters
};

/// Builds the full placement. User and Eve positions are drawn uniformly in
/// the service disk from the supplied stream so a scenario seed pins them.
inline Geometry make_geometry(const GeometryParams& p, RngStream rng) {
  if (p.bs_antennas < 1 || p.users < 1) throw ConfigError("make_geometry: empty array");
  Geometry g;
  g.grid = p.grid;
  g.wavelength = p.wavelength;
  g.ris_spacing_h = p.ris_spacing_h_wl * p.wavelength;
  g.ris_spacing_v = p.ris_spacing_v_wl * p.wavelength;

  const double dbs = p.bs_spacing_wl * p.wavelength;
  g.bs_positions.resize(3, p.bs_antennas);
  for (int m = 0; m < p.bs_antennas; ++m)
    g.bs_positions.col(m) =
        Eigen::Vector3d(0.0, (m - (p.bs_antennas - 1) / 2.0) * dbs, p.bs_height);

  // Horizontal offset chosen so the center-to-center distance is exactly the
  // configured one despite the height difference.
  const double dz = p.ris_height - p.bs_height;
  if (std::abs(dz) >= p.bs_ris_distance)
    throw ConfigError("make_geometry: height offset exceeds the BS-RIS distance");
  const double dx = std::sqrt(p.bs_ris_distance * p.bs_ris_distance - dz * dz);

  const int n = p.grid.count();
  g.ris_positions.resize(3, n);
  const double cr = std::cos(p.ris_rotation_rad), sr = std::sin(p.ris_rotation_rad);
  for (int e = 0; e < n; ++e) {
    const int ih = e % p.grid.n_h, iv = e / p.grid.n_h;
    const double u = (ih - (p.grid.n_h - 1) / 2.0) * g.ris_spacing_h;
    const double w = (iv - (p.grid.n_v - 1) / 2.0) * g.ris_spacing_v;
    // panel in-plane axis is y rotated by ris_rotation about z
    g.ris_positions.col(e) = Eigen::Vector3d(dx - u * sr, u * cr, p.ris_height + w);
  }

  // Disk center consistent with the declared BS and RIS ranges. With the BS
  // at the origin and the RIS on the x axis the triangle fixes the center
  // (heights are small against these ranges and ignored for the placement).
  const double d_bs = p.user_center_from_bs, d_ris = p.user_center_from_ris;
  const double d = p.bs_ris_distance;
  const double cx = (d_bs * d_bs - d_ris * d_ris + d * d) / (2.0 * d);
  const double cy2 = d_bs * d_bs - cx * cx;
  if (cy2 < 0.0)
    throw ConfigError("make_geometry: BS/RIS/user-disk distances are inconsistent");
  const Eigen::Vector3d center(cx, std::sqrt(cy2), 0.0);

  auto draw_in_disk = [&](RngStream& s) -> Eigen::Vector3d {
    const double r = p.disk_radius * std::sqrt(s.uniform());
    const double a = 2.0 * kPi * s.uniform();
    return center + Eigen::Vector3d(r * std::cos(a), r * std::sin(a), 0.0);
  };
  RngStream users_rng = rng.derive(0x75736572);  // placement stream, users
  g.user_positions.resize(3, p.users);
  for (int k = 0; k < p.users; ++k) g.user_positions.col(k) = draw_in_disk(users_rng);
  RngStream eve_rng = rng.derive(0x657665);  // placement stream, Eve
  g.eve_position = draw_in_disk(eve_rng);

  g.validate();
  return g;
}

namespace detail {

/// Numerical full-rank requirement on the BS-RIS line-of-sight matrix. The
/// whole statistical model assumes rank min(M, N); geometries that do not
/// deliver it (far-field planar placements of large arrays) are rejected.
inline void require_full_rank(const CMat& h1, const char* what) {
  Eigen::ColPivHouseholderQR<CMat> qr(h1);
  qr.setThreshold(1e-9);
  const auto want = std::min(h1.rows(), h1.cols());
  if (qr.rank() < want)
    throw NumericalError(std::string(what) + ": LoS matrix is rank deficient (" +
                         std::to_string(qr.rank()) + " < " + std::to_string(want) +
                         "); use scattered mode or a smaller/closer array");
}

}  // namespace detail

/// LoS BS-RIS matrix from physical element positions: entry (m, n) has
/// modulus sqrt(beta1) and phase -2*pi*d(m,n)/lambda.
inline CMat los_channel(const Geometry& g, double beta1) {
  g.validate();
  if (beta1 < 0.0) throw std::domain_error("los_channel: beta1 must be >= 0");
  const int m_count = g.bs_antennas(), n_count = g.ris_elements();
  const double amp = std::sqrt(beta1);
  CMat h1(m_count, n_count);
  for (int m = 0; m < m_count; ++m)
    for (int n = 0; n < n_count; ++n) {
      const double d = (g.bs_positions.col(m) - g.ris_positions.col(n)).norm();
      if (d <= 0.0) throw ConfigError("los_channel: coincident BS antenna and RIS element");
      h1(m, n) = std::polar(amp, -2.0 * kPi * d / g.wavelength);
    }
  detail::require_full_rank(h1, "los_channel");
  return h1;
}

/// LoS BS-RIS matrix under deterministic dense scattering: per-entry path
/// length is the nominal separation plus a seeded sub-wavelength excess, so
/// the matrix keeps constant modulus sqrt(beta1) and is full rank at any
/// size. Fully reproducible from the stream.
inline CMat los_channel_scattered(int bs_antennas, int ris_elements, double beta1,
                                  double base_distance, double wavelength, RngStream rng) {
  if (bs_antennas < 1 || ris_elements < 1)
    throw ConfigError("los_channel_scattered: empty array");
  if (beta1 < 0.0) throw std::domain_error("los_channel_scattered: beta1 must be >= 0");
  if (base_distance <= 0.0 || wavelength <= 0.0)
    throw ConfigError("los_channel_scattered: distance and wavelength must be positive");
  const double amp = std::sqrt(beta1);
  CMat h1(bs_antennas, ris_elements);
  for (int m = 0; m < bs_antennas; ++m)
    for (int n = 0; n < ris_elements; ++n) {
      const double d = base_distance + rng.uniform() * wavelength;
      h1(m, n) = std::polar(amp, -2.0 * kPi * d / wavelength);
    }
  detail::require_full_rank(h1, "los_channel_scattered");
  return h1;
}

/// Dominant specular path plus local scatter: geometric element-to-antenna
/// distances with a seeded excess in [0, excess). Keeps the planar phase
/// structure while the scatter restores numerical full rank.
inline CMat los_channel_mixed(const Geometry& g, double beta1, double excess,
                              RngStream rng) {
  g.validate();
  if (beta1 < 0.0) throw std::domain_error("los_channel_mixed: beta1 must be >= 0");
  if (excess <= 0.0) throw ConfigError("los_channel_mixed: excess must be positive");
  const int m_count = g.bs_antennas(), n_count = g.ris_elements();
  const double amp = std::sqrt(beta1);
  CMat h1(m_count, n_count);
  for (int m = 0; m < m_count; ++m)
    for (int n = 0; n < n_count; ++n) {
      const double d = (g.bs_positions.col(m) - g.ris_positions.col(n)).norm() +
                       excess * rng.uniform();
      h1(m, n) = std::polar(amp, -2.0 * kPi * d / g.wavelength);
    }
  detail::require_full_rank(h1, "los_channel_mixed");
  return h1;
}

}  // namespace rissec

#endif  // RISSEC_GEOMETRY_HPP
