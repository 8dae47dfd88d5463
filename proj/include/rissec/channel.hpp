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

#ifndef RISSEC_CHANNEL_HPP
#define RISSEC_CHANNEL_HPP

#include <vector>

#include "rissec/common.hpp"
#include "rissec/correlation.hpp"
#include "rissec/geometry.hpp"
#include "rissec/rng.hpp"

namespace rissec {

/// Array sizes and power/noise scalars of one downlink.
struct SystemDims {
  int bs_antennas = 0;   // M
  int ris_elements = 0;  // N
  int users = 0;         // K
  int eve_antennas = 0;  // M_E
  double total_power_w = 0.0;  // P, linear watts
  RVec noise_user_w;           // sigma_k^2 per user, linear watts
  double noise_eve_w = 0.0;    // sigma_E^2, informational; worst case uses 0

  void validate() const {
    if (users < 1) throw ConfigError("SystemDims: need at least one user");
    if (ris_elements < 1) throw ConfigError("SystemDims: need at least one RIS element");
    if (eve_antennas < 1) throw ConfigError("SystemDims: need at least one Eve antenna");
    // M > K + M_E keeps the AN null space larger than Eve's array and the
    // closed-form denominators positive.
    if (bs_antennas <= users + eve_antennas)
      throw ConfigError("SystemDims: require M > K + M_E (got M=" +
                        std::to_string(bs_antennas) + ", K=" + std::to_string(users) +
                        ", M_E=" + std::to_string(eve_antennas) + ")");
    if (total_power_w <= 0.0) throw ConfigError("SystemDims: total power must be positive");
    if (noise_user_w.size() != users)
      throw ConfigError("SystemDims: need one user noise power per user");
    if ((noise_user_w.array() < 0.0).any() || noise_eve_w < 0.0)
      throw ConfigError("SystemDims: noise powers must be >= 0");
  }
};

/// Large-scale gains of every link, linear scale.
struct PathLossSet {
  double bs_ris = 0.0;   // beta_1
  RVec bs_user;          // beta_{2,k}, length K
  double bs_eve = 0.0;   // beta_3
  RVec ris_user;         // beta_{I,k}, length K
  double ris_eve = 0.0;  // beta_{I,E}

  void validate(int users) const {
    if (bs_user.size() != users || ris_user.size() != users)
      throw ConfigError("PathLossSet: per-user gain vectors must have length K");
    if (bs_ris < 0.0 || bs_eve < 0.0 || ris_eve < 0.0 ||
        (bs_user.array() < 0.0).any() || (ris_user.array() < 0.0).any())
      throw ConfigError("PathLossSet: gains must be >= 0");
  }
};

/// The immutable statistical-CSI object: all correlation matrices, path
/// losses and the deterministic BS-RIS LoS matrix. Safe to share across
/// threads once built.
struct ChannelStats {
  SystemDims dims;
  PathLossSet gains;
  std::vector<CMat> bs_corr_user;   // R_{B,k}, M x M, one per user
  std::vector<CMat> ris_corr_user;  // R_{I,k}, N x N, one per user
  CMat bs_corr_eve;                 // R_{B,E}, M x M
  CMat ris_corr_eve;                // R_{I,E}, N x N
  CMat los;                         // H1, M x N, constant modulus sqrt(beta_1)

  // PSD square roots cached for sampling.
  std::vector<CMat> sqrt_bs_user;
  std::vector<CMat> sqrt_ris_user;
  CMat sqrt_bs_eve;
  CMat sqrt_ris_eve;

  void validate() const;
  void prepare_sampling();
};

namespace detail {

inline void check_correlation(const CMat& r, Eigen::Index n, const char* what) {
  if (r.rows() != n || r.cols() != n)
    throw ConfigError(std::string(what) + ": wrong dimensions");
  if (!is_hermitian(r, 1e-12))
    throw NumericalError(std::string(what) + ": not Hermitian");
  if ((r.diagonal().real().array() - 1.0).abs().maxCoeff() > 1e-12 ||
      r.diagonal().imag().array().abs().maxCoeff() > 1e-12)
    throw NumericalError(std::string(what) + ": diagonal must be 1");
}

}  // namespace detail

inline void ChannelStats::validate() const {
  dims.validate();
  gains.validate(dims.users);
  if (static_cast<int>(bs_corr_user.size()) != dims.users ||
      static_cast<int>(ris_corr_user.size()) != dims.users)
    throw ConfigError("ChannelStats: need one correlation matrix per user");
  for (int k = 0; k < dims.users; ++k) {
    detail::check_correlation(bs_corr_user[k], dims.bs_antennas, "ChannelStats R_B user");
    detail::check_correlation(ris_corr_user[k], dims.ris_elements, "ChannelStats R_I user");
  }
  detail::check_correlation(bs_corr_eve, dims.bs_antennas, "ChannelStats R_B Eve");
  detail::check_correlation(ris_corr_eve, dims.ris_elements, "ChannelStats R_I Eve");
  if (los.rows() != dims.bs_antennas || los.cols() != dims.ris_elements)
    throw ConfigError("ChannelStats: LoS matrix has wrong dimensions");
  // Constant-modulus LoS model: every entry has magnitude sqrt(beta_1).
  const double amp = std::sqrt(gains.bs_ris);
  if ((los.array().abs() - amp).abs().maxCoeff() > 1e-9 * std::max(amp, 1.0))
    throw NumericalError("ChannelStats: LoS entries must all have modulus sqrt(beta1)");
}

inline void ChannelStats::prepare_sampling() {
  sqrt_bs_user.clear();
  sqrt_ris_user.clear();
  sqrt_bs_user.reserve(dims.users);
  sqrt_ris_user.reserve(dims.users);
  for (int k = 0; k < dims.users; ++k) {
    sqrt_bs_user.push_back(sqrt_psd(bs_corr_user[k]));
    sqrt_ris_user.push_back(sqrt_psd(ris_corr_user[k]));
  }
  sqrt_bs_eve = sqrt_psd(bs_corr_eve);
  sqrt_ris_eve = sqrt_psd(ris_corr_eve);
}

/// One fading draw. Whitened Gaussians are retained so the imperfect-CSI
/// transform and recomposition under new phases stay exact.
struct ChannelRealization {
  std::vector<CVec> g_ris_user;  // N x 1 per user
  std::vector<CVec> g_bs_user;   // M x 1 per user
  CMat g_ris_eve;                // N x M_E
  CMat g_bs_eve;                 // M x M_E

  CVec phi;                   // RIS coefficients used for composition
  std::vector<CVec> h_user;   // effective BS->user channels, M x 1
  CMat h_eve;                 // effective BS->Eve channel, M x M_E

  /// Rebuilds the colored and effective channels from the whitened parts:
  /// h_k = H1 Phi h_{I,k} + h_{B,k}, and the Eve analogue.
  void compose(const ChannelStats& stats) {
    const int k_users = stats.dims.users;
    h_user.assign(k_users, CVec());
    const auto phase = phi.asDiagonal();
    for (int k = 0; k < k_users; ++k) {
      const CVec h_i = std::sqrt(stats.gains.ris_user(k)) *
                       (stats.sqrt_ris_user[k] * g_ris_user[k]);
      const CVec h_b = std::sqrt(stats.gains.bs_user(k)) *
                       (stats.sqrt_bs_user[k] * g_bs_user[k]);
      h_user[k] = stats.los * (phase * h_i) + h_b;
    }
    const CMat h_ie = std::sqrt(stats.gains.ris_eve) * (stats.sqrt_ris_eve * g_ris_eve);
    const CMat h_be = std::sqrt(stats.gains.bs_eve) * (stats.sqrt_bs_eve * g_bs_eve);
    h_eve = stats.los * (phase * h_ie) + h_be;
  }

  /// M x K matrix of user channels, one column per user.
  CMat user_matrix() const {
    CMat h(h_user.front().size(), h_user.size());
    for (std::size_t k = 0; k < h_user.size(); ++k) h.col(k) = h_user[k];
    return h;
  }
};

/// Draws one correlated Rayleigh realization and composes the effective
/// channels for the given RIS coefficients. Requires prepare_sampling().
inline ChannelRealization sample_realization(const ChannelStats& stats, const CVec& phi,
                                             RngStream& rng) {
  if (stats.sqrt_bs_user.empty())
    throw NumericalError("sample_realization: call prepare_sampling() on the stats first");
  if (phi.size() != stats.dims.ris_elements)
    throw ConfigError("sample_realization: phase vector has wrong length");
  const int m = stats.dims.bs_antennas, n = stats.dims.ris_elements;
  const int k_users = stats.dims.users, m_eve = stats.dims.eve_antennas;

  ChannelRealization out;
  out.phi = phi;
  out.g_ris_user.reserve(k_users);
  out.g_bs_user.reserve(k_users);
  for (int k = 0; k < k_users; ++k) {
    out.g_ris_user.push_back(rng.cgaussian_vector(n));
    out.g_bs_user.push_back(rng.cgaussian_vector(m));
  }
  out.g_ris_eve = rng.cgaussian_matrix(n, m_eve);
  out.g_bs_eve = rng.cgaussian_matrix(m, m_eve);
  out.compose(stats);
  return out;
}

/// BS-side channel estimate under pilot error tau in [0, 1]: each whitened
/// user-channel vector z becomes z_hat = sqrt(1 - tau^2) z + tau e with e a
/// fresh unit Gaussian, so corr(z, z_hat) = sqrt(1 - tau^2). Eve's parts are
/// untouched (the BS never estimates them). tau = 0 returns the input as is.
inline ChannelRealization imperfect_csi(const ChannelStats& stats,
                                        const ChannelRealization& truth, double tau,
                                        RngStream& rng) {
  if (tau < 0.0 || tau > 1.0) throw std::domain_error("imperfect_csi: tau must be in [0, 1]");
  if (tau == 0.0) return truth;
  ChannelRealization est = truth;
  const double keep = std::sqrt(1.0 - tau * tau);
  for (std::size_t k = 0; k < est.g_ris_user.size(); ++k) {
    est.g_ris_user[k] = keep * est.g_ris_user[k] +
                        tau * rng.cgaussian_vector(est.g_ris_user[k].size());
    est.g_bs_user[k] = keep * est.g_bs_user[k] +
                       tau * rng.cgaussian_vector(est.g_bs_user[k].size());
  }
  est.compose(stats);
  return est;
}

}  // namespace rissec

#endif  // RISSEC_CHANNEL_HPP
