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

#ifndef RISSEC_ANALYSIS_HPP
#define RISSEC_ANALYSIS_HPP

#include <utility>
#include <vector>

#include "rissec/channel.hpp"
#include "rissec/common.hpp"
#include "rissec/rng.hpp"

namespace rissec {

/// N unit-modulus RIS coefficients phi_n = exp(j theta_n).
struct PhaseVector {
  RVec theta;  // radians
  CVec phi;

  static PhaseVector from_theta(const RVec& theta) {
    PhaseVector p;
    p.theta = theta;
    p.phi.resize(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) p.phi(i) = std::polar(1.0, theta(i));
    return p;
  }

  /// Entrywise renormalization of an arbitrary complex vector onto the unit
  /// torus; zero entries map to phase 0.
  static PhaseVector project(const CVec& v) {
    PhaseVector p;
    p.theta.resize(v.size());
    p.phi.resize(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) == Complex(0.0, 0.0)) {
        p.theta(i) = 0.0;
        p.phi(i) = Complex(1.0, 0.0);
      } else {
        p.theta(i) = std::arg(v(i));
        p.phi(i) = v(i) / std::abs(v(i));
      }
    }
    return p;
  }

  /// All elements at pi/2, the optimizer's starting point.
  static PhaseVector start(int n) {
    return from_theta(RVec::Constant(n, kPi / 2.0));
  }

  static PhaseVector random(int n, RngStream& rng) {
    RVec t(n);
    for (int i = 0; i < n; ++i) t(i) = 2.0 * kPi * rng.uniform();
    return from_theta(t);
  }

  int size() const { return static_cast<int>(phi.size()); }

  void validate() const {
    if (theta.size() != phi.size()) throw ConfigError("PhaseVector: inconsistent sizes");
    for (Eigen::Index i = 0; i < phi.size(); ++i)
      if (std::abs(std::abs(phi(i)) - 1.0) > 1e-12)
        throw NumericalError("PhaseVector: coefficient off the unit circle");
  }
};

/// Effective channel covariances seen at the BS for a fixed phase vector.
struct EffectiveCorrelation {
  std::vector<CMat> user;  // R_k = beta_{2,k} R_{B,k} + beta_{I,k} H1 Phi R_{I,k} Phi^H H1^H
  CMat eve_ris;            // R_E = beta_{I,E} H1 Phi R_{I,E} Phi^H H1^H
  CMat eve_total;          // R_E + beta_3 R_{B,E}
};

inline EffectiveCorrelation effective_correlations(const ChannelStats& stats,
                                                   const PhaseVector& phases) {
  if (phases.size() != stats.dims.ris_elements)
    throw ConfigError("effective_correlations: phase vector has wrong length");
  EffectiveCorrelation eff;
  const CMat a = stats.los * phases.phi.asDiagonal();  // H1 Phi
  eff.user.reserve(stats.dims.users);
  for (int k = 0; k < stats.dims.users; ++k) {
    CMat r = stats.gains.bs_user(k) * stats.bs_corr_user[k] +
             stats.gains.ris_user(k) * (a * stats.ris_corr_user[k] * a.adjoint());
    eff.user.push_back(hermitize(r));
  }
  eff.eve_ris = hermitize(stats.gains.ris_eve * (a * stats.ris_corr_eve * a.adjoint()));
  eff.eve_total = hermitize(eff.eve_ris + stats.gains.bs_eve * stats.bs_corr_eve);
  return eff;
}

/// All trace functionals of the effective covariances that the rate formulas
/// consume; computing them once serves every user index and power split.
struct SecrecyTraces {
  RVec user;        // tr(R_j)
  RMat cross;       // tr(R_k R_i)
  RVec user_eve;    // tr(R_k (R_E + beta_3 R_{B,E}))
  double eve_total = 0.0;  // tr(R_E + beta_3 R_{B,E})

  double user_sum() const { return user.sum(); }
};

inline SecrecyTraces secrecy_traces(const EffectiveCorrelation& eff) {
  const int k_users = static_cast<int>(eff.user.size());
  SecrecyTraces t;
  t.user.resize(k_users);
  t.cross.resize(k_users, k_users);
  t.user_eve.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    t.user(k) = eff.user[k].trace().real();
    t.user_eve(k) = trace_product_hermitian(eff.user[k], eff.eve_total);
    for (int i = 0; i <= k; ++i) {
      const double v = trace_product_hermitian(eff.user[k], eff.user[i]);
      t.cross(k, i) = v;
      t.cross(i, k) = v;
    }
  }
  t.eve_total = eff.eve_total.trace().real();
  return t;
}

/// All rate quantities of one (phases, power-split, user) configuration.
struct SecrecyEval {
  double signal_user = 0.0;        // S_k
  double interference_user = 0.0;  // I_k
  double signal_eve = 0.0;         // S_E
  double interference_eve = 0.0;   // I_E
  double gamma_user = 0.0;
  double gamma_eve = 0.0;  // +inf when xi = 1 with nonzero Eve statistics
  double rate_user = 0.0;      // bits/s/Hz
  double capacity_eve = 0.0;   // bits/s/Hz, +inf at xi = 1
  double secrecy_rate = 0.0;   // [rate_user - capacity_eve]^+
};

/// Ergodic-secrecy-rate evaluation from statistical CSI only. The signal and
/// interference terms are
///   S_k = xi P [tr(R_k)]^2
///   I_k = xi P sum_{i != k} tr(R_k R_i) + sigma_k^2 sum_j tr(R_j)
///   S_E = xi M M_E (M - K) tr(R_k (R_E + beta_3 R_{B,E}))
///   I_E = (1 - xi)(M - K - M_E) tr(R_E + beta_3 R_{B,E}) sum_j tr(R_j)
/// with gamma = S/I and rates log2(1 + gamma). At xi = 1 the AN power is zero
/// and the worst-case Eve capacity is unbounded, so the secrecy rate is 0.
inline SecrecyEval secrecy_from_traces(const SystemDims& dims, const SecrecyTraces& traces,
                                       double xi, int user_index) {
  if (xi < 0.0 || xi > 1.0) throw std::domain_error("secrecy: xi must be in [0, 1]");
  if (user_index < 0 || user_index >= dims.users)
    throw ConfigError("secrecy: user index out of range");
  const double m = dims.bs_antennas, k_users = dims.users, m_eve = dims.eve_antennas;
  const double p = dims.total_power_w;
  const double sigma2 = dims.noise_user_w(user_index);
  const double sum_traces = traces.user_sum();

  SecrecyEval ev;
  ev.signal_user = xi * p * traces.user(user_index) * traces.user(user_index);
  double interference = 0.0;
  for (int i = 0; i < dims.users; ++i)
    if (i != user_index) interference += traces.cross(user_index, i);
  ev.interference_user = xi * p * interference + sigma2 * sum_traces;
  ev.signal_eve = xi * m * m_eve * (m - k_users) * traces.user_eve(user_index);
  ev.interference_eve = (1.0 - xi) * (m - k_users - m_eve) * traces.eve_total * sum_traces;

  ev.gamma_user = (ev.signal_user > 0.0) ? ev.signal_user / ev.interference_user : 0.0;
  if (ev.signal_eve <= 0.0)
    ev.gamma_eve = 0.0;
  else if (ev.interference_eve <= 0.0)
    ev.gamma_eve = std::numeric_limits<double>::infinity();
  else
    ev.gamma_eve = ev.signal_eve / ev.interference_eve;

  ev.rate_user = log2_1p(ev.gamma_user);
  ev.capacity_eve = log2_1p(ev.gamma_eve);
  ev.secrecy_rate =
      std::isinf(ev.capacity_eve) ? 0.0 : std::max(0.0, ev.rate_user - ev.capacity_eve);
  return ev;
}

inline SecrecyEval secrecy_closed_form(const ChannelStats& stats, const PhaseVector& phases,
                                       double xi, int user_index) {
  const SecrecyTraces traces = secrecy_traces(effective_correlations(stats, phases));
  return secrecy_from_traces(stats.dims, traces, xi, user_index);
}

/// Scalar inputs of the uncorrelated-fading special case: path gains plus
/// tr((H1 H1^H)^2), the squared Frobenius norm of the Hermitian LoS product.
struct UncorrelatedInputs {
  int bs_antennas = 0;
  int ris_elements = 0;
  int users = 0;
  int eve_antennas = 0;
  double total_power_w = 0.0;
  double noise_user_w = 0.0;  // sigma_k^2 of the evaluated user
  double beta_bs_ris = 0.0;   // beta_1
  RVec beta_bs_user;          // beta_{2,j}, length K
  RVec beta_ris_user;         // beta_{I,j}, length K
  double beta_bs_eve = 0.0;   // beta_3
  double beta_ris_eve = 0.0;  // beta_{I,E}
  double los_gram_norm_sq = 0.0;  // tr((H1 H1^H)^2)
};

/// SINRs under uncorrelated Rayleigh fading (all correlation matrices are
/// identities). Closed form in the path gains; independent of the phase
/// shifts because Phi Phi^H = I. The user-signal numerator is the expansion
/// of [tr(R_k)]^2 = (beta_{2,k} M + beta_{I,k} beta_1 M N)^2.
inline std::pair<double, double> uncorrelated_sinrs(const UncorrelatedInputs& in, double xi,
                                                    int user_index) {
  const double m = in.bs_antennas, n = in.ris_elements;
  const double k_users = in.users, m_eve = in.eve_antennas;
  const double b1 = in.beta_bs_ris, b3 = in.beta_bs_eve, bie = in.beta_ris_eve;
  const double b2k = in.beta_bs_user(user_index), bik = in.beta_ris_user(user_index);

  const double sig = xi * in.total_power_w *
                     (bik * bik * b1 * b1 * m * m * n * n +
                      2.0 * bik * b2k * b1 * m * m * n + b2k * b2k * m * m);
  double intf = 0.0, noise_sum = 0.0;
  for (int j = 0; j < in.users; ++j) {
    const double b2j = in.beta_bs_user(j), bij = in.beta_ris_user(j);
    noise_sum += bij * b1 * m * n + b2j * m;
    if (j != user_index)
      intf += b2k * b2j * m + (b2k * bij + bik * b2j) * b1 * m * n +
              bik * bij * in.los_gram_norm_sq;
  }
  const double gamma_user =
      sig / (xi * in.total_power_w * intf + in.noise_user_w * noise_sum);

  const double eve_num =
      xi * m_eve * (m - k_users) *
      (bik * bie * in.los_gram_norm_sq + (bik * b3 + b2k * bie) * b1 * m * n +
       b2k * b3 * m);
  const double eve_den = (1.0 - xi) * (m - k_users - m_eve) * (b3 + bie * b1 * n) * noise_sum;
  double gamma_eve;
  if (eve_num <= 0.0)
    gamma_eve = 0.0;
  else if (eve_den <= 0.0)
    gamma_eve = std::numeric_limits<double>::infinity();
  else
    gamma_eve = eve_num / eve_den;
  return {gamma_user, gamma_eve};
}

struct AsymptoticRate {
  double rate = 0.0;
  bool user_rate_unbounded = false;  // K = 1: no inter-user interference term
};

/// Large-RIS limit (N >> M) of the uncorrelated case, where
/// H1 H1^H -> beta_1 N I_M. Only meaningful with beta_1 = 1 scaling; at other
/// beta_1 the finite-N formula should be used directly.
inline AsymptoticRate large_ris_secrecy_rate(int bs_antennas, int users, int eve_antennas,
                                             double beta_bs_ris, const RVec& beta_ris_user,
                                             double xi, int user_index) {
  const double m = bs_antennas, k_users = users, m_eve = eve_antennas;
  const double b1 = beta_bs_ris, bik = beta_ris_user(user_index);
  double sum_others = 0.0;
  for (int j = 0; j < users; ++j)
    if (j != user_index) sum_others += beta_ris_user(j);
  AsymptoticRate out;
  if (sum_others <= 0.0) {
    out.user_rate_unbounded = true;
    out.rate = std::numeric_limits<double>::infinity();
    return out;
  }
  const double user_term = log2_1p(m * bik * b1 * b1 / sum_others);
  double eve_arg;
  if (xi >= 1.0)
    eve_arg = std::numeric_limits<double>::infinity();
  else
    eve_arg = xi * m_eve * (m - k_users) * bik /
              ((1.0 - xi) * (m - k_users - m_eve) * b1 * b1 * beta_ris_user.sum());
  const double eve_term = log2_1p(eve_arg);
  out.rate = std::isinf(eve_term) ? 0.0 : std::max(0.0, user_term - eve_term);
  return out;
}

/// Secrecy rate without the RIS (both RIS-side gains zero), as a function of
/// the BS-side statistics alone. delta = beta_{2,k} / sum_j beta_{2,j}.
inline double no_ris_secrecy_rate(const ChannelStats& stats, double xi, int user_index) {
  const auto& d = stats.dims;
  const double m = d.bs_antennas, k_users = d.users, m_eve = d.eve_antennas;
  const double p = d.total_power_w;
  const double sigma2 = d.noise_user_w(user_index);
  const double b2k = stats.gains.bs_user(user_index);
  const double sum_b2 = stats.gains.bs_user.sum();
  if (sum_b2 <= 0.0)
    throw std::domain_error("no_ris_secrecy_rate: all direct gains are zero");
  const double delta = b2k / sum_b2;

  double intf = 0.0;
  for (int i = 0; i < d.users; ++i)
    if (i != user_index)
      intf += stats.gains.bs_user(i) *
              trace_product_hermitian(stats.bs_corr_user[user_index], stats.bs_corr_user[i]);
  const double gamma_user = (xi * b2k * b2k * p * m * m / sum_b2) /
                            (xi * p * delta * intf + sigma2 * m);

  const double tr_ke =
      trace_product_hermitian(stats.bs_corr_user[user_index], stats.bs_corr_eve);
  const double eve_num = xi * m_eve * (m - k_users) * b2k * tr_ke;
  const double eve_den = (1.0 - xi) * m * (m - k_users - m_eve) * sum_b2;
  double gamma_eve;
  if (eve_num <= 0.0)
    gamma_eve = 0.0;
  else if (eve_den <= 0.0)
    gamma_eve = std::numeric_limits<double>::infinity();
  else
    gamma_eve = eve_num / eve_den;
  const double cap = log2_1p(gamma_eve);
  return std::isinf(cap) ? 0.0 : std::max(0.0, log2_1p(gamma_user) - cap);
}

}  // namespace rissec

#endif  // RISSEC_ANALYSIS_HPP
