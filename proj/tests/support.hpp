// SPDX-License-Identifier: Apache-2.0
//
// Shared builders for synthetic channel statistics used across the test
// suites. Everything is seeded and deterministic.

#ifndef RISSEC_TESTS_SUPPORT_HPP
#define RISSEC_TESTS_SUPPORT_HPP

#include "rissec/rissec.hpp"

namespace rissec::testing {

/// Random Hermitian PSD matrix with exactly unit diagonal.
inline CMat random_correlation(int n, RngStream& rng) {
  CMat g = rng.cgaussian_matrix(n, n);
  CMat a = g * g.adjoint() + 0.1 * static_cast<double>(n) * CMat::Identity(n, n);
  RVec d = a.diagonal().real().cwiseSqrt();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) /= d(i) * d(j);
  a.diagonal().setOnes();
  return hermitize(a);
}

struct SyntheticOptions {
  bool correlated_bs = true;      // exponential rho=0.4 at the BS
  bool correlated_ris = true;     // random PSD at the RIS (phase-sensitive)
  bool identity_ris = false;      // force R_I = I (phase-independent regime)
  bool identity_bs = false;
  double beta_scale = 1.0;        // common scale on every link gain
  double ris_gain_scale = 1.0;    // 0 disables the RIS paths entirely
  double power_w = 10.0;          // O(1) SINRs by default
  double noise_w = 1.0;
  double bs_rho = 0.4;
};

/// Synthetic statistics at a comfortable operating point (gains and power of
/// order one) for exercising the rate formulas and the optimizer.
inline ChannelStats make_stats(int m, int n, int k_users, int m_eve, std::uint64_t seed,
                               const SyntheticOptions& opt = {}) {
  RngStream rng(seed);
  ChannelStats st;
  st.dims.bs_antennas = m;
  st.dims.ris_elements = n;
  st.dims.users = k_users;
  st.dims.eve_antennas = m_eve;
  st.dims.total_power_w = opt.power_w;
  st.dims.noise_user_w = RVec::Constant(k_users, opt.noise_w);
  st.dims.noise_eve_w = 0.0;

  RngStream gains_rng = rng.derive(1);
  auto gain = [&] { return opt.beta_scale * (0.5 + gains_rng.uniform()); };
  st.gains.bs_ris = 1.0;
  st.gains.bs_user.resize(k_users);
  st.gains.ris_user.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    st.gains.bs_user(k) = gain();
    st.gains.ris_user(k) = opt.ris_gain_scale * gain() / n;  // keep tr(R_k) terms comparable
  }
  st.gains.bs_eve = gain();
  st.gains.ris_eve = opt.ris_gain_scale * gain() / n;

  RngStream corr_rng = rng.derive(2);
  CMat bs_base;
  if (opt.identity_bs)
    bs_base = CMat::Identity(m, m);
  else if (opt.correlated_bs)
    bs_base = exp_correlation(m, opt.bs_rho).cast<Complex>();
  else
    bs_base = random_correlation(m, corr_rng);
  st.bs_corr_user.assign(k_users, bs_base);
  st.bs_corr_eve = opt.identity_bs ? CMat::Identity(m, m) : random_correlation(m, corr_rng);
  if (opt.identity_bs) st.bs_corr_eve = CMat::Identity(m, m);

  st.ris_corr_user.clear();
  for (int k = 0; k < k_users; ++k) {
    if (opt.identity_ris)
      st.ris_corr_user.push_back(CMat::Identity(n, n));
    else if (opt.correlated_ris)
      st.ris_corr_user.push_back(random_correlation(n, corr_rng));
    else
      st.ris_corr_user.push_back(CMat::Identity(n, n));
  }
  st.ris_corr_eve = opt.identity_ris || !opt.correlated_ris
                        ? CMat::Identity(n, n)
                        : random_correlation(n, corr_rng);

  st.los = los_channel_scattered(m, n, st.gains.bs_ris, 20.0, 0.1, rng.derive(3));
  st.validate();
  st.prepare_sampling();
  return st;
}

}  // namespace rissec::testing

#endif  // RISSEC_TESTS_SUPPORT_HPP
