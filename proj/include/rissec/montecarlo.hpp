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

#ifndef RISSEC_MONTECARLO_HPP
#define RISSEC_MONTECARLO_HPP

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <thread>
#include <vector>

#include "rissec/analysis.hpp"
#include "rissec/channel.hpp"
#include "rissec/common.hpp"

namespace rissec {

enum class Precoding { kMrt, kZf };

/// Data and artificial-noise precoders for one channel draw.
struct PrecoderSet {
  CMat data;       // W, M x K
  CMat noise;      // V, M x (M - K), orthonormal columns with H^H V = 0
  double zeta2 = 0.0;  // statistical MRT normalization K / sum_j tr(R_j)
  Precoding scheme = Precoding::kMrt;
};

/// Statistical MRT normalization: tr(W W^H) = K holds in expectation over
/// realizations, which is what the closed-form analysis assumes.
inline double mrt_zeta2(const SecrecyTraces& traces) {
  const double s = traces.user_sum();
  if (s <= 0.0) throw NumericalError("mrt_zeta2: zero aggregate channel trace");
  return static_cast<double>(traces.user.size()) / s;
}

/// AN precoder: orthonormal basis of the null space of H^H, M x (M - K).
inline CMat an_precoder(const CMat& h) {
  const auto m = h.rows(), k = h.cols();
  if (m <= k) throw ConfigError("an_precoder: need M > K");
  Eigen::HouseholderQR<CMat> qr(h);
  CMat q = qr.householderQ();
  return q.rightCols(m - k);
}

/// MRT with the statistical normalization W = sqrt(zeta2) H.
inline PrecoderSet mrt_precoder(const CMat& h, double zeta2) {
  PrecoderSet p;
  p.data = std::sqrt(zeta2) * h;
  p.noise = an_precoder(h);
  p.zeta2 = zeta2;
  p.scheme = Precoding::kMrt;
  return p;
}

/// MRT renormalized per realization so tr(W W^H) = K exactly; labeled
/// variant for quantifying the gap to the statistical normalization.
inline PrecoderSet mrt_precoder_normalized(const CMat& h) {
  const double tr = h.squaredNorm();
  if (tr <= 0.0) throw NumericalError("mrt_precoder_normalized: zero channel");
  return mrt_precoder(h, static_cast<double>(h.cols()) / tr);
}

/// Zero forcing: W proportional to H (H^H H)^(-1), scaled so tr(W W^H) = K
/// per realization.
inline PrecoderSet zf_precoder(const CMat& h) {
  const auto k = h.cols();
  const CMat gram = h.adjoint() * h;
  Eigen::LDLT<CMat> ldlt(gram);
  const RVec d = ldlt.vectorD().real();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-12 * d.maxCoeff())
    throw NumericalError("zf_precoder: channel matrix is rank deficient");
  CMat w0 = ldlt.solve(h.adjoint()).adjoint();  // H (H^H H)^(-1)
  const double tr = w0.squaredNorm();
  if (tr <= 0.0) throw NumericalError("zf_precoder: degenerate channel");
  PrecoderSet p;
  p.data = std::sqrt(static_cast<double>(k) / tr) * w0;
  p.noise = an_precoder(h);
  p.zeta2 = static_cast<double>(k) / tr;
  p.scheme = Precoding::kZf;
  return p;
}

/// Sample-average estimate with a 95% confidence half-width.
struct McEstimate {
  double mean = 0.0;        // bits/s/Hz
  double half_width = 0.0;  // 95% normal-approximation CI half-width
  long trials = 0;
  long discarded = 0;  // ill-conditioned Eve noise-correlation draws
  // Mean decomposition of the user-rate denominator.
  double signal_power = 0.0;
  double interference = 0.0;
  double an_leakage = 0.0;
  double variance_term = 0.0;
  double noise = 0.0;
};

struct McOptions {
  Precoding scheme = Precoding::kMrt;
  bool per_realization_normalization = false;  // MRT only
  double csi_error = 0.0;                      // tau in [0, 1]
  double eve_noise_w = 0.0;                    // added to X; worst case keeps 0
  double condition_limit = 1e12;
  int threads = 1;
};

namespace detail {

/// Per-trial sufficient statistics; reduction over trials happens in trial
/// order so the thread schedule never changes results.
struct TrialSample {
  Complex desired = 0.0;     // h_k^H w_k
  double interference = 0.0; // sum_{i != k} |h_k^H w_i|^2
  double an_leakage = 0.0;   // ||V^H h_k||^2
  double eve_quadform = 0.0; // w_k^H H_E X^(-1) H_E^H w_k (q factored out)
  bool eve_discarded = false;
};

inline TrialSample run_trial(const ChannelStats& stats, const PhaseVector& phases,
                             double zeta2, double xi, int user_index, const McOptions& opts,
                             RngStream rng) {
  TrialSample s;
  ChannelRealization truth = sample_realization(stats, phases.phi, rng);
  const ChannelRealization* bs_view = &truth;
  ChannelRealization estimate;
  if (opts.csi_error > 0.0) {
    estimate = imperfect_csi(stats, truth, opts.csi_error, rng);
    bs_view = &estimate;
  }
  const CMat h_bs = bs_view->user_matrix();

  PrecoderSet pre;
  if (opts.scheme == Precoding::kZf)
    pre = zf_precoder(h_bs);
  else if (opts.per_realization_normalization)
    pre = mrt_precoder_normalized(h_bs);
  else
    pre = mrt_precoder(h_bs, zeta2);

  const CVec& h_true = truth.h_user[user_index];
  s.desired = h_true.dot(pre.data.col(user_index));  // h_k^H w_k
  for (int i = 0; i < stats.dims.users; ++i)
    if (i != user_index) s.interference += std::norm(h_true.dot(pre.data.col(i)));
  s.an_leakage = (pre.noise.adjoint() * h_true).squaredNorm();

  // Worst-case Eve: noise correlation X = q H_E^H V V^H H_E (+ sigma_E^2 I),
  // the other users' interference already cancelled. The linear system is
  // solved with the q factor divided out, so the stored quadratic form needs
  // only the p/q scaling in the reducer.
  if (xi >= 1.0) return s;  // no AN power: Eve capacity handled analytically
  const double q = (1.0 - xi) * stats.dims.total_power_w /
                   (stats.dims.bs_antennas - stats.dims.users);
  const CMat te = pre.noise.adjoint() * truth.h_eve;  // (M-K) x M_E
  CMat x = te.adjoint() * te;
  if (opts.eve_noise_w > 0.0 && q > 0.0)
    x += (opts.eve_noise_w / q) * CMat::Identity(x.rows(), x.cols());
  Eigen::SelfAdjointEigenSolver<CMat> es(x);
  const double lmax = es.eigenvalues().maxCoeff(), lmin = es.eigenvalues().minCoeff();
  if (!(lmin > 0.0) || lmax / lmin > opts.condition_limit) {
    s.eve_discarded = true;
    return s;
  }
  const CVec y = truth.h_eve.adjoint() * pre.data.col(user_index);
  const CVec z = Eigen::LDLT<CMat>(x).solve(y);
  s.eve_quadform = std::max(0.0, y.dot(z).real());
  return s;
}

}  // namespace detail

/// Shared driver: runs the trials (optionally across threads, with per-trial
/// derived seeds) and reduces them in trial order.
struct McRun {
  std::vector<detail::TrialSample> samples;
  double zeta2 = 0.0;
};

inline McRun run_mc_trials(const ChannelStats& stats, const PhaseVector& phases, double xi,
                           int user_index, long trials, RngStream rng,
                           const McOptions& opts = {}) {
  if (trials < 2) throw ConfigError("monte carlo: need at least 2 trials");
  if (user_index < 0 || user_index >= stats.dims.users)
    throw ConfigError("monte carlo: user index out of range");
  if (opts.csi_error < 0.0 || opts.csi_error > 1.0)
    throw std::domain_error("monte carlo: tau must be in [0, 1]");
  McRun run;
  run.zeta2 = mrt_zeta2(secrecy_traces(effective_correlations(stats, phases)));
  run.samples.resize(trials);
  const int threads = std::max(1, opts.threads);
  auto worker = [&](long lo, long hi) {
    for (long t = lo; t < hi; ++t)
      run.samples[t] = detail::run_trial(stats, phases, run.zeta2, xi, user_index, opts,
                                         rng.derive(static_cast<std::uint64_t>(t)));
  };
  if (threads == 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (trials + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const long lo = w * chunk, hi = std::min<long>(trials, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return run;
}

namespace detail {

inline double p_of(const SystemDims& d, double xi) { return xi * d.total_power_w / d.users; }
inline double q_of(const SystemDims& d, double xi) {
  return (1.0 - xi) * d.total_power_w / (d.bs_antennas - d.users);
}

/// User-rate reduction over a range of trials (used whole and per batch).
inline double user_rate_of_range(const SystemDims& dims, const McRun& run, double xi,
                                 int user_index, long lo, long hi, McEstimate* breakdown) {
  const double p = p_of(dims, xi), q = q_of(dims, xi);
  Complex mean_desired = 0.0;
  double mean_sq = 0.0, intf = 0.0, an = 0.0;
  const double inv = 1.0 / static_cast<double>(hi - lo);
  for (long t = lo; t < hi; ++t) {
    const auto& s = run.samples[t];
    mean_desired += s.desired;
    mean_sq += std::norm(s.desired);
    intf += s.interference;
    an += s.an_leakage;
  }
  mean_desired *= inv;
  mean_sq *= inv;
  intf *= inv;
  an *= inv;
  const double sigma2 = dims.noise_user_w(user_index);
  const double signal = p * std::norm(mean_desired);
  const double variance = p * std::max(0.0, mean_sq - std::norm(mean_desired));
  const double psi = p * intf + q * an + variance + sigma2;
  if (breakdown) {
    breakdown->signal_power = signal;
    breakdown->interference = p * intf;
    breakdown->an_leakage = q * an;
    breakdown->variance_term = variance;
    breakdown->noise = sigma2;
  }
  return (signal > 0.0) ? log2_1p(signal / psi) : 0.0;
}

}  // namespace detail

/// Achievable-rate lower bound of the selected user, estimated by sample
/// averages of the desired-signal mean, inter-user interference, AN leakage
/// and precoder-channel variance. The confidence half-width comes from batch
/// means (10 batches) because the rate is a function of the moments rather
/// than a per-trial average.
inline McEstimate reduce_user_rate(const SystemDims& dims, const McRun& run, double xi,
                                   int user_index) {
  McEstimate est;
  const long trials = static_cast<long>(run.samples.size());
  est.trials = trials;
  est.mean = detail::user_rate_of_range(dims, run, xi, user_index, 0, trials, &est);
  const long batches = std::min<long>(10, trials);
  if (batches >= 2) {
    std::vector<double> vals;
    vals.reserve(batches);
    const long step = trials / batches;
    for (long b = 0; b < batches; ++b) {
      const long lo = b * step, hi = (b + 1 == batches) ? trials : lo + step;
      vals.push_back(detail::user_rate_of_range(dims, run, xi, user_index, lo, hi, nullptr));
    }
    double m = 0.0;
    for (double v : vals) m += v;
    m /= static_cast<double>(batches);
    double s2 = 0.0;
    for (double v : vals) s2 += (v - m) * (v - m);
    s2 /= static_cast<double>(batches - 1);
    est.half_width = 1.96 * std::sqrt(s2 / static_cast<double>(batches));
  }
  return est;
}

/// Worst-case Eve capacity upper bound: per trial, log2(1 + p w_k^H H_E
/// X^(-1) H_E^H w_k) with the AN-only noise correlation X = q H_E^H V V^H
/// H_E. Ill-conditioned draws of X are discarded and counted.
inline McEstimate reduce_eve_capacity(const SystemDims& dims, const McRun& run, double xi) {
  McEstimate est;
  est.trials = static_cast<long>(run.samples.size());
  if (xi >= 1.0)
    throw std::domain_error("eve capacity: xi must be < 1 (no AN power at xi = 1)");
  const double p = detail::p_of(dims, xi), q = detail::q_of(dims, xi);
  double sum = 0.0, sum_sq = 0.0;
  long kept = 0;
  for (const auto& s : run.samples) {
    if (s.eve_discarded) {
      ++est.discarded;
      continue;
    }
    const double cap = log2_1p(p / q * s.eve_quadform);
    sum += cap;
    sum_sq += cap * cap;
    ++kept;
  }
  if (kept == 0) throw NumericalError("eve capacity: every trial was discarded");
  est.mean = sum / static_cast<double>(kept);
  if (kept >= 2) {
    const double var = std::max(0.0, (sum_sq - sum * sum / kept) / (kept - 1));
    est.half_width = 1.96 * std::sqrt(var / static_cast<double>(kept));
  }
  return est;
}

inline McEstimate empirical_user_rate(const ChannelStats& stats, const PhaseVector& phases,
                                      double xi, int user_index, long trials, RngStream rng,
                                      const McOptions& opts = {}) {
  return reduce_user_rate(stats.dims,
                          run_mc_trials(stats, phases, xi, user_index, trials, rng, opts), xi,
                          user_index);
}

inline McEstimate empirical_eve_capacity(const ChannelStats& stats, const PhaseVector& phases,
                                         double xi, int user_index, long trials, RngStream rng,
                                         const McOptions& opts = {}) {
  if (stats.dims.bs_antennas - stats.dims.users < stats.dims.eve_antennas)
    throw ConfigError("eve capacity: need M - K >= M_E");
  return reduce_eve_capacity(
      stats.dims, run_mc_trials(stats, phases, xi, user_index, trials, rng, opts), xi);
}

struct McSecrecy {
  McEstimate user_rate;
  McEstimate eve_capacity;
  McEstimate secrecy;  // [user - eve]^+ with combined half-width
};

/// Both bounds from one set of realizations, combined into the clamped
/// secrecy-rate estimate.
inline McSecrecy empirical_secrecy_rate(const ChannelStats& stats, const PhaseVector& phases,
                                        double xi, int user_index, long trials, RngStream rng,
                                        const McOptions& opts = {}) {
  const McRun run = run_mc_trials(stats, phases, xi, user_index, trials, rng, opts);
  McSecrecy out;
  out.user_rate = reduce_user_rate(stats.dims, run, xi, user_index);
  if (xi < 1.0) {
    out.eve_capacity = reduce_eve_capacity(stats.dims, run, xi);
  } else {
    out.eve_capacity.mean = std::numeric_limits<double>::infinity();
    out.eve_capacity.trials = trials;
  }
  out.secrecy.trials = trials;
  out.secrecy.discarded = out.eve_capacity.discarded;
  out.secrecy.mean = std::isinf(out.eve_capacity.mean)
                         ? 0.0
                         : std::max(0.0, out.user_rate.mean - out.eve_capacity.mean);
  out.secrecy.half_width = std::sqrt(out.user_rate.half_width * out.user_rate.half_width +
                                     out.eve_capacity.half_width * out.eve_capacity.half_width);
  out.secrecy.signal_power = out.user_rate.signal_power;
  out.secrecy.interference = out.user_rate.interference;
  out.secrecy.an_leakage = out.user_rate.an_leakage;
  out.secrecy.variance_term = out.user_rate.variance_term;
  out.secrecy.noise = out.user_rate.noise;
  return out;
}

}  // namespace rissec

#endif  // RISSEC_MONTECARLO_HPP
