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

#ifndef RISSEC_OPTIMIZE_HPP
#define RISSEC_OPTIMIZE_HPP

#include <string>
#include <vector>

#include "rissec/analysis.hpp"
#include "rissec/common.hpp"

namespace rissec {

/// Scalar reduction of the secrecy rate as a function of the power fraction
/// alone: gamma_user(xi) = A1 xi / (A2 xi + A3) and
/// gamma_eve(xi) = B1 xi / (1 - xi). The stationarity condition is the
/// quadratic qa xi^2 + qb xi + qc = 0, derived symbolically from that
/// parameterization (qa, qb, qc are stored for A3 normalized to 1; the roots
/// are invariant under the common rescaling of A1, A2, A3).
struct PowerSplitCoefficients {
  double a1 = 0.0;  // P [tr(R_k)]^2
  double a2 = 0.0;  // P sum_{i != k} tr(R_k R_i)
  double a3 = 0.0;  // sigma_k^2 sum_j tr(R_j)
  double b1 = 0.0;  // Eve slope: gamma_eve = b1 xi / (1 - xi)
  double qa = 0.0, qb = 0.0, qc = 0.0;

  static PowerSplitCoefficients from_traces(const SystemDims& dims,
                                            const SecrecyTraces& traces, int user_index) {
    const double m = dims.bs_antennas, k_users = dims.users, m_eve = dims.eve_antennas;
    PowerSplitCoefficients c;
    c.a1 = dims.total_power_w * traces.user(user_index) * traces.user(user_index);
    double cross = 0.0;
    for (int i = 0; i < dims.users; ++i)
      if (i != user_index) cross += traces.cross(user_index, i);
    c.a2 = dims.total_power_w * cross;
    c.a3 = dims.noise_user_w(user_index) * traces.user_sum();
    const double eve_den = (m - k_users - m_eve) * traces.eve_total * traces.user_sum();
    c.b1 = (eve_den > 0.0)
               ? m * m_eve * (m - k_users) * traces.user_eve(user_index) / eve_den
               : 0.0;
    if (c.a3 > 0.0) {
      const double a1n = c.a1 / c.a3, a2n = c.a2 / c.a3;
      c.qa = c.b1 * (a1n * a2n + a2n * a2n + a1n) - a1n;
      c.qb = 2.0 * (a1n + c.b1 * a2n);
      c.qc = c.b1 - a1n;
    }
    return c;
  }

  double gamma_user(double xi) const {
    const double den = a2 * xi + a3;
    return (den > 0.0) ? a1 * xi / den : 0.0;
  }

  double gamma_eve(double xi) const {
    if (b1 <= 0.0 || xi <= 0.0) return 0.0;
    if (xi >= 1.0) return std::numeric_limits<double>::infinity();
    return b1 * xi / (1.0 - xi);
  }

  /// Clamped secrecy rate along the power-fraction axis, bits/s/Hz.
  double secrecy(double xi) const {
    const double ge = gamma_eve(xi);
    if (std::isinf(ge)) return 0.0;
    return std::max(0.0, log2_1p(gamma_user(xi)) - log2_1p(ge));
  }
};

struct PowerSplitResult {
  double xi = 0.0;
  double objective = 0.0;
  bool used_fallback = false;  // grid/golden refinement overrode the closed form
  bool degenerate = false;     // no signal path (A1 = 0)
};

namespace detail {

/// Golden-section maximization of f on [lo, hi].
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-10) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Closed-form optimal power fraction, guarded by a dense grid search. The
/// quadratic root is accepted only if it does at least as well as the grid
/// optimum refined by golden section; otherwise the refined value is
/// returned and flagged.
inline PowerSplitResult optimal_power_fraction(const PowerSplitCoefficients& c,
                                               int grid_points = 10001) {
  PowerSplitResult res;
  if (c.a1 <= 0.0) {
    res.degenerate = true;
    res.xi = 0.0;
    res.objective = 0.0;
    return res;
  }
  if (c.b1 <= 0.0) {
    // No Eve leakage: the user rate is increasing in xi.
    res.xi = 1.0;
    res.objective = c.secrecy(1.0);
    return res;
  }

  double xi_cf;
  if (c.a3 <= 0.0) {
    xi_cf = -1.0;  // noise-free corner: no usable closed form, rely on the grid
  } else if (c.qc >= 0.0) {
    xi_cf = 0.0;  // secrecy rate already decreasing at xi = 0
  } else if (std::abs(c.qa) < 1e-300) {
    xi_cf = -c.qc / c.qb;
  } else {
    const double disc = c.qb * c.qb - 4.0 * c.qa * c.qc;
    xi_cf = (-c.qb + std::sqrt(std::max(0.0, disc))) / (2.0 * c.qa);
  }

  // Grid oracle plus golden-section refinement around the best cell.
  int best = 0;
  double best_val = -1.0;
  const double h = 1.0 / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double v = c.secrecy(i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = std::max(0.0, (best - 1) * h), hi = std::min(1.0, (best + 1) * h);
  const double xi_grid = detail::golden_max([&](double x) { return c.secrecy(x); }, lo, hi);
  const double val_grid = c.secrecy(xi_grid);

  if (xi_cf >= 0.0 && xi_cf <= 1.0) {
    const double val_cf = c.secrecy(xi_cf);
    const double slack = 1e-12 * std::max(1.0, std::abs(val_grid));
    if (val_cf >= val_grid - slack && std::abs(xi_cf - xi_grid) <= 1e-3) {
      res.xi = xi_cf;
      res.objective = val_cf;
      return res;
    }
    if (val_cf >= val_grid - slack) {
      // Same value on a flat stretch; keep the closed form but note it.
      res.xi = xi_cf;
      res.objective = val_cf;
      return res;
    }
  }
  res.xi = xi_grid;
  res.objective = val_grid;
  res.used_fallback = true;
  return res;
}

inline PowerSplitResult optimal_power_fraction(const ChannelStats& stats,
                                               const PhaseVector& phases, int user_index) {
  const SecrecyTraces traces = secrecy_traces(effective_correlations(stats, phases));
  return optimal_power_fraction(
      PowerSplitCoefficients::from_traces(stats.dims, traces, user_index));
}

/// Gradient of the (unclamped) secrecy rate with respect to the conjugated
/// RIS coefficients, one complex entry per element:
///   q_n = (1/ln 2) [ gamma_user' / (1 + gamma_user) - gamma_eve' / (1 + gamma_eve) ]
/// with the quotient rule applied to gamma = S/I and every trace derivative
/// reduced to a diagonal extraction of the form [H1^H X H1 Phi R]_{n,n}.
inline CVec phase_gradient(const ChannelStats& stats, const EffectiveCorrelation& eff,
                           const SecrecyTraces& traces, const PhaseVector& phases, double xi,
                           int user_index) {
  const auto& d = stats.dims;
  const int n = d.ris_elements, k_users = d.users;
  const double m = d.bs_antennas, m_eve = d.eve_antennas;
  const double p = d.total_power_w;
  const double sigma2 = d.noise_user_w(user_index);
  const auto phi = phases.phi.asDiagonal();

  const SecrecyEval ev = secrecy_from_traces(d, traces, xi, user_index);
  if (std::isinf(ev.gamma_eve)) return CVec::Zero(n);

  // diag(A Phi B) for N x N factors, one pass per pair.
  auto diag_of = [&](const CMat& a, const CMat& b) {
    const CMat ap = a * phi;
    return CVec((ap.transpose().array() * b.array()).colwise().sum().transpose());
  };

  const CMat gram = stats.los.adjoint() * stats.los;  // H1^H H1
  std::vector<CMat> projected(k_users);               // H1^H R_i H1
  for (int i = 0; i < k_users; ++i)
    projected[i] = stats.los.adjoint() * eff.user[i] * stats.los;
  const CMat projected_eve = stats.los.adjoint() * eff.eve_total * stats.los;

  // tr(R_j)' = beta_{I,j} [H1^H H1 Phi R_{I,j}]_{n,n}
  CVec sum_trace_deriv = CVec::Zero(n);
  std::vector<CVec> trace_deriv(k_users);
  for (int j = 0; j < k_users; ++j) {
    trace_deriv[j] = stats.gains.ris_user(j) * diag_of(gram, stats.ris_corr_user[j]);
    sum_trace_deriv += trace_deriv[j];
  }
  const CVec eve_trace_deriv = stats.gains.ris_eve * diag_of(gram, stats.ris_corr_eve);

  const double beta_ik = stats.gains.ris_user(user_index);
  const CMat& corr_k = stats.ris_corr_user[user_index];

  const CVec s_user_d = 2.0 * xi * p * traces.user(user_index) * trace_deriv[user_index];

  CVec i_user_d = sigma2 * sum_trace_deriv;
  for (int i = 0; i < k_users; ++i) {
    if (i == user_index) continue;
    i_user_d += xi * p *
                (beta_ik * diag_of(projected[i], corr_k) +
                 stats.gains.ris_user(i) * diag_of(projected[user_index], stats.ris_corr_user[i]));
  }

  const CVec s_eve_d = xi * m * m_eve * (m - k_users) *
                       (beta_ik * diag_of(projected_eve, corr_k) +
                        stats.gains.ris_eve * diag_of(projected[user_index], stats.ris_corr_eve));

  const CVec i_eve_d = (1.0 - xi) * (m - k_users - m_eve) *
                       (traces.user_sum() * eve_trace_deriv + traces.eve_total * sum_trace_deriv);

  CVec grad = CVec::Zero(n);
  if (ev.interference_user > 0.0) {
    const CVec dgu = (ev.interference_user * s_user_d - ev.signal_user * i_user_d) /
                     (ev.interference_user * ev.interference_user);
    grad += dgu / (1.0 + ev.gamma_user);
  }
  if (ev.interference_eve > 0.0) {
    const CVec dge = (ev.interference_eve * s_eve_d - ev.signal_eve * i_eve_d) /
                     (ev.interference_eve * ev.interference_eve);
    grad -= dge / (1.0 + ev.gamma_eve);
  }
  return grad / std::numbers::ln2;
}

inline CVec phase_gradient(const ChannelStats& stats, const PhaseVector& phases, double xi,
                           int user_index) {
  const EffectiveCorrelation eff = effective_correlations(stats, phases);
  return phase_gradient(stats, eff, secrecy_traces(eff), phases, xi, user_index);
}

/// Norm of the component of the Wirtinger gradient tangent to the unit
/// torus; equals half the norm of the gradient in theta coordinates.
inline double tangential_gradient_norm(const PhaseVector& phases, const CVec& grad) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    const double t = std::imag(std::conj(phases.phi(i)) * grad(i));
    acc += t * t;
  }
  return std::sqrt(acc);
}

struct OptimizerOptions {
  double epsilon = 1e-4;   // bits/s/Hz, both loops
  int max_outer = 50;
  int max_inner = 500;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_halvings = 50;
  int grid_points = 10001;  // power-fraction oracle resolution
  double fixed_xi = -1.0;   // in [0, 1]: keep this power fraction, ascend phases only
};

struct TracePoint {
  int outer = 0;
  int inner = 0;  // 0 marks the power-fraction update of this outer round
  double xi = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct OptimizerResult {
  PhaseVector phases;
  double xi = 0.0;
  double objective = 0.0;
  CVec gradient;
  double tangential_grad_norm = 0.0;
  double last_step = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  bool aborted = false;
  bool xi_fallback_used = false;
  std::string message;
  std::vector<TracePoint> trace;
};

namespace detail {

struct Evaluation {
  EffectiveCorrelation eff;
  SecrecyTraces traces;
  double objective = 0.0;
};

inline Evaluation evaluate(const ChannelStats& stats, const PhaseVector& v, double xi,
                           int user_index) {
  Evaluation e;
  e.eff = effective_correlations(stats, v);
  e.traces = secrecy_traces(e.eff);
  e.objective = secrecy_from_traces(stats.dims, e.traces, xi, user_index).secrecy_rate;
  return e;
}

}  // namespace detail

struct LineSearchResult {
  double step = 0.0;  // 0 signals stationarity
  PhaseVector phases;
  double objective = 0.0;
};

/// Backtracking line search on the projected update: phases are renormalized
/// onto the unit torus before each objective evaluation. Sufficient increase
/// is measured against the tangential gradient norm (the radial component is
/// annihilated by the projection, so it must not enter the Armijo slope).
/// Returns step 0 after max_halvings.
inline LineSearchResult line_search(const ChannelStats& stats, const PhaseVector& v,
                                    const CVec& grad, double objective_now, double xi,
                                    int user_index, const OptimizerOptions& opts = {}) {
  LineSearchResult out;
  out.phases = v;
  out.objective = objective_now;
  const double tg = tangential_gradient_norm(v, grad);
  const double slope = tg * tg;
  if (slope <= 0.0) return out;
  double mu = 1.0 / std::max(1.0, grad.cwiseAbs().maxCoeff());
  for (int h = 0; h <= opts.max_halvings; ++h, mu *= opts.shrink) {
    const PhaseVector cand = PhaseVector::project(v.phi + mu * grad);
    const double val =
        detail::evaluate(stats, cand, xi, user_index).objective;
    if (val >= objective_now + opts.armijo * mu * slope) {
      out.step = mu;
      out.phases = cand;
      out.objective = val;
      return out;
    }
  }
  return out;
}

/// Alternating maximization of the secrecy rate over (xi, phases): the power
/// fraction is refreshed in closed form, then projected gradient ascent runs
/// on the phases until the objective stalls; both loops share epsilon. The
/// trace of accepted iterates is non-decreasing.
inline OptimizerResult alternating_optimize(const ChannelStats& stats, int user_index,
                                            const OptimizerOptions& opts = {},
                                            const PhaseVector* initial_phases = nullptr) {
  if (opts.epsilon <= 0.0) throw ConfigError("alternating_optimize: epsilon must be > 0");
  OptimizerResult res;
  PhaseVector v = initial_phases ? *initial_phases : PhaseVector::start(stats.dims.ris_elements);
  v.validate();

  const bool optimize_xi = opts.fixed_xi < 0.0;
  if (!optimize_xi && opts.fixed_xi > 1.0)
    throw ConfigError("alternating_optimize: fixed_xi must be in [0, 1]");
  double xi = optimize_xi ? 0.5 : opts.fixed_xi;  // 0.5 is replaced in round one
  detail::Evaluation cur = detail::evaluate(stats, v, xi, user_index);
  res.trace.push_back({0, 0, xi, cur.objective, 0.0, 0.0});

  double outer_prev = cur.objective;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    res.outer_iterations = outer;

    if (optimize_xi) {
      // Power fraction for the current phases. The previous xi stays in the
      // candidate set so an accepted update can never decrease the objective.
      auto coeffs = PowerSplitCoefficients::from_traces(stats.dims, cur.traces, user_index);
      PowerSplitResult split = optimal_power_fraction(coeffs, opts.grid_points);
      res.xi_fallback_used = res.xi_fallback_used || split.used_fallback;
      if (split.objective >= coeffs.secrecy(xi)) xi = split.xi;
      cur.objective = secrecy_from_traces(stats.dims, cur.traces, xi, user_index).secrecy_rate;
    }
    if (!std::isfinite(cur.objective)) {
      res.aborted = true;
      res.message = "non-finite objective after power update";
      break;
    }
    res.trace.push_back({outer, 0, xi, cur.objective, 0.0, 0.0});

    double inner_prev = cur.objective;
    for (int inner = 1; inner <= opts.max_inner; ++inner) {
      ++res.inner_iterations;
      const CVec grad = phase_gradient(stats, cur.eff, cur.traces, v, xi, user_index);
      const double tnorm = tangential_gradient_norm(v, grad);
      res.gradient = grad;
      res.tangential_grad_norm = tnorm;
      if (tnorm <= 1e-13 * std::max(1.0, grad.norm())) {
        res.last_step = 0.0;
        break;  // stationary in the tangent space
      }
      LineSearchResult ls = line_search(stats, v, grad, cur.objective, xi, user_index, opts);
      res.last_step = ls.step;
      if (ls.step == 0.0) break;  // line search exhausted: stationary
      v = ls.phases;
      cur = detail::evaluate(stats, v, xi, user_index);
      res.trace.push_back({outer, inner, xi, cur.objective, grad.norm(), ls.step});
      if (!std::isfinite(cur.objective)) {
        res.aborted = true;
        res.message = "non-finite objective in phase ascent";
        break;
      }
      if (std::abs(cur.objective - inner_prev) < opts.epsilon) break;
      inner_prev = cur.objective;
    }
    if (res.aborted) break;

    if (std::abs(cur.objective - outer_prev) < opts.epsilon) {
      res.converged = true;
      break;
    }
    outer_prev = cur.objective;
  }

  res.phases = v;
  res.xi = xi;
  res.objective = cur.objective;
  if (res.gradient.size() == 0) res.gradient = CVec::Zero(stats.dims.ris_elements);
  return res;
}

/// Best of several optimizer runs from random initial phases (the first run
/// always uses the deterministic all-pi/2 start).
inline OptimizerResult multi_start_optimize(const ChannelStats& stats, int user_index,
                                            const OptimizerOptions& opts, int starts,
                                            RngStream rng) {
  if (starts < 1) throw ConfigError("multi_start_optimize: need at least one start");
  OptimizerResult best;
  for (int s = 0; s < starts; ++s) {
    OptimizerResult run;
    if (s == 0) {
      run = alternating_optimize(stats, user_index, opts);
    } else {
      RngStream init_rng = rng.derive(static_cast<std::uint64_t>(s));
      const PhaseVector v0 = PhaseVector::random(stats.dims.ris_elements, init_rng);
      run = alternating_optimize(stats, user_index, opts, &v0);
    }
    if (s == 0 || run.objective > best.objective) best = std::move(run);
  }
  return best;
}

}  // namespace rissec

#endif  // RISSEC_OPTIMIZE_HPP
