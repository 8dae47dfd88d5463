#include <catch2/catch.hpp>

#include "support.hpp"

using namespace rissec;
using rissec::testing::make_stats;

TEST_CASE("AN precoder spans the user-channel null space") {
  ChannelStats st = make_stats(10, 6, 3, 2, 1);
  RngStream rng(4);
  const ChannelRealization r = sample_realization(st, PhaseVector::start(6).phi, rng);
  const CMat h = r.user_matrix();
  const CMat v = an_precoder(h);

  CHECK(v.rows() == 10);
  CHECK(v.cols() == 7);  // M - K
  CHECK((h.adjoint() * v).norm() < 1e-12 * h.norm());
  CHECK((v.adjoint() * v - CMat::Identity(7, 7)).norm() < 1e-10);

  // per-realization AN leakage is numerically zero for every user
  for (int k = 0; k < 3; ++k) {
    const double leak = (v.adjoint() * r.h_user[k]).squaredNorm();
    CHECK(leak < 1e-20 * r.h_user[k].squaredNorm());
  }

  CHECK_THROWS_AS(an_precoder(CMat::Ones(3, 3)), ConfigError);  // needs M > K
}

TEST_CASE("MRT precoder normalization") {
  SECTION("single user with identity statistics: zeta = 1/sqrt(M)") {
    // tr(R_1) = M when the direct gain is one and the RIS path is off.
    ChannelStats st = make_stats(9, 4, 1, 2, 3,
                                 {.identity_bs = true, .ris_gain_scale = 0.0});
    st.gains.bs_user(0) = 1.0;
    const SecrecyTraces tr = secrecy_traces(effective_correlations(st, PhaseVector::start(4)));
    CHECK(mrt_zeta2(tr) == Approx(1.0 / 9.0).epsilon(1e-12));
  }

  SECTION("statistical normalization holds in expectation: E tr(W W^H) = K") {
    ChannelStats st = make_stats(8, 4, 2, 1, 17);
    const PhaseVector phases = PhaseVector::start(4);
    const double zeta2 = mrt_zeta2(secrecy_traces(effective_correlations(st, phases)));
    RngStream rng(21);
    double acc = 0.0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
      RngStream trial = rng.derive(t);
      const ChannelRealization r = sample_realization(st, phases.phi, trial);
      acc += mrt_precoder(r.user_matrix(), zeta2).data.squaredNorm();
    }
    CHECK(acc / draws == Approx(2.0).epsilon(0.02));
  }

  SECTION("first moment: E{h_k^H w_k} = zeta tr(R_k)") {
    ChannelStats st = make_stats(8, 4, 2, 1, 29);
    const PhaseVector phases = PhaseVector::start(4);
    const SecrecyTraces tr = secrecy_traces(effective_correlations(st, phases));
    const double zeta = std::sqrt(mrt_zeta2(tr));
    RngStream rng(31);
    Complex acc = 0.0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
      RngStream trial = rng.derive(t);
      const ChannelRealization r = sample_realization(st, phases.phi, trial);
      acc += r.h_user[0].dot(mrt_precoder(r.user_matrix(), zeta * zeta).data.col(0));
    }
    acc /= static_cast<double>(draws);
    CHECK(std::abs(acc - zeta * tr.user(0)) < 0.03 * zeta * tr.user(0));
  }
}

TEST_CASE("ZF precoder") {
  ChannelStats st = make_stats(10, 6, 3, 2, 41);
  RngStream rng(6);
  const ChannelRealization r = sample_realization(st, PhaseVector::start(6).phi, rng);
  const CMat h = r.user_matrix();
  const PrecoderSet zf = zf_precoder(h);

  SECTION("interference free and power normalized per realization") {
    const CMat cross = h.adjoint() * zf.data;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) CHECK(std::abs(cross(i, j)) < 1e-8 * std::abs(cross(i, i)));
    CHECK(zf.data.squaredNorm() == Approx(3.0).epsilon(1e-10));
  }

  SECTION("single user: ZF coincides with per-realization-normalized MRT") {
    ChannelStats one = make_stats(8, 4, 1, 2, 43);
    RngStream s(7);
    const ChannelRealization r1 = sample_realization(one, PhaseVector::start(4).phi, s);
    const CMat h1 = r1.user_matrix();
    const CMat wz = zf_precoder(h1).data;
    const CMat wm = mrt_precoder_normalized(h1).data;
    // same direction and same norm; a common phase may differ
    const Complex scale = (wm.col(0).adjoint() * wz.col(0))(0, 0) / wm.col(0).squaredNorm();
    CHECK(std::abs(std::abs(scale) - 1.0) < 1e-10);
    CHECK((wz.col(0) - scale * wm.col(0)).norm() < 1e-10 * wz.col(0).norm());
  }

  SECTION("rank-deficient channel is an error") {
    CMat sing = h;
    sing.col(1) = sing.col(0);
    CHECK_THROWS_AS(zf_precoder(sing), NumericalError);
  }
}

TEST_CASE("Wishart sanity of the Eve noise correlation") {
  // Uncorrelated Eve statistics (identity BS correlation, RIS path off):
  // E{(H_E^H V V^H H_E)^(-1)} = M / ((M - K - M_E) tr(R_tot)) I with
  // R_tot = beta_3 I_M.
  const int m = 128, k_users = 8, m_eve = 4;
  ChannelStats st = make_stats(m, 4, k_users, m_eve, 51,
                               {.identity_ris = true, .identity_bs = true});
  st.gains.ris_eve = 0.0;  // direct Eve path only
  st.validate();
  const PhaseVector phases = PhaseVector::start(4);

  RngStream rng(52);
  CMat acc = CMat::Zero(m_eve, m_eve);
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    RngStream trial = rng.derive(t);
    const ChannelRealization r = sample_realization(st, phases.phi, trial);
    const CMat v = an_precoder(r.user_matrix());
    const CMat te = v.adjoint() * r.h_eve;
    acc += (te.adjoint() * te).inverse();
  }
  acc /= static_cast<double>(trials);
  const double tr_tot = st.gains.bs_eve * m;
  const CMat expect =
      (m / ((m - k_users - m_eve) * tr_tot)) * CMat::Identity(m_eve, m_eve);
  CHECK((acc - expect).norm() / expect.norm() < 0.05);
}

TEST_CASE("empirical user rate") {
  ChannelStats st = make_stats(12, 6, 2, 1, 61);
  const PhaseVector phases = PhaseVector::start(6);

  SECTION("xi = 0 gives zero rate") {
    const McEstimate est = empirical_user_rate(st, phases, 0.0, 0, 50, RngStream(1));
    CHECK(est.mean == 0.0);
  }

  SECTION("reproducible from the master seed") {
    const McEstimate a = empirical_user_rate(st, phases, 0.4, 0, 200, RngStream(9));
    const McEstimate b = empirical_user_rate(st, phases, 0.4, 0, 200, RngStream(9));
    CHECK(a.mean == b.mean);
    CHECK(a.half_width == b.half_width);
    const McEstimate c = empirical_user_rate(st, phases, 0.4, 0, 200, RngStream(10));
    CHECK(a.mean != c.mean);
  }

  SECTION("thread count does not change the estimate") {
    McOptions two;
    two.threads = 2;
    const McEstimate a = empirical_user_rate(st, phases, 0.4, 0, 300, RngStream(9));
    const McEstimate b = empirical_user_rate(st, phases, 0.4, 0, 300, RngStream(9), two);
    CHECK(a.mean == b.mean);
  }

  SECTION("confidence half-width shrinks with more trials") {
    const McEstimate small = empirical_user_rate(st, phases, 0.4, 0, 400, RngStream(3));
    const McEstimate big = empirical_user_rate(st, phases, 0.4, 0, 3200, RngStream(3));
    CHECK(big.half_width < small.half_width);
    CHECK(small.half_width > 0.0);
  }

  SECTION("needs at least two trials") {
    CHECK_THROWS_AS(empirical_user_rate(st, phases, 0.4, 0, 1, RngStream(1)), ConfigError);
  }
}

TEST_CASE("precoder-variance term vanishes with the array size") {
  // The channel-hardening variance (1/M^2) var{h_k^H w_k} must fall with M
  // under matched per-antenna statistics.
  auto normalized_variance = [](int m) {
    ChannelStats st = make_stats(m, 4, 2, 1, 71,
                                 {.identity_ris = true, .identity_bs = true});
    st.gains.bs_user.setConstant(1.0);
    st.gains.ris_user.setZero();
    st.gains.ris_eve = 0.0;
    st.validate();
    const PhaseVector phases = PhaseVector::start(4);
    const McEstimate est =
        empirical_user_rate(st, phases, 0.5, 0, 400, RngStream(72));
    const double p = 0.5 * st.dims.total_power_w / st.dims.users;
    return est.variance_term / p / (static_cast<double>(m) * m);
  };
  const double at32 = normalized_variance(32);
  const double at256 = normalized_variance(256);
  CHECK(at256 < at32);
}

TEST_CASE("empirical Eve capacity") {
  ChannelStats st = make_stats(12, 6, 2, 2, 81);
  const PhaseVector phases = PhaseVector::start(6);

  SECTION("vanishes as xi -> 0") {
    const McEstimate est = empirical_eve_capacity(st, phases, 1e-9, 0, 100, RngStream(2));
    CHECK(est.mean < 1e-6);
  }

  SECTION("single Eve antenna reduces to the scalar quotient") {
    ChannelStats one = make_stats(10, 4, 2, 1, 83);
    const double xi = 0.45;
    const double zeta2 =
        mrt_zeta2(secrecy_traces(effective_correlations(one, PhaseVector::start(4))));
    // reproduce trial 0 by hand with the same derived stream
    RngStream master(5);
    RngStream trial = master.derive(0);
    const ChannelRealization r = sample_realization(one, PhaseVector::start(4).phi, trial);
    const PrecoderSet pre = mrt_precoder(r.user_matrix(), zeta2);
    const double num = std::norm((r.h_eve.adjoint() * pre.data.col(0))(0));
    const double den = (pre.noise.adjoint() * r.h_eve).squaredNorm();
    const double p = xi * one.dims.total_power_w / one.dims.users;
    const double q = (1.0 - xi) * one.dims.total_power_w / (10 - 2);
    const double manual = log2_1p(p / q * num / den);

    const McRun run = run_mc_trials(one, PhaseVector::start(4), xi, 0, 2, RngStream(5));
    const double stored = log2_1p(p / q * run.samples[0].eve_quadform);
    CHECK(stored == Approx(manual).epsilon(1e-12));
  }

  SECTION("xi = 1 has no AN: the reduction refuses") {
    const McRun run = run_mc_trials(st, phases, 1.0, 0, 10, RngStream(4));
    CHECK_THROWS_AS(reduce_eve_capacity(st.dims, run, 1.0), std::domain_error);
  }

  SECTION("discard accounting under an impossible condition limit") {
    McOptions strict;
    strict.condition_limit = 1.0;  // nothing passes
    CHECK_THROWS_AS(empirical_eve_capacity(st, phases, 0.5, 0, 20, RngStream(6), strict),
                    NumericalError);
    const McRun run = run_mc_trials(st, phases, 0.5, 0, 20, RngStream(6), strict);
    long discarded = 0;
    for (const auto& s : run.samples) discarded += s.eve_discarded ? 1 : 0;
    CHECK(discarded == 20);
  }

  SECTION("no discards at a healthy operating point") {
    const McEstimate est = empirical_eve_capacity(st, phases, 0.5, 0, 200, RngStream(7));
    CHECK(est.discarded == 0);
    CHECK(est.mean > 0.0);
  }

  SECTION("combined estimate at xi = 1: no AN, secrecy clamps to zero") {
    const McSecrecy mc = empirical_secrecy_rate(st, phases, 1.0, 0, 20, RngStream(8));
    CHECK(std::isinf(mc.eve_capacity.mean));
    CHECK(mc.secrecy.mean == 0.0);
  }
}

TEST_CASE("Monte Carlo certifies the closed form at a moderate size") {
  // The user-rate estimator averages exactly the moments that have
  // closed-form values under statistical MRT, so every component has an
  // analytic oracle. The statistical evaluation additionally drops the
  // hardening variance, so it upper-bounds the sampled rate.
  ChannelStats st = make_stats(64, 16, 4, 2, 91);
  RngStream prng(17);
  const PhaseVector phases = PhaseVector::random(16, prng);
  const double xi = 0.4;
  const SecrecyEval cf = secrecy_closed_form(st, phases, xi, 0);
  REQUIRE(cf.secrecy_rate > 0.1);

  const EffectiveCorrelation eff = effective_correlations(st, phases);
  const SecrecyTraces traces = secrecy_traces(eff);
  const double p = xi * st.dims.total_power_w / st.dims.users;
  const double pz2 = p * mrt_zeta2(traces);
  const double sig_exact = pz2 * traces.user(0) * traces.user(0);
  double cross = 0.0;
  for (int i = 1; i < 4; ++i) cross += traces.cross(0, i);
  const double intf_exact = pz2 * cross;
  const double var_exact = pz2 * traces.cross(0, 0);  // zeta^2 var{h^H h} = zeta^2 tr(R^2)
  const double rate_exact =
      log2_1p(sig_exact / (intf_exact + var_exact + st.dims.noise_user_w(0)));

  const McSecrecy mc = empirical_secrecy_rate(st, phases, xi, 0, 800, RngStream(92));

  CHECK(mc.user_rate.signal_power == Approx(sig_exact).epsilon(0.05));
  CHECK(mc.user_rate.interference == Approx(intf_exact).epsilon(0.05));
  CHECK(mc.user_rate.variance_term == Approx(var_exact).epsilon(0.15));
  CHECK(mc.user_rate.an_leakage < 1e-10 * mc.user_rate.interference);
  CHECK(mc.user_rate.noise == st.dims.noise_user_w(0));
  CHECK(std::abs(mc.user_rate.mean - rate_exact) <=
        std::max(0.05 * rate_exact, mc.user_rate.half_width));
  // bound direction: dropping the variance can only raise the rate
  CHECK(mc.user_rate.mean <= cf.rate_user + mc.user_rate.half_width);
  CHECK(mc.eve_capacity.mean <= cf.capacity_eve + mc.eve_capacity.half_width);
  CHECK(mc.secrecy.mean >= 0.0);
  CHECK(mc.secrecy.discarded == 0);

  SECTION("imperfect CSI degrades the rate only mildly at tau = 0.1") {
    McOptions tau;
    tau.csi_error = 0.1;
    const McSecrecy rough = empirical_secrecy_rate(st, phases, xi, 0, 800, RngStream(92), tau);
    CHECK(rough.secrecy.mean > 0.0);
    CHECK(rough.secrecy.mean >=
          0.85 * mc.secrecy.mean - (rough.secrecy.half_width + mc.secrecy.half_width));
  }
}
