#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fkpp/diagnostics.hpp"
#include "fkpp/errors.hpp"
#include "fkpp/pde.hpp"
#include "fkpp/wave_profile.hpp"
#include "fkpp/wave_system.hpp"

using namespace fkpp;

namespace {

const ReactionSpec& cubic_spec() {
  static const ReactionSpec s = ReactionSpec::cubic(0.75);
  return s;
}

const SpeedResult& cubic_speed() {
  static const SpeedResult r = solve_speed(cubic_spec());
  return r;
}

const ProfileTable& cubic_profile() {
  static const ProfileTable p = reconstruct_profile(cubic_spec(), cubic_speed());
  return p;
}

Domain make_domain(double lo, double hi, int cells) {
  Domain d;
  d.z_min = lo;
  d.z_max = hi;
  d.n_cells = cells;
  return d;
}

std::vector<double> profile_data(const Domain& dom, double epsilon = 0.0,
                                 double shift = 0.0) {
  InitialData init;
  init.kind = InitialData::Kind::profile_perturbation;
  init.epsilon = epsilon;
  init.shift = shift;
  return init.resolve(dom, &cubic_profile());
}

std::vector<double> step_data(const Domain& dom) {
  InitialData init;
  init.kind = InitialData::Kind::step;
  return init.resolve(dom);
}

template <typename E, typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("envelope constants: cubic with step data") {
  Domain dom = make_domain(-40.0, 40.0, 8000);
  const auto v0 = step_data(dom);
  const EnvelopeParams p =
      build_envelopes(cubic_spec(), cubic_profile(), v0, dom, 0.05);

  const SecantConstants sc = estimate_secant_constants(cubic_spec(), 0.05);
  CHECK(p.eta == 0.05);
  CHECK(p.delta == sc.delta);
  CHECK(p.mu == std::min(sc.mu_under, sc.mu_over));
  CHECK(p.mu > 0.0);

  // One-sided Lipschitz constant of the cubic: sup f' = 13/48.
  CHECK(p.L == doctest::Approx(13.0 / 48.0).epsilon(1e-2));

  // y = u^2 (1-u)^2 / 2, so dU/dz = u(1-u)/sqrt(2); its minimum over
  // [delta, 1-delta] sits at the ends.
  const double omega_exact = p.delta * (1.0 - p.delta) / std::sqrt(2.0);
  CHECK(p.omega == doctest::Approx(omega_exact).epsilon(5e-3));
  CHECK(p.nu == doctest::Approx((1.0 + p.L / p.mu) / p.omega).epsilon(1e-12));

  // Step data: v_plus = 1, v_minus = 0, so the admissible bands are
  // (eta, 1-s0-2eta) and (eta, s0-2eta); q0 sits at the midpoints.
  CHECK(p.q0_sub == doctest::Approx(0.5 * (0.05 + 0.15)).epsilon(1e-12));
  CHECK(p.q0_sup == doctest::Approx(0.5 * (0.05 + 0.65)).epsilon(1e-12));

  // Sub envelope: U(z - xi) - 0.1 <= step(z) pinches at the last node left of
  // the jump, U(-dz - xi) = 0.1, and the logistic inverse gives
  // xi = sqrt(2) ln 27 - dz.
  const double xi_oracle = std::sqrt(2.0) * std::log(27.0) - dom.dz();
  CHECK(p.z_star == doctest::Approx(xi_oracle).epsilon(2e-3));

  CHECK(p.xi_inf_sub == doctest::Approx(p.nu * p.q0_sub + p.z_star).epsilon(1e-12));
  CHECK(p.xi_inf_sup == doctest::Approx(p.nu * p.q0_sup + p.z_star).epsilon(1e-12));

  // eta beyond min(s0, 1-s0)/3 is rejected outright.
  CHECK_THROWS_AS(build_envelopes(cubic_spec(), cubic_profile(), v0, dom, 0.09),
                  ConfigError);

  // A right plateau at 0.8 leaves no room for q0_sub at eta = 0.03.
  std::vector<double> low(v0);
  for (double& x : low) x *= 0.8;
  const std::string msg = message_of<ConfigError>([&] {
    build_envelopes(cubic_spec(), cubic_profile(), low, dom, 0.03);
  });
  CHECK(msg.find("eta too large for these initial data") != std::string::npos);
}

TEST_CASE("envelopes: profile data, closed-form z_star, ordering at t=0") {
  Domain dom = make_domain(-40.0, 40.0, 8000);
  const auto v0 = profile_data(dom);
  const EnvelopeParams p =
      build_envelopes(cubic_spec(), cubic_profile(), v0, dom, 0.05);

  // v0 = U: the binding constraint is the subsolution with q0 = 0.1.
  // max_z [U(z+a) - U(z)] = tanh(a/(4 sqrt 2)) for the logistic, so the
  // smallest feasible translate is -4 sqrt(2) atanh(0.1).
  const double z_star_oracle = -4.0 * std::sqrt(2.0) * std::atanh(0.1);
  CHECK(p.z_star == doctest::Approx(z_star_oracle).epsilon(2e-3));

  // Ordering at t = 0 is exact by construction.
  Trajectory tr;
  tr.domain = dom;
  tr.snapshots.push_back({0.0, v0});
  CHECK(check_comparison(tr, p, cubic_profile()) == 0.0);

  // Far left at t = 1.5 the upper envelope is q0_sup e^{-mu t} + U(tail).
  const EnvelopePair far = eval_envelopes(p, cubic_profile(), dom.z_min, 1.5);
  CHECK(far.lower == 0.0);
  CHECK(far.upper ==
        doctest::Approx(p.q0_sup * std::exp(-1.5 * p.mu)).epsilon(1e-6));

  for (double t : {0.0, 0.7, 3.0, 12.0}) {
    for (double z = -39.0; z <= 39.0; z += 0.75) {
      const EnvelopePair pr = eval_envelopes(p, cubic_profile(), z, t);
      CHECK(pr.lower <= pr.upper);
      CHECK(pr.lower >= 0.0);
      CHECK(pr.upper <= 1.0);
    }
  }

  // Pushing the data above the upper envelope is detected.
  Trajectory bad;
  bad.domain = dom;
  std::vector<double> up(v0);
  for (double& x : up) x = std::min(1.0, x + 0.4);
  bad.snapshots.push_back({0.0, up});
  CHECK(check_comparison(bad, p, cubic_profile()) > 0.01);
}

TEST_CASE("comparison principle holds along an actual run") {
  Domain dom = make_domain(-40.0, 40.0, 4000);
  const auto v0 = step_data(dom);
  const EnvelopeParams p =
      build_envelopes(cubic_spec(), cubic_profile(), v0, dom, 0.05);

  SchemeCtrl ctrl;
  ctrl.dt = 0.002;
  ctrl.t_end = 2.0;
  ctrl.snapshot_every = 0.25;
  const Trajectory traj =
      run(cubic_spec(), cubic_speed().c_star, dom, ctrl, v0);
  CHECK(check_comparison(traj, p, cubic_profile()) <= 1e-10);
}

TEST_CASE("lyapunov series on a near-stationary wave") {
  Domain dom = make_domain(-15.0, 15.0, 1500);
  const auto v0 = profile_data(dom, 0.02);

  SchemeCtrl ctrl;
  ctrl.dt = 0.002;
  ctrl.t_end = 2.0;
  ctrl.snapshot_every = 0.1;
  const Trajectory traj =
      run(cubic_spec(), cubic_speed().c_star, dom, ctrl, v0);

  const auto [a, b] = diagnostic_interval(cubic_profile(), dom, std::nullopt);
  REQUIRE(a < b);
  const auto series =
      lyapunov_series(cubic_spec(), traj, cubic_speed().c_star, a, b);
  REQUIRE(series.size() == traj.snapshots.size());

  CHECK_FALSE(series.front().dissipation.has_value());
  CHECK_FALSE(series.back().dissipation.has_value());
  const double scale = std::abs(series.front().energy) + 1.0;
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    CHECK(series[k + 1].energy <= series[k].energy + 1e-6 * scale);
  }
  for (std::size_t k = 1; k + 1 < series.size(); ++k) {
    REQUIRE(series[k].dissipation.has_value());
    REQUIRE(series[k].identity_residual.has_value());
    CHECK(*series[k].dissipation >= 0.0);
    CHECK(*series[k].identity_residual <= 0.05 * scale);
  }

  Trajectory two;
  two.domain = dom;
  two.snapshots = {traj.snapshots[0], traj.snapshots[1]};
  const std::string msg = message_of<ConfigError>([&] {
    lyapunov_series(cubic_spec(), two, cubic_speed().c_star, a, b);
  });
  CHECK(msg.find("insufficient sampling") != std::string::npos);
}

TEST_CASE("diagnostic interval: infinite tails and clipping") {
  Domain wide = make_domain(-40.0, 40.0, 8000);
  const auto [a, b] = diagnostic_interval(cubic_profile(), wide, std::nullopt);
  CHECK(eval_profile(cubic_profile(), a) == doctest::Approx(1e-4).epsilon(0.05));
  CHECK(1.0 - eval_profile(cubic_profile(), b) ==
        doctest::Approx(1e-4).epsilon(0.05));

  Domain narrow = make_domain(-5.0, 5.0, 100);
  const auto [an, bn] = diagnostic_interval(cubic_profile(), narrow, std::nullopt);
  CHECK(an == doctest::Approx(-5.0 + narrow.dz()).epsilon(1e-12));
  CHECK(bn == doctest::Approx(5.0 - narrow.dz()).epsilon(1e-12));
}

TEST_CASE("diagnostic interval: finite endpoints use the theory translate") {
  static const ReactionSpec holder = ReactionSpec::holder(0.75, 0.5, 0.5);
  static const SpeedResult speed = solve_speed(holder);
  static const ProfileTable prof = reconstruct_profile(holder, speed);
  REQUIRE(prof.left.finite);
  REQUIRE(prof.right.finite);

  Domain dom = make_domain(-60.0, 60.0, 2400);
  const auto v0 = [&] {
    InitialData init;
    init.kind = InitialData::Kind::profile_perturbation;
    return init.resolve(dom, &prof);
  }();
  const EnvelopeParams p = build_envelopes(holder, prof, v0, dom, 0.05);

  const auto [a, b] = diagnostic_interval(prof, dom, p);
  const double a_eff = std::max(prof.z0() - p.xi_inf_sup - 1.0, dom.z_min + dom.dz());
  const double b_eff = std::min(prof.z1() + p.xi_inf_sub + 1.0, dom.z_max - dom.dz());
  CHECK(a == doctest::Approx(a_eff).epsilon(1e-12));
  CHECK(b == doctest::Approx(b_eff).epsilon(1e-12));
  CHECK(a < b);
}

TEST_CASE("shift estimation: translate, least squares, crossings") {
  Domain dom = make_domain(-40.0, 40.0, 8000);

  State s;
  s.t = 1.0;
  s.v.resize(dom.n_nodes());
  for (int i = 0; i < dom.n_nodes(); ++i) {
    s.v[i] = eval_profile(cubic_profile(), dom.z(i) - 1.25);
  }
  const ShiftSample ss = estimate_shift(s, dom, cubic_profile());
  CHECK(ss.t == 1.0);
  CHECK(ss.zeta == doctest::Approx(-1.25).epsilon(1e-4));
  CHECK(ss.zeta_lsq == doctest::Approx(-1.25).epsilon(1e-6));
  CHECK(ss.sup_dist <= 1e-6);
  CHECK_FALSE(ss.multiple_crossings);

  // A dip near z=5 adds two crossings; the accumulated-mass position keeps
  // the front one.
  State dip = s;
  for (int i = 0; i < dom.n_nodes(); ++i) {
    const double z = dom.z(i);
    dip.v[i] = std::max(0.0, dip.v[i] - 0.3 * std::exp(-(z - 5.0) * (z - 5.0)));
  }
  const ShiftSample sd = estimate_shift(dip, dom, cubic_profile());
  CHECK(sd.multiple_crossings);
  CHECK(sd.zeta == doctest::Approx(-1.25).epsilon(1e-3));

  State flat;
  flat.t = 0.0;
  flat.v.assign(dom.n_nodes(), 0.9);
  CHECK_THROWS_AS(estimate_shift(flat, dom, cubic_profile()), NonConvergence);
}

TEST_CASE("convergence report and stability probe") {
  Domain dom = make_domain(-20.0, 20.0, 2000);
  const auto v0 = profile_data(dom, 0.05);

  SchemeCtrl ctrl;
  ctrl.dt = 0.004;
  ctrl.t_end = 4.0;
  ctrl.snapshot_every = 0.25;
  const Trajectory traj =
      run(cubic_spec(), cubic_speed().c_star, dom, ctrl, v0);
  REQUIRE(traj.snapshots.size() == 17);

  const auto [a, b] = diagnostic_interval(cubic_profile(), dom, std::nullopt);
  const ConvergenceReport rep = convergence_report(
      cubic_spec(), traj, cubic_profile(), cubic_speed().c_star, a, b);
  CHECK(rep.shift_track.size() == traj.snapshots.size());
  CHECK(rep.lyapunov.size() == traj.snapshots.size());
  CHECK(std::abs(rep.zeta_inf) <= 0.5);
  CHECK(rep.final_sup_dist <= rep.shift_track.front().sup_dist + 1e-6);
  CHECK(rep.final_sup_dist <= 0.06);
  CHECK(rep.monotone_tail);
  CHECK(rep.lyapunov_ok);
  CHECK_FALSE(rep.stability_constant_estimate.has_value());

  // Fewer than 10 snapshots is rejected.
  SchemeCtrl brief = ctrl;
  brief.t_end = 1.0;
  const Trajectory short_traj =
      run(cubic_spec(), cubic_speed().c_star, dom, brief, v0);
  CHECK_THROWS_AS(convergence_report(cubic_spec(), short_traj, cubic_profile(),
                                     cubic_speed().c_star, a, b),
                  ConfigError);

  SchemeCtrl probe_ctrl;
  probe_ctrl.dt = 0.004;
  probe_ctrl.t_end = 1.0;
  probe_ctrl.snapshot_every = 0.2;
  Domain probe_dom = make_domain(-20.0, 20.0, 1000);
  const double ratio =
      stability_probe(cubic_spec(), cubic_profile(), probe_dom, probe_ctrl,
                      {0.02, 0.05}, 0.05);
  CHECK(ratio > 0.2);
  CHECK(ratio < 10.0);
  CHECK_THROWS_AS(stability_probe(cubic_spec(), cubic_profile(), probe_dom,
                                  probe_ctrl, {}, 0.05),
                  ConfigError);
}
