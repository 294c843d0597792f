#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

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

Domain small_domain(double lo, double hi, int cells) {
  Domain d;
  d.z_min = lo;
  d.z_max = hi;
  d.n_cells = cells;
  return d;
}

std::vector<double> smoothed(const Domain& dom, double at = 0.0,
                             double width = 1.0) {
  InitialData init;
  init.kind = InitialData::Kind::smoothed_step;
  init.at = at;
  init.width = width;
  return init.resolve(dom);
}

}  // namespace

TEST_CASE("initial data: step, smoothed step, perturbation, table") {
  Domain dom = small_domain(-40.0, 40.0, 8000);  // dz = 0.01, node at z=0

  InitialData step;
  step.kind = InitialData::Kind::step;
  step.at = 0.0;
  auto v = step.resolve(dom);
  REQUIRE(static_cast<int>(v.size()) == dom.n_nodes());
  CHECK(v[3999] == 0.0);
  CHECK(v[4000] == 0.5);
  CHECK(v[4001] == 1.0);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1.0);

  InitialData sm;
  sm.kind = InitialData::Kind::smoothed_step;
  sm.at = 0.0;
  sm.width = 2.0;
  auto w = sm.resolve(dom);
  CHECK(w[4000] == doctest::Approx(0.5));
  CHECK(w[4200] == doctest::Approx(0.5 * (1.0 + std::tanh(1.0))));
  CHECK(w.front() == 0.0);
  CHECK(w.back() == 1.0);

  // Perturbed profile.
  static const SpeedResult speed = solve_speed(cubic_spec());
  static const ProfileTable profile = reconstruct_profile(cubic_spec(), speed);
  InitialData pert;
  pert.kind = InitialData::Kind::profile_perturbation;
  pert.epsilon = 0.01;
  pert.shift = 0.0;
  auto pv = pert.resolve(dom, &profile);
  CHECK(pv[4000] == doctest::Approx(0.76).epsilon(1e-9));
  CHECK_THROWS_AS(pert.resolve(dom, nullptr), ConfigError);

  InitialData tab;
  tab.kind = InitialData::Kind::table;
  tab.table = {{-5.0, 0.0}, {0.0, 0.3}, {5.0, 1.0}};
  auto tv = tab.resolve(dom);
  CHECK(tv[4000] == doctest::Approx(0.3));
  CHECK(tv[1000] == 0.0);   // constant extension left of the samples
  CHECK(tv[7500] == 1.0);   // and right
  for (std::size_t i = 1; i < tv.size(); ++i) CHECK(tv[i] >= tv[i - 1]);
}

TEST_CASE("plateau check H5") {
  Domain dom = small_domain(-40.0, 40.0, 800);
  auto good = smoothed(dom);
  auto rep = check_h5(good, dom, 0.75, 0.05);
  CHECK(rep.ok);
  CHECK(rep.margin == doctest::Approx(0.1));
  CHECK(rep.v_minus <= 0.75 - 0.1);
  CHECK(rep.v_plus >= 0.75 + 0.1);

  // Left plateau too high: sits above s0 - 2 eta.
  std::vector<double> bad(good);
  for (std::size_t i = 0; i < bad.size() / 10 + 1; ++i) bad[i] = 0.7;
  auto rep2 = check_h5(bad, dom, 0.75, 0.05);
  CHECK_FALSE(rep2.ok);
  CHECK(rep2.v_minus == doctest::Approx(0.7));
  CHECK(!rep2.detail.empty());
}

TEST_CASE("imex: exact discrete steady state of the linear operator") {
  // With the reaction off, v_t = v_zz + c v_z and Dirichlet 0/1 relaxes onto
  // the steady state of the *discrete* operator, which is a geometric
  // sequence in rho = (1 - c dz/2)/(1 + c dz/2).
  Domain dom = small_domain(-5.0, 5.0, 200);
  const double c = 0.5;
  SchemeCtrl ctrl;
  ctrl.kind = SchemeCtrl::Kind::imex_fd;
  ctrl.dt = 0.01;
  ctrl.t_end = 150.0;
  ctrl.snapshot_every = 50.0;
  ctrl.reaction_off = true;
  ctrl.waive_h5 = true;

  auto traj = run(cubic_spec(), c, dom, ctrl, smoothed(dom, 0.0, 0.5));
  const auto& v = traj.snapshots.back().v;

  const double dz = dom.dz();
  const double rho = (1.0 - 0.5 * c * dz) / (1.0 + 0.5 * c * dz);
  const int n = dom.n_cells;
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double exact =
        (1.0 - std::pow(rho, i)) / (1.0 - std::pow(rho, n));
    worst = std::max(worst, std::abs(v[i] - exact));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("imex: spatial self-convergence is second order") {
  // dt fixed and small; refining dz alone must shrink the solution difference
  // by ~4 per halving (the dz-independent reaction-time error cancels).
  const double c = 0.35;
  SchemeCtrl ctrl;
  ctrl.dt = 1e-3;
  ctrl.t_end = 1.0;
  ctrl.snapshot_every = 1.0;
  ctrl.waive_h5 = true;

  auto solve = [&](int cells) {
    Domain dom = small_domain(-10.0, 10.0, cells);
    auto traj = run(cubic_spec(), c, dom, ctrl, smoothed(dom));
    return traj.snapshots.back().v;
  };
  const auto v1 = solve(250);
  const auto v2 = solve(500);
  const auto v3 = solve(1000);

  auto diff = [](const std::vector<double>& coarse,
                 const std::vector<double>& fine, int ratio) {
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      worst = std::max(worst,
                       std::abs(coarse[i] - fine[i * ratio]));
    }
    return worst;
  };
  const double e12 = diff(v1, v2, 2);
  const double e23 = diff(v2, v3, 2);
  CHECK(e12 > 0.0);
  CHECK(e23 > 0.0);
  CHECK(e12 / e23 > 3.3);
  CHECK(e12 / e23 < 4.8);
}

TEST_CASE("imex: guards reject bad resolutions") {
  Domain dom = small_domain(-40.0, 40.0, 800);  // dz = 0.1
  SchemeCtrl ctrl;

  // Cell Peclet: |c| dz / 2 must stay below 1.
  CHECK_THROWS_AS(ImexStepper(cubic_spec(), 25.0, dom, ctrl), ConfigError);

  // Reaction slope: dt * max |f'| <= 1/2; for the cubic max|f'| = s0 = 0.75.
  SchemeCtrl big;
  big.dt = 0.8;
  CHECK_THROWS_AS(ImexStepper(cubic_spec(), 0.35, dom, big), ConfigError);

  SchemeCtrl ok;
  ok.dt = 0.6;  // 0.6 * 0.75 = 0.45 < 0.5 passes
  CHECK_NOTHROW(ImexStepper(cubic_spec(), 0.35, dom, ok));
}

TEST_CASE("imex: clamp diagnostic stays at rounding level on step data") {
  Domain dom = small_domain(-40.0, 40.0, 4000);
  SchemeCtrl ctrl;
  ctrl.dt = 0.002;
  ctrl.t_end = 2.0;
  ctrl.snapshot_every = 0.5;

  InitialData init;
  init.kind = InitialData::Kind::step;
  auto traj = run(cubic_spec(), 0.35, dom, ctrl, init.resolve(dom));
  // Step data rings through Crank-Nicolson; the implicit startup steps and
  // the clamp keep the excess tiny (smooth data stays at rounding level, see
  // the cadence test below).
  CHECK(traj.max_clamp <= 1e-6);
  CHECK_FALSE(traj.aborted);
  // Maximum principle: everything stays inside [0,1].
  for (const auto& s : traj.snapshots) {
    for (double x : s.v) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
  }
}

TEST_CASE("splitting: drift-shifted kernel reproduces the erfc solution") {
  // Reaction off, step data, infinite-domain closed form
  //   v(z,t) = erfc(-(z + c t) / (2 sqrt(t))) / 2.
  Domain dom = small_domain(-40.0, 40.0, 8000);
  const double c = 0.35;
  SchemeCtrl ctrl;
  ctrl.kind = SchemeCtrl::Kind::splitting_green;
  ctrl.dt = 0.01;
  ctrl.t_end = 1.0;
  ctrl.snapshot_every = 1.0;
  ctrl.reaction_off = true;
  ctrl.waive_h5 = true;

  InitialData init;
  init.kind = InitialData::Kind::step;
  auto traj = run(cubic_spec(), c, dom, ctrl, init.resolve(dom));
  const auto& v = traj.snapshots.back().v;
  const double t = traj.snapshots.back().t;
  REQUIRE(t == doctest::Approx(1.0));
  CHECK(traj.max_clamp <= 1e-13);  // positive kernel: no over/undershoot

  double worst = 0.0;
  for (int i = 0; i <= dom.n_cells; ++i) {
    const double z = dom.z(i);
    if (std::abs(z) > 20.0) continue;  // keep clear of the Dirichlet ends
    const double exact = 0.5 * std::erfc(-(z + c * t) / (2.0 * std::sqrt(t)));
    worst = std::max(worst, std::abs(v[i] - exact));
  }
  CHECK(worst <= 5e-4);
}

TEST_CASE("splitting: temporal self-convergence is second order") {
  Domain dom = small_domain(-20.0, 20.0, 4000);
  const double c = 0.35;

  auto solve = [&](double dt) {
    SchemeCtrl ctrl;
    ctrl.kind = SchemeCtrl::Kind::splitting_green;
    ctrl.dt = dt;
    ctrl.t_end = 0.5;
    ctrl.snapshot_every = 0.5;
    auto traj = run(cubic_spec(), c, dom, ctrl, smoothed(dom));
    return traj.snapshots.back().v;
  };
  const auto v1 = solve(0.02);
  const auto v2 = solve(0.01);
  const auto v3 = solve(0.005);

  auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
  };
  const double e12 = diff(v1, v2);
  const double e23 = diff(v2, v3);
  CHECK(e12 > 0.0);
  CHECK(e23 > 0.0);
  CHECK(e12 / e23 > 3.2);
}

TEST_CASE("splitting: kernel fits the domain or the config is rejected") {
  Domain dom = small_domain(-2.0, 2.0, 100);
  SchemeCtrl ctrl;
  ctrl.kind = SchemeCtrl::Kind::splitting_green;
  ctrl.dt = 2.0;  // 8 sigma = 16 cells of width 0.04 each -> way beyond
  CHECK_THROWS_AS(SplittingStepper(cubic_spec(), 0.35, dom, ctrl),
                  ConfigError);

  SchemeCtrl ok;
  ok.kind = SchemeCtrl::Kind::splitting_green;
  ok.dt = 0.002;
  SplittingStepper st(cubic_spec(), 0.35, dom, ok);
  CHECK(st.kernel_halfwidth() >= 1);
  CHECK(st.kernel_halfwidth() < dom.n_cells);
}

TEST_CASE("run: snapshot cadence, H5 enforcement, waiver") {
  Domain dom = small_domain(-40.0, 40.0, 800);
  SchemeCtrl ctrl;
  ctrl.dt = 0.01;
  ctrl.t_end = 1.0;
  ctrl.snapshot_every = 0.1;

  auto traj = run(cubic_spec(), 0.35, dom, ctrl, smoothed(dom));
  REQUIRE(traj.snapshots.size() == 11);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    CHECK(traj.snapshots[k].t == doctest::Approx(0.1 * k).epsilon(1e-9));
    CHECK(static_cast<int>(traj.snapshots[k].v.size()) == dom.n_nodes());
  }
  CHECK(traj.max_clamp <= 1e-12);  // smooth data never leaves [0,1]

  // Initial data hugging s0 violates the plateau margin.
  std::vector<double> flat(dom.n_nodes(), 0.7);
  CHECK_THROWS_AS(run(cubic_spec(), 0.35, dom, ctrl, flat), HypothesisError);
  SchemeCtrl waived = ctrl;
  waived.waive_h5 = true;
  waived.t_end = 0.1;
  CHECK_NOTHROW(run(cubic_spec(), 0.35, dom, waived, flat));
}

TEST_CASE("run: both schemes transport the cubic front at speed c*") {
  // In the frame moving at c*, the front must become stationary; in a frame
  // moving 20% slower it must drift. Track the s0-crossing between t=8 and
  // t=16.
  static const SpeedResult speed = solve_speed(cubic_spec());
  Domain dom = small_domain(-40.0, 40.0, 2000);

  auto crossing = [&](const std::vector<double>& v) {
    for (int i = 0; i < dom.n_cells; ++i) {
      if (v[i] < 0.75 && v[i + 1] >= 0.75) {
        const double w = (0.75 - v[i]) / (v[i + 1] - v[i]);
        return dom.z(i) + w * dom.dz();
      }
    }
    return dom.z_max;
  };

  for (auto kind :
       {SchemeCtrl::Kind::imex_fd, SchemeCtrl::Kind::splitting_green}) {
    SchemeCtrl ctrl;
    ctrl.kind = kind;
    ctrl.dt = 0.004;
    ctrl.t_end = 16.0;
    ctrl.snapshot_every = 8.0;

    auto moved = [&](double c) {
      auto traj = run(cubic_spec(), c, dom, ctrl, smoothed(dom));
      REQUIRE(traj.snapshots.size() == 3);
      return crossing(traj.snapshots[2].v) - crossing(traj.snapshots[1].v);
    };

    const double drift_star = moved(speed.c_star);
    CHECK(std::abs(drift_star) < 0.05);

    const double drift_slow = moved(0.8 * speed.c_star);
    CHECK(drift_slow > 0.4);  // front escapes to +z when under-advected
  }
}
