#include <doctest.h>

#include <fkpp/errors.hpp>
#include <fkpp/interpolation.hpp>
#include <fkpp/reaction.hpp>
#include <fkpp/wave_system.hpp>

#include <cmath>
#include <vector>

using namespace fkpp;

namespace {
const double kCStarCubic075 = 0.5 / std::sqrt(2.0);  // (2*0.75-1)/sqrt(2)
const double kCStarCubic090 = 0.8 / std::sqrt(2.0);
}

TEST_CASE("integrate_y: exact cubic solution at c*") {
  auto spec = ReactionSpec::cubic(0.75);
  auto y = integrate_y(spec, kCStarCubic075);
  // exact: y(r) = r^2 (1-r)^2 / 2
  CHECK(y.r_grid.front() == 0.0);
  CHECK(y.y_values.front() == 0.0);
  CHECK(std::abs(y.eval(0.5) - 0.03125) < 1e-8);
  CHECK(std::abs(y.eval(0.25) - 0.25 * 0.25 * 0.75 * 0.75 / 2.0) < 1e-8);
  // a node lands exactly on s0
  bool has_s0 = false;
  for (double r : y.r_grid)
    if (r == 0.75) has_s0 = true;
  CHECK(has_s0);
}

TEST_CASE("integrate_y: c=0 gives the exact first integral y=-2F") {
  auto spec = ReactionSpec::cubic(0.75);
  auto y = integrate_y(spec, 0.0);
  CHECK(y.terminal.kind == Terminal::Kind::positive_at_one);
  CHECK(std::abs(y.terminal.value - 1.0 / 12.0) < 1e-9);
  double worst = 0.0;
  for (std::size_t i = 0; i < y.r_grid.size(); ++i)
    worst = std::max(worst, std::abs(y.y_values[i] + 2.0 * eval_F(spec, y.r_grid[i])));
  CHECK(worst <= 1e-8);
}

TEST_CASE("integrate_y: heavy drag hits zero before 1") {
  auto spec = ReactionSpec::cubic(0.75);
  auto y = integrate_y(spec, 10.0);
  REQUIRE(y.terminal.kind == Terminal::Kind::hit_zero_at);
  CHECK(y.terminal.value < 1.0);
  CHECK(y.terminal.value > 0.7); // crossing can only happen where f > 0
}

TEST_CASE("solve_speed: cubic closed forms") {
  auto r075 = solve_speed(ReactionSpec::cubic(0.75));
  CHECK(std::abs(r075.c_star - kCStarCubic075) < 1e-6);
  CHECK(r075.c_star > 0.0);
  CHECK(r075.y.terminal.kind == Terminal::Kind::balanced);
  CHECK(std::abs(r075.y.terminal.value) <= 1e-10);
  CHECK(r075.bracket_hi - r075.bracket_lo <= 1e-8);
  CHECK(std::abs(r075.y.eval(0.5) - 0.03125) < 1e-8);
  CHECK(r075.identity_residual <= 1e-8);

  auto r09 = solve_speed(ReactionSpec::cubic(0.9));
  CHECK(std::abs(r09.c_star - kCStarCubic090) < 1e-6);
}

TEST_CASE("solve_speed: holder family, resolution-stable") {
  auto spec = ReactionSpec::holder(0.75, 0.5, 0.5);
  WaveCtrl ctrl;
  auto a = solve_speed(spec, ctrl);
  CHECK(a.c_star > 0.0);
  CHECK(a.identity_residual <= 1e-4);
  auto b = solve_speed(spec, ctrl.refined());
  CHECK(std::abs(a.c_star - b.c_star) <= 1e-5);
}

TEST_CASE("solve_speed: balanced case has no positive-speed wave") {
  CHECK_THROWS_AS(solve_speed(ReactionSpec::cubic(0.5)), NonConvergence);
}

TEST_CASE("verify_speed_identity: exact value and detector") {
  auto spec = ReactionSpec::cubic(0.75);
  auto res = solve_speed(spec);
  CHECK(std::abs(integral_sqrt_y(res.y) - 1.0 / (6.0 * std::sqrt(2.0))) < 1e-7);
  CHECK(verify_speed_identity(spec, res.y) <= 1e-8);

  // halved speed must be flagged loudly (scale |F(1)|/2)
  auto yhalf = integrate_y(spec, res.c_star / 2.0);
  double resid = verify_speed_identity(spec, yhalf);
  CHECK(resid > 1e-3);
  CHECK(resid < std::abs(eval_F(spec, 1.0)));
}

TEST_CASE("property: y decreases pointwise in c") {
  auto spec = ReactionSpec::cubic(0.75);
  auto ylo = integrate_y(spec, 0.2);
  auto yhi = integrate_y(spec, 0.3);
  double r_top = std::min(ylo.r_grid.back(), yhi.r_grid.back());
  for (int i = 1; i < 100; ++i) {
    double r = i * r_top / 100.0;
    double a = ylo.eval(r), b = yhi.eval(r);
    if (a > 0.0 && b > 0.0) CHECK(b <= a + 1e-10);
  }
}

TEST_CASE("property: balanced solution positive on the interior") {
  for (auto spec : {ReactionSpec::cubic(0.75), ReactionSpec::holder(0.75, 0.5, 0.5)}) {
    auto res = solve_speed(spec);
    for (std::size_t i = 0; i < res.y.r_grid.size(); ++i) {
      double r = res.y.r_grid[i];
      if (r > 0.0 && r < 1.0) CHECK(res.y.y_values[i] > 0.0);
    }
  }
}

TEST_CASE("property: endpoint asymptotics of y") {
  // fitted exponent of y ~ A0 r^(1+alpha0) within 0.05; coefficient near
  // 2*gamma0/(1+alpha0) for the genuinely Holder end (alpha0 < 1).
  auto spec = ReactionSpec::holder(0.75, 0.5, 0.5);
  auto res = solve_speed(spec);
  std::vector<double> lr, ly;
  for (std::size_t i = 0; i < res.y.r_grid.size(); ++i) {
    double r = res.y.r_grid[i];
    if (r >= 5e-4 && r <= 5e-3) {
      lr.push_back(std::log(r));
      ly.push_back(std::log(res.y.y_values[i]));
    }
  }
  REQUIRE(lr.size() >= 5);
  double slope = regression_slope(lr, ly);
  CHECK(std::abs(slope - 1.5) < 0.05);
  double a0_expected = 2.0 * spec.gamma0() / (1.0 + spec.alpha0); // = 1.0 here
  CHECK(res.y.start_coeff == doctest::Approx(a0_expected).epsilon(0.2));

  // cubic end is Lipschitz: exponent 2
  auto resc = solve_speed(ReactionSpec::cubic(0.75));
  lr.clear();
  ly.clear();
  for (std::size_t i = 0; i < resc.y.r_grid.size(); ++i) {
    double r = resc.y.r_grid[i];
    if (r >= 5e-4 && r <= 5e-3) {
      lr.push_back(std::log(r));
      ly.push_back(std::log(resc.y.y_values[i]));
    }
  }
  CHECK(std::abs(regression_slope(lr, ly) - 2.0) < 0.05);
}

TEST_CASE("property: c* refinement convergence") {
  // Loose integration + tight bisection isolates the grid error in c*;
  // each refinement tightens the step 2x and the error target 16x.
  auto spec = ReactionSpec::cubic(0.75);
  WaveCtrl ctrl;
  ctrl.max_step = 4e-3;
  ctrl.rk_tol = 1e-8;
  ctrl.bisect_tol = 1e-13;
  ctrl.balance_tol = 1e-13;
  auto c0 = solve_speed(spec, ctrl).c_star;
  auto c1 = solve_speed(spec, ctrl.refined()).c_star;
  auto c2 = solve_speed(spec, ctrl.refined().refined()).c_star;
  double d01 = std::abs(c0 - c1), d12 = std::abs(c1 - c2);
  CHECK(d01 > 0.0);
  CHECK(d01 >= 2.0 * d12);
}
