#include "fkpp/wave_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "fkpp/errors.hpp"
#include "fkpp/quadrature.hpp"

namespace fkpp {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void validate_ctrl(const WaveCtrl& ctrl, const ReactionSpec& spec) {
  if (!(ctrl.eps_start > 0.0) || !(ctrl.eps_start < 0.5 * spec.s0)) {
    throw ConfigError("wave eps_start must lie in (0, s0/2), got " +
                      fmt(ctrl.eps_start));
  }
  if (!(ctrl.max_step > 0.0) || !(ctrl.rk_tol > 0.0) ||
      !(ctrl.min_step > 0.0) || !(ctrl.balance_tol > 0.0) ||
      !(ctrl.bisect_tol > 0.0) || ctrl.max_bisect < 1) {
    throw ConfigError("wave controls must be positive");
  }
}

double rhs(const ReactionSpec& spec, double c, double r, double y) {
  return -2.0 * (c * std::sqrt(std::max(y, 0.0)) + eval_f(spec, r));
}

double rk4_step(const ReactionSpec& spec, double c, double r, double y,
                double h) {
  const double k1 = rhs(spec, c, r, y);
  const double k2 = rhs(spec, c, r + 0.5 * h, y + 0.5 * h * k1);
  const double k3 = rhs(spec, c, r + 0.5 * h, y + 0.5 * h * k2);
  const double k4 = rhs(spec, c, r + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Step-doubling error estimate: one full step against two half steps.
struct TrialStep {
  double y_next = 0.0;
  double err = 0.0;
};

TrialStep try_step(const ReactionSpec& spec, double c, double r, double y,
                   double h) {
  const double big = rk4_step(spec, c, r, y, h);
  const double mid = rk4_step(spec, c, r, y, 0.5 * h);
  const double small = rk4_step(spec, c, r + 0.5 * h, mid, 0.5 * h);
  TrialStep t;
  t.y_next = small;
  t.err = std::abs(small - big) / 15.0;
  return t;
}

}  // namespace

double YSolution::eval(double r) const {
  if (r <= 0.0 || r_grid.empty()) return 0.0;
  if (r >= r_grid.back()) return std::max(y_values.back(), 0.0);
  if (r < eps_start) {
    // Asymptotic start branch, continuous with the first grid value.
    const std::size_t i0 = (r_grid.front() == 0.0 && r_grid.size() > 1) ? 1 : 0;
    const double y_eps = y_values[i0];
    return std::max(y_eps * std::pow(r / r_grid[i0], 1.0 + alpha0), 0.0);
  }
  const auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
  std::size_t i = static_cast<std::size_t>(it - r_grid.begin());
  i = (i == 0) ? 0 : i - 1;
  if (i + 1 >= r_grid.size()) i = r_grid.size() - 2;
  const double h = r_grid[i + 1] - r_grid[i];
  const double t = (r - r_grid[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double v = (2.0 * t3 - 3.0 * t2 + 1.0) * y_values[i] +
                   (t3 - 2.0 * t2 + t) * h * slopes[i] +
                   (-2.0 * t3 + 3.0 * t2) * y_values[i + 1] +
                   (t3 - t2) * h * slopes[i + 1];
  return std::max(v, 0.0);
}

YSolution integrate_y(const ReactionSpec& spec, double c,
                      const WaveCtrl& ctrl) {
  validate_ctrl(ctrl, spec);
  if (c < 0.0) throw ConfigError("integrate_y: the speed must be >= 0");

  YSolution sol;
  sol.c = c;
  sol.alpha0 = spec.alpha0;
  sol.eps_start = ctrl.eps_start;

  const double eps = ctrl.eps_start;

  // Start value on [0, eps]: one Picard sweep of the integral equation
  //   y(eps) = -2 F(eps) - 2c int_0^eps sqrt(y),
  // seeded with the zero-speed branch y = -2F.  For large c this goes
  // negative; the quasi-static balance y = (f/c)^2 is the attracting branch
  // there and serves as the fallback.
  const double picard_tail =
      integrate_adaptive(
          [&spec](double s) {
            return std::sqrt(std::max(-2.0 * eval_F(spec, s), 0.0));
          },
          0.0, eps, /*abs_tol=*/1e-18, /*rel_tol=*/1e-10)
          .value;
  double y_eps = -2.0 * eval_F(spec, eps) - 2.0 * c * picard_tail;
  if (!(y_eps > 0.0)) {
    if (c > 0.0) {
      const double q = eval_f(spec, eps) / c;
      y_eps = q * q;
    }
    if (!(y_eps > 0.0)) {
      throw NonConvergence(
          "integrate_y: start interval produced a nonpositive y(eps); the "
          "sign hypotheses likely fail near 0");
    }
  }

  sol.r_grid.push_back(0.0);
  sol.y_values.push_back(0.0);
  sol.slopes.push_back(rhs(spec, c, 0.0, 0.0));
  sol.r_grid.push_back(eps);
  sol.y_values.push_back(y_eps);
  sol.slopes.push_back(rhs(spec, c, eps, y_eps));

  // Forced nodes so later consumers see exact values at the interior zero
  // and at r = 1.
  std::vector<double> anchors;
  if (spec.s0 > eps) anchors.push_back(spec.s0);
  anchors.push_back(1.0);
  std::size_t next_anchor = 0;

  double r = eps;
  double y = y_eps;
  double h = std::min(ctrl.max_step, eps);
  bool terminated = false;

  auto push_node = [&](double rr, double yy) {
    sol.r_grid.push_back(rr);
    sol.y_values.push_back(yy);
    sol.slopes.push_back(rhs(spec, c, rr, yy));
  };

  auto finish_hit_zero = [&](double rr) {
    sol.terminal.kind = Terminal::Kind::hit_zero_at;
    sol.terminal.value = rr;
    if (sol.r_grid.back() < rr) push_node(rr, 0.0);
    terminated = true;
  };

  // Squeeze threshold: once y sits this low on the attracting branch
  // y = (f/c)^2 with f < 0, the explicit stepper would need steps below the
  // local stability limit 2.8 sqrt(y)/c; ride the branch analytically instead
  // and classify the crossing as soon as f turns positive (from there the
  // true trajectory reaches zero within O(sqrt(y)/f)).
  const double squeeze_y = std::min(1e-10, 0.5 * ctrl.balance_tol);
  auto ride_quasi_static = [&]() {
    const double dr = 1e-5;
    long guard = 0;
    while (r < 1.0) {
      double step = dr;
      if (next_anchor < anchors.size()) {
        const double gap = anchors[next_anchor] - r;
        if (gap <= step) {
          step = gap;
        }
      }
      r += step;
      while (next_anchor < anchors.size() && r >= anchors[next_anchor]) {
        ++next_anchor;
      }
      const double fr = eval_f(spec, r);
      if (fr > 1e-12) {
        finish_hit_zero(r);
        return;
      }
      const double q = fr / c;
      y = q * q;
      push_node(r, y);
      if (++guard > 1000000) {
        throw NonConvergence(
            "integrate_y: quasi-static branch never released (r = " +
            fmt(r) + ")");
      }
    }
    // f stayed <= 0 all the way to r = 1; report the arrival value.
    terminated = false;
  };

  while (!terminated) {
    // Snap to the next anchor when the gap is below stepping resolution.
    while (next_anchor < anchors.size() &&
           anchors[next_anchor] - r <= ctrl.min_step) {
      r = anchors[next_anchor];
      ++next_anchor;
      if (sol.r_grid.back() != r) push_node(r, y);
    }
    if (r >= 1.0) break;

    double h_cap = ctrl.max_step;
    if (next_anchor < anchors.size()) {
      h_cap = std::min(h_cap, anchors[next_anchor] - r);
    }
    h = std::min(h, h_cap);

    TrialStep trial = try_step(spec, c, r, y, h);

    if (trial.err <= ctrl.rk_tol && trial.y_next > 0.0) {
      // Accept.
      r += h;
      y = trial.y_next;
      push_node(r, y);
      const double grow = std::clamp(
          0.9 * std::pow(ctrl.rk_tol / std::max(trial.err, 1e-300), 0.2),
          1.0, 5.0);
      h = std::min(h * grow, ctrl.max_step);
      continue;
    }

    // Trouble: the step was rejected for accuracy or dipped through zero.
    const double f_here = eval_f(spec, r);

    if (y <= squeeze_y) {
      if (f_here > 1e-12) {
        // Genuine crossing: f keeps pushing y down, so the trajectory is
        // pinned at zero here.
        finish_hit_zero(r);
        break;
      }
      if (f_here < -1e-12 && c > 0.0) {
        ride_quasi_static();
        if (terminated) break;
        continue;
      }
      // |f| ~ 0 with y ~ 0 (interior zero of f): nudge forward until the
      // sign of f decides the outcome.
      double rr = r;
      int guard = 0;
      double fr = f_here;
      while (std::abs(fr) <= 1e-12 && rr < 1.0) {
        rr = std::min(rr + 1e-7, 1.0);
        fr = eval_f(spec, rr);
        if (++guard > 20000000) break;
      }
      if (fr > 1e-12) {
        finish_hit_zero(rr);
        break;
      }
      if (fr < -1e-12 && c > 0.0) {
        r = rr;
        ride_quasi_static();
        if (terminated) break;
        continue;
      }
      throw NonConvergence(
          "integrate_y: trajectory touched zero at r = " + fmt(r) +
          " where f vanishes (unresolved tangency)");
    }

    // y is not small: shrink the step and retry (towards the crossing if the
    // trial dipped, by the error controller otherwise).
    double shrink;
    if (trial.y_next <= 0.0) {
      shrink = (y - trial.y_next > 0.0)
                   ? std::max(0.05, 0.9 * y / (y - trial.y_next))
                   : 0.25;
      shrink = std::min(shrink, 0.9);
    } else {
      shrink = std::clamp(0.9 * std::pow(ctrl.rk_tol / trial.err, 0.2), 0.1,
                          0.9);
    }
    h *= shrink;
    if (h < ctrl.min_step) {
      if (f_here > 1e-12 && y < 1e-6) {
        finish_hit_zero(r);
        break;
      }
      throw NonConvergence("integrate_y: step size underflow at r = " +
                           fmt(r) + " (unresolved tangency)");
    }
  }

  if (!terminated) {
    // Reached r = 1.
    sol.terminal.value = y;
    sol.terminal.kind = (std::abs(y) <= ctrl.balance_tol)
                            ? Terminal::Kind::balanced
                            : Terminal::Kind::positive_at_one;
  }

  // Fit the start coefficient A0 with y ~ A0 r^(1+alpha0) over the first
  // stretch of accepted nodes.
  {
    double acc = 0.0;
    int count = 0;
    const double win_hi = std::min(20.0 * eps, 0.25 * spec.s0);
    for (std::size_t i = 1; i < sol.r_grid.size(); ++i) {
      const double rr = sol.r_grid[i];
      if (rr < eps || rr > win_hi) continue;
      if (sol.y_values[i] <= 0.0) continue;
      acc += std::log(sol.y_values[i]) - (1.0 + spec.alpha0) * std::log(rr);
      ++count;
    }
    sol.start_coeff = (count >= 3)
                          ? std::exp(acc / count)
                          : y_eps / std::pow(eps, 1.0 + spec.alpha0);
  }

  return sol;
}

double integral_sqrt_y(const YSolution& sol) {
  if (sol.r_grid.size() < 2) return 0.0;

  // Leading closed-form piece on [0, eps] from the start asymptotics
  // y ~ y_eps (r/eps)^(1+alpha0).
  std::size_t i0 = (sol.r_grid.front() == 0.0) ? 1 : 0;
  const double y_eps = sol.y_values[i0];
  double total = std::sqrt(std::max(y_eps, 0.0)) * sol.r_grid[i0] * 2.0 /
                 (3.0 + sol.alpha0);

  // Derivative-corrected trapezoid over the adaptive grid: with g = sqrt(y),
  //   int_a^b g = h (g_a + g_b)/2 + h^2 (g'_a - g'_b)/12 + O(h^5),
  // and g' = y'/(2 sqrt(y)) comes from the stored ODE slopes.
  constexpr double kFloor = 1e-300;
  for (std::size_t i = i0; i + 1 < sol.r_grid.size(); ++i) {
    const double h = sol.r_grid[i + 1] - sol.r_grid[i];
    const double ya = std::max(sol.y_values[i], 0.0);
    const double yb = std::max(sol.y_values[i + 1], 0.0);
    const double ga = std::sqrt(ya);
    const double gb = std::sqrt(yb);
    total += 0.5 * h * (ga + gb);
    if (ya > kFloor && yb > kFloor) {
      const double dga = sol.slopes[i] / (2.0 * ga);
      const double dgb = sol.slopes[i + 1] / (2.0 * gb);
      total += h * h * (dga - dgb) / 12.0;
    }
  }
  return total;
}

double verify_speed_identity(const ReactionSpec& spec, const YSolution& sol) {
  return std::abs(sol.c * integral_sqrt_y(sol) + eval_F(spec, 1.0));
}

SpeedResult solve_speed(const ReactionSpec& spec, const WaveCtrl& ctrl,
                        double c_lo, double c_hi) {
  validate_ctrl(ctrl, spec);
  const double F1 = eval_F(spec, 1.0);
  if (!(F1 < 0.0)) {
    throw NonConvergence(
        "solve_speed: no positive-speed wave exists (F(1) = " + fmt(F1) +
        " is not negative)");
  }

  double lo = std::max(c_lo, 0.0);
  YSolution sol_lo = integrate_y(spec, lo, ctrl);
  if (sol_lo.terminal.kind == Terminal::Kind::hit_zero_at) {
    // Caller bracket does not straddle from below; c = 0 always does when
    // F(1) < 0.
    lo = 0.0;
    sol_lo = integrate_y(spec, lo, ctrl);
    if (sol_lo.terminal.kind == Terminal::Kind::hit_zero_at) {
      throw NonConvergence(
          "solve_speed: trajectory hits zero even at c = 0; hypotheses "
          "violated");
    }
  }

  double hi = (c_hi > lo) ? c_hi : std::max(2.0 * lo, 0.5);
  YSolution sol_hi = integrate_y(spec, hi, ctrl);
  int expansions = 0;
  while (sol_hi.terminal.kind != Terminal::Kind::hit_zero_at) {
    // hi is still on the positive side: it becomes the new lower bound.
    lo = hi;
    sol_lo = std::move(sol_hi);
    hi *= 2.0;
    if (++expansions > 60) {
      throw NonConvergence(
          "solve_speed: no speed up to " + fmt(hi) +
          " drives the trajectory to zero; hypotheses violated");
    }
    sol_hi = integrate_y(spec, hi, ctrl);
  }

  // Monotone bisection; keep going past the bracket tolerance until the
  // from-below trajectory actually balances (|y(1)| <= balance_tol), since
  // |dy(1)/dc| stays O(1) near c*.
  int iters = 0;
  while (iters < ctrl.max_bisect) {
    const bool tight = (hi - lo) <= ctrl.bisect_tol;
    const bool balanced_lo =
        std::abs(sol_lo.terminal.value) <= ctrl.balance_tol &&
        sol_lo.terminal.kind != Terminal::Kind::hit_zero_at;
    if (tight && balanced_lo) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at double resolution
    YSolution sol_mid = integrate_y(spec, mid, ctrl);
    ++iters;
    if (sol_mid.terminal.kind == Terminal::Kind::hit_zero_at) {
      hi = mid;
    } else {
      lo = mid;
      sol_lo = std::move(sol_mid);
    }
  }

  if (!(std::abs(sol_lo.terminal.value) <= ctrl.balance_tol &&
        sol_lo.terminal.kind != Terminal::Kind::hit_zero_at)) {
    throw NonConvergence(
        "solve_speed: bisection exhausted before the trajectory balanced "
        "(bracket [" +
        fmt(lo) + ", " + fmt(hi) + "])");
  }

  SpeedResult res;
  res.c_star = 0.5 * (lo + hi);
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.iterations = iters;
  res.y = std::move(sol_lo);
  res.identity_residual = verify_speed_identity(spec, res.y);
  return res;
}

}  // namespace fkpp
