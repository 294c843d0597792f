#include "fkpp/wave_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

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

// int_a^b dr / sqrt(y(r)) over one profile cell.
double cell_time(const YSolution& y, double a, double b) {
  const auto res = integrate_adaptive(
      [&y](double r) {
        const double v = y.eval(r);
        if (!(v > 0.0)) {
          throw NonConvergence(
              "reconstruct_profile: the phase-plane solution vanishes at r = " +
              fmt(r) + " inside the matching window");
        }
        return 1.0 / std::sqrt(v);
      },
      a, b, /*abs_tol=*/1e-12, /*rel_tol=*/1e-10, /*max_subdivisions=*/400);
  if (!res.converged && res.error_estimate > 1e-8) {
    throw NonConvergence("reconstruct_profile: cell quadrature stalled on [" +
                         fmt(a) + ", " + fmt(b) + "]");
  }
  return res.value;
}

// One-sided tail bookkeeping.  With y ~ A u^(1+alpha) near u = 0 the tail
// piece of z(U) integrates in closed form; matching value AND slope at the
// table end is equivalent to using the effective A = s_end^2 / u_end^(1+alpha)
// sampled at the matching point, which keeps the composite profile C^1.
ProfileTail make_tail(double alpha, double u_end, double s_end, double z_match,
                      bool left) {
  ProfileTail t;
  t.alpha = alpha;
  t.u_match = u_end;
  t.z_match = z_match;
  t.coeff = s_end * s_end / std::pow(u_end, 1.0 + alpha);
  t.finite = alpha < 1.0;
  if (t.finite) {
    const double reach = (2.0 / (1.0 - alpha)) * u_end / s_end;
    t.endpoint_z = left ? z_match - reach : z_match + reach;
  } else {
    t.endpoint_z = 0.0;
  }
  return t;
}

// Consistency of the closed-form tail against the tabulated dynamics over the
// octave [u_end/2, u_end]; a mismatch means the declared exponent does not
// describe the data.  (Loose bound: the power law is only the leading term.)
void check_tail(const YSolution& y, const ProfileTail& t, bool left,
                double tol) {
  const double u1 = t.u_match;
  const double u0 = 0.5 * u1;
  double numeric;
  if (left) {
    numeric = cell_time(y, u0, u1);
  } else {
    // Mirrored coordinate w = 1 - r.
    const auto res = integrate_adaptive(
        [&y](double r) { return 1.0 / std::sqrt(std::max(
                             y.eval(r), std::numeric_limits<double>::min())); },
        1.0 - u1, 1.0 - u0, 1e-12, 1e-10, 400);
    numeric = res.value;
  }
  double closed;
  if (t.alpha < 1.0) {
    closed = (2.0 / (std::sqrt(t.coeff) * (1.0 - t.alpha))) *
             (std::pow(u1, 0.5 * (1.0 - t.alpha)) -
              std::pow(u0, 0.5 * (1.0 - t.alpha)));
  } else {
    closed = std::log(2.0) / std::sqrt(t.coeff);
  }
  if (std::abs(numeric - closed) > tol * numeric) {
    throw NonConvergence(
        "reconstruct_profile: tail asymptotics disagree with the phase-plane "
        "data near " +
        std::string(left ? "u=0" : "u=1") + " (numeric " + fmt(numeric) +
        " vs closed form " + fmt(closed) + ")");
  }
}

}  // namespace

ProfileTable reconstruct_profile(const ReactionSpec& spec,
                                 const SpeedResult& speed,
                                 const ProfileCtrl& ctrl) {
  if (speed.y.terminal.kind != Terminal::Kind::balanced) {
    throw NonConvergence(
        "reconstruct_profile: needs a balanced phase-plane solution (run "
        "solve_speed first)");
  }
  if (ctrl.points < 16) {
    throw ConfigError("profile points must be at least 16");
  }
  const double s0 = spec.s0;
  if (!(ctrl.u_match > 0.0) ||
      !(ctrl.u_match < 0.5 * std::min(s0, 1.0 - s0))) {
    throw ConfigError("profile u_match must lie in (0, min(s0,1-s0)/2)");
  }

  const YSolution& y = speed.y;
  const int m = ctrl.points / 2;

  // U-grid: geometric clustering towards both ends, split at s0 where the
  // normalization z = 0 lives.
  std::vector<double> u;
  u.reserve(2 * m + 1);
  for (int j = 0; j < m; ++j) {
    u.push_back(ctrl.u_match *
                std::pow(s0 / ctrl.u_match, static_cast<double>(j) / m));
  }
  u.push_back(s0);
  for (int k = 1; k <= m; ++k) {
    u.push_back(1.0 - (1.0 - s0) * std::pow(ctrl.u_match / (1.0 - s0),
                                            static_cast<double>(k) / m));
  }
  u.back() = 1.0 - ctrl.u_match;

  ProfileTable p;
  p.c_star = speed.c_star;
  p.s0 = s0;
  p.u_values = std::move(u);
  const std::size_t n = p.u_values.size();

  p.slopes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = y.eval(p.u_values[i]);
    if (!(yi > 0.0)) {
      throw NonConvergence(
          "reconstruct_profile: phase-plane solution vanishes at u = " +
          fmt(p.u_values[i]));
    }
    p.slopes[i] = std::sqrt(yi);
  }

  // z(U) accumulated outwards from z(s0) = 0.
  p.z_nodes.assign(n, 0.0);
  const std::size_t mid = static_cast<std::size_t>(m);
  for (std::size_t i = mid; i-- > 0;) {
    p.z_nodes[i] =
        p.z_nodes[i + 1] - cell_time(y, p.u_values[i], p.u_values[i + 1]);
  }
  for (std::size_t i = mid; i + 1 < n; ++i) {
    p.z_nodes[i + 1] =
        p.z_nodes[i] + cell_time(y, p.u_values[i], p.u_values[i + 1]);
  }

  p.left = make_tail(spec.alpha0, p.u_values.front(), p.slopes.front(),
                     p.z_nodes.front(), /*left=*/true);
  p.right = make_tail(spec.alpha1, 1.0 - p.u_values.back(), p.slopes.back(),
                      p.z_nodes.back(), /*left=*/false);
  check_tail(y, p.left, /*left=*/true, 0.05);
  check_tail(y, p.right, /*left=*/false, 0.05);

  p.interpolant = CubicHermite(p.z_nodes, p.u_values, p.slopes,
                               /*limit_slopes=*/true);
  return p;
}

namespace {

// Left-tail value/slope of u(z) for z <= z_match.
void left_tail_eval(const ProfileTail& t, double z, double* value,
                    double* slope) {
  if (t.finite) {
    if (z <= t.endpoint_z) {
      if (value) *value = 0.0;
      if (slope) *slope = 0.0;
      return;
    }
    const double p = 2.0 / (1.0 - t.alpha);
    const double span = t.z_match - t.endpoint_z;
    const double theta = (z - t.endpoint_z) / span;
    if (value) *value = t.u_match * std::pow(theta, p);
    if (slope) *slope = p * t.u_match / span * std::pow(theta, p - 1.0);
    return;
  }
  // Exponential branch u' = kappa u, matched C^1.
  const double kappa = std::sqrt(t.coeff) * std::pow(t.u_match,
                                                     0.5 * (t.alpha - 1.0));
  const double v = t.u_match * std::exp(kappa * (z - t.z_match));
  if (value) *value = v;
  if (slope) *slope = kappa * v;
}

// Right-tail value/slope (w = 1-u mirrored).
void right_tail_eval(const ProfileTail& t, double z, double* value,
                     double* slope) {
  if (t.finite) {
    if (z >= t.endpoint_z) {
      if (value) *value = 1.0;
      if (slope) *slope = 0.0;
      return;
    }
    const double p = 2.0 / (1.0 - t.alpha);
    const double span = t.endpoint_z - t.z_match;
    const double theta = (t.endpoint_z - z) / span;
    if (value) *value = 1.0 - t.u_match * std::pow(theta, p);
    if (slope) *slope = p * t.u_match / span * std::pow(theta, p - 1.0);
    return;
  }
  const double kappa = std::sqrt(t.coeff) * std::pow(t.u_match,
                                                     0.5 * (t.alpha - 1.0));
  const double w = t.u_match * std::exp(-kappa * (z - t.z_match));
  if (value) *value = 1.0 - w;
  if (slope) *slope = kappa * w;
}

}  // namespace

double eval_profile(const ProfileTable& profile, double z) {
  double v = 0.0;
  if (z < profile.z_nodes.front()) {
    left_tail_eval(profile.left, z, &v, nullptr);
  } else if (z > profile.z_nodes.back()) {
    right_tail_eval(profile.right, z, &v, nullptr);
  } else {
    v = profile.interpolant(z);
  }
  return std::clamp(v, 0.0, 1.0);
}

double eval_profile_slope(const ProfileTable& profile, double z) {
  double s = 0.0;
  if (z < profile.z_nodes.front()) {
    left_tail_eval(profile.left, z, nullptr, &s);
  } else if (z > profile.z_nodes.back()) {
    right_tail_eval(profile.right, z, nullptr, &s);
  } else {
    s = profile.interpolant.derivative(z);
  }
  return std::max(s, 0.0);
}

double profile_speed_at_u(const ProfileTable& profile, double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const auto& us = profile.u_values;
  if (u < us.front()) {
    return std::sqrt(profile.left.coeff) *
           std::pow(u, 0.5 * (1.0 + profile.left.alpha));
  }
  if (u > us.back()) {
    return std::sqrt(profile.right.coeff) *
           std::pow(1.0 - u, 0.5 * (1.0 + profile.right.alpha));
  }
  const auto it = std::upper_bound(us.begin(), us.end(), u);
  std::size_t i = static_cast<std::size_t>(it - us.begin());
  i = (i == 0) ? 0 : i - 1;
  if (i + 1 >= us.size()) i = us.size() - 2;
  const double w = (u - us[i]) / (us[i + 1] - us[i]);
  return profile.slopes[i] + w * (profile.slopes[i + 1] - profile.slopes[i]);
}

double front_width(const ProfileTable& profile) {
  if (!profile.left.finite || !profile.right.finite) {
    return std::numeric_limits<double>::infinity();
  }
  return profile.right.endpoint_z - profile.left.endpoint_z;
}

}  // namespace fkpp
