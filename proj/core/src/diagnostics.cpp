#include "fkpp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "fkpp/errors.hpp"

namespace fkpp {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// One-sided Lipschitz constant: the largest secant slope of f on [0,1]
/// (clipped at 0; a decreasing f has constant 0).
double one_sided_lipschitz(const ReactionSpec& spec, int n = 1000) {
  std::vector<double> s(n + 1), fv(n + 1);
  for (int i = 0; i <= n; ++i) {
    s[i] = static_cast<double>(i) / n;
    fv[i] = eval_f(spec, s[i]);
  }
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      worst = std::max(worst, (fv[j] - fv[i]) / (s[j] - s[i]));
    }
  }
  return worst;
}

struct PlateauStats {
  double v_minus = 0.0;
  double v_plus = 0.0;
};

PlateauStats plateau_stats(const std::vector<double>& v0) {
  PlateauStats st;
  const std::size_t n = v0.size();
  const std::size_t outer = std::max<std::size_t>(1, n / 10);
  st.v_minus = v0.front();
  for (std::size_t i = 0; i < outer; ++i) st.v_minus = std::max(st.v_minus, v0[i]);
  st.v_plus = v0.back();
  for (std::size_t i = n - outer; i < n; ++i) st.v_plus = std::min(st.v_plus, v0[i]);
  return st;
}

/// Smallest translate xi with max_i [U(z_i - xi) - q - v0_i] <= 0 (sub) or
/// max_i [v0_i - U(z_i + xi) - q] <= 0 (sup); both maxima are nonincreasing
/// in xi, so bisection applies. Returns the verified-feasible bracket end.
template <typename ViolationFn>
double minimal_translate(ViolationFn&& violation, double range) {
  double lo = -range;
  double hi = range;
  if (violation(lo) <= 0.0) return lo;
  for (int it = 0; it < 80 && hi - lo > 1e-11; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (violation(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Cached antiderivative F; the closed cubic form is evaluated directly,
/// the quadrature-backed families go through a fine table (the diagnostics
/// integrals would otherwise re-run the adaptive quadrature per node).
class AntiderivativeCache {
 public:
  explicit AntiderivativeCache(const ReactionSpec& spec) : spec_(spec) {
    if (spec.kind != ReactionSpec::Kind::cubic) {
      table_.resize(kSize + 1);
      for (int i = 0; i <= kSize; ++i) {
        table_[i] = eval_F(spec_, static_cast<double>(i) / kSize);
      }
    }
  }

  double operator()(double v) const {
    if (table_.empty() || v <= 0.0 || v >= 1.0) return eval_F(spec_, v);
    const double x = v * kSize;
    const int i = std::min(static_cast<int>(x), kSize - 1);
    const double w = x - i;
    return table_[i] * (1.0 - w) + table_[i + 1] * w;
  }

 private:
  static constexpr int kSize = 4096;
  const ReactionSpec& spec_;
  std::vector<double> table_;
};

/// Inverts the monotone profile: smallest z in [z_lo, z_hi] with U(z) >= level.
double invert_profile(const ProfileTable& profile, double level, double z_lo,
                      double z_hi) {
  if (eval_profile(profile, z_lo) >= level) return z_lo;
  if (eval_profile(profile, z_hi) < level) return z_hi;
  for (int it = 0; it < 200 && z_hi - z_lo > 1e-12; ++it) {
    const double mid = 0.5 * (z_lo + z_hi);
    if (eval_profile(profile, mid) >= level) {
      z_hi = mid;
    } else {
      z_lo = mid;
    }
  }
  return z_hi;
}

}  // namespace

EnvelopeParams build_envelopes(const ReactionSpec& spec, const ProfileTable& profile,
                               const std::vector<double>& v0, const Domain& dom,
                               double eta) {
  if (static_cast<int>(v0.size()) != dom.n_nodes()) {
    throw ConfigError("initial data has " + std::to_string(v0.size()) +
                      " nodes; the domain expects " +
                      std::to_string(dom.n_nodes()));
  }

  EnvelopeParams p;
  p.eta = eta;

  // Secant constants (throws ConfigError for infeasible eta, HypothesisError
  // when the threshold condition fails).
  const SecantConstants sc = estimate_secant_constants(spec, eta);
  p.delta = sc.delta;
  p.mu = std::min(sc.mu_under, sc.mu_over);
  p.L = one_sided_lipschitz(spec);

  // omega = min dU/dz over the u-range [delta, 1-delta].
  double omega = std::numeric_limits<double>::infinity();
  const int kScan = 4000;
  for (int i = 0; i <= kScan; ++i) {
    const double u =
        p.delta + (1.0 - 2.0 * p.delta) * static_cast<double>(i) / kScan;
    omega = std::min(omega, profile_speed_at_u(profile, u));
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw NonConvergence("profile slope vanishes on [delta, 1-delta]; cannot "
                         "build envelopes");
  }
  p.omega = omega;
  p.nu = (1.0 + p.L / p.mu) / p.omega;

  // Admissible q0 bands from the initial plateaus.
  const PlateauStats st = plateau_stats(v0);
  const double sub_lo = std::max(1.0 - st.v_plus, eta);
  const double sub_hi = 1.0 - spec.s0 - 2.0 * eta;
  const double sup_lo = std::max(st.v_minus, eta);
  const double sup_hi = spec.s0 - 2.0 * eta;
  if (!(sub_lo < sub_hi) || !(sup_lo < sup_hi)) {
    throw ConfigError(
        "eta too large for these initial data: the admissible q0 band is "
        "empty (subsolution [" + fmt(sub_lo) + ", " + fmt(sub_hi) +
        "), supersolution [" + fmt(sup_lo) + ", " + fmt(sup_hi) + "))");
  }
  p.q0_sub = 0.5 * (sub_lo + sub_hi);
  p.q0_sup = 0.5 * (sup_lo + sup_hi);

  // Smallest translate putting U(z - xi) - q0_sub under v0 and
  // U(z + xi) + q0_sup over it; both scans share the final z_star.
  const double range = dom.z_max - dom.z_min;
  const auto nodes = dom.nodes();
  const auto sub_violation = [&](double xi) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < dom.n_nodes(); ++i) {
      worst = std::max(
          worst, eval_profile(profile, nodes[i] - xi) - p.q0_sub - v0[i]);
    }
    return worst;
  };
  const auto sup_violation = [&](double xi) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < dom.n_nodes(); ++i) {
      worst = std::max(
          worst, v0[i] - eval_profile(profile, nodes[i] + xi) - p.q0_sup);
    }
    return worst;
  };
  const double xi_sub = minimal_translate(sub_violation, range);
  const double xi_sup = minimal_translate(sup_violation, range);
  p.z_star = std::max(xi_sub, xi_sup);

  p.xi_inf_sub = p.nu * p.q0_sub + p.z_star;
  p.xi_inf_sup = p.nu * p.q0_sup + p.z_star;
  return p;
}

EnvelopePair eval_envelopes(const EnvelopeParams& params, const ProfileTable& profile,
                            double z, double t) {
  const double decay = std::exp(-params.mu * t);
  const double q1 = params.q0_sub * decay;
  const double q2 = params.q0_sup * decay;
  const double xi1 = params.xi_inf_sub - params.nu * q1;
  const double xi2 = params.xi_inf_sup - params.nu * q2;

  EnvelopePair pair;
  pair.lower = std::max(eval_profile(profile, z - xi1) - q1, 0.0);
  pair.upper = std::min(eval_profile(profile, z + xi2) + q2, 1.0);
  return pair;
}

double check_comparison(const Trajectory& traj, const EnvelopeParams& params,
                        const ProfileTable& profile) {
  double worst = 0.0;
  const Domain& dom = traj.domain;
  for (const State& s : traj.snapshots) {
    for (int i = 0; i < dom.n_nodes(); ++i) {
      const EnvelopePair pr = eval_envelopes(params, profile, dom.z(i), s.t);
      worst = std::max(worst, pr.lower - s.v[i]);
      worst = std::max(worst, s.v[i] - pr.upper);
    }
  }
  return std::max(worst, 0.0);
}

std::vector<LyapunovSample> lyapunov_series(const ReactionSpec& spec, const Trajectory& traj,
                                            double c, double a, double b) {
  if (traj.snapshots.size() < 3) {
    throw ConfigError(
        "insufficient sampling: the energy series needs at least 3 "
        "snapshots, got " + std::to_string(traj.snapshots.size()));
  }
  const Domain& dom = traj.domain;
  const double dz = dom.dz();
  a = std::max(a, dom.z_min + dz);
  b = std::min(b, dom.z_max - dz);
  const int i0 = std::max(1, static_cast<int>(std::ceil((a - dom.z_min) / dz - 1e-9)));
  const int i1 = std::min(dom.n_cells - 1,
                          static_cast<int>(std::floor((b - dom.z_min) / dz + 1e-9)));
  if (i1 - i0 < 2) {
    throw ConfigError("diagnostic interval [" + fmt(a) + ", " + fmt(b) +
                      "] covers fewer than 3 grid nodes");
  }

  const AntiderivativeCache F(spec);
  std::vector<double> weight(static_cast<std::size_t>(i1 - i0 + 1));
  for (int i = i0; i <= i1; ++i) {
    const double w = (i == i0 || i == i1) ? 0.5 : 1.0;
    weight[static_cast<std::size_t>(i - i0)] = w * dz * std::exp(c * dom.z(i));
  }

  const std::size_t m = traj.snapshots.size();
  std::vector<LyapunovSample> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& v = traj.snapshots[k].v;
    double energy = 0.0;
    for (int i = i0; i <= i1; ++i) {
      const double vz = (v[i + 1] - v[i - 1]) / (2.0 * dz);
      energy +=
          weight[static_cast<std::size_t>(i - i0)] * (0.5 * vz * vz - F(v[i]));
    }
    out[k].t = traj.snapshots[k].t;
    out[k].energy = energy;
  }

  for (std::size_t k = 1; k + 1 < m; ++k) {
    const auto& prev = traj.snapshots[k - 1];
    const auto& next = traj.snapshots[k + 1];
    const double dt2 = next.t - prev.t;
    if (!(dt2 > 0.0)) continue;
    double dissipation = 0.0;
    for (int i = i0; i <= i1; ++i) {
      const double vt = (next.v[i] - prev.v[i]) / dt2;
      dissipation += weight[static_cast<std::size_t>(i - i0)] * vt * vt;
    }
    out[k].dissipation = dissipation;
    const double dEdt = (out[k + 1].energy - out[k - 1].energy) / dt2;
    out[k].identity_residual = std::abs(dEdt + dissipation);
  }
  return out;
}

std::pair<double, double> diagnostic_interval(const ProfileTable& profile, const Domain& dom,
                                              const std::optional<EnvelopeParams>& params) {
  const double dz = dom.dz();
  const double xi_sup = params ? params->xi_inf_sup : 0.0;
  const double xi_sub = params ? params->xi_inf_sub : 0.0;

  double a;
  if (profile.left.finite) {
    a = profile.z0() - xi_sup - 1.0;
  } else {
    a = invert_profile(profile, 1e-4, dom.z_min, dom.z_max);
  }
  double b;
  if (profile.right.finite) {
    b = profile.z1() + xi_sub + 1.0;
  } else {
    b = invert_profile(profile, 1.0 - 1e-4, dom.z_min, dom.z_max);
  }

  a = std::max(a, dom.z_min + dz);
  b = std::min(b, dom.z_max - dz);
  if (!(a < b)) {
    throw ConfigError("diagnostic interval is empty on this domain");
  }
  return {a, b};
}

ShiftSample estimate_shift(const State& state, const Domain& dom,
                           const ProfileTable& profile) {
  const auto& v = state.v;
  if (static_cast<int>(v.size()) != dom.n_nodes()) {
    throw ConfigError("state has " + std::to_string(v.size()) +
                      " nodes; the domain expects " +
                      std::to_string(dom.n_nodes()));
  }
  const double s0 = profile.s0;
  const double dz = dom.dz();

  std::vector<double> crossings;
  for (int i = 0; i + 1 < dom.n_nodes(); ++i) {
    const double d0 = v[i] - s0;
    const double d1 = v[i + 1] - s0;
    if (d0 == 0.0) {
      crossings.push_back(dom.z(i));
    } else if (d0 * d1 < 0.0) {
      crossings.push_back(dom.z(i) + dz * d0 / (d0 - d1));
    }
  }
  if (v.back() == s0) crossings.push_back(dom.z_max);
  if (crossings.empty()) {
    throw NonConvergence("front not in domain: the state never crosses s0 = " +
                         fmt(s0));
  }

  ShiftSample sample;
  sample.t = state.t;
  double z_cross = crossings.front();
  if (crossings.size() > 1) {
    sample.multiple_crossings = true;
    // Accumulated-mass front position disambiguates wiggles far from the
    // front: z_f = z_max - int v dz for a 0 -> 1 front.
    double mass = 0.0;
    for (int i = 0; i + 1 < dom.n_nodes(); ++i) {
      mass += 0.5 * (v[i] + v[i + 1]) * dz;
    }
    const double z_f = dom.z_max - mass;
    for (double zc : crossings) {
      if (std::abs(zc - z_f) < std::abs(z_cross - z_f)) z_cross = zc;
    }
  }
  sample.zeta = -z_cross;

  // Gauss-Newton refinement of sum_i (v_i - U(z_i + zeta))^2.
  double zeta = sample.zeta;
  for (int it = 0; it < 24; ++it) {
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < dom.n_nodes(); ++i) {
      const double z = dom.z(i) + zeta;
      const double slope = eval_profile_slope(profile, z);
      if (slope <= 0.0) continue;
      num += (v[i] - eval_profile(profile, z)) * slope;
      den += slope * slope;
    }
    if (!(den > 1e-30)) break;
    double step = num / den;
    step = std::clamp(step, -1.0, 1.0);
    zeta += step;
    if (std::abs(step) < 1e-12) break;
  }
  sample.zeta_lsq = zeta;

  double sup = 0.0;
  for (int i = 0; i < dom.n_nodes(); ++i) {
    sup = std::max(sup,
                   std::abs(v[i] - eval_profile(profile, dom.z(i) + sample.zeta)));
  }
  sample.sup_dist = sup;
  return sample;
}

ConvergenceReport convergence_report(const ReactionSpec& spec, const Trajectory& traj,
                                     const ProfileTable& profile, double c,
                                     double a, double b) {
  if (traj.snapshots.size() < 10) {
    throw ConfigError("convergence report needs at least 10 snapshots, got " +
                      std::to_string(traj.snapshots.size()));
  }
  ConvergenceReport rep;
  rep.shift_track.reserve(traj.snapshots.size());
  for (const State& s : traj.snapshots) {
    rep.shift_track.push_back(estimate_shift(s, traj.domain, profile));
  }
  rep.lyapunov = lyapunov_series(spec, traj, c, a, b);
  rep.zeta_inf = rep.shift_track.back().zeta;
  rep.final_sup_dist = rep.shift_track.back().sup_dist;

  rep.monotone_tail = true;
  for (std::size_t k = rep.shift_track.size() / 2;
       k + 1 < rep.shift_track.size(); ++k) {
    if (rep.shift_track[k + 1].sup_dist > rep.shift_track[k].sup_dist + 1e-4) {
      rep.monotone_tail = false;
      break;
    }
  }

  rep.lyapunov_ok = true;
  const double slack =
      1e-6 * std::max(std::abs(rep.lyapunov.front().energy), 1e-12);
  for (std::size_t k = 0; k + 1 < rep.lyapunov.size(); ++k) {
    if (rep.lyapunov[k + 1].energy > rep.lyapunov[k].energy + slack) {
      rep.lyapunov_ok = false;
      break;
    }
  }
  return rep;
}

double stability_probe(const ReactionSpec& spec, const ProfileTable& profile,
                       const Domain& dom, const SchemeCtrl& ctrl,
                       const std::vector<double>& amplitudes, double eta) {
  if (amplitudes.empty()) {
    throw ConfigError("stability probe needs at least one perturbation amplitude");
  }
  double worst = 0.0;
  for (double eps : amplitudes) {
    if (!(eps > 0.0)) {
      throw ConfigError("perturbation amplitudes must be positive, got " +
                        fmt(eps));
    }
    InitialData init;
    init.kind = InitialData::Kind::profile_perturbation;
    init.epsilon = eps;
    const auto v0 = init.resolve(dom, &profile);
    const Trajectory traj = run(spec, profile.c_star, dom, ctrl, v0, eta);
    for (const State& s : traj.snapshots) {
      const ShiftSample sample = estimate_shift(s, dom, profile);
      worst = std::max(worst, sample.sup_dist / eps);
    }
  }
  return worst;
}

}  // namespace fkpp
