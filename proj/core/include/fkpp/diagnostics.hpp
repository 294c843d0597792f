#pragma once

#include "fkpp/pde.hpp"
#include "fkpp/reaction.hpp"
#include "fkpp/wave_profile.hpp"

#include <optional>
#include <vector>

namespace fkpp {

/// Constants of the exponentially tightening sub/supersolution pair
///   v1(z,t) = max{ U(z - xi1(t)) - q1(t), 0 },
///   v2(z,t) = min{ U(z + xi2(t)) + q2(t), 1 },
/// with q_i(t) = q0_i e^{-mu t} and xi_i(t) = xi_inf_i - nu q_i(t).
struct EnvelopeParams {
  double eta = 0.0;
  double delta = 0.0;
  double mu = 0.0;      ///< min(mu_under, mu_over) from the secant constants
  double nu = 0.0;      ///< (1 + L/mu) / omega
  double omega = 0.0;   ///< min of dU/dz over u in [delta, 1-delta]
  double L = 0.0;       ///< one-sided Lipschitz constant of f
  double q0_sub = 0.0;  ///< initial depression of the subsolution
  double q0_sup = 0.0;  ///< initial elevation of the supersolution
  double z_star = 0.0;  ///< smallest translate fitting both envelopes under/over v0
  double xi_inf_sub = 0.0; ///< nu*q0_sub + z_star
  double xi_inf_sup = 0.0; ///< nu*q0_sup + z_star
};

/// Derives the envelope constants for given initial data. Throws
/// ConfigError when eta is infeasible (eta >= min(s0,1-s0)/3 or the
/// admissible q0 interval is empty: "eta too large for these initial data")
/// and HypothesisError if the secant condition fails at this eta.
EnvelopeParams build_envelopes(const ReactionSpec& spec, const ProfileTable& profile,
                               const std::vector<double>& v0, const Domain& dom,
                               double eta);

struct EnvelopePair {
  double lower = 0.0;
  double upper = 1.0;
};

EnvelopePair eval_envelopes(const EnvelopeParams& params, const ProfileTable& profile,
                            double z, double t);

/// Largest pointwise violation max(v1 - v, v - v2, 0) over all snapshots and
/// nodes; exact 0 when the ordering holds everywhere.
double check_comparison(const Trajectory& traj, const EnvelopeParams& params,
                        const ProfileTable& profile);

struct LyapunovSample {
  double t = 0.0;
  double energy = 0.0;
  /// int_a^b (v_t)^2 e^{cz} dz, centered snapshot differences; samples at the
  /// ends of the series carry no dissipation estimate.
  std::optional<double> dissipation;
  /// |dE/dt + dissipation| (centered), where both sides exist.
  std::optional<double> identity_residual;
};

/// Weighted energy E(t) = int_a^b [ (1/2) v_z^2 - F(v) ] e^{cz} dz on the
/// diagnostic interval [a,b]. Throws ConfigError with "insufficient sampling"
/// if fewer than 3 snapshots are available.
std::vector<LyapunovSample> lyapunov_series(const ReactionSpec& spec, const Trajectory& traj,
                                            double c, double a, double b);

/// Diagnostic interval: for fronts with finite endpoints the theory interval
/// [z0 - xi_inf_sup - 1, z1 + xi_inf_sub + 1], clipped to the domain interior
/// (one cell margin); for infinite endpoints, the region where
/// 1e-4 < U < 1 - 1e-4. Returns {a, b}.
std::pair<double, double> diagnostic_interval(const ProfileTable& profile, const Domain& dom,
                                              const std::optional<EnvelopeParams>& params);

struct ShiftSample {
  double t = 0.0;
  double zeta = 0.0;          ///< front shift: v(z,t) ~ U(z + zeta)
  double zeta_lsq = 0.0;      ///< least-squares cross-check
  double sup_dist = 0.0;      ///< sup_z |v(z,t) - U(z + zeta)|
  bool multiple_crossings = false;
};

/// Front shift from the s0 level crossing (linear interpolation between the
/// bracketing nodes). With several crossings the one nearest the
/// accumulated-mass front position z_f = z_max - int v dz is used and the
/// sample is flagged. Throws NonConvergence("front not in domain") if v never
/// crosses s0. The least-squares shift minimizes sum_i (v_i - U(z_i+zeta))^2.
ShiftSample estimate_shift(const State& state, const Domain& dom,
                           const ProfileTable& profile);

struct ConvergenceReport {
  double zeta_inf = 0.0;      ///< shift estimate at t_end
  double final_sup_dist = 0.0;
  bool monotone_tail = false; ///< sup_dist non-increasing (1e-4 slack) on the last half
  bool lyapunov_ok = false;   ///< energy non-increasing within 1e-6 |E(0)|
  std::vector<ShiftSample> shift_track;
  std::vector<LyapunovSample> lyapunov;
  /// max over perturbation amplitudes of sup-dist/epsilon; only present when
  /// the caller ran the perturbation probe (see stability_probe).
  std::optional<double> stability_constant_estimate;
};

/// Requires >= 10 snapshots. Shift track, Lyapunov series on [a,b], tail
/// monotonicity and energy monotonicity flags.
ConvergenceReport convergence_report(const ReactionSpec& spec, const Trajectory& traj,
                                     const ProfileTable& profile, double c,
                                     double a, double b);

/// Runs perturbation experiments v0 = clamp(U + eps*bump, 0, 1) for each
/// amplitude and returns max over runs and times of sup_z|v - U(z+zeta)| / eps.
double stability_probe(const ReactionSpec& spec, const ProfileTable& profile,
                       const Domain& dom, const SchemeCtrl& ctrl,
                       const std::vector<double>& amplitudes, double eta);

} // namespace fkpp
