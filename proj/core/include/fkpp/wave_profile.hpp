#pragma once

#include "fkpp/interpolation.hpp"
#include "fkpp/reaction.hpp"
#include "fkpp/wave_system.hpp"

#include <limits>

namespace fkpp {

struct ProfileCtrl {
  int points = 512;        ///< interior U-grid points (geometric toward ends)
  double u_match = 1e-3;   ///< asymptotic tails take over below u_match / above 1-u_match
  double tail_tol = 1e-6;  ///< Cauchy-tail threshold deciding finiteness
};

/// One side of the profile outside the tabulated range.
struct ProfileTail {
  bool finite = false;
  double endpoint_z = 0.0; ///< z0 (left) or z1 (right) when finite
  double coeff = 0.0;      ///< A in y ~ A * u^(1+alpha) (resp. (1-u)^(1+alpha))
  double alpha = 1.0;
  double z_match = 0.0;    ///< first/last tabulated z node
  double u_match = 0.0;    ///< u value at z_match
};

/// Monotone front profile U(z), normalized U(0) = s0, as a strictly
/// increasing table (z_j, u_j) with exact slopes du/dz = sqrt(y(u_j)).
struct ProfileTable {
  double c_star = 0.0;
  double s0 = 0.75;
  std::vector<double> z_nodes;
  std::vector<double> u_values;
  std::vector<double> slopes;
  ProfileTail left, right;

  /// z0/z1 as extended reals (-inf / +inf when the tail integral diverges).
  double z0() const {
    return left.finite ? left.endpoint_z : -std::numeric_limits<double>::infinity();
  }
  double z1() const {
    return right.finite ? right.endpoint_z : std::numeric_limits<double>::infinity();
  }

  CubicHermite interpolant; ///< shape-preserving interpolant of (z,u)
};

/// Rebuilds U from the balanced phase-plane solution: z(U) = int_{s0}^{U}
/// dr/sqrt(y(r)) on a U-grid geometrically clustered toward both ends, with
/// closed-form asymptotic tail integrals below the matching points. Throws
/// NonConvergence if the y solution is not balanced.
ProfileTable reconstruct_profile(const ReactionSpec& spec, const SpeedResult& speed,
                                 const ProfileCtrl& ctrl = {});

/// U(z): table interpolation inside, asymptotic branches between the table
/// and z0/z1, constants 0/1 beyond finite endpoints.
double eval_profile(const ProfileTable& profile, double z);

/// d/dz of eval_profile (same branch structure).
double eval_profile_slope(const ProfileTable& profile, double z);

/// sqrt(y(u)) as seen by the profile (node slopes + asymptotic tails);
/// used by envelope construction.
double profile_speed_at_u(const ProfileTable& profile, double u);

/// z1 - z0, +inf if either endpoint is infinite.
double front_width(const ProfileTable& profile);

} // namespace fkpp
