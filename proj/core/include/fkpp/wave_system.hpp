#pragma once

#include "fkpp/reaction.hpp"

#include <vector>

namespace fkpp {

/// Controls for the phase-plane integration of  dy/dr = -2(c*sqrt(y+) + f(r)).
struct WaveCtrl {
  double eps_start = 1e-4;   ///< Picard/asymptotic start interval [0, eps]
  double max_step = 1e-3;    ///< cap on the adaptive step in r
  double rk_tol = 1e-12;     ///< per-step absolute error target
  double min_step = 1e-12;   ///< below this the step is declared underflowed
  double balance_tol = 1e-10; ///< |y(1)| below this counts as balanced
  double bisect_tol = 1e-8;  ///< bracket width target on c
  int max_bisect = 200;

  /// One refinement level: halves the stepping scales, tightens rk_tol by 16
  /// (4th-order stepper), so observed c* differences shrink accordingly.
  WaveCtrl refined() const {
    WaveCtrl r = *this;
    r.eps_start *= 0.5;
    r.max_step *= 0.5;
    r.rk_tol /= 16.0;
    return r;
  }
};

/// How a forward integration of y ended.
struct Terminal {
  enum class Kind {
    positive_at_one, ///< reached r=1 with y(1) > balance_tol  (c below c*)
    hit_zero_at,     ///< y crossed 0 at r_bar < 1 where f>0   (c above c*)
    balanced         ///< reached r=1 with |y(1)| <= balance_tol
  };
  Kind kind = Kind::positive_at_one;
  double value = 0.0; ///< y(1) for *_at_one/balanced, r_bar for hit_zero_at
};

/// y(r) = |dU/dz|^2 along the wave, tabulated on the accepted adaptive steps.
/// r_grid starts at 0 (y=0 exactly) and contains a node exactly at s0; slopes
/// hold dy/dr from the ODE right-hand side at each node (r=0: limit value 0
/// for alpha0<1; -2*f'(0)-ish magnitudes are irrelevant as the first interval
/// is handled by the asymptotic start).
struct YSolution {
  double c = 0.0;
  std::vector<double> r_grid;
  std::vector<double> y_values;
  std::vector<double> slopes;
  Terminal terminal;
  double alpha0 = 1.0;       ///< Holder exponent at r=0 (copied from the spec)
  double start_coeff = 0.0;  ///< fitted A0 in y ~ A0 * r^(1+alpha0)
  double eps_start = 0.0;    ///< the [0,eps] start interval actually used

  /// Hermite evaluation of y at r in [0, r_grid.back()]; below eps_start the
  /// asymptotic start branch is used. Clamped at 0 from below.
  double eval(double r) const;
};

YSolution integrate_y(const ReactionSpec& spec, double c,
                      const WaveCtrl& ctrl = {});

struct SpeedResult {
  double c_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double identity_residual = 0.0; ///< |c* int sqrt(y) dr + F(1)|
  YSolution y;                    ///< balanced solution at c ~ c*
};

/// Unique speed by monotone bisection on the terminal classification.
/// A caller bracket that fails to straddle is auto-expanded (c_lo falls back
/// to 0, which always classifies positive_at_one when F(1)<0; c_hi doubles
/// until the trajectory hits zero). Throws NonConvergence if F(1) >= 0
/// ("no positive-speed wave exists") or no straddling c_hi is found.
SpeedResult solve_speed(const ReactionSpec& spec, const WaveCtrl& ctrl = {},
                        double c_lo = 0.0, double c_hi = 0.5);

/// Residual of the first-integral identity  c * int_0^1 sqrt(y) dr = -F(1),
/// with the integral computed by derivative-corrected trapezoid on the y grid
/// plus closed-form asymptotic tails at the singular ends.
double verify_speed_identity(const ReactionSpec& spec, const YSolution& y);

/// int_0^1 sqrt(y(r)) dr by the same rule (exposed for diagnostics).
double integral_sqrt_y(const YSolution& y);

} // namespace fkpp
