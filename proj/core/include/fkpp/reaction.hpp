#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fkpp {

/// Bistable reaction families. All members vanish at 0, s0 and 1, are
/// negative on (0,s0), positive on (s0,1), and are extended outside [0,1] so
/// that f>0 on (-inf,0) and f<0 on (1,inf).
struct ReactionSpec {
  enum class Kind { cubic, holder_bistable, user_table };

  Kind kind = Kind::cubic;
  double s0 = 0.75;     ///< interior zero, in (0,1)
  double alpha0 = 1.0;  ///< Holder exponent of f at s=0 (1 = Lipschitz end)
  double alpha1 = 1.0;  ///< Holder exponent of f at s=1
  /// user_table only: samples of f on [0,1]; must contain zeros at 0, s0, 1.
  std::vector<std::pair<double, double>> table;
  /// Human-readable description of the extension outside [0,1].
  std::string extension_rule;

  /// cubic: f(s) = s(1-s)(s-s0) on all of R.
  static ReactionSpec cubic(double s0);
  /// holder_bistable: f(s) = s^a0 (1-s)^a1 (s-s0) on [0,1], f(s)=-s below 0,
  /// f(s)=1-s above 1.
  static ReactionSpec holder(double s0, double alpha0, double alpha1);
  /// Piecewise-linear interpolation of tabulated samples on [0,1]; extension
  /// as for holder. The table must be strictly increasing in s, start at
  /// (0,0), end at (1,0) and contain (s0,0).
  static ReactionSpec user_table(double s0, double alpha0, double alpha1,
                                 std::vector<std::pair<double, double>> samples);

  /// |f(r)| ~ gamma0 * r^alpha0 as r->0+ and ~ gamma1 * (1-r)^alpha1 as r->1-.
  double gamma0() const;
  double gamma1() const;
};

double eval_f(const ReactionSpec& spec, double s);

/// F(r) = int_0^r f(s) ds. Closed form for the cubic; adaptive quadrature
/// with endpoint subdivision otherwise (absolute error <= 1e-10).
double eval_F(const ReactionSpec& spec, double r);

/// Secant-slope constants of the two-sided threshold condition: positive
/// mu_under with f(s) - f(s+q) >= mu_under * q for s in [0,delta] and
/// q in (0, s0-2*eta], and the mirrored mu_over at the right end.
struct SecantConstants {
  double eta = 0.0;
  double delta = 0.0;
  double mu_under = 0.0;
  double mu_over = 0.0;
};

struct HypothesisViolation {
  std::string hypothesis; ///< "H1", "H2", ...
  double location = 0.0;  ///< grid point (or parameter) where it failed
  std::string detail;
};

struct HypothesisReport {
  bool h1_ok = false;               ///< sign pattern and F<0 on (0,1]
  double h2_alpha_estimate = 0.0;   ///< log-log exponent of |f| near the ends
  double h3_L = 0.0;                ///< one-sided Lipschitz constant (>= 0)
  std::optional<SecantConstants> h4;
  double F1 = 0.0;                  ///< F(1)
  std::vector<HypothesisViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Grid verification of the structural hypotheses. Never throws on a
/// violation; everything found lands in `violations`. `eta` feeds the secant
/// search (H4); pass nullopt to pick eta = min(s0,1-s0)/6 automatically.
HypothesisReport check_hypotheses(const ReactionSpec& spec, int grid_n = 1000,
                                  std::optional<double> eta = std::nullopt);

/// Largest delta (halving down from eta) whose grid minima of the secant
/// quotients are strictly positive. Throws HypothesisError if no candidate
/// delta works ("H4 not satisfied at this eta") and ConfigError if eta is out
/// of range (requires 0 < eta < min(s0, 1-s0)/3).
SecantConstants estimate_secant_constants(const ReactionSpec& spec, double eta);

} // namespace fkpp
