#include "fkpp/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fkpp/errors.hpp"
#include "fkpp/interpolation.hpp"
#include "fkpp/quadrature.hpp"

namespace fkpp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void validate_common(double s0) {
  require(s0 > 0.0 && s0 < 1.0, "s0 must lie in (0,1), got " + fmt(s0));
}

// Piecewise-linear evaluation of a user table on [0,1].
double table_eval(const std::vector<std::pair<double, double>>& t, double s) {
  auto it = std::upper_bound(
      t.begin(), t.end(), s,
      [](double v, const std::pair<double, double>& p) { return v < p.first; });
  if (it == t.begin()) return t.front().second;
  if (it == t.end()) return t.back().second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (s - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

// Exact integral of the piecewise-linear table from 0 to r (0 <= r <= 1).
double table_integral(const std::vector<std::pair<double, double>>& t,
                      double r) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = t[i].first;
    const double b = t[i + 1].first;
    if (r <= a) break;
    const double fa = t[i].second;
    const double fb = t[i + 1].second;
    if (r >= b) {
      acc += 0.5 * (fa + fb) * (b - a);
    } else {
      const double fr = fa + (r - a) / (b - a) * (fb - fa);
      acc += 0.5 * (fa + fr) * (r - a);
      break;
    }
  }
  return acc;
}

}  // namespace

ReactionSpec ReactionSpec::cubic(double s0) {
  validate_common(s0);
  ReactionSpec spec;
  spec.kind = Kind::cubic;
  spec.s0 = s0;
  spec.alpha0 = 1.0;
  spec.alpha1 = 1.0;
  spec.extension_rule = "cubic polynomial s(1-s)(s-s0) on all of R";
  return spec;
}

ReactionSpec ReactionSpec::holder(double s0, double alpha0, double alpha1) {
  validate_common(s0);
  require(alpha0 > 0.0 && alpha0 <= 1.0,
          "alpha0 must lie in (0,1], got " + fmt(alpha0));
  require(alpha1 > 0.0 && alpha1 <= 1.0,
          "alpha1 must lie in (0,1], got " + fmt(alpha1));
  ReactionSpec spec;
  spec.kind = Kind::holder_bistable;
  spec.s0 = s0;
  spec.alpha0 = alpha0;
  spec.alpha1 = alpha1;
  spec.extension_rule = "f(s) = -s for s < 0, f(s) = 1 - s for s > 1";
  return spec;
}

ReactionSpec ReactionSpec::user_table(
    double s0, double alpha0, double alpha1,
    std::vector<std::pair<double, double>> samples) {
  validate_common(s0);
  require(alpha0 > 0.0 && alpha0 <= 1.0,
          "alpha0 must lie in (0,1], got " + fmt(alpha0));
  require(alpha1 > 0.0 && alpha1 <= 1.0,
          "alpha1 must lie in (0,1], got " + fmt(alpha1));
  require(samples.size() >= 3, "reaction table needs at least 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    require(samples[i].first > samples[i - 1].first,
            "reaction table abscissae must be strictly increasing (row " +
                std::to_string(i + 1) + ")");
  }
  constexpr double kZeroTol = 1e-12;
  require(std::abs(samples.front().first) <= kZeroTol &&
              std::abs(samples.front().second) <= kZeroTol,
          "reaction table must start with the zero (0, 0)");
  require(std::abs(samples.back().first - 1.0) <= kZeroTol &&
              std::abs(samples.back().second) <= kZeroTol,
          "reaction table must end with the zero (1, 0)");
  const bool has_s0_zero = std::any_of(
      samples.begin(), samples.end(), [&](const auto& p) {
        return std::abs(p.first - s0) <= 1e-9 &&
               std::abs(p.second) <= kZeroTol;
      });
  require(has_s0_zero,
          "reaction table must contain the interior zero (s0, 0) with s0 = " +
              fmt(s0));

  ReactionSpec spec;
  spec.kind = Kind::user_table;
  spec.s0 = s0;
  spec.alpha0 = alpha0;
  spec.alpha1 = alpha1;
  spec.table = std::move(samples);
  spec.extension_rule = "f(s) = -s for s < 0, f(s) = 1 - s for s > 1";
  return spec;
}

double ReactionSpec::gamma0() const {
  switch (kind) {
    case Kind::cubic:
    case Kind::holder_bistable:
      // |f(s)| = s^alpha0 (1-s)^alpha1 |s-s0| ~ s0 * s^alpha0 as s -> 0+.
      return s0;
    case Kind::user_table: {
      // First sample past the origin fixes the local scale.
      for (const auto& p : table) {
        if (p.first > 0.0) {
          return std::abs(p.second) / std::pow(p.first, alpha0);
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

double ReactionSpec::gamma1() const {
  switch (kind) {
    case Kind::cubic:
    case Kind::holder_bistable:
      return 1.0 - s0;
    case Kind::user_table: {
      for (auto it = table.rbegin(); it != table.rend(); ++it) {
        if (it->first < 1.0) {
          return std::abs(it->second) / std::pow(1.0 - it->first, alpha1);
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

double eval_f(const ReactionSpec& spec, double s) {
  if (spec.kind == ReactionSpec::Kind::cubic) {
    return s * (1.0 - s) * (s - spec.s0);
  }
  if (s < 0.0) return -s;
  if (s > 1.0) return 1.0 - s;
  if (spec.kind == ReactionSpec::Kind::holder_bistable) {
    if (s == 0.0 || s == 1.0) return 0.0;
    return std::pow(s, spec.alpha0) * std::pow(1.0 - s, spec.alpha1) *
           (s - spec.s0);
  }
  return table_eval(spec.table, s);
}

double eval_F(const ReactionSpec& spec, double r) {
  if (spec.kind == ReactionSpec::Kind::cubic) {
    const double r2 = r * r;
    return r2 * (-r2 / 4.0 + (1.0 + spec.s0) * r / 3.0 - spec.s0 / 2.0);
  }
  // The holder/table extensions integrate in closed form.
  if (r < 0.0) return -0.5 * r * r;
  if (r > 1.0) {
    return eval_F(spec, 1.0) - 0.5 * (r - 1.0) * (r - 1.0);
  }
  if (spec.kind == ReactionSpec::Kind::user_table) {
    return table_integral(spec.table, r);
  }
  const auto res = integrate_adaptive(
      [&spec](double s) { return eval_f(spec, s); }, 0.0, r,
      /*abs_tol=*/1e-12, /*rel_tol=*/1e-13, /*max_subdivisions=*/4000);
  if (!res.converged && res.error_estimate > 1e-10) {
    throw NonConvergence("eval_F: quadrature failed to reach 1e-10 at r = " +
                         fmt(r) +
                         " (error estimate " + fmt(res.error_estimate) + ")");
  }
  return res.value;
}

namespace {

// Secant quotient minimum over s in [s_lo, s_hi], q in (0, q_max], where the
// quotient is (f(s) - f(s+q))/q at the left end and the mirror image
// (f(s-q) - f(s))/q at the right end.  A coarse product grid (with extra
// log-spaced small-q samples) seeds a few local zoom refinements so the
// returned value is a faithful lower bound for certificate checks.
struct QuotientScan {
  const ReactionSpec& spec;
  double s_lo, s_hi, q_max;
  bool mirrored;  // right-end variant

  double quotient(double s, double q) const {
    if (mirrored) {
      return (eval_f(spec, s - q) - eval_f(spec, s)) / q;
    }
    return (eval_f(spec, s) - eval_f(spec, s + q)) / q;
  }

  double run() const {
    constexpr int kNs = 33;
    constexpr int kNq = 512;
    constexpr double kQFloor = 1e-9;

    std::vector<double> qs;
    qs.reserve(kNq + 64);
    for (int j = 1; j <= kNq; ++j) {
      qs.push_back(q_max * static_cast<double>(j) / kNq);
    }
    for (int k = 1; k <= 48; ++k) {
      const double q = q_max * std::pow(10.0, -k / 6.0);
      if (q < kQFloor) break;
      qs.push_back(q);
    }

    struct Cell {
      double value, s, q;
    };
    std::vector<Cell> cells;
    cells.reserve(kNs * qs.size());
    for (int i = 0; i < kNs; ++i) {
      const double s =
          s_lo + (s_hi - s_lo) * static_cast<double>(i) / (kNs - 1);
      for (double q : qs) {
        cells.push_back({quotient(s, q), s, q});
      }
    }
    std::partial_sort(cells.begin(), cells.begin() + 8, cells.end(),
                      [](const Cell& a, const Cell& b) {
                        return a.value < b.value;
                      });

    double best = cells.front().value;
    const double ds0 = (s_hi - s_lo) / (kNs - 1);
    for (int c = 0; c < 8; ++c) {
      double s = cells[c].s;
      double q = cells[c].q;
      double ws = std::max(ds0, 1e-12);
      double wq = std::max(q * 0.5, q_max / kNq);
      for (int level = 0; level < 7; ++level) {
        double local_best = std::numeric_limits<double>::infinity();
        double bs = s, bq = q;
        for (int a = -4; a <= 4; ++a) {
          const double sa =
              std::clamp(s + ws * a / 4.0, s_lo, s_hi);
          for (int b = -4; b <= 4; ++b) {
            const double qb =
                std::clamp(q + wq * b / 4.0, kQFloor, q_max);
            const double v = quotient(sa, qb);
            if (v < local_best) {
              local_best = v;
              bs = sa;
              bq = qb;
            }
          }
        }
        s = bs;
        q = bq;
        ws *= 0.2;
        wq *= 0.2;
        best = std::min(best, local_best);
      }
    }
    return best;
  }
};

}  // namespace

SecantConstants estimate_secant_constants(const ReactionSpec& spec,
                                          double eta) {
  const double side = std::min(spec.s0, 1.0 - spec.s0);
  if (!(eta > 0.0) || !(3.0 * eta < side)) {
    throw ConfigError("eta must satisfy 0 < eta < min(s0, 1-s0)/3 = " +
                      fmt(side / 3.0) + ", got " + fmt(eta));
  }
  const double q_under = spec.s0 - 2.0 * eta;
  const double q_over = 1.0 - spec.s0 - 2.0 * eta;

  double delta = eta / 2.0;
  const double delta_floor = std::max(1e-7, eta / (1 << 24));
  while (delta >= delta_floor) {
    QuotientScan under{spec, 0.0, delta, q_under, /*mirrored=*/false};
    QuotientScan over{spec, 1.0 - delta, 1.0, q_over, /*mirrored=*/true};
    const double mu_under = under.run();
    if (mu_under > 0.0) {
      const double mu_over = over.run();
      if (mu_over > 0.0) {
        SecantConstants sc;
        sc.eta = eta;
        sc.delta = delta;
        sc.mu_under = mu_under;
        sc.mu_over = mu_over;
        return sc;
      }
    }
    delta *= 0.5;
  }
  throw HypothesisError(
      "H4 not satisfied at eta = " + fmt(eta) +
      ": no delta down to " + fmt(delta_floor) +
      " yields positive secant constants on both ends");
}

namespace {

// Log-log slope of |f| approaching `end` (0 or 1); 1.0 when the samples are
// unusable (identically zero ends are an H1 problem, not an H2 one).
double end_exponent(const ReactionSpec& spec, int end) {
  std::vector<double> lx, ly;
  for (int k = 0; k < 25; ++k) {
    const double r = std::pow(10.0, -5.0 + 3.0 * k / 24.0);  // 1e-5 .. 1e-2
    const double s = (end == 0) ? r : 1.0 - r;
    const double fv = std::abs(eval_f(spec, s));
    if (fv > 0.0) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(fv));
    }
  }
  if (lx.size() < 5) return 1.0;
  return std::clamp(regression_slope(lx, ly), 0.0, 2.0);
}

}  // namespace

HypothesisReport check_hypotheses(const ReactionSpec& spec, int grid_n,
                                  std::optional<double> eta) {
  if (grid_n < 10) {
    throw ConfigError("check_hypotheses: grid_n must be at least 10");
  }
  HypothesisReport rep;
  rep.F1 = eval_F(spec, 1.0);

  const double half_cell = 0.5 / grid_n;
  std::vector<double> fv(grid_n + 1);
  for (int i = 0; i <= grid_n; ++i) {
    fv[i] = eval_f(spec, static_cast<double>(i) / grid_n);
  }

  // H1: sign pattern of f on (0,1) and negativity of F on (0,1].
  for (int i = 1; i <= grid_n; ++i) {
    const double r = static_cast<double>(i) / grid_n;
    if (r < spec.s0 - half_cell && !(fv[i] < 0.0)) {
      rep.violations.push_back(
          {"H1", r, "f(r) is not negative on (0, s0)"});
    } else if (r > spec.s0 + half_cell && r < 1.0 - half_cell &&
               !(fv[i] > 0.0)) {
      rep.violations.push_back(
          {"H1", r, "f(r) is not positive on (s0, 1)"});
    }
    const double Fr = eval_F(spec, r);
    if (!(Fr < 0.0)) {
      rep.violations.push_back({"H1", r, "F(r) is not negative on (0, 1]"});
    }
  }
  // Extension sign checks outside [0,1].
  for (int k = 0; k < 20; ++k) {
    const double left = -1.0 + 0.95 * k / 19.0;  // [-1, -0.05]
    if (!(eval_f(spec, left) > 0.0)) {
      rep.violations.push_back(
          {"H1", left, "extension f(s) is not positive for s < 0"});
    }
    const double right = 1.05 + 0.95 * k / 19.0;  // [1.05, 2]
    if (!(eval_f(spec, right) < 0.0)) {
      rep.violations.push_back(
          {"H1", right, "extension f(s) is not negative for s > 1"});
    }
  }
  rep.h1_ok = std::none_of(
      rep.violations.begin(), rep.violations.end(),
      [](const HypothesisViolation& v) { return v.hypothesis == "H1"; });

  // H2: Holder exponent estimate at the worse of the two ends.
  rep.h2_alpha_estimate =
      std::min(end_exponent(spec, 0), end_exponent(spec, 1));
  if (rep.h2_alpha_estimate <= 0.02) {
    rep.violations.push_back(
        {"H2", rep.h2_alpha_estimate,
         "|f| does not vanish with a positive Holder exponent at an end"});
  }

  // H3: one-sided Lipschitz constant from all grid secants.
  double L = 0.0;
  for (int i = 0; i <= grid_n; ++i) {
    for (int j = i + 1; j <= grid_n; ++j) {
      const double slope =
          (fv[j] - fv[i]) / (static_cast<double>(j - i) / grid_n);
      L = std::max(L, slope);
    }
  }
  rep.h3_L = L;

  // H4: secant constants at the requested (or default) eta.
  const double eta_use =
      eta.value_or(std::min(spec.s0, 1.0 - spec.s0) / 6.0);
  try {
    rep.h4 = estimate_secant_constants(spec, eta_use);
  } catch (const HypothesisError& e) {
    rep.violations.push_back({"H4", eta_use, e.what()});
  } catch (const ConfigError& e) {
    rep.violations.push_back({"H4", eta_use, e.what()});
  }

  return rep;
}

}  // namespace fkpp
