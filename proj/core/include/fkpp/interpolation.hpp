#pragma once

#include <cstddef>
#include <vector>

namespace fkpp {

/// Cubic Hermite interpolant on a strictly increasing grid. Slopes are either
/// supplied (e.g. exact ODE right-hand sides) or derived from the data with
/// the Fritsch-Carlson monotone limiter, which keeps the interpolant
/// shape-preserving for monotone data.
class CubicHermite {
public:
  CubicHermite() = default;
  /// Supplied slopes; set `limit_slopes` to clamp them against the secants
  /// (guarantees monotonicity on monotone data at a small accuracy cost).
  CubicHermite(std::vector<double> x, std::vector<double> y,
               std::vector<double> slopes, bool limit_slopes = false);
  /// PCHIP-style: slopes estimated from the data (Fritsch-Carlson).
  CubicHermite(std::vector<double> x, std::vector<double> y);

  double operator()(double xq) const;
  double derivative(double xq) const;

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& slopes() const { return m_; }
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

private:
  std::size_t interval(double xq) const;
  std::vector<double> x_, y_, m_;
};

/// Thomas algorithm for a tridiagonal system; factor once, solve many times.
/// Diagonals: lower[i] = A(i, i-1), diag[i] = A(i, i), upper[i] = A(i, i+1).
class TridiagonalSolver {
public:
  TridiagonalSolver() = default;
  TridiagonalSolver(std::vector<double> lower, std::vector<double> diag,
                    std::vector<double> upper);
  /// Solves in place; rhs.size() must equal diag.size().
  void solve(std::vector<double>& rhs) const;

private:
  std::vector<double> lower_, upper_, inv_diag_; // factored form
};

/// Least-squares slope of y against x (used for log-log exponent fits).
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace fkpp
