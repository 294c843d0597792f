#include "fkpp/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fkpp/errors.hpp"

namespace fkpp {

namespace {

void validate_grid(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>* slopes) {
  if (x.size() < 2) {
    throw ConfigError("interpolation grid needs at least two nodes");
  }
  if (x.size() != y.size() || (slopes && slopes->size() != x.size())) {
    throw ConfigError("interpolation arrays have mismatched lengths");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      throw ConfigError("interpolation grid must be strictly increasing");
    }
  }
}

// Fritsch-Carlson limiter: clamp a slope against the adjacent secants so the
// Hermite piece cannot overshoot on monotone data.  `dl`/`dr` are the secants
// left and right of the node (pass the same value at the ends).
double limit_slope(double m, double dl, double dr) {
  if (dl * dr <= 0.0) {
    // Local extremum of the data: a flat tangent is the shape-preserving
    // choice.
    return 0.0;
  }
  const double bound = 3.0 * std::min(std::abs(dl), std::abs(dr));
  const double sign = (dl > 0.0) ? 1.0 : -1.0;
  if (m * sign <= 0.0) return 0.0;
  return sign * std::min(std::abs(m), bound);
}

}  // namespace

CubicHermite::CubicHermite(std::vector<double> x, std::vector<double> y,
                           std::vector<double> slopes, bool limit_slopes)
    : x_(std::move(x)), y_(std::move(y)), m_(std::move(slopes)) {
  validate_grid(x_, y_, &m_);
  if (limit_slopes) {
    const std::size_t n = x_.size();
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      secant[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double dl = secant[i == 0 ? 0 : i - 1];
      const double dr = secant[std::min(i, n - 2)];
      m_[i] = limit_slope(m_[i], dl, dr);
    }
  }
}

CubicHermite::CubicHermite(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  validate_grid(x_, y_, nullptr);
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  m_.assign(n, 0.0);
  // Interior nodes: weighted harmonic mean of the secants (PCHIP).
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  // Ends: one-sided three-point estimate, clamped so the end piece stays
  // shape preserving.
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) {
      m = 0.0;
    } else if (d0 * d1 <= 0.0 && std::abs(m) > 3.0 * std::abs(d0)) {
      m = 3.0 * d0;
    }
    return m;
  };
  if (n == 2) {
    m_[0] = m_[1] = d[0];
  } else {
    m_[0] = end_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }
}

std::size_t CubicHermite::interval(double xq) const {
  // Index of the piece containing xq, clamped to the boundary pieces for
  // out-of-range queries (callers handle extrapolation policy themselves).
  const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  std::size_t idx = static_cast<std::size_t>(it - x_.begin());
  if (idx == 0) return 0;
  if (idx >= x_.size()) return x_.size() - 2;
  return idx - 1;
}

double CubicHermite::operator()(double xq) const {
  const std::size_t i = interval(xq);
  const double h = x_[i + 1] - x_[i];
  const double t = (xq - x_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double CubicHermite::derivative(double xq) const {
  const std::size_t i = interval(xq);
  const double h = x_[i + 1] - x_[i];
  const double t = (xq - x_[i]) / h;
  const double t2 = t * t;
  const double dh00 = (6.0 * t2 - 6.0 * t) / h;
  const double dh10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double dh01 = (-6.0 * t2 + 6.0 * t) / h;
  const double dh11 = 3.0 * t2 - 2.0 * t;
  return dh00 * y_[i] + dh10 * m_[i] + dh01 * y_[i + 1] + dh11 * m_[i + 1];
}

TridiagonalSolver::TridiagonalSolver(std::vector<double> lower,
                                     std::vector<double> diag,
                                     std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  const std::size_t n = diag.size();
  if (n == 0 || lower_.size() != n || upper_.size() != n) {
    throw ConfigError("tridiagonal solver: bands must share the matrix size");
  }
  // Thomas factorization: overwrite lower_ with the elimination multipliers
  // and keep the reciprocal pivots.
  inv_diag_.assign(n, 0.0);
  double pivot = diag[0];
  if (pivot == 0.0) throw ConfigError("tridiagonal solver: zero pivot");
  inv_diag_[0] = 1.0 / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower_[i] * inv_diag_[i - 1];
    lower_[i] = w;
    pivot = diag[i] - w * upper_[i - 1];
    if (pivot == 0.0) throw ConfigError("tridiagonal solver: zero pivot");
    inv_diag_[i] = 1.0 / pivot;
  }
}

void TridiagonalSolver::solve(std::vector<double>& rhs) const {
  const std::size_t n = inv_diag_.size();
  if (rhs.size() != n) {
    throw ConfigError("tridiagonal solver: rhs size mismatch");
  }
  for (std::size_t i = 1; i < n; ++i) {
    rhs[i] -= lower_[i] * rhs[i - 1];
  }
  rhs[n - 1] *= inv_diag_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper_[i] * rhs[i + 1]) * inv_diag_[i];
  }
}

double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("regression_slope needs two equal-length samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("regression_slope: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace fkpp
