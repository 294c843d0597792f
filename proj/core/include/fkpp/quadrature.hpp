#pragma once

#include <functional>

namespace fkpp {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (G7/K15) quadrature with bisection of the worst
/// interval. Handles integrands with integrable endpoint singularities by
/// subdividing toward the endpoint. Tolerance is met when the summed error
/// estimate drops below max(abs_tol, rel_tol*|value|).
QuadResult integrate_adaptive(const std::function<double(double)>& f,
                              double a, double b,
                              double abs_tol = 1e-12, double rel_tol = 1e-12,
                              int max_subdivisions = 2000);

} // namespace fkpp
