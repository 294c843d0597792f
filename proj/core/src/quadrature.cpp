#include "fkpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace fkpp {

namespace {

// Gauss-Kronrod 7-15 pair on [-1, 1].  Abscissae are symmetric about zero;
// only the non-negative half is tabulated.  Odd indices are the embedded
// Gauss-7 nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,  //
    0.949107912342758524526189684047851,  //
    0.864864423359769072789712788640926,  //
    0.741531185599394439863864773280788,  //
    0.586087235467691130294144838258730,  //
    0.405845151377397166906606412076961,  //
    0.207784955007898467600689403773245,  //
    0.000000000000000000000000000000000,
};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,  //
    0.063092092629978553290700663189204,  //
    0.104790010322250183839876322541518,  //
    0.140653259715525918745189590510238,  //
    0.169004726639267902826583426598550,  //
    0.190350578064785409913256402421014,  //
    0.204432940075298892414161999234649,  //
    0.209482141084727828012999174891714,
};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,  //
    0.279705391489276667901467771423780,  //
    0.381830050505118944950369775488975,  //
    0.417959183673469387755102040816327,
};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;  // Kronrod estimate
  double error = 0.0;  // QUADPACK-style error estimate
};

// Evaluate the G7/K15 pair on [a, b] with the classic QUADPACK error
// sharpening (scaled by the deviation integral so endpoint singularities
// still converge under subdivision).
template <typename F>
Panel evaluate_panel(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv1[7];
  double fv2[7];
  const double fc = f(center);

  double resg = kWg[3] * fc;
  double resk = kWgk[7] * fc;
  double resabs = std::abs(resk);

  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const double fsum = fv1[j] + fv2[j];
    resk += kWgk[j] * fsum;
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }

  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc +=
        kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }

  const double abs_half = std::abs(half);
  resabs *= abs_half;
  resasc *= abs_half;

  double abserr = std::abs((resk - resg) * half);
  if (resasc != 0.0 && abserr != 0.0) {
    abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = std::numeric_limits<double>::min();
  if (resabs > kTiny / (50.0 * kEps)) {
    abserr = std::max(kEps * 50.0 * resabs, abserr);
  }

  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * half;
  p.error = abserr;
  return p;
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, double rel_tol,
                              int max_subdivisions) {
  QuadResult res;
  if (a == b) {
    res.value = 0.0;
    res.error_estimate = 0.0;
    res.subdivisions = 0;
    res.converged = true;
    return res;
  }
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  auto worse = [](const Panel& lhs, const Panel& rhs) {
    return lhs.error < rhs.error;
  };
  std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> queue(worse);
  queue.push(evaluate_panel(f, a, b));

  double total = queue.top().value;
  double total_err = queue.top().error;
  int splits = 0;

  auto tolerance = [&](double current) {
    return std::max(abs_tol, rel_tol * std::abs(current));
  };

  while (total_err > tolerance(total) && splits < max_subdivisions) {
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval no longer splittable in double precision; put it back and
      // stop refining.
      queue.push(worst);
      break;
    }
    Panel left = evaluate_panel(f, worst.a, mid);
    Panel right = evaluate_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++splits;
  }

  res.value = sign * total;
  res.error_estimate = total_err;
  res.subdivisions = splits;
  res.converged = total_err <= tolerance(total);
  return res;
}

}  // namespace fkpp
