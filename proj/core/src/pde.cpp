#include "fkpp/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <utility>

#include "fkpp/errors.hpp"
#include "fkpp/interpolation.hpp"

namespace fkpp {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void validate_domain(const Domain& dom) {
  if (!(dom.z_max > dom.z_min)) {
    throw ConfigError("domain needs z_max > z_min, got [" + fmt(dom.z_min) +
                      ", " + fmt(dom.z_max) + "]");
  }
  if (dom.n_cells < 4) {
    throw ConfigError("domain needs at least 4 cells, got " +
                      std::to_string(dom.n_cells));
  }
}

void require_node_count(const std::vector<double>& v, const Domain& dom) {
  if (static_cast<int>(v.size()) != dom.n_nodes()) {
    throw ConfigError("state has " + std::to_string(v.size()) +
                      " nodes; the domain expects " +
                      std::to_string(dom.n_nodes()));
  }
}

/// Largest |f'| over [0,1], estimated from secants at 1e-3 resolution.
double max_reaction_slope(const ReactionSpec& spec) {
  const int n = 1000;
  double prev = eval_f(spec, 0.0);
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double cur = eval_f(spec, static_cast<double>(i) / n);
    worst = std::max(worst, std::abs(cur - prev) * n);
    prev = cur;
  }
  return worst;
}

void check_reaction_guard(const ReactionSpec& spec, double dt,
                          bool reaction_off) {
  if (reaction_off) return;
  const double slope = max_reaction_slope(spec);
  if (dt * slope > 0.5) {
    throw ConfigError("reaction guard: dt * max|f'| = " + fmt(dt * slope) +
                      " must stay <= 0.5; use dt <= " + fmt(0.5 / slope));
  }
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("dt must be positive and finite, got " + fmt(dt));
  }
}

}  // namespace

std::vector<double> Domain::nodes() const {
  std::vector<double> zs(static_cast<std::size_t>(n_nodes()));
  for (int i = 0; i < n_nodes(); ++i) zs[static_cast<std::size_t>(i)] = z(i);
  return zs;
}

std::vector<double> InitialData::resolve(const Domain& dom,
                                         const ProfileTable* profile) const {
  validate_domain(dom);
  const int n = dom.n_nodes();
  std::vector<double> v(static_cast<std::size_t>(n));

  switch (kind) {
    case Kind::step:
      for (int i = 0; i < n; ++i) {
        const double z = dom.z(i);
        v[i] = z < at ? 0.0 : (z > at ? 1.0 : 0.5);
      }
      break;
    case Kind::smoothed_step: {
      if (!(width > 0.0)) {
        throw ConfigError("smoothed_step width must be positive, got " +
                          fmt(width));
      }
      for (int i = 0; i < n; ++i) {
        v[i] = 0.5 * (1.0 + std::tanh((dom.z(i) - at) / width));
      }
      break;
    }
    case Kind::profile_perturbation: {
      if (profile == nullptr) {
        throw ConfigError(
            "profile_perturbation initial data needs a reconstructed wave "
            "profile");
      }
      for (int i = 0; i < n; ++i) {
        const double z = dom.z(i);
        const double bump = epsilon * std::exp(-z * z / 8.0);
        v[i] = std::clamp(eval_profile(*profile, z + shift) + bump, 0.0, 1.0);
      }
      break;
    }
    case Kind::table: {
      if (table.size() < 2) {
        throw ConfigError("table initial data needs at least 2 samples, got " +
                          std::to_string(table.size()));
      }
      std::vector<double> xs, ys;
      xs.reserve(table.size());
      ys.reserve(table.size());
      for (const auto& [z, val] : table) {
        if (!xs.empty() && !(z > xs.back())) {
          throw ConfigError(
              "table initial data needs strictly increasing z samples");
        }
        xs.push_back(z);
        ys.push_back(val);
      }
      const CubicHermite interp(xs, ys);  // monotone (Fritsch-Carlson) fit
      for (int i = 0; i < n; ++i) {
        const double z = dom.z(i);
        double val;
        if (z <= xs.front()) {
          val = ys.front();
        } else if (z >= xs.back()) {
          val = ys.back();
        } else {
          val = interp(z);
        }
        v[i] = std::clamp(val, 0.0, 1.0);
      }
      break;
    }
  }

  v.front() = 0.0;  // Dirichlet data of the moving-frame problem
  v.back() = 1.0;
  return v;
}

H5Report check_h5(const std::vector<double>& v0, const Domain& dom, double s0,
                  double eta) {
  validate_domain(dom);
  require_node_count(v0, dom);
  if (!(eta > 0.0)) {
    throw ConfigError("eta must be positive, got " + fmt(eta));
  }

  H5Report rep;
  rep.margin = 2.0 * eta;
  const int n = dom.n_nodes();
  const int outer = std::max(1, n / 10);
  double vm = v0.front();
  for (int i = 0; i < outer; ++i) vm = std::max(vm, v0[i]);
  double vp = v0.back();
  for (int i = n - outer; i < n; ++i) vp = std::min(vp, v0[i]);
  rep.v_minus = vm;
  rep.v_plus = vp;

  const bool left_ok = vm <= s0 - rep.margin;
  const bool right_ok = vp >= s0 + rep.margin;
  rep.ok = left_ok && right_ok;
  if (rep.ok) {
    rep.detail = "plateaus clear s0 = " + fmt(s0) + " by the margin " +
                 fmt(rep.margin);
  } else {
    rep.detail = "plateau condition fails:";
    if (!left_ok) {
      rep.detail += " left plateau max " + fmt(vm) + " exceeds s0 - 2 eta = " +
                    fmt(s0 - rep.margin) + ";";
    }
    if (!right_ok) {
      rep.detail += " right plateau min " + fmt(vp) +
                    " falls below s0 + 2 eta = " + fmt(s0 + rep.margin) + ";";
    }
    rep.detail += " adjust the initial data or waive the check";
  }
  return rep;
}

double Stepper::clamp_state(std::vector<double>& v) {
  double excess = 0.0;
  for (double& x : v) {
    if (x < 0.0) {
      excess = std::max(excess, -x);
      x = 0.0;
    } else if (x > 1.0) {
      excess = std::max(excess, x - 1.0);
      x = 1.0;
    }
  }
  v.front() = 0.0;
  v.back() = 1.0;
  max_clamp_ = std::max(max_clamp_, excess);
  return excess;
}

ImexStepper::ImexStepper(const ReactionSpec& spec, double c, const Domain& dom,
                         const SchemeCtrl& ctrl)
    : spec_(spec),
      c_(c),
      dt_(ctrl.dt),
      theta_(ctrl.theta),
      dom_(dom),
      reaction_off_(ctrl.reaction_off),
      startup_left_(std::max(0, ctrl.startup_steps)) {
  validate_domain(dom);
  check_dt(dt_);
  if (!(theta_ >= 0.0 && theta_ <= 1.0)) {
    throw ConfigError("theta must lie in [0,1], got " + fmt(theta_));
  }
  const double peclet = std::abs(c_) * dom.dz() / 2.0;
  if (!(peclet < 1.0)) {
    throw ConfigError("cell Peclet number |c| dz / 2 = " + fmt(peclet) +
                      " must stay below 1; refine the grid or reduce |c|");
  }
  check_reaction_guard(spec_, dt_, reaction_off_);
  if (theta_ == 1.0) startup_left_ = 0;  // startup steps would be identical
  rhs_.assign(static_cast<std::size_t>(dom_.n_cells - 1), 0.0);
  factor(startup_left_ > 0 ? 1.0 : theta_);
}

void ImexStepper::factor(double theta) {
  const double dz = dom_.dz();
  const double lo = 1.0 / (dz * dz) - c_ / (2.0 * dz);
  const double di = -2.0 / (dz * dz);
  const double hi = 1.0 / (dz * dz) + c_ / (2.0 * dz);

  const int m = dom_.n_cells - 1;  // interior unknowns
  std::vector<double> L(m, -theta * dt_ * lo);
  std::vector<double> D(m, 1.0 - theta * dt_ * di);
  std::vector<double> U(m, -theta * dt_ * hi);
  L.front() = 0.0;
  U.back() = 0.0;
  solver_ = TridiagonalSolver(std::move(L), std::move(D), std::move(U));

  exp_lo_ = (1.0 - theta) * dt_ * lo;
  exp_di_ = (1.0 - theta) * dt_ * di;
  exp_hi_ = (1.0 - theta) * dt_ * hi;
  // The explicit share of the Dirichlet neighbours (v=0 at z_min, v=1 at
  // z_max) enters through the rhs loop; only the implicit share moves over.
  bc_lo_ = theta * dt_ * lo * 0.0;
  bc_hi_ = theta * dt_ * hi * 1.0;
}

void ImexStepper::step(State& s) {
  require_node_count(s.v, dom_);
  const int m = dom_.n_cells - 1;
  for (int i = 0; i < m; ++i) {
    const double vl = s.v[i];
    const double vc = s.v[i + 1];
    const double vr = s.v[i + 2];
    double r = vc + exp_lo_ * vl + exp_di_ * vc + exp_hi_ * vr;
    if (!reaction_off_) r += dt_ * eval_f(spec_, vc);
    rhs_[i] = r;
  }
  rhs_.front() += bc_lo_;
  rhs_.back() += bc_hi_;
  solver_.solve(rhs_);
  for (int i = 0; i < m; ++i) s.v[i + 1] = rhs_[i];
  clamp_state(s.v);
  s.t += dt_;
  if (startup_left_ > 0 && --startup_left_ == 0) factor(theta_);
}

SplittingStepper::SplittingStepper(const ReactionSpec& spec, double c,
                                   const Domain& dom, const SchemeCtrl& ctrl)
    : spec_(spec),
      c_(c),
      dt_(ctrl.dt),
      dom_(dom),
      reaction_off_(ctrl.reaction_off) {
  validate_domain(dom);
  check_dt(dt_);
  if (!(ctrl.kernel_cutoff_sigmas >= 2.0)) {
    throw ConfigError("kernel_cutoff_sigmas must be at least 2, got " +
                      fmt(ctrl.kernel_cutoff_sigmas));
  }

  const double dz = dom.dz();
  const double sigma = std::sqrt(2.0 * dt_);
  const double reach = ctrl.kernel_cutoff_sigmas * sigma + std::abs(c_) * dt_;
  halfwidth_ = std::max(1, static_cast<int>(std::ceil(reach / dz)));
  if (halfwidth_ >= dom.n_cells) {
    throw ConfigError("Green kernel halfwidth (" +
                      std::to_string(halfwidth_) +
                      " cells) does not fit the domain (" +
                      std::to_string(dom.n_cells) +
                      " cells); enlarge the domain or shrink dt");
  }
  check_reaction_guard(spec_, dt_, reaction_off_);

  // Heat kernel of one full step, drift-shifted so that the linear update is
  // v_new(z) = sum_j K_j v(z - j dz) with K_j ~ exp(-(j dz + c dt)^2 / (4 dt)).
  kernel_.resize(static_cast<std::size_t>(2 * halfwidth_ + 1));
  const double inv_four_dt = 1.0 / (4.0 * dt_);
  double sum = 0.0;
  for (int j = -halfwidth_; j <= halfwidth_; ++j) {
    const double u = j * dz + c_ * dt_;
    const double w = std::exp(-u * u * inv_four_dt);
    kernel_[static_cast<std::size_t>(j + halfwidth_)] = w;
    sum += w;
  }
  for (double& w : kernel_) w /= sum;
  work_.assign(static_cast<std::size_t>(dom.n_nodes()), 0.0);
}

void SplittingStepper::half_reaction(std::vector<double>& v) {
  const double h = 0.5 * dt_;  // explicit midpoint over half a step
  for (double& x : v) {
    const double mid = x + 0.5 * h * eval_f(spec_, x);
    x += h * eval_f(spec_, mid);
  }
}

void SplittingStepper::step(State& s) {
  require_node_count(s.v, dom_);
  if (!reaction_off_) half_reaction(s.v);

  const int n = dom_.n_cells;
  const double left = s.v.front();
  const double right = s.v.back();
  for (int i = 0; i <= n; ++i) {
    double acc = 0.0;
    for (int j = -halfwidth_; j <= halfwidth_; ++j) {
      const int k = i - j;
      const double vv = k < 0 ? left : (k > n ? right : s.v[k]);
      acc += kernel_[static_cast<std::size_t>(j + halfwidth_)] * vv;
    }
    work_[static_cast<std::size_t>(i)] = acc;
  }
  s.v.swap(work_);

  if (!reaction_off_) half_reaction(s.v);
  clamp_state(s.v);
  s.t += dt_;
}

State step_imex(const ReactionSpec& spec, double c, const Domain& dom,
                const SchemeCtrl& ctrl, const State& s) {
  ImexStepper stepper(spec, c, dom, ctrl);
  State out = s;
  stepper.step(out);
  return out;
}

State step_splitting(const ReactionSpec& spec, double c, const Domain& dom,
                     const SchemeCtrl& ctrl, const State& s) {
  SplittingStepper stepper(spec, c, dom, ctrl);
  State out = s;
  stepper.step(out);
  return out;
}

Trajectory run(const ReactionSpec& spec, double c, const Domain& dom,
               const SchemeCtrl& ctrl, const std::vector<double>& v0,
               double eta) {
  validate_domain(dom);
  require_node_count(v0, dom);
  check_dt(ctrl.dt);
  if (!(ctrl.t_end >= 0.0)) {
    throw ConfigError("t_end must be nonnegative, got " + fmt(ctrl.t_end));
  }
  if (!(ctrl.snapshot_every > 0.0)) {
    throw ConfigError("snapshot_every must be positive, got " +
                      fmt(ctrl.snapshot_every));
  }
  if (!ctrl.waive_h5) {
    const H5Report rep = check_h5(v0, dom, spec.s0, eta);
    if (!rep.ok) throw HypothesisError(rep.detail);
  }

  std::unique_ptr<Stepper> stepper;
  if (ctrl.kind == SchemeCtrl::Kind::imex_fd) {
    stepper = std::make_unique<ImexStepper>(spec, c, dom, ctrl);
  } else {
    stepper = std::make_unique<SplittingStepper>(spec, c, dom, ctrl);
  }

  Trajectory traj;
  traj.domain = dom;
  State s;
  s.t = 0.0;
  s.v = v0;
  traj.snapshots.push_back(s);

  const long long n_steps =
      ctrl.t_end <= 0.0
          ? 0
          : static_cast<long long>(std::ceil(ctrl.t_end / ctrl.dt - 1e-9));
  const long long every =
      std::max(1LL, std::llround(ctrl.snapshot_every / ctrl.dt));
  for (long long k = 1; k <= n_steps; ++k) {
    stepper->step(s);
    bool finite = true;
    for (double x : s.v) {
      if (!std::isfinite(x)) {
        finite = false;
        break;
      }
    }
    if (!finite) {
      traj.aborted = true;
      traj.abort_reason = "non-finite state at t = " + fmt(s.t) +
                          "; keeping the last good snapshot";
      break;
    }
    if (k % every == 0 || k == n_steps) traj.snapshots.push_back(s);
  }
  traj.max_clamp = stepper->max_clamp();
  return traj;
}

}  // namespace fkpp
