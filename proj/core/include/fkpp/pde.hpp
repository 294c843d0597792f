#pragma once

#include "fkpp/reaction.hpp"
#include "fkpp/wave_profile.hpp"

#include <string>
#include <vector>

namespace fkpp {

/// Uniform node grid z_i = z_min + i*dz, i = 0..n_cells, with Dirichlet data
/// v=0 at z_min and v=1 at z_max.
struct Domain {
  double z_min = -40.0;
  double z_max = 40.0;
  int n_cells = 8000;

  double dz() const { return (z_max - z_min) / n_cells; }
  int n_nodes() const { return n_cells + 1; }
  double z(int i) const { return z_min + i * dz(); }
  std::vector<double> nodes() const;
};

struct State {
  double t = 0.0;
  std::vector<double> v; ///< node values, size n_cells+1
};

/// Initial data in the moving frame.
struct InitialData {
  enum class Kind { step, smoothed_step, profile_perturbation, table };
  Kind kind = Kind::step;
  double at = 0.0;      ///< step / smoothed_step location
  double width = 1.0;   ///< smoothed_step: tanh width
  double epsilon = 0.0; ///< profile_perturbation: bump amplitude
  double shift = 0.0;   ///< profile_perturbation: profile translate
  /// table: (z, v) samples, strictly increasing z; interpolated onto the grid
  /// (monotone Hermite), constant beyond the sampled range.
  std::vector<std::pair<double, double>> table;

  /// Node values on `dom`. profile_perturbation requires `profile`:
  /// v0(z) = clamp(U(z+shift) + epsilon*exp(-z^2/8), 0, 1).
  std::vector<double> resolve(const Domain& dom, const ProfileTable* profile = nullptr) const;
};

struct H5Report {
  bool ok = false;
  double v_minus = 0.0; ///< left plateau estimate (max over outer 10% of nodes)
  double v_plus = 0.0;  ///< right plateau estimate (min over outer 10% of nodes)
  double margin = 0.0;  ///< required margin 2*eta
  std::string detail;
};

/// Plateau condition: v0(-inf) < s0 < v0(+inf) with margin >= 2*eta.
H5Report check_h5(const std::vector<double>& v0, const Domain& dom, double s0, double eta);

struct SchemeCtrl {
  enum class Kind { imex_fd, splitting_green };
  Kind kind = Kind::imex_fd;
  double dt = 0.002;
  double theta = 0.5;               ///< implicit weight for the linear part
  int startup_steps = 2;            ///< initial fully implicit (theta=1) steps
                                    ///< damping the ringing of theta=1/2 on rough data
  double kernel_cutoff_sigmas = 8.0; ///< Gaussian kernel truncation radius
  double t_end = 60.0;
  double snapshot_every = 0.1;
  bool waive_h5 = false;            ///< allow plateau-violating initial data
  bool reaction_off = false;        ///< pure linear evolution (scheme checks)
};

/// Scheme-agnostic stepper interface; both schemes clamp to [0,1] after each
/// step, re-pin the Dirichlet values and record the largest clamp excess.
class Stepper {
public:
  virtual ~Stepper() = default;
  virtual void step(State& s) = 0;
  double max_clamp() const { return max_clamp_; }

protected:
  double clamp_state(std::vector<double>& v);
  double max_clamp_ = 0.0;
};

/// Theta-scheme (Crank-Nicolson by default) for v_zz + c v_z with centered
/// second-order advection folded into the tridiagonal implicit operator,
/// explicit reaction. Guards: |c| dz/2 < 1 (cell Peclet), dt*max_slope(f) <= 0.5.
class ImexStepper : public Stepper {
public:
  ImexStepper(const ReactionSpec& spec, double c, const Domain& dom, const SchemeCtrl& ctrl);
  void step(State& s) override;

private:
  void factor(double theta);
  const ReactionSpec spec_;
  double c_, dt_, theta_;
  Domain dom_;
  bool reaction_off_;
  int startup_left_;
  TridiagonalSolver solver_;
  double exp_lo_ = 0, exp_di_ = 0, exp_hi_ = 0; // explicit operator weights
  double bc_lo_ = 0, bc_hi_ = 0;                // boundary contributions
  std::vector<double> rhs_;
};

/// Strang splitting: half reaction step (explicit midpoint), drift-shifted
/// Gaussian convolution for the full linear step, half reaction step. The
/// kernel is truncated at cutoff_sigmas * sqrt(2 dt) and renormalized; the
/// state is extended by its boundary plateaus (0/1) for the convolution.
class SplittingStepper : public Stepper {
public:
  SplittingStepper(const ReactionSpec& spec, double c, const Domain& dom, const SchemeCtrl& ctrl);
  void step(State& s) override;
  int kernel_halfwidth() const { return halfwidth_; }

private:
  void half_reaction(std::vector<double>& v);
  const ReactionSpec spec_;
  double c_, dt_;
  Domain dom_;
  bool reaction_off_;
  int halfwidth_ = 0;
  std::vector<double> kernel_;
  std::vector<double> work_;
};

/// Single steps with a throwaway stepper (convenience for tests; run() keeps
/// one stepper alive so the factored operator is reused).
State step_imex(const ReactionSpec& spec, double c, const Domain& dom,
                const SchemeCtrl& ctrl, const State& s);
State step_splitting(const ReactionSpec& spec, double c, const Domain& dom,
                     const SchemeCtrl& ctrl, const State& s);

struct Trajectory {
  Domain domain;
  std::vector<State> snapshots; ///< t = 0, snapshot_every, ..., t_end
  double max_clamp = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

/// Advances v0 to t_end, snapshotting at multiples of snapshot_every (and at
/// t_end). Throws HypothesisError if the plateau condition (margin 2*eta)
/// fails and is not waived; on non-finite values the run aborts, keeping the
/// last good snapshot.
Trajectory run(const ReactionSpec& spec, double c, const Domain& dom,
               const SchemeCtrl& ctrl, const std::vector<double>& v0,
               double eta = 0.05);

} // namespace fkpp
