// fkpp: travelling-wave speeds, profiles, moving-frame simulation and
// convergence diagnostics for bistable reaction-diffusion equations.
//
// Exit codes: 0 success, 2 hypothesis violation, 3 non-convergence,
// 4 configuration error.

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fkpp/config.hpp"
#include "fkpp/diagnostics.hpp"
#include "fkpp/errors.hpp"
#include "fkpp/io.hpp"
#include "fkpp/pde.hpp"
#include "fkpp/reaction.hpp"
#include "fkpp/wave_profile.hpp"
#include "fkpp/wave_system.hpp"

namespace fs = std::filesystem;
using namespace fkpp;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::string trajectory_path;  // diagnose only
};

void add_common(CLI::App* cmd, CommonOpts& opt) {
  cmd->add_option("--config", opt.config_path,
                  "Run configuration file (defaults to the built-in defaults)");
  cmd->add_option("--out", opt.out_dir, "Output directory (overrides [output] dir)");
  cmd->add_option("--format", opt.format,
                  "Output format: csv | json | binary (overrides [output] format)")
      ->check(CLI::IsMember({"csv", "json", "binary"}));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

RunConfig load_config(const CommonOpts& opt) {
  const std::string text = opt.config_path.empty()
                               ? default_config_text()
                               : read_file(opt.config_path);
  ParseOutcome parsed = parse_config(text);
  if (!parsed.config) {
    std::string msg = "invalid configuration";
    if (!opt.config_path.empty()) msg += " in " + opt.config_path;
    for (const ConfigIssue& issue : parsed.issues) {
      msg += "\n  line " + std::to_string(issue.line) + ": " + issue.message;
    }
    throw ConfigError(msg);
  }
  RunConfig cfg = *parsed.config;
  if (!opt.out_dir.empty()) cfg.output.dir = opt.out_dir;
  if (opt.format == "csv") {
    cfg.output.format = OutputSpec::Format::csv;
  } else if (opt.format == "json") {
    cfg.output.format = OutputSpec::Format::json;
  } else if (opt.format == "binary") {
    cfg.output.format = OutputSpec::Format::binary;
  }
  return cfg;
}

/// user_table reactions carry a CSV path in the config; load it here so every
/// downstream call sees a fully populated spec.
ReactionSpec resolve_reaction(const RunConfig& cfg) {
  if (cfg.reaction.kind != ReactionSpec::Kind::user_table) return cfg.reaction;
  const auto samples = parse_table_csv(
      read_file(cfg.reaction_table_path),
      "reaction table " + cfg.reaction_table_path);
  return ReactionSpec::user_table(cfg.reaction.s0, cfg.reaction.alpha0,
                                  cfg.reaction.alpha1, samples);
}

InitialData resolve_initial(const RunConfig& cfg) {
  InitialData init = cfg.initial;
  if (init.kind == InitialData::Kind::table) {
    init.table = parse_table_csv(read_file(cfg.initial_table_path),
                                 "initial table " + cfg.initial_table_path);
  }
  return init;
}

const char* kind_name(ReactionSpec::Kind kind) {
  switch (kind) {
    case ReactionSpec::Kind::cubic: return "cubic";
    case ReactionSpec::Kind::holder_bistable: return "holder";
    case ReactionSpec::Kind::user_table: return "table";
  }
  return "?";
}

const char* terminal_name(Terminal::Kind kind) {
  switch (kind) {
    case Terminal::Kind::positive_at_one: return "positive_at_one";
    case Terminal::Kind::hit_zero_at: return "hit_zero_at";
    case Terminal::Kind::balanced: return "balanced";
  }
  return "?";
}

Json reaction_json(const ReactionSpec& spec) {
  Json j = Json::object();
  j.set("kind", Json::string(kind_name(spec.kind)));
  j.set("s0", Json::number(spec.s0));
  j.set("alpha0", Json::number(spec.alpha0));
  j.set("alpha1", Json::number(spec.alpha1));
  return j;
}

Json tail_json(const ProfileTail& tail) {
  Json j = Json::object();
  j.set("finite", Json::boolean(tail.finite));
  j.set("endpoint_z", Json::real_or_infinite(tail.endpoint_z));
  j.set("coeff", Json::number(tail.coeff));
  j.set("alpha", Json::number(tail.alpha));
  j.set("z_match", Json::number(tail.z_match));
  j.set("u_match", Json::number(tail.u_match));
  return j;
}

Json shift_json(const ShiftSample& s) {
  Json j = Json::object();
  j.set("t", Json::number(s.t));
  j.set("zeta", Json::number(s.zeta));
  j.set("zeta_lsq", Json::number(s.zeta_lsq));
  j.set("sup_dist", Json::number(s.sup_dist));
  j.set("multiple_crossings", Json::boolean(s.multiple_crossings));
  return j;
}

Json lyapunov_json(const LyapunovSample& s) {
  Json j = Json::object();
  j.set("t", Json::number(s.t));
  j.set("energy", Json::number(s.energy));
  if (s.dissipation) j.set("dissipation", Json::number(*s.dissipation));
  if (s.identity_residual) {
    j.set("identity_residual", Json::number(*s.identity_residual));
  }
  return j;
}

std::string shift_csv(const std::vector<ShiftSample>& track) {
  std::vector<std::vector<std::string>> rows;
  for (const ShiftSample& s : track) {
    rows.push_back({format_double(s.t), format_double(s.zeta),
                    format_double(s.zeta_lsq), format_double(s.sup_dist),
                    s.multiple_crossings ? "true" : "false"});
  }
  return csv_table({"t", "zeta", "zeta_lsq", "sup_dist", "multiple_crossings"},
                   rows);
}

std::string lyapunov_csv(const std::vector<LyapunovSample>& series) {
  std::vector<std::vector<std::string>> rows;
  for (const LyapunovSample& s : series) {
    rows.push_back(
        {format_double(s.t), format_double(s.energy),
         s.dissipation ? format_double(*s.dissipation) : std::string(),
         s.identity_residual ? format_double(*s.identity_residual)
                             : std::string()});
  }
  return csv_table({"t", "energy", "dissipation", "identity_residual"}, rows);
}

/// Diagnostic interval: explicit [diagnostics] override when present,
/// otherwise the profile-derived interval (envelope translations included
/// when an envelope pair exists for this initial data).
std::pair<double, double> pick_interval(const RunConfig& cfg,
                                        const ReactionSpec& spec,
                                        const ProfileTable& profile,
                                        const Domain& dom,
                                        const std::vector<double>& v0) {
  if (cfg.interval_a) return {*cfg.interval_a, *cfg.interval_b};
  std::optional<EnvelopeParams> env;
  try {
    env = build_envelopes(spec, profile, v0, dom, cfg.eta);
  } catch (const std::exception&) {
    // No admissible envelope pair for this initial data; the profile-only
    // interval is still well defined.
  }
  return diagnostic_interval(profile, dom, env);
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_hypotheses(const CommonOpts& opt) {
  const RunConfig cfg = load_config(opt);
  const ReactionSpec spec = resolve_reaction(cfg);
  const HypothesisReport report = check_hypotheses(spec, 1000, cfg.eta);

  Json j = Json::object();
  j.set("schema_version", Json::integer(1));
  j.set("reaction", reaction_json(spec));
  j.set("eta", Json::number(cfg.eta));
  j.set("ok", Json::boolean(report.ok()));
  j.set("h1_ok", Json::boolean(report.h1_ok));
  j.set("h2_alpha_estimate", Json::number(report.h2_alpha_estimate));
  j.set("h3_one_sided_lipschitz", Json::number(report.h3_L));
  if (report.h4) {
    Json h4 = Json::object();
    h4.set("eta", Json::number(report.h4->eta));
    h4.set("delta", Json::number(report.h4->delta));
    h4.set("mu_under", Json::number(report.h4->mu_under));
    h4.set("mu_over", Json::number(report.h4->mu_over));
    j.set("h4", std::move(h4));
  }
  j.set("F1", Json::number(report.F1));
  Json viols = Json::array();
  for (const HypothesisViolation& v : report.violations) {
    Json item = Json::object();
    item.set("hypothesis", Json::string(v.hypothesis));
    item.set("location", Json::number(v.location));
    item.set("detail", Json::string(v.detail));
    viols.push(std::move(item));
  }
  j.set("violations", std::move(viols));

  const fs::path out = fs::path(cfg.output.dir) / "hypotheses.json";
  atomic_write_text(out, j.dump() + "\n");
  std::cout << "wrote " << out.string() << "\n";

  if (!report.ok()) {
    std::string msg = "hypothesis check failed:";
    for (const HypothesisViolation& v : report.violations) {
      msg += "\n  " + v.hypothesis + " at " + format_double(v.location) +
             ": " + v.detail;
    }
    throw HypothesisError(msg);
  }
  std::cout << "all hypotheses hold (alpha ~ " +
                   format_double(report.h2_alpha_estimate) +
                   ", L = " + format_double(report.h3_L) + ")\n";
  return 0;
}

Json speed_json(const ReactionSpec& spec, const SpeedResult& res) {
  Json j = Json::object();
  j.set("schema_version", Json::integer(1));
  j.set("reaction", reaction_json(spec));
  j.set("c_star", Json::number(res.c_star));
  j.set("bracket_lo", Json::number(res.bracket_lo));
  j.set("bracket_hi", Json::number(res.bracket_hi));
  j.set("iterations", Json::integer(res.iterations));
  j.set("identity_residual", Json::number(res.identity_residual));
  j.set("terminal", Json::string(terminal_name(res.y.terminal.kind)));
  j.set("y_points", Json::integer(static_cast<long long>(res.y.r_grid.size())));
  j.set("eps_start", Json::number(res.y.eps_start));
  j.set("start_coeff", Json::number(res.y.start_coeff));
  return j;
}

int cmd_speed(const CommonOpts& opt) {
  const RunConfig cfg = load_config(opt);
  const ReactionSpec spec = resolve_reaction(cfg);
  const SpeedResult res = solve_speed(spec, cfg.wave);

  const fs::path dir(cfg.output.dir);
  atomic_write_text(dir / "speed.json", speed_json(spec, res).dump() + "\n");

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < res.y.r_grid.size(); ++i) {
    rows.push_back({format_double(res.y.r_grid[i]),
                    format_double(res.y.y_values[i]),
                    format_double(res.y.slopes[i])});
  }
  atomic_write_text(dir / "y.csv", csv_table({"r", "y", "dydr"}, rows));

  std::cout << "c_star = " << format_double(res.c_star) << " ("
            << res.iterations << " bisection iterations, identity residual "
            << format_double(res.identity_residual) << ")\n"
            << "wrote " << (dir / "speed.json").string() << ", "
            << (dir / "y.csv").string() << "\n";
  return 0;
}

Json profile_summary_json(const ReactionSpec& spec, const SpeedResult& res,
                          const ProfileTable& profile) {
  Json j = Json::object();
  j.set("schema_version", Json::integer(1));
  j.set("reaction", reaction_json(spec));
  j.set("c_star", Json::number(profile.c_star));
  j.set("identity_residual", Json::number(res.identity_residual));
  j.set("z0", Json::real_or_infinite(profile.z0()));
  j.set("z1", Json::real_or_infinite(profile.z1()));
  j.set("front_width", Json::real_or_infinite(front_width(profile)));
  j.set("points", Json::integer(static_cast<long long>(profile.z_nodes.size())));
  j.set("left_tail", tail_json(profile.left));
  j.set("right_tail", tail_json(profile.right));
  return j;
}

int cmd_profile(const CommonOpts& opt) {
  const RunConfig cfg = load_config(opt);
  const ReactionSpec spec = resolve_reaction(cfg);
  const SpeedResult res = solve_speed(spec, cfg.wave);
  const ProfileTable profile = reconstruct_profile(spec, res, cfg.profile);

  const fs::path dir(cfg.output.dir);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < profile.z_nodes.size(); ++i) {
    rows.push_back({format_double(profile.z_nodes[i]),
                    format_double(profile.u_values[i]),
                    format_double(profile.slopes[i])});
  }
  atomic_write_text(dir / "profile.csv", csv_table({"z", "u", "dudz"}, rows));
  atomic_write_text(dir / "profile_summary.json",
                    profile_summary_json(spec, res, profile).dump() + "\n");

  std::cout << "c_star = " << format_double(profile.c_star) << ", z0 = "
            << (profile.left.finite ? format_double(profile.z0()) : "-infinite")
            << ", z1 = "
            << (profile.right.finite ? format_double(profile.z1()) : "infinite")
            << "\nwrote " << (dir / "profile.csv").string() << ", "
            << (dir / "profile_summary.json").string() << "\n";
  return 0;
}

Json trajectory_json(const Trajectory& traj) {
  Json j = Json::object();
  j.set("schema_version", Json::integer(1));
  j.set("z_min", Json::number(traj.domain.z_min));
  j.set("z_max", Json::number(traj.domain.z_max));
  j.set("n_cells", Json::integer(traj.domain.n_cells));
  Json snaps = Json::array();
  for (const State& s : traj.snapshots) {
    Json snap = Json::object();
    snap.set("t", Json::number(s.t));
    Json v = Json::array();
    for (double x : s.v) v.push(Json::number(x));
    snap.set("v", std::move(v));
    snaps.push(std::move(snap));
  }
  j.set("snapshots", std::move(snaps));
  return j;
}

int cmd_simulate(const CommonOpts& opt) {
  const RunConfig cfg = load_config(opt);
  const ReactionSpec spec = resolve_reaction(cfg);
  const SpeedResult res = solve_speed(spec, cfg.wave);
  const ProfileTable profile = reconstruct_profile(spec, res, cfg.profile);
  const InitialData init = resolve_initial(cfg);
  const std::vector<double> v0 = init.resolve(cfg.domain, &profile);

  const Trajectory traj =
      run(spec, res.c_star, cfg.domain, cfg.scheme, v0, cfg.eta);

  const fs::path dir(cfg.output.dir);
  write_trajectory_bin(dir / "trajectory.bin", traj);
  if (cfg.output.format == OutputSpec::Format::csv) {
    atomic_write_text(dir / "trajectory.csv", trajectory_csv(traj));
  } else if (cfg.output.format == OutputSpec::Format::json) {
    atomic_write_text(dir / "trajectory.json", trajectory_json(traj).dump() + "\n");
  }

  Json j = Json::object();
  j.set("schema_version", Json::integer(1));
  j.set("reaction", reaction_json(spec));
  j.set("c_star", Json::number(res.c_star));
  j.set("t_end", Json::number(cfg.scheme.t_end));
  j.set("snapshots", Json::integer(static_cast<long long>(traj.snapshots.size())));
  j.set("max_clamp", Json::number(traj.max_clamp));
  j.set("aborted", Json::boolean(traj.aborted));
  if (traj.aborted) j.set("abort_reason", Json::string(traj.abort_reason));

  // The convergence report needs a usable shift/Lyapunov history; short runs
  // still produce the trajectory itself.
  const bool reportable = !traj.aborted && traj.snapshots.size() >= 10;
  if (reportable) {
    const auto [a, b] = pick_interval(cfg, spec, profile, cfg.domain, v0);
    const ConvergenceReport rep =
        convergence_report(spec, traj, profile, res.c_star, a, b);
    j.set("interval_a", Json::number(a));
    j.set("interval_b", Json::number(b));
    j.set("zeta_inf", Json::number(rep.zeta_inf));
    j.set("final_sup_dist", Json::number(rep.final_sup_dist));
    j.set("monotone_tail", Json::boolean(rep.monotone_tail));
    j.set("lyapunov_ok", Json::boolean(rep.lyapunov_ok));
    Json track = Json::array();
    for (const ShiftSample& s : rep.shift_track) track.push(shift_json(s));
    j.set("shift_track", std::move(track));
    Json lyap = Json::array();
    for (const LyapunovSample& s : rep.lyapunov) lyap.push(lyapunov_json(s));
    j.set("lyapunov", std::move(lyap));
    if (cfg.output.format == OutputSpec::Format::csv) {
      atomic_write_text(dir / "shift.csv", shift_csv(rep.shift_track));
      atomic_write_text(dir / "lyapunov.csv", lyapunov_csv(rep.lyapunov));
    }
    std::cout << "zeta_inf = " << format_double(rep.zeta_inf)
              << ", final sup distance = " << format_double(rep.final_sup_dist)
              << "\n";
  } else if (!traj.aborted) {
    j.set("convergence_report",
          Json::string("skipped: fewer than 10 snapshots"));
  }
  atomic_write_text(dir / "convergence.json", j.dump() + "\n");

  std::cout << "wrote " << (dir / "trajectory.bin").string() << " ("
            << traj.snapshots.size() << " snapshots), "
            << (dir / "convergence.json").string() << "\n";
  if (traj.aborted) {
    throw NonConvergence("simulation aborted at t = " +
                         format_double(traj.snapshots.back().t) + ": " +
                         traj.abort_reason);
  }
  return 0;
}

int cmd_diagnose(const CommonOpts& opt) {
  const RunConfig cfg = load_config(opt);
  const ReactionSpec spec = resolve_reaction(cfg);
  const fs::path traj_path = opt.trajectory_path.empty()
                                 ? fs::path(cfg.output.dir) / "trajectory.bin"
                                 : fs::path(opt.trajectory_path);
  const Trajectory traj = read_trajectory_bin(traj_path);
  if (traj.snapshots.empty()) {
    throw ConfigError("trajectory " + traj_path.string() + " has no snapshots");
  }

  const SpeedResult res = solve_speed(spec, cfg.wave);
  const ProfileTable profile = reconstruct_profile(spec, res, cfg.profile);

  const EnvelopeParams env = build_envelopes(
      spec, profile, traj.snapshots.front().v, traj.domain, cfg.eta);
  const double violation = check_comparison(traj, env, profile);

  const auto [a, b] = cfg.interval_a
                          ? std::pair<double, double>{*cfg.interval_a, *cfg.interval_b}
                          : diagnostic_interval(profile, traj.domain, env);

  std::vector<LyapunovSample> lyap =
      lyapunov_series(spec, traj, res.c_star, a, b);
  std::vector<ShiftSample> shifts;
  shifts.reserve(traj.snapshots.size());
  for (const State& s : traj.snapshots) {
    shifts.push_back(estimate_shift(s, traj.domain, profile));
  }

  Json j = Json::object();
  j.set("schema_version", Json::integer(1));
  j.set("reaction", reaction_json(spec));
  j.set("c_star", Json::number(res.c_star));
  j.set("trajectory", Json::string(traj_path.string()));
  Json envj = Json::object();
  envj.set("eta", Json::number(env.eta));
  envj.set("delta", Json::number(env.delta));
  envj.set("mu", Json::number(env.mu));
  envj.set("nu", Json::number(env.nu));
  envj.set("omega", Json::number(env.omega));
  envj.set("L", Json::number(env.L));
  envj.set("q0_sub", Json::number(env.q0_sub));
  envj.set("q0_sup", Json::number(env.q0_sup));
  envj.set("z_star", Json::number(env.z_star));
  envj.set("xi_inf_sub", Json::number(env.xi_inf_sub));
  envj.set("xi_inf_sup", Json::number(env.xi_inf_sup));
  j.set("envelopes", std::move(envj));
  j.set("comparison_violation", Json::number(violation));
  j.set("interval_a", Json::number(a));
  j.set("interval_b", Json::number(b));
  Json track = Json::array();
  for (const ShiftSample& s : shifts) track.push(shift_json(s));
  j.set("shift_track", std::move(track));
  Json lyapj = Json::array();
  for (const LyapunovSample& s : lyap) lyapj.push(lyapunov_json(s));
  j.set("lyapunov", std::move(lyapj));

  const fs::path dir(cfg.output.dir);
  atomic_write_text(dir / "diagnose.json", j.dump() + "\n");
  if (cfg.output.format == OutputSpec::Format::csv) {
    atomic_write_text(dir / "shift.csv", shift_csv(shifts));
    atomic_write_text(dir / "lyapunov.csv", lyapunov_csv(lyap));
  }

  std::cout << "comparison violation = " << format_double(violation)
            << ", zeta(t_end) = " << format_double(shifts.back().zeta)
            << "\nwrote " << (dir / "diagnose.json").string() << "\n";
  return 0;
}

int cmd_sweep(const CommonOpts& opt) {
  const RunConfig cfg = load_config(opt);
  if (cfg.reaction.kind == ReactionSpec::Kind::user_table) {
    throw ConfigError("sweep needs an analytic reaction kind (cubic or holder)");
  }
  const bool sweep_s0 = cfg.sweep.parameter == SweepSpec::Parameter::s0;

  std::vector<double> values(static_cast<std::size_t>(cfg.sweep.count));
  for (int k = 0; k < cfg.sweep.count; ++k) {
    values[static_cast<std::size_t>(k)] =
        cfg.sweep.from +
        (cfg.sweep.to - cfg.sweep.from) * k / (cfg.sweep.count - 1);
  }

  struct Point {
    double value = 0.0;
    bool ok = false;
    SpeedResult res;
    std::string error;
  };

  auto run_point = [&](double value) {
    Point p;
    p.value = value;
    ReactionSpec point_spec =
        sweep_s0 ? (cfg.reaction.kind == ReactionSpec::Kind::cubic
                        ? ReactionSpec::cubic(value)
                        : ReactionSpec::holder(value, cfg.reaction.alpha0,
                                               cfg.reaction.alpha1))
                 : ReactionSpec::holder(cfg.reaction.s0, value, value);
    try {
      p.res = solve_speed(point_spec, cfg.wave);
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    return p;
  };

  // Points are independent; evaluate them concurrently and collect in the
  // original grid order so the emitted table is deterministic.
  std::vector<std::future<Point>> futures;
  futures.reserve(values.size());
  for (double value : values) {
    futures.push_back(std::async(std::launch::async, run_point, value));
  }
  std::vector<Point> points;
  points.reserve(values.size());
  for (auto& f : futures) points.push_back(f.get());

  const std::string parameter = sweep_s0 ? "s0" : "alpha";
  std::vector<std::vector<std::string>> rows;
  Json items = Json::array();
  bool all_ok = true;
  for (const Point& p : points) {
    all_ok = all_ok && p.ok;
    rows.push_back({parameter, format_double(p.value),
                    p.ok ? format_double(p.res.c_star) : std::string(),
                    p.ok ? format_double(p.res.identity_residual) : std::string(),
                    p.ok ? std::to_string(p.res.iterations) : std::string(),
                    p.ok ? "ok" : p.error});
    Json item = Json::object();
    item.set("parameter", Json::string(parameter));
    item.set("value", Json::number(p.value));
    if (p.ok) {
      item.set("c_star", Json::number(p.res.c_star));
      item.set("identity_residual", Json::number(p.res.identity_residual));
      item.set("iterations", Json::integer(p.res.iterations));
    }
    item.set("status", Json::string(p.ok ? "ok" : p.error));
    items.push(std::move(item));
  }

  const fs::path dir(cfg.output.dir);
  atomic_write_text(
      dir / "sweep.csv",
      csv_table({"parameter", "value", "c_star", "identity_residual",
                 "iterations", "status"},
                rows));
  if (cfg.output.format == OutputSpec::Format::json) {
    Json j = Json::object();
    j.set("schema_version", Json::integer(1));
    j.set("parameter", Json::string(parameter));
    j.set("points", std::move(items));
    atomic_write_text(dir / "sweep.json", j.dump() + "\n");
  }

  std::cout << "wrote " << (dir / "sweep.csv").string() << " ("
            << points.size() << " points)\n";
  if (!all_ok) {
    std::string msg = "sweep points failed:";
    for (const Point& p : points) {
      if (!p.ok) {
        msg += "\n  " + parameter + " = " + format_double(p.value) + ": " +
               p.error;
      }
    }
    throw NonConvergence(msg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Travelling waves, moving-frame dynamics and convergence diagnostics\n"
      "for bistable reaction-diffusion equations with non-Lipschitz reaction "
      "terms."};
  app.require_subcommand(1);

  CommonOpts opt;
  int rc = 0;

  CLI::App* hyp = app.add_subcommand(
      "hypotheses", "Check the structural hypotheses of the reaction term");
  add_common(hyp, opt);

  CLI::App* speed = app.add_subcommand(
      "speed", "Compute the wave speed c* by phase-plane bisection");
  add_common(speed, opt);

  CLI::App* profile = app.add_subcommand(
      "profile", "Reconstruct the travelling-wave profile U(z)");
  add_common(profile, opt);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Evolve initial data in the moving frame and report "
                  "convergence to the wave");
  add_common(simulate, opt);

  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "Envelope, Lyapunov and shift diagnostics for a stored "
                  "trajectory");
  add_common(diagnose, opt);
  diagnose->add_option("--trajectory", opt.trajectory_path,
                       "Trajectory container (defaults to <out>/trajectory.bin)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Tabulate c* over a parameter grid ([sweep] section)");
  add_common(sweep, opt);

  hyp->callback([&] { rc = cmd_hypotheses(opt); });
  speed->callback([&] { rc = cmd_speed(opt); });
  profile->callback([&] { rc = cmd_profile(opt); });
  simulate->callback([&] { rc = cmd_simulate(opt); });
  diagnose->callback([&] { rc = cmd_diagnose(opt); });
  sweep->callback([&] { rc = cmd_sweep(opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  } catch (const HypothesisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return rc;
}
