#include "fkpp/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fkpp {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

const char* kAnalyticExtension = "cubic polynomial s(1-s)(s-s0) on all of R";
const char* kClampedExtension = "f(s) = -s for s < 0, f(s) = 1 - s for s > 1";

/// Accumulates values, line numbers and problems over one pass of the text,
/// then runs the cross-field checks that need the final values.
struct Parser {
  RunConfig cfg;
  std::vector<ConfigIssue> issues;
  std::set<std::string> seen;

  // Lines where cross-field-relevant keys appeared (0 = still the default).
  int ln_s0 = 0, ln_eta = 0, ln_interval_a = 0, ln_interval_b = 0;
  int ln_eps_start = 0, ln_u_match = 0;
  int ln_reaction_kind = 0, ln_reaction_table = 0;
  int ln_initial_kind = 0, ln_initial_table = 0;
  int ln_sweep_from = 0, ln_sweep_to = 0, ln_sweep_parameter = 0;
  int ln_z_min = 0, ln_z_max = 0;

  void issue(int line, std::string msg) {
    issues.push_back({line, std::move(msg)});
  }

  std::optional<double> number_or_issue(const std::string& key,
                                        const std::string& val, int ln) {
    auto x = to_number(val);
    if (!x) issue(ln, key + ": expected a number, got '" + val + "'");
    return x;
  }

  std::optional<long long> integer_or_issue(const std::string& key,
                                            const std::string& val, int ln) {
    auto x = to_integer(val);
    if (!x) issue(ln, key + ": expected an integer, got '" + val + "'");
    return x;
  }

  std::optional<bool> bool_or_issue(const std::string& key,
                                    const std::string& val, int ln) {
    if (val == "true") return true;
    if (val == "false") return false;
    issue(ln, key + ": expected true or false, got '" + val + "'");
    return std::nullopt;
  }

  void positive_number(double& dst, const std::string& key,
                       const std::string& val, int ln) {
    if (auto x = number_or_issue(key, val, ln)) {
      if (*x > 0.0) {
        dst = *x;
      } else {
        issue(ln, key + " must be positive, got " + val);
      }
    }
  }

  bool handle_reaction(const std::string& key, const std::string& val, int ln) {
    if (key == "kind") {
      ln_reaction_kind = ln;
      if (val == "cubic") {
        cfg.reaction.kind = ReactionSpec::Kind::cubic;
        cfg.reaction.extension_rule = kAnalyticExtension;
      } else if (val == "holder") {
        cfg.reaction.kind = ReactionSpec::Kind::holder_bistable;
        cfg.reaction.extension_rule = kClampedExtension;
      } else if (val == "table") {
        cfg.reaction.kind = ReactionSpec::Kind::user_table;
        cfg.reaction.extension_rule = kClampedExtension;
      } else {
        issue(ln, "kind must be one of cubic, holder, table; got '" + val + "'");
      }
    } else if (key == "s0") {
      ln_s0 = ln;
      if (auto x = number_or_issue(key, val, ln)) {
        if (*x > 0.0 && *x < 1.0) {
          cfg.reaction.s0 = *x;
        } else {
          issue(ln, "s0 must lie in (0,1), got " + val);
        }
      }
    } else if (key == "alpha0" || key == "alpha1") {
      if (auto x = number_or_issue(key, val, ln)) {
        if (*x > 0.0 && *x <= 1.0) {
          (key == "alpha0" ? cfg.reaction.alpha0 : cfg.reaction.alpha1) = *x;
        } else {
          issue(ln, key + " must lie in (0,1], got " + val);
        }
      }
    } else if (key == "table") {
      ln_reaction_table = ln;
      if (val.empty()) {
        issue(ln, "table: expected a CSV path");
      } else {
        cfg.reaction_table_path = val;
      }
    } else {
      return false;
    }
    return true;
  }

  bool handle_wave(const std::string& key, const std::string& val, int ln) {
    if (key == "eps_start") {
      ln_eps_start = ln;
      positive_number(cfg.wave.eps_start, key, val, ln);
    } else if (key == "max_step") {
      positive_number(cfg.wave.max_step, key, val, ln);
    } else if (key == "rk_tol") {
      positive_number(cfg.wave.rk_tol, key, val, ln);
    } else if (key == "min_step") {
      positive_number(cfg.wave.min_step, key, val, ln);
    } else if (key == "balance_tol") {
      positive_number(cfg.wave.balance_tol, key, val, ln);
    } else if (key == "bisect_tol") {
      positive_number(cfg.wave.bisect_tol, key, val, ln);
    } else if (key == "max_bisect") {
      if (auto x = integer_or_issue(key, val, ln)) {
        if (*x >= 8) {
          cfg.wave.max_bisect = static_cast<int>(*x);
        } else {
          issue(ln, "max_bisect must be at least 8, got " + val);
        }
      }
    } else {
      return false;
    }
    return true;
  }

  bool handle_profile(const std::string& key, const std::string& val, int ln) {
    if (key == "points") {
      if (auto x = integer_or_issue(key, val, ln)) {
        if (*x >= 16) {
          cfg.profile.points = static_cast<int>(*x);
        } else {
          issue(ln, "points must be at least 16, got " + val);
        }
      }
    } else if (key == "u_match") {
      ln_u_match = ln;
      positive_number(cfg.profile.u_match, key, val, ln);
    } else if (key == "tail_tol") {
      positive_number(cfg.profile.tail_tol, key, val, ln);
    } else {
      return false;
    }
    return true;
  }

  bool handle_domain(const std::string& key, const std::string& val, int ln) {
    if (key == "z_min") {
      ln_z_min = ln;
      if (auto x = number_or_issue(key, val, ln)) cfg.domain.z_min = *x;
    } else if (key == "z_max") {
      ln_z_max = ln;
      if (auto x = number_or_issue(key, val, ln)) cfg.domain.z_max = *x;
    } else if (key == "n_cells") {
      if (auto x = integer_or_issue(key, val, ln)) {
        if (*x >= 4) {
          cfg.domain.n_cells = static_cast<int>(*x);
        } else {
          issue(ln, "n_cells must be at least 4, got " + val);
        }
      }
    } else {
      return false;
    }
    return true;
  }

  bool handle_scheme(const std::string& key, const std::string& val, int ln) {
    if (key == "kind") {
      if (val == "imex") {
        cfg.scheme.kind = SchemeCtrl::Kind::imex_fd;
      } else if (val == "splitting") {
        cfg.scheme.kind = SchemeCtrl::Kind::splitting_green;
      } else {
        issue(ln, "kind must be one of imex, splitting; got '" + val + "'");
      }
    } else if (key == "dt") {
      positive_number(cfg.scheme.dt, key, val, ln);
    } else if (key == "theta") {
      if (auto x = number_or_issue(key, val, ln)) {
        if (*x >= 0.0 && *x <= 1.0) {
          cfg.scheme.theta = *x;
        } else {
          issue(ln, "theta must lie in [0,1], got " + val);
        }
      }
    } else if (key == "startup_steps") {
      if (auto x = integer_or_issue(key, val, ln)) {
        if (*x >= 0) {
          cfg.scheme.startup_steps = static_cast<int>(*x);
        } else {
          issue(ln, "startup_steps must be non-negative, got " + val);
        }
      }
    } else if (key == "kernel_cutoff_sigmas") {
      if (auto x = number_or_issue(key, val, ln)) {
        if (*x >= 2.0) {
          cfg.scheme.kernel_cutoff_sigmas = *x;
        } else {
          issue(ln, "kernel_cutoff_sigmas must be at least 2, got " + val);
        }
      }
    } else if (key == "t_end") {
      if (auto x = number_or_issue(key, val, ln)) {
        if (*x >= 0.0) {
          cfg.scheme.t_end = *x;
        } else {
          issue(ln, "t_end must be non-negative, got " + val);
        }
      }
    } else if (key == "snapshot_every") {
      positive_number(cfg.scheme.snapshot_every, key, val, ln);
    } else if (key == "waive_h5") {
      if (auto x = bool_or_issue(key, val, ln)) cfg.scheme.waive_h5 = *x;
    } else if (key == "reaction_off") {
      if (auto x = bool_or_issue(key, val, ln)) cfg.scheme.reaction_off = *x;
    } else {
      return false;
    }
    return true;
  }

  bool handle_initial(const std::string& key, const std::string& val, int ln) {
    if (key == "kind") {
      ln_initial_kind = ln;
      if (val == "step") {
        cfg.initial.kind = InitialData::Kind::step;
      } else if (val == "smoothed_step") {
        cfg.initial.kind = InitialData::Kind::smoothed_step;
      } else if (val == "profile_perturbation") {
        cfg.initial.kind = InitialData::Kind::profile_perturbation;
      } else if (val == "table") {
        cfg.initial.kind = InitialData::Kind::table;
      } else {
        issue(ln, "kind must be one of step, smoothed_step, "
                  "profile_perturbation, table; got '" + val + "'");
      }
    } else if (key == "at") {
      if (auto x = number_or_issue(key, val, ln)) cfg.initial.at = *x;
    } else if (key == "width") {
      positive_number(cfg.initial.width, key, val, ln);
    } else if (key == "epsilon") {
      if (auto x = number_or_issue(key, val, ln)) cfg.initial.epsilon = *x;
    } else if (key == "shift") {
      if (auto x = number_or_issue(key, val, ln)) cfg.initial.shift = *x;
    } else if (key == "table") {
      ln_initial_table = ln;
      if (val.empty()) {
        issue(ln, "table: expected a CSV path");
      } else {
        cfg.initial_table_path = val;
      }
    } else {
      return false;
    }
    return true;
  }

  bool handle_diagnostics(const std::string& key, const std::string& val,
                          int ln) {
    if (key == "eta") {
      ln_eta = ln;
      if (auto x = number_or_issue(key, val, ln)) cfg.eta = *x;
    } else if (key == "interval_a") {
      ln_interval_a = ln;
      if (auto x = number_or_issue(key, val, ln)) cfg.interval_a = *x;
    } else if (key == "interval_b") {
      ln_interval_b = ln;
      if (auto x = number_or_issue(key, val, ln)) cfg.interval_b = *x;
    } else {
      return false;
    }
    return true;
  }

  bool handle_sweep(const std::string& key, const std::string& val, int ln) {
    if (key == "parameter") {
      ln_sweep_parameter = ln;
      if (val == "s0") {
        cfg.sweep.parameter = SweepSpec::Parameter::s0;
      } else if (val == "alpha") {
        cfg.sweep.parameter = SweepSpec::Parameter::alpha;
      } else {
        issue(ln, "parameter must be one of s0, alpha; got '" + val + "'");
      }
    } else if (key == "from") {
      ln_sweep_from = ln;
      if (auto x = number_or_issue(key, val, ln)) cfg.sweep.from = *x;
    } else if (key == "to") {
      ln_sweep_to = ln;
      if (auto x = number_or_issue(key, val, ln)) cfg.sweep.to = *x;
    } else if (key == "count") {
      if (auto x = integer_or_issue(key, val, ln)) {
        if (*x >= 2) {
          cfg.sweep.count = static_cast<int>(*x);
        } else {
          issue(ln, "count must be at least 2, got " + val);
        }
      }
    } else {
      return false;
    }
    return true;
  }

  bool handle_output(const std::string& key, const std::string& val, int ln) {
    if (key == "dir") {
      if (val.empty()) {
        issue(ln, "dir: expected a directory path");
      } else {
        cfg.output.dir = val;
      }
    } else if (key == "format") {
      if (val == "csv") {
        cfg.output.format = OutputSpec::Format::csv;
      } else if (val == "json") {
        cfg.output.format = OutputSpec::Format::json;
      } else if (val == "binary") {
        cfg.output.format = OutputSpec::Format::binary;
      } else {
        issue(ln, "format must be one of csv, json, binary; got '" + val + "'");
      }
    } else {
      return false;
    }
    return true;
  }

  void handle(const std::string& section, const std::string& key,
              const std::string& val, int ln) {
    bool known = false;
    if (section == "reaction") {
      known = handle_reaction(key, val, ln);
    } else if (section == "wave") {
      known = handle_wave(key, val, ln);
    } else if (section == "profile") {
      known = handle_profile(key, val, ln);
    } else if (section == "domain") {
      known = handle_domain(key, val, ln);
    } else if (section == "scheme") {
      known = handle_scheme(key, val, ln);
    } else if (section == "initial") {
      known = handle_initial(key, val, ln);
    } else if (section == "diagnostics") {
      known = handle_diagnostics(key, val, ln);
    } else if (section == "sweep") {
      known = handle_sweep(key, val, ln);
    } else if (section == "output") {
      known = handle_output(key, val, ln);
    }
    if (!known) {
      issue(ln, "unknown key '" + key + "' in [" + section + "]");
    }
  }

  void cross_field_checks() {
    const double s0 = cfg.reaction.s0;
    const double eta_cap = std::min(s0, 1.0 - s0) / 3.0;
    if (!(cfg.eta > 0.0) || !(cfg.eta < eta_cap)) {
      issue(ln_eta != 0 ? ln_eta : ln_s0,
            "eta must satisfy 0 < eta < min(s0, 1-s0)/3 = " + fmt(eta_cap) +
                ", got " + fmt(cfg.eta));
    }

    if (cfg.interval_a.has_value() != cfg.interval_b.has_value()) {
      issue(ln_interval_a != 0 ? ln_interval_a : ln_interval_b,
            "interval_a and interval_b must be given together");
    } else if (cfg.interval_a && !(*cfg.interval_a < *cfg.interval_b)) {
      issue(ln_interval_b,
            "interval_a must lie below interval_b, got [" +
                fmt(*cfg.interval_a) + ", " + fmt(*cfg.interval_b) + "]");
    }

    if (cfg.reaction.kind == ReactionSpec::Kind::user_table &&
        cfg.reaction_table_path.empty()) {
      issue(ln_reaction_kind,
            "reaction kind=table needs table = <csv path> in [reaction]");
    }
    if (cfg.reaction.kind != ReactionSpec::Kind::user_table &&
        !cfg.reaction_table_path.empty()) {
      issue(ln_reaction_table,
            "a reaction table path is only valid with kind = table");
    }

    if (cfg.initial.kind == InitialData::Kind::table &&
        cfg.initial_table_path.empty()) {
      issue(ln_initial_kind,
            "initial kind=table needs table = <csv path> in [initial]");
    }
    if (cfg.initial.kind != InitialData::Kind::table &&
        !cfg.initial_table_path.empty()) {
      issue(ln_initial_table,
            "an initial table path is only valid with kind = table");
    }

    if (!(cfg.domain.z_max > cfg.domain.z_min)) {
      issue(ln_z_max != 0 ? ln_z_max : ln_z_min,
            "domain needs z_max > z_min, got [" + fmt(cfg.domain.z_min) +
                ", " + fmt(cfg.domain.z_max) + "]");
    }

    if (!(cfg.wave.eps_start < s0 / 2.0)) {
      issue(ln_eps_start,
            "eps_start must stay below s0/2 = " + fmt(s0 / 2.0) + ", got " +
                fmt(cfg.wave.eps_start));
    }

    const double u_match_cap = std::min(s0, 1.0 - s0) / 2.0;
    if (!(cfg.profile.u_match < u_match_cap)) {
      issue(ln_u_match,
            "u_match must stay below min(s0, 1-s0)/2 = " + fmt(u_match_cap) +
                ", got " + fmt(cfg.profile.u_match));
    }

    const bool sweep_s0 = cfg.sweep.parameter == SweepSpec::Parameter::s0;
    const double lo = std::min(cfg.sweep.from, cfg.sweep.to);
    const double hi = std::max(cfg.sweep.from, cfg.sweep.to);
    const bool range_ok = sweep_s0 ? (lo > 0.0 && hi < 1.0)
                                   : (lo > 0.0 && hi <= 1.0);
    if (!range_ok) {
      issue(ln_sweep_from != 0 ? ln_sweep_from : ln_sweep_to,
            std::string("sweep endpoints must lie in ") +
                (sweep_s0 ? "(0,1) for parameter s0" : "(0,1] for parameter alpha") +
                ", got [" + fmt(cfg.sweep.from) + ", " + fmt(cfg.sweep.to) + "]");
    }
  }
};

}  // namespace

ParseOutcome parse_config(const std::string& text) {
  Parser p;

  std::string section;
  bool section_known = true;
  int ln = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string raw = (nl == std::string::npos) ? text.substr(pos)
                                                : text.substr(pos, nl - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++ln;
    if (raw.empty() && pos > text.size()) break;  // no trailing pseudo-line

    const std::size_t comment = raw.find_first_of("#;");
    if (comment != std::string::npos) raw.erase(comment);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        p.issue(ln, "malformed section header '" + line + "'");
        section_known = false;
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> kSections = {
          "reaction", "wave",        "profile", "domain", "scheme",
          "initial",  "diagnostics", "sweep",   "output"};
      section_known = kSections.count(section) != 0;
      if (!section_known) {
        p.issue(ln, "unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      p.issue(ln, "expected key = value, got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      p.issue(ln, "expected key = value, got '" + line + "'");
      continue;
    }
    if (section.empty()) {
      p.issue(ln, "key '" + key + "' appears before any [section]");
      continue;
    }
    if (!section_known) continue;  // already reported at the header

    const std::string qualified = section + "." + key;
    if (!p.seen.insert(qualified).second) {
      p.issue(ln, "duplicate key '" + key + "' in [" + section + "]");
      continue;
    }
    p.handle(section, key, val, ln);
  }

  p.cross_field_checks();

  ParseOutcome out;
  out.issues = std::move(p.issues);
  if (out.issues.empty()) out.config = std::move(p.cfg);
  return out;
}

std::string default_config_text() {
  return
      "# fkpp run configuration (values shown are the built-in defaults)\n"
      "\n"
      "[reaction]\n"
      "kind = cubic             # cubic | holder | table\n"
      "s0 = 0.75                # interior zero of f, in (0,1)\n"
      "alpha0 = 1.0             # end exponent at s=0 (holder/table kinds)\n"
      "alpha1 = 1.0             # end exponent at s=1\n"
      "# table = reaction.csv   # kind=table only: CSV with columns s,f\n"
      "\n"
      "[wave]\n"
      "eps_start = 1e-4         # phase-plane start interval [0, eps]\n"
      "max_step = 1e-3          # cap on the adaptive step in r\n"
      "rk_tol = 1e-12           # per-step absolute error target\n"
      "min_step = 1e-12         # declare underflow below this step\n"
      "balance_tol = 1e-10      # |y(1)| below this counts as balanced\n"
      "bisect_tol = 1e-8        # bracket width target on the speed\n"
      "max_bisect = 200\n"
      "\n"
      "[profile]\n"
      "points = 512             # interior profile grid points\n"
      "u_match = 1e-3           # asymptotic tails take over outside\n"
      "tail_tol = 1e-6          # finite-endpoint decision threshold\n"
      "\n"
      "[domain]\n"
      "z_min = -40\n"
      "z_max = 40\n"
      "n_cells = 8000\n"
      "\n"
      "[scheme]\n"
      "kind = imex              # imex | splitting\n"
      "dt = 0.002\n"
      "theta = 0.5              # implicit weight of the linear part\n"
      "startup_steps = 2        # fully implicit steps before theta takes over\n"
      "kernel_cutoff_sigmas = 8 # splitting: Gaussian truncation radius\n"
      "t_end = 60\n"
      "snapshot_every = 0.1\n"
      "waive_h5 = false         # allow plateau-violating initial data\n"
      "reaction_off = false     # pure linear evolution (scheme checks)\n"
      "\n"
      "[initial]\n"
      "kind = step              # step | smoothed_step | profile_perturbation | table\n"
      "at = 0                   # step / smoothed_step location\n"
      "width = 1                # smoothed_step: tanh width\n"
      "epsilon = 0              # profile_perturbation: bump amplitude\n"
      "shift = 0                # profile_perturbation: profile translate\n"
      "# table = initial.csv    # kind=table only: CSV with columns z,v\n"
      "\n"
      "[diagnostics]\n"
      "eta = 0.05               # plateau margin; needs eta < min(s0,1-s0)/3\n"
      "# interval_a = -20       # override the automatic diagnostic interval\n"
      "# interval_b = 20\n"
      "\n"
      "[sweep]\n"
      "parameter = s0           # s0 | alpha\n"
      "from = 0.6\n"
      "to = 0.9\n"
      "count = 7\n"
      "\n"
      "[output]\n"
      "dir = out\n"
      "format = csv             # csv | json | binary\n";
}

}  // namespace fkpp
