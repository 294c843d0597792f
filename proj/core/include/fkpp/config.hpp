#pragma once

#include "fkpp/diagnostics.hpp"
#include "fkpp/pde.hpp"
#include "fkpp/reaction.hpp"
#include "fkpp/wave_profile.hpp"
#include "fkpp/wave_system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fkpp {

struct SweepSpec {
  enum class Parameter { s0, alpha };
  Parameter parameter = Parameter::s0;
  double from = 0.6;
  double to = 0.9;
  int count = 7;
};

struct OutputSpec {
  std::string dir = "out";
  enum class Format { csv, json, binary } format = Format::csv;
};

/// One parsed run configuration (flat key=value with [section] headers).
struct RunConfig {
  ReactionSpec reaction = ReactionSpec::cubic(0.75);
  std::string reaction_table_path; ///< user_table: resolved by the caller
  WaveCtrl wave;
  ProfileCtrl profile;
  Domain domain;
  SchemeCtrl scheme;
  InitialData initial;
  std::string initial_table_path;  ///< initial_data kind=table
  double eta = 0.05;
  std::optional<double> interval_a, interval_b; ///< diagnostic interval override
  SweepSpec sweep;
  OutputSpec output;
};

struct ConfigIssue {
  int line = 0; ///< 1-based; 0 for cross-field issues
  std::string message;
};

struct ParseOutcome {
  std::optional<RunConfig> config; ///< set iff issues is empty
  std::vector<ConfigIssue> issues;
};

/// Parses and validates a config text. All problems are reported together
/// (unknown section/key, bad type, out-of-range value, missing required key),
/// each with its line number.
ParseOutcome parse_config(const std::string& text);

/// Renders the built-in defaults as a commented config (for --help / docs).
std::string default_config_text();

} // namespace fkpp
