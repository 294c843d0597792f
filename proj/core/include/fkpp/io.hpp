#pragma once

#include "fkpp/pde.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace fkpp {

/// 17-significant-digit decimal form (round-trips IEEE doubles exactly,
/// byte-stable across runs). Not for NaN/inf; callers encode those explicitly.
std::string format_double(double x);

/// Minimal deterministic JSON document builder: insertion-ordered objects,
/// doubles via format_double. Non-finite reals must never reach number();
/// use real_or_infinite() for extended-real fields.
class Json {
public:
  static Json object();
  static Json array();
  static Json number(double v);
  static Json integer(long long v);
  static Json boolean(bool v);
  static Json string(std::string v);
  /// "infinite" (string) for +-inf, number otherwise.
  static Json real_or_infinite(double v);

  Json& set(const std::string& key, Json v); ///< object member (insertion order)
  Json& push(Json v);                        ///< array element
  std::string dump(int indent = 2) const;

private:
  enum class Type { object, array, number, integer, boolean, string } type_ = Type::object;
  std::string scalar_;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> elements_;
  void dump_to(std::string& out, int indent, int depth) const;
};

/// Writes to a temporary file in the target directory, then renames.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

/// Comma separator, header row, LF line ends, '.' decimal point, cells via
/// format_double. An empty optional-style cell is the empty string.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

/// First two numeric columns of a CSV with a header row; used for tabulated
/// reactions and tabulated initial data. Throws ConfigError listing every
/// malformed line (1-based numbers, header = line 1).
std::vector<std::pair<double, double>> parse_table_csv(const std::string& text,
                                                       const std::string& context);

/// Trajectory container format (little-endian):
///   uint64 n_cells, double dz, double z_min,
///   then per snapshot: double t, (n_cells+1) doubles of node values.
/// Snapshot count is implied by the file length.
void write_trajectory_bin(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_bin(const std::filesystem::path& path);

/// Long-format CSV: t,z,v (one row per node per snapshot).
std::string trajectory_csv(const Trajectory& traj);

} // namespace fkpp
