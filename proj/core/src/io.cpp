#include "fkpp/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "fkpp/errors.hpp"

namespace fkpp {

static_assert(std::endian::native == std::endian::little,
              "the trajectory container assumes a little-endian host");

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

}  // namespace

Json Json::object() {
  Json j;
  j.type_ = Type::object;
  return j;
}

Json Json::array() {
  Json j;
  j.type_ = Type::array;
  return j;
}

Json Json::number(double v) {
  if (!std::isfinite(v)) {
    throw ConfigError("non-finite value passed to Json::number; use "
                      "real_or_infinite for extended reals");
  }
  Json j;
  j.type_ = Type::number;
  j.scalar_ = format_double(v);
  return j;
}

Json Json::integer(long long v) {
  Json j;
  j.type_ = Type::integer;
  j.scalar_ = std::to_string(v);
  return j;
}

Json Json::boolean(bool v) {
  Json j;
  j.type_ = Type::boolean;
  j.scalar_ = v ? "true" : "false";
  return j;
}

Json Json::string(std::string v) {
  Json j;
  j.type_ = Type::string;
  j.scalar_ = std::move(v);
  return j;
}

Json Json::real_or_infinite(double v) {
  if (std::isinf(v)) return Json::string(v > 0 ? "infinite" : "-infinite");
  return Json::number(v);
}

Json& Json::set(const std::string& key, Json v) {
  if (type_ != Type::object) throw ConfigError("Json::set on a non-object");
  members_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  if (type_ != Type::array) throw ConfigError("Json::push on a non-array");
  elements_.push_back(std::move(v));
  return *this;
}

void Json::dump_to(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (type_) {
    case Type::object: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        out += pad;
        escape_into(out, members_[i].first);
        out += ": ";
        members_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
        out += '\n';
      }
      out += close_pad;
      out += '}';
      return;
    }
    case Type::array: {
      if (elements_.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < elements_.size(); ++i) {
        out += pad;
        elements_[i].dump_to(out, indent, depth + 1);
        if (i + 1 < elements_.size()) out += ',';
        out += '\n';
      }
      out += close_pad;
      out += ']';
      return;
    }
    case Type::string:
      escape_into(out, scalar_);
      return;
    case Type::number:
    case Type::integer:
    case Type::boolean:
      out += scalar_;
      return;
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  return out;
}

void atomic_write_text(const fs::path& path, const std::string& content) {
  const fs::path parent = path.parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError("cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) {
      throw ConfigError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot move " + tmp.string() + " into place: " +
                      ec.message());
  }
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw ConfigError("csv row has " + std::to_string(row.size()) +
                        " cells; the header has " +
                        std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string trim_ws(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& field, double& out) {
  const std::string t = trim_ws(field);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

std::vector<std::pair<double, double>> parse_table_csv(const std::string& text,
                                                       const std::string& context) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  while (!lines.empty() && trim_ws(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) {
    throw ConfigError(context + ": CSV input is empty");
  }

  std::vector<std::pair<double, double>> out;
  std::vector<std::string> problems;
  for (std::size_t ln = 2; ln <= lines.size(); ++ln) {
    const std::string line = trim_ws(lines[ln - 1]);
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    if (c1 == std::string::npos) {
      problems.push_back("line " + std::to_string(ln) +
                         ": expected at least 2 comma-separated columns");
      continue;
    }
    std::size_t c2 = line.find(',', c1 + 1);
    if (c2 == std::string::npos) c2 = line.size();
    const std::string f0 = line.substr(0, c1);
    const std::string f1 = line.substr(c1 + 1, c2 - c1 - 1);
    double x = 0.0;
    double y = 0.0;
    bool ok = true;
    if (!parse_number(f0, x)) {
      problems.push_back("line " + std::to_string(ln) +
                         ": expected a number in column 1, got '" +
                         trim_ws(f0) + "'");
      ok = false;
    }
    if (!parse_number(f1, y)) {
      problems.push_back("line " + std::to_string(ln) +
                         ": expected a number in column 2, got '" +
                         trim_ws(f1) + "'");
      ok = false;
    }
    if (ok) out.emplace_back(x, y);
  }
  if (!problems.empty()) {
    std::string msg = context + ": malformed CSV (";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i) msg += "; ";
      msg += problems[i];
    }
    msg += ")";
    throw ConfigError(msg);
  }
  return out;
}

namespace {

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(bytes));
}

bool read_raw(std::ifstream& in, void* data, std::size_t bytes) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  return static_cast<std::size_t>(in.gcount()) == bytes;
}

}  // namespace

void write_trajectory_bin(const fs::path& path, const Trajectory& traj) {
  const fs::path parent = path.parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");

  const std::uint64_t n_cells = static_cast<std::uint64_t>(traj.domain.n_cells);
  const double dz = traj.domain.dz();
  const double z_min = traj.domain.z_min;
  write_raw(out, &n_cells, sizeof(n_cells));
  write_raw(out, &dz, sizeof(dz));
  write_raw(out, &z_min, sizeof(z_min));

  const std::size_t n_nodes = static_cast<std::size_t>(traj.domain.n_nodes());
  for (const State& s : traj.snapshots) {
    if (s.v.size() != n_nodes) {
      throw ConfigError("snapshot at t = " + format_double(s.t) + " has " +
                        std::to_string(s.v.size()) + " nodes; the domain has " +
                        std::to_string(n_nodes));
    }
    write_raw(out, &s.t, sizeof(s.t));
    write_raw(out, s.v.data(), n_nodes * sizeof(double));
  }
  out.flush();
  if (!out.good()) throw ConfigError("write failed for " + path.string());
}

Trajectory read_trajectory_bin(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());

  std::uint64_t n_cells = 0;
  double dz = 0.0;
  double z_min = 0.0;
  if (!read_raw(in, &n_cells, sizeof(n_cells)) ||
      !read_raw(in, &dz, sizeof(dz)) || !read_raw(in, &z_min, sizeof(z_min))) {
    throw ConfigError("truncated trajectory file " + path.string() +
                      ": incomplete header");
  }
  if (n_cells < 1 || n_cells > (1ull << 31) || !(dz > 0.0) ||
      !std::isfinite(dz) || !std::isfinite(z_min)) {
    throw ConfigError("corrupt trajectory header in " + path.string());
  }

  Trajectory traj;
  traj.domain.n_cells = static_cast<int>(n_cells);
  traj.domain.z_min = z_min;
  traj.domain.z_max = z_min + dz * static_cast<double>(n_cells);

  const std::size_t n_nodes = n_cells + 1;
  while (true) {
    double t = 0.0;
    in.read(reinterpret_cast<char*>(&t), sizeof(t));
    if (in.gcount() == 0) break;  // clean end of file
    if (static_cast<std::size_t>(in.gcount()) != sizeof(t)) {
      throw ConfigError("truncated trajectory file " + path.string() +
                        ": partial snapshot header");
    }
    State s;
    s.t = t;
    s.v.resize(n_nodes);
    if (!read_raw(in, s.v.data(), n_nodes * sizeof(double))) {
      throw ConfigError("truncated trajectory file " + path.string() +
                        ": snapshot " + std::to_string(traj.snapshots.size()) +
                        " is incomplete");
    }
    traj.snapshots.push_back(std::move(s));
  }
  return traj;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,z,v\n";
  for (const State& s : traj.snapshots) {
    const std::string t = format_double(s.t);
    for (int i = 0; i < traj.domain.n_nodes(); ++i) {
      out += t;
      out += ',';
      out += format_double(traj.domain.z(i));
      out += ',';
      out += format_double(s.v[static_cast<std::size_t>(i)]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace fkpp
