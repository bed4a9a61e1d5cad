#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "relshift/scenarios/run.hpp"

namespace relshift::scenarios {

inline constexpr std::array<const char*, 14> kCsvColumns = {
    "t_e",  "los", "z_long_exact", "z_long0",   "z_ret", "z_rel0",    "z_corr",
    "z_total", "gamma", "eta",       "plob_bits", "z_gr",  "deviation", "error"};
inline constexpr const char* kNull = "NA";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : kNull; }

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

/// Splits one RFC-4180 record; `in` supplies continuation lines for quoted newlines.
inline std::vector<std::string> split_record(std::string line, std::istream& in) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (quoted) {
        std::string more;
        if (!std::getline(in, more)) throw IoError("unterminated quoted CSV field");
        cur += '\n';
        line = more;
        i = static_cast<std::size_t>(-1);
        continue;
      }
      break;
    }
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_number(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw IoError("malformed CSV number '" + s + "'");
  return v;
}

inline std::optional<double> parse_optional(const std::string& s) {
  if (s == kNull) return std::nullopt;
  return parse_number(s);
}

}  // namespace detail

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << "\n";
  for (const ResultRow& r : rows) {
    using detail::number;
    using detail::optional_number;
    out << number(r.t_e) << ',' << (r.los ? 1 : 0) << ',' << number(r.z_long_exact) << ',' << number(r.z_long0)
        << ',' << number(r.z_ret) << ',' << number(r.z_rel0) << ',' << number(r.z_corr) << ',' << number(r.z_total)
        << ',' << optional_number(r.gamma) << ',' << optional_number(r.eta) << ',' << optional_number(r.plob_bits)
        << ',' << optional_number(r.z_gr) << ',' << optional_number(r.deviation) << ',' << detail::quote(r.error)
        << "\n";
  }
}

inline std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV input");
  const auto header = detail::split_record(line, in);
  if (header.size() != kCsvColumns.size()) throw IoError("unexpected CSV header");
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != kCsvColumns[i]) throw IoError("unexpected CSV column '" + header[i] + "'");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_record(line, in);
    if (f.size() != kCsvColumns.size()) throw IoError("CSV record has the wrong number of fields");
    ResultRow r;
    r.t_e = detail::parse_number(f[0]);
    if (f[1] != "0" && f[1] != "1") throw IoError("malformed los flag '" + f[1] + "'");
    r.los = f[1] == "1";
    r.z_long_exact = detail::parse_number(f[2]);
    r.z_long0 = detail::parse_number(f[3]);
    r.z_ret = detail::parse_number(f[4]);
    r.z_rel0 = detail::parse_number(f[5]);
    r.z_corr = detail::parse_number(f[6]);
    r.z_total = detail::parse_number(f[7]);
    r.gamma = detail::parse_optional(f[8]);
    r.eta = detail::parse_optional(f[9]);
    r.plob_bits = detail::parse_optional(f[10]);
    r.z_gr = detail::parse_optional(f[11]);
    r.deviation = detail::parse_optional(f[12]);
    r.error = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Gnuplot-style blocks: one indexed block per series, blank line at every LOS gap.
inline void write_plotdata(const std::vector<ResultRow>& rows, std::ostream& out) {
  struct Series {
    const char* name;
    std::function<std::optional<double>(const ResultRow&)> value;
  };
  const std::vector<Series> series = {
      {"z_rel0", [](const ResultRow& r) { return std::optional<double>(r.z_rel0); }},
      {"z_ret", [](const ResultRow& r) { return std::optional<double>(r.z_ret); }},
      {"plob_bits", [](const ResultRow& r) { return r.plob_bits; }},
  };
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (s) out << "\n\n";
    out << "# t_e " << series[s].name << "\n";
    bool in_gap = false;
    for (const ResultRow& r : rows) {
      const auto v = series[s].value(r);
      if (!r.los || !r.error.empty() || !v) {
        if (!in_gap) out << "\n";
        in_gap = true;
        continue;
      }
      in_gap = false;
      out << detail::number(r.t_e) << ' ' << detail::number(*v) << "\n";
    }
  }
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw IoError("no rows to write");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_csv(rows, f);
  if (!f) throw IoError("write to '" + path + "' failed");
}

inline std::vector<ResultRow> load_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  return read_csv(f);
}

inline void emit_plotdata(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw IoError("no rows to write");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_plotdata(rows, f);
  if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace relshift::scenarios
