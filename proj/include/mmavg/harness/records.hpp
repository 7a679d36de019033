#pragma once

#include "mmavg/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mmavg {

/// One (dt, eps) cell of a sweep.
struct ErrorRecord {
  std::string problem;
  std::string scheme;
  int order = -1;  ///< -1 for direct runs
  double eps = 0.0;
  double dt = 0.0;
  double error = 0.0;  ///< +inf on blowup
  double runtime_s = 0.0;
  std::vector<std::string> flags;
  double min_population = std::numeric_limits<double>::quiet_NaN();

  bool has_flag(const std::string& f) const {
    for (const auto& x : flags)
      if (x == f) return true;
    return false;
  }
  bool blowup() const { return has_flag("blowup") || !std::isfinite(error); }

  friend bool operator==(const ErrorRecord& a, const ErrorRecord& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.problem == b.problem && a.scheme == b.scheme && a.order == b.order && same(a.eps, b.eps) &&
           same(a.dt, b.dt) && same(a.error, b.error) && same(a.runtime_s, b.runtime_s) && a.flags == b.flags &&
           same(a.min_population, b.min_population);
  }
};

/// Shortest round-trip text for a double; "inf", "-inf", "nan" for the specials.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ValidationError("bad number '" + s + "'");
  return x;
}

inline constexpr const char* kRecordHeader = "problem,scheme,n,eps,dt,error,runtime_s,flags,min_population";

inline void write_records_csv(const std::vector<ErrorRecord>& recs, std::ostream& out) {
  out << kRecordHeader << '\n';
  for (const auto& r : recs) {
    std::string flags;
    for (std::size_t k = 0; k < r.flags.size(); ++k) flags += (k ? ";" : "") + r.flags[k];
    out << r.problem << ',' << r.scheme << ',' << r.order << ',' << format_double(r.eps) << ','
        << format_double(r.dt) << ',' << format_double(r.error) << ',' << format_double(r.runtime_s) << ',' << flags
        << ',' << (std::isnan(r.min_population) ? std::string() : format_double(r.min_population)) << '\n';
  }
}

inline void write_records_csv(const std::vector<ErrorRecord>& recs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path);
  write_records_csv(recs, out);
  if (!out) throw Error("write failed: " + path);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::vector<ErrorRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) throw ValidationError("unexpected CSV header");
  std::vector<ErrorRecord> recs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw ValidationError("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    ErrorRecord r;
    r.problem = f[0];
    r.scheme = f[1];
    r.order = std::stoi(f[2]);
    r.eps = parse_double(f[3]);
    r.dt = parse_double(f[4]);
    r.error = parse_double(f[5]);
    r.runtime_s = parse_double(f[6]);
    if (!f[7].empty()) r.flags = split(f[7], ';');
    r.min_population = parse_double(f[8]);
    recs.push_back(std::move(r));
  }
  return recs;
}

inline std::vector<ErrorRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_records_csv(in);
}

/// Plot data with one block per series, blocks separated by two blank lines.
/// by_dt = true: one series per dt, error against eps; otherwise one per eps, error against dt.
inline void write_series(const std::vector<ErrorRecord>& recs, bool by_dt, std::ostream& out) {
  std::map<double, std::vector<std::pair<double, double>>> series;
  for (const auto& r : recs) series[by_dt ? r.dt : r.eps].push_back({by_dt ? r.eps : r.dt, r.error});
  bool first = true;
  for (auto& [key, pts] : series) {
    if (!first) out << "\n\n";
    first = false;
    out << "# " << (by_dt ? "dt=" : "eps=") << format_double(key) << '\n';
    out << (by_dt ? "# eps error" : "# dt error") << '\n';
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, e] : pts) out << format_double(x) << ' ' << format_double(e) << '\n';
  }
}

inline void write_series(const std::vector<ErrorRecord>& recs, bool by_dt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path);
  write_series(recs, by_dt, out);
}

}  // namespace mmavg
