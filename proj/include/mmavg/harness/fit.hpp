#pragma once

#include "mmavg/harness/records.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace mmavg {

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;  ///< log E = slope log dt + intercept (natural logs)
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Least-squares slope of log E against log dt. Blowups, non-finite errors and
/// points with E <= floor_factor * reference_accuracy are left out; at least
/// three points spanning a decade of dt must remain.
inline OrderFit fit_order(const std::vector<ErrorRecord>& recs, double reference_accuracy = 0.0,
                          double floor_factor = 10.0) {
  std::vector<std::pair<double, double>> pts;
  OrderFit fit;
  for (const auto& r : recs) {
    if (r.blowup() || !std::isfinite(r.error) || !(r.error > 0.0) || !(r.dt > 0.0) ||
        r.error <= floor_factor * reference_accuracy) {
      ++fit.excluded;
      continue;
    }
    pts.push_back({std::log(r.dt), std::log(r.error)});
  }
  if (pts.size() < 3) throw ValidationError("fit_order: fewer than 3 usable points");
  double lo = pts.front().first, hi = lo;
  for (const auto& p : pts) {
    lo = std::min(lo, p.first);
    hi = std::max(hi, p.first);
  }
  if (hi - lo < std::log(10.0) * (1.0 - 1e-12)) throw ValidationError("fit_order: usable points span less than a decade");
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.first;
    my += p.second;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.first - mx) * (p.first - mx);
    sxy += (p.first - mx) * (p.second - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.used = pts.size();
  return fit;
}

/// One fit per eps value.
inline std::map<double, OrderFit> fit_order_by_eps(const std::vector<ErrorRecord>& recs,
                                                   double reference_accuracy = 0.0,
                                                   double floor_factor = 10.0) {
  std::map<double, std::vector<ErrorRecord>> groups;
  for (const auto& r : recs) groups[r.eps].push_back(r);
  std::map<double, OrderFit> out;
  for (const auto& [eps, g] : groups) out[eps] = fit_order(g, reference_accuracy, floor_factor);
  return out;
}

/// For each dt, max/min of the error across eps (inf if any error is non-finite or zero).
inline std::map<double, double> eps_spread_by_dt(const std::vector<ErrorRecord>& recs) {
  std::map<double, std::pair<double, double>> mm;
  for (const auto& r : recs) {
    auto it = mm.find(r.dt);
    if (it == mm.end()) it = mm.emplace(r.dt, std::make_pair(r.error, r.error)).first;
    it->second.first = std::min(it->second.first, r.error);
    it->second.second = std::max(it->second.second, r.error);
  }
  std::map<double, double> out;
  for (const auto& [dt, p] : mm) {
    const bool ok = std::isfinite(p.second) && p.first > 0.0;
    out[dt] = ok ? p.second / p.first : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace mmavg
