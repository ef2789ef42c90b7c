// Copyright 2026 The Engage Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Returning churners and missed metrics (RCMM).
//
// A user is flagged as churned after k consecutive days without login. The
// flag is wrong whenever the user logs in again later; the curve below
// measures how often that happens and how much activity those returning
// users contribute afterwards, as a function of k.

#ifndef ENGAGE_RCMM_HPP_
#define ENGAGE_RCMM_HPP_

#include <algorithm>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "engage/common.hpp"
#include "engage/panel.hpp"

namespace engage {

struct ChurnEpisode {
  Date last_login;
  Date flag_day;  // last_login + k
  bool returned = false;
  std::optional<Date> return_day;

  bool operator==(const ChurnEpisode&) const = default;
};

/// Login gaps of a user, in time order, with the terminal gap to the panel
/// end last. A gap is the difference between consecutive login offsets.
struct LoginGap {
  int from = 0;  // offset of the login opening the gap
  int length = 0;
  bool returned = false;
};

inline std::vector<LoginGap> login_gaps(const UserPanel& user) {
  const auto logins = login_offsets(user);
  std::vector<LoginGap> gaps;
  for (std::size_t i = 0; i + 1 < logins.size(); ++i) {
    gaps.push_back({logins[i], logins[i + 1] - logins[i], true});
  }
  if (!logins.empty()) {
    gaps.push_back({logins.back(), user.length() - 1 - logins.back(), false});
  }
  return gaps;
}

/// Every login gap strictly longer than k days becomes one episode, flagged
/// k days after the login that opened it.
inline std::vector<ChurnEpisode> churn_flags(const UserPanel& user, int k) {
  if (k < 1) throw Error("churn horizon k must be >= 1");
  std::vector<ChurnEpisode> out;
  for (const auto& g : login_gaps(user)) {
    if (g.length <= k) continue;
    ChurnEpisode ep;
    ep.last_login = user.first_day + std::chrono::days{g.from};
    ep.flag_day = ep.last_login + std::chrono::days{k};
    ep.returned = g.returned;
    if (g.returned) ep.return_day = ep.last_login + std::chrono::days{g.length};
    out.push_back(ep);
  }
  return out;
}

inline std::vector<std::vector<ChurnEpisode>> churn_flags(const CohortPanel& panel, int k) {
  std::vector<std::vector<ChurnEpisode>> out;
  out.reserve(panel.users.size());
  for (const auto& u : panel.users) out.push_back(churn_flags(u, k));
  return out;
}

inline const std::vector<Metric>& default_missed_metrics() {
  static const std::vector<Metric> metrics = {Metric::connection_time_s, Metric::action_count,
                                              Metric::progression};
  return metrics;
}

inline std::vector<int> default_k_grid() {
  std::vector<int> grid(120);
  for (int i = 0; i < 120; ++i) grid[i] = i + 1;
  return grid;
}

struct RcmmCurve {
  std::string group;
  std::size_t users = 0;
  std::vector<int> k_grid;
  // Returning churners (first episode ends in a return) over group users.
  std::vector<double> returning_fraction;
  // Returning churners over users flagged at k; informational.
  std::vector<double> returning_share;
  std::vector<std::size_t> churners;
  std::vector<Metric> metrics;
  std::vector<std::vector<double>> missed_fraction;  // [metric][k index]
};

/// One curve per group, groups in lexicographic order.
inline std::vector<RcmmCurve> rcmm_curve(const CohortPanel& panel, std::span<const int> k_grid,
                                         std::span<const Metric> metrics) {
  if (k_grid.empty()) throw Error("k grid must not be empty");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1 || (i > 0 && k_grid[i] <= k_grid[i - 1])) {
      throw Error("k grid must be positive and strictly ascending");
    }
  }
  const std::size_t nk = k_grid.size();
  const std::size_t nm = metrics.size();
  std::vector<RcmmCurve> curves;
  for (const auto& group : panel.groups()) {
    RcmmCurve c;
    c.group = group;
    c.k_grid.assign(k_grid.begin(), k_grid.end());
    c.metrics.assign(metrics.begin(), metrics.end());
    std::vector<std::size_t> returning(nk, 0);
    c.churners.assign(nk, 0);
    std::vector<std::vector<double>> missed(nm, std::vector<double>(nk, 0.0));
    std::vector<double> totals(nm, 0.0);
    for (const auto& user : panel.users) {
      if (user.group != group) continue;
      ++c.users;
      const std::size_t n = user.days.size();
      // suffix[m][j] = sum of metric m over days j..n-1
      std::vector<std::vector<double>> suffix(nm, std::vector<double>(n + 1, 0.0));
      for (std::size_t m = 0; m < nm; ++m) {
        for (std::size_t j = n; j-- > 0;) {
          suffix[m][j] = suffix[m][j + 1] + metric_value(user.days[j], metrics[m]);
        }
        totals[m] += suffix[m][0];
      }
      // The first episode at horizon k is the first gap longer than k, i.e.
      // the first strict prefix maximum above k.
      std::vector<LoginGap> records;
      for (const auto& g : login_gaps(user)) {
        if (records.empty() || g.length > records.back().length) records.push_back(g);
      }
      std::size_t r = 0;
      for (std::size_t ki = 0; ki < nk; ++ki) {
        const int k = k_grid[ki];
        while (r < records.size() && records[r].length <= k) ++r;
        if (r == records.size()) break;
        const LoginGap& first = records[r];
        ++c.churners[ki];
        if (first.returned) ++returning[ki];
        const std::size_t after = static_cast<std::size_t>(first.from + k + 1);
        for (std::size_t m = 0; m < nm; ++m) {
          missed[m][ki] += after <= n ? suffix[m][after] : 0.0;
        }
      }
    }
    c.returning_fraction.resize(nk);
    c.returning_share.resize(nk);
    for (std::size_t ki = 0; ki < nk; ++ki) {
      c.returning_fraction[ki] =
          c.users == 0 ? 0.0 : static_cast<double>(returning[ki]) / static_cast<double>(c.users);
      c.returning_share[ki] = c.churners[ki] == 0 ? 0.0
                                                  : static_cast<double>(returning[ki]) /
                                                        static_cast<double>(c.churners[ki]);
    }
    c.missed_fraction.assign(nm, std::vector<double>(nk, 0.0));
    for (std::size_t m = 0; m < nm; ++m) {
      for (std::size_t ki = 0; ki < nk; ++ki) {
        c.missed_fraction[m][ki] = totals[m] > 0.0 ? missed[m][ki] / totals[m] : 0.0;
      }
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

enum class ChurnMethod { rcmm, ecdf_exo, ecdf_snp, ecdf_endo };

inline std::string_view to_string(ChurnMethod m) {
  switch (m) {
    case ChurnMethod::rcmm: return "rcmm";
    case ChurnMethod::ecdf_exo: return "ecdf_exo";
    case ChurnMethod::ecdf_snp: return "ecdf_snp";
    case ChurnMethod::ecdf_endo: return "ecdf_endo";
  }
  return "";
}

struct RcmmThresholds {
  double returning_max = 0.30;
  double missed_max = 0.10;

  bool operator==(const RcmmThresholds&) const = default;
};

struct ChurnDefinition {
  int k_days = 1;
  ChurnMethod method = ChurnMethod::rcmm;
  std::optional<RcmmThresholds> thresholds;  // rcmm only
  std::optional<double> quantile;            // ECDF methods only
  std::string group;
  Date as_of;

  bool operator==(const ChurnDefinition&) const = default;
};

/// No k on the grid meets the thresholds. Carries the fractions reached at
/// the largest k, which are the smallest achievable on a monotone curve.
class NoDefinitionError : public Error {
 public:
  NoDefinitionError(std::string group, double best_returning, std::vector<double> best_missed)
      : Error("no churn definition satisfies the thresholds for group '" + group + "'"),
        group_(std::move(group)),
        best_returning_(best_returning),
        best_missed_(std::move(best_missed)) {}

  const std::string& group() const { return group_; }
  double best_returning() const { return best_returning_; }
  const std::vector<double>& best_missed() const { return best_missed_; }

 private:
  std::string group_;
  double best_returning_;
  std::vector<double> best_missed_;
};

inline bool is_non_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

/// Smallest k whose returning fraction and every missed fraction are within
/// the thresholds.
inline ChurnDefinition find_churn_definition(const RcmmCurve& curve, double returning_max,
                                             double missed_max, Date as_of) {
  if (!(returning_max > 0.0 && returning_max < 1.0) || !(missed_max > 0.0 && missed_max < 1.0)) {
    throw Error("thresholds must lie in (0, 1)");
  }
  if (!is_non_increasing(curve.returning_fraction)) {
    throw Error("returning fraction is not monotone in k");
  }
  for (const auto& mf : curve.missed_fraction) {
    if (!is_non_increasing(mf)) throw Error("missed fraction is not monotone in k");
  }
  for (std::size_t ki = 0; ki < curve.k_grid.size(); ++ki) {
    if (curve.returning_fraction[ki] > returning_max) continue;
    bool ok = true;
    for (const auto& mf : curve.missed_fraction) ok = ok && mf[ki] <= missed_max;
    if (!ok) continue;
    return ChurnDefinition{curve.k_grid[ki], ChurnMethod::rcmm,
                           RcmmThresholds{returning_max, missed_max}, std::nullopt, curve.group,
                           as_of};
  }
  std::vector<double> best;
  for (const auto& mf : curve.missed_fraction) best.push_back(mf.back());
  throw NoDefinitionError(curve.group, curve.returning_fraction.back(), std::move(best));
}

/// k, returning_fraction, returning_share, churners, missed_<metric>...
inline void write_rcmm_curve_csv(std::ostream& out, std::span<const RcmmCurve> curves) {
  if (curves.empty()) return;
  out << "group,k,returning_fraction,returning_share,churners";
  for (Metric m : curves.front().metrics) out << ",missed_" << to_string(m);
  out << '\n';
  for (const auto& c : curves) {
    for (std::size_t ki = 0; ki < c.k_grid.size(); ++ki) {
      out << csv_field(c.group) << ',' << c.k_grid[ki] << ','
          << format_double(c.returning_fraction[ki]) << ','
          << format_double(c.returning_share[ki]) << ',' << c.churners[ki];
      for (const auto& mf : c.missed_fraction) out << ',' << format_double(mf[ki]);
      out << '\n';
    }
  }
}

}  // namespace engage

#endif  // ENGAGE_RCMM_HPP_
