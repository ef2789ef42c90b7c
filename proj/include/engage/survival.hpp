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

// Nonparametric survival estimation and prediction scoring.
//
// Time is measured in whole days. Observations may be left-truncated: a
// subject is at risk at t when entry < t <= exit. At a tied time, events are
// counted before censorings.

#ifndef ENGAGE_SURVIVAL_HPP_
#define ENGAGE_SURVIVAL_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "engage/common.hpp"

namespace engage {

struct SurvivalObservation {
  int entry = 0;
  int exit = 1;
  bool event = false;

  bool operator==(const SurvivalObservation&) const = default;
};

inline void validate(std::span<const SurvivalObservation> obs) {
  for (const auto& o : obs) {
    if (o.entry < 0 || o.exit <= o.entry) {
      throw Error("survival observation needs 0 <= entry < exit");
    }
  }
}

/// Right-continuous step function with S = 1 before the first time point.
struct SurvivalCurve {
  std::vector<int> times;  // ascending
  std::vector<double> survival;
  std::vector<double> lower;  // empty when no band was computed
  std::vector<double> upper;

  bool has_band() const { return !lower.empty(); }

  std::size_t index_at(double t) const {
    return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
  }

  double at(double t) const {
    const std::size_t i = index_at(t);
    return i == 0 ? 1.0 : survival[i - 1];
  }

  bool operator==(const SurvivalCurve&) const = default;
};

struct CumulativeHazard {
  std::vector<int> times;
  std::vector<double> hazard;

  double at(double t) const {
    const auto i = std::upper_bound(times.begin(), times.end(), t) - times.begin();
    return i == 0 ? 0.0 : hazard[static_cast<std::size_t>(i - 1)];
  }
};

/// Distinct event times with their risk-set sizes and event counts.
struct RiskTable {
  std::vector<int> times;
  std::vector<double> at_risk;
  std::vector<double> events;
};

inline RiskTable risk_table(std::span<const SurvivalObservation> obs) {
  std::vector<int> entries, exits, event_times;
  entries.reserve(obs.size());
  exits.reserve(obs.size());
  for (const auto& o : obs) {
    entries.push_back(o.entry);
    exits.push_back(o.exit);
    if (o.event) event_times.push_back(o.exit);
  }
  std::sort(entries.begin(), entries.end());
  std::sort(exits.begin(), exits.end());
  std::sort(event_times.begin(), event_times.end());
  RiskTable rt;
  for (std::size_t i = 0; i < event_times.size();) {
    const int t = event_times[i];
    std::size_t j = i;
    while (j < event_times.size() && event_times[j] == t) ++j;
    // entry < exit, so every entry >= t belongs to a row with exit >= t.
    const auto exit_ge = exits.end() - std::lower_bound(exits.begin(), exits.end(), t);
    const auto entry_ge = entries.end() - std::lower_bound(entries.begin(), entries.end(), t);
    rt.times.push_back(t);
    rt.at_risk.push_back(static_cast<double>(exit_ge - entry_ge));
    rt.events.push_back(static_cast<double>(j - i));
    i = j;
  }
  return rt;
}

/// Product-limit estimate with a 95% Greenwood band on the log scale.
inline SurvivalCurve kaplan_meier(std::span<const SurvivalObservation> obs, double z = 1.959963984540054) {
  if (obs.empty()) throw Error("Kaplan-Meier needs at least one observation");
  validate(obs);
  const RiskTable rt = risk_table(obs);
  SurvivalCurve c;
  double s = 1.0;
  double var = 0.0;
  for (std::size_t i = 0; i < rt.times.size(); ++i) {
    const double n = rt.at_risk[i];
    const double d = rt.events[i];
    s *= (n - d) / n;
    c.times.push_back(rt.times[i]);
    c.survival.push_back(s);
    if (n > d) {
      var += d / (n * (n - d));
      const double half = z * std::sqrt(var);
      c.lower.push_back(s * std::exp(-half));
      c.upper.push_back(std::min(1.0, s * std::exp(half)));
    } else {
      c.lower.push_back(0.0);
      c.upper.push_back(c.upper.empty() ? 1.0 : std::min(c.upper.back(), 1.0));
    }
  }
  return c;
}

inline CumulativeHazard nelson_aalen(std::span<const SurvivalObservation> obs) {
  if (obs.empty()) throw Error("Nelson-Aalen needs at least one observation");
  validate(obs);
  const RiskTable rt = risk_table(obs);
  CumulativeHazard h;
  double acc = 0.0;
  for (std::size_t i = 0; i < rt.times.size(); ++i) {
    acc += rt.events[i] / rt.at_risk[i];
    h.times.push_back(rt.times[i]);
    h.hazard.push_back(acc);
  }
  return h;
}

/// Smallest t with S(t) <= 0.5, if the curve gets there.
inline std::optional<int> median_survival(const SurvivalCurve& curve) {
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.survival[i] <= 0.5) return curve.times[i];
  }
  return std::nullopt;
}

/// Kaplan-Meier of the censoring distribution. Subjects with an event at t
/// leave the risk set before the censorings at t.
inline SurvivalCurve censoring_km(std::span<const SurvivalObservation> obs) {
  std::vector<SurvivalObservation> flipped;
  flipped.reserve(obs.size());
  for (const auto& o : obs) flipped.push_back({o.entry, o.exit, !o.event});
  RiskTable rt = risk_table(flipped);
  std::vector<int> event_exits;
  for (const auto& o : obs) {
    if (o.event) event_exits.push_back(o.exit);
  }
  std::sort(event_exits.begin(), event_exits.end());
  SurvivalCurve g;
  double s = 1.0;
  for (std::size_t i = 0; i < rt.times.size(); ++i) {
    const auto [lo, hi] = std::equal_range(event_exits.begin(), event_exits.end(), rt.times[i]);
    const double n = rt.at_risk[i] - static_cast<double>(hi - lo);
    s *= n > 0.0 ? 1.0 - rt.events[i] / n : 0.0;
    g.times.push_back(rt.times[i]);
    g.survival.push_back(s);
  }
  return g;
}

/// Inverse-probability-of-censoring weighted Brier score at time t.
/// Subjects with an event by t contribute S(t)^2 / G(exit-), subjects still
/// at risk contribute (1 - S(t))^2 / G(t), subjects censored by t contribute
/// nothing. Left-truncation of the observations is ignored here.
inline double brier_score(std::span<const SurvivalCurve> predicted,
                          std::span<const SurvivalObservation> obs, double t,
                          const SurvivalCurve& censoring) {
  if (predicted.size() != obs.size()) throw Error("one prediction per subject is required");
  if (obs.empty()) throw Error("Brier score needs at least one subject");
  double total = 0.0;
  const double g_t = censoring.at(t);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double s = predicted[i].at(t);
    if (obs[i].exit <= t && obs[i].event) {
      const double g = censoring.at(obs[i].exit - 0.5);
      if (g <= 0.0) {
        throw Error("censoring survival is zero at t=" + std::to_string(obs[i].exit));
      }
      total += s * s / g;
    } else if (obs[i].exit > t) {
      if (g_t <= 0.0) throw Error("censoring survival is zero at t=" + format_double(t));
      total += (1.0 - s) * (1.0 - s) / g_t;
    }
  }
  return total / static_cast<double>(obs.size());
}

inline double brier_score(std::span<const SurvivalCurve> predicted,
                          std::span<const SurvivalObservation> obs, double t) {
  return brier_score(predicted, obs, t, censoring_km(obs));
}

/// (1/t_max) * integral over [0, t_max] of the piecewise-linear interpolant of
/// BS through the grid points; constant beyond the first and last points.
inline double integrated_brier_score(std::span<const int> grid, std::span<const double> bs,
                                     double t_max) {
  if (grid.size() != bs.size() || grid.empty()) throw Error("IBS needs a non-empty BS grid");
  if (!(t_max > 0.0)) throw Error("IBS needs t_max > 0");
  std::vector<double> ts{0.0};
  std::vector<double> vs{bs.front()};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && grid[i] <= grid[i - 1]) throw Error("IBS grid must be strictly ascending");
    if (grid[i] <= 0) continue;
    if (grid[i] >= t_max) break;
    ts.push_back(grid[i]);
    vs.push_back(bs[i]);
  }
  // value at t_max: interpolate between neighbours, or hold the last point
  const auto above = std::lower_bound(grid.begin(), grid.end(), t_max);
  double v_end = vs.back();
  if (above != grid.end()) {
    const std::size_t j = static_cast<std::size_t>(above - grid.begin());
    if (static_cast<double>(grid[j]) == t_max || j == 0) {
      v_end = bs[j];
    } else {
      const double t0 = grid[j - 1], t1 = grid[j];
      v_end = bs[j - 1] + (bs[j] - bs[j - 1]) * (t_max - t0) / (t1 - t0);
    }
  }
  ts.push_back(t_max);
  vs.push_back(v_end);
  double area = 0.0;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    area += 0.5 * (vs[i] + vs[i - 1]) * (ts[i] - ts[i - 1]);
  }
  return area / t_max;
}

/// 95th percentile (nearest rank) of observed exits.
inline int default_ibs_horizon(std::span<const SurvivalObservation> obs) {
  if (obs.empty()) throw Error("no observations");
  std::vector<int> exits;
  for (const auto& o : obs) exits.push_back(o.exit);
  std::sort(exits.begin(), exits.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(exits.size())));
  return exits[std::max<std::size_t>(rank, 1) - 1];
}

/// Distinct exit days in (0, t_max].
inline std::vector<int> ibs_grid(std::span<const SurvivalObservation> obs, int t_max) {
  std::vector<int> grid;
  for (const auto& o : obs) {
    if (o.exit > 0 && o.exit <= t_max) grid.push_back(o.exit);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty() || grid.back() != t_max) grid.push_back(t_max);
  return grid;
}

struct BrierCurve {
  std::vector<int> times;
  std::vector<double> scores;
};

inline BrierCurve brier_curve(std::span<const SurvivalCurve> predicted,
                              std::span<const SurvivalObservation> obs, std::span<const int> grid) {
  const SurvivalCurve g = censoring_km(obs);
  BrierCurve out;
  for (int t : grid) {
    out.times.push_back(t);
    out.scores.push_back(brier_score(predicted, obs, t, g));
  }
  return out;
}

/// IBS over the distinct exit days up to t_max (default: 95th percentile).
inline double integrated_brier_score(std::span<const SurvivalCurve> predicted,
                                     std::span<const SurvivalObservation> obs,
                                     std::optional<int> t_max = std::nullopt) {
  const int horizon = t_max.value_or(default_ibs_horizon(obs));
  const auto grid = ibs_grid(obs, horizon);
  const auto bc = brier_curve(predicted, obs, grid);
  return integrated_brier_score(bc.times, bc.scores, horizon);
}

/// Null-model IBS: the Kaplan-Meier curve of the training labels applied to
/// every held-out subject.
inline double null_model_ibs(std::span<const SurvivalObservation> train,
                             std::span<const SurvivalObservation> test,
                             std::optional<int> t_max = std::nullopt) {
  const SurvivalCurve km = kaplan_meier(train);
  std::vector<SurvivalCurve> pred(test.size(), km);
  return integrated_brier_score(pred, test, t_max);
}

/// t, S, lower, upper; the first row is t = 0.
inline void write_curve_csv(std::ostream& out, const SurvivalCurve& curve,
                            const std::string& group = {}) {
  const bool grouped = !group.empty();
  auto row = [&](int t, double s, double lo, double hi) {
    if (grouped) out << csv_field(group) << ',';
    out << t << ',' << format_double(s) << ',' << format_double(lo) << ',' << format_double(hi)
        << '\n';
  };
  row(0, 1.0, 1.0, 1.0);
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double s = curve.survival[i];
    row(curve.times[i], s, curve.has_band() ? curve.lower[i] : s,
        curve.has_band() ? curve.upper[i] : s);
  }
}

}  // namespace engage

#endif  // ENGAGE_SURVIVAL_HPP_
