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

// Harmonic-mean engagement score over min-max scaled metrics.

#ifndef ENGAGE_SCORE_HPP_
#define ENGAGE_SCORE_HPP_

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "engage/common.hpp"
#include "engage/ecdf.hpp"
#include "engage/panel.hpp"

namespace engage {

struct ScoreSpec {
  std::vector<Metric> components = {Metric::weekly_loyalty_index, Metric::video_view_count,
                                    Metric::video_watch_time_s,   Metric::action_count,
                                    Metric::progression,          Metric::elearning_connection_time_s};
  Reference scaling = Reference::endo;

  void validate() const {
    if (components.empty()) throw Error("score needs at least one component");
    for (std::size_t i = 0; i < components.size(); ++i) {
      for (std::size_t j = i + 1; j < components.size(); ++j) {
        if (components[i] == components[j]) {
          throw Error("duplicate score component '" + std::string(to_string(components[i])) + "'");
        }
      }
    }
  }
};

struct EngagementScore {
  std::string user_id;
  Date day;
  double value = 0.0;
  std::vector<double> components;  // scaled, in spec order
};

/// Observed range of a reference set.
struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  bool empty() const { return lo > hi; }
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void merge(const Range& o) {
    lo = std::min(lo, o.lo);
    hi = std::max(hi, o.hi);
  }
};

/// Scales against a non-empty range. A constant reference maps to 1 when the
/// value reaches the constant and is positive, otherwise 0.
inline double minmax_scale(double value, const Range& range) {
  if (range.empty()) throw Error("min-max scaling needs a non-empty reference");
  if (range.hi == range.lo) return value >= range.hi && value > 0.0 ? 1.0 : 0.0;
  return std::clamp((value - range.lo) / (range.hi - range.lo), 0.0, 1.0);
}

inline double minmax_scale(double value, std::span<const double> reference) {
  Range r;
  for (double v : reference) r.add(v);
  return minmax_scale(value, r);
}

/// n / sum(1/z_j); exactly 0 when any component is 0.
inline double harmonic_score(std::span<const double> scaled) {
  if (scaled.empty()) throw Error("harmonic score of an empty component list");
  double inv = 0.0;
  for (double z : scaled) {
    if (!(z >= 0.0 && z <= 1.0)) throw Error("score components must lie in [0, 1]");
    if (z == 0.0) return 0.0;
    inv += 1.0 / z;
  }
  return static_cast<double>(scaled.size()) / inv;
}

namespace detail {

// With no reference at all (first observed day in endo mode) any activity
// counts as full engagement.
inline double scale_or_default(double value, const Range& range) {
  if (range.empty()) return value > 0.0 ? 1.0 : 0.0;
  return minmax_scale(value, range);
}

// Per-calendar-day value ranges of one group, for every component.
struct GroupDayRanges {
  Date origin;
  std::vector<std::vector<Range>> day;  // [component][day - origin]
};

inline GroupDayRanges group_day_ranges(const CohortPanel& panel, const std::string& group,
                                       std::span<const Metric> components) {
  GroupDayRanges out;
  out.origin = panel.end;
  for (const auto& u : panel.users) {
    if (u.group == group) out.origin = std::min(out.origin, u.first_day);
  }
  const std::size_t n = static_cast<std::size_t>(days_between(out.origin, panel.end) + 1);
  out.day.assign(components.size(), std::vector<Range>(n));
  for (const auto& u : panel.users) {
    if (u.group != group) continue;
    const std::size_t shift = static_cast<std::size_t>(days_between(out.origin, u.first_day));
    for (std::size_t c = 0; c < components.size(); ++c) {
      for (std::size_t i = 0; i < u.days.size(); ++i) {
        out.day[c][shift + i].add(metric_value(u.days[i], components[c]));
      }
    }
  }
  return out;
}

inline std::vector<EngagementScore> score_user(const ScoreSpec& spec, const UserPanel& user,
                                               const GroupDayRanges* group, Date from, Date to) {
  const std::size_t nc = spec.components.size();
  std::vector<EngagementScore> out;
  // Running ranges over strictly-prior days (endo: own; exo: group).
  std::vector<Range> prior(nc);
  std::size_t prior_upto = 0;  // own days folded into `prior`
  std::vector<std::size_t> group_upto(nc, 0);
  const int first = std::max(0, days_between(user.first_day, from));
  const int last = std::min(user.length() - 1, days_between(user.first_day, to));
  for (int i = first; i <= last; ++i) {
    EngagementScore s;
    s.user_id = user.user_id;
    s.day = user.days[i].day;
    s.components.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      const double v = metric_value(user.days[i], spec.components[c]);
      Range range;
      switch (spec.scaling) {
        case Reference::endo:
          while (prior_upto < static_cast<std::size_t>(i)) {
            for (std::size_t cc = 0; cc < nc; ++cc) {
              prior[cc].add(metric_value(user.days[prior_upto], spec.components[cc]));
            }
            ++prior_upto;
          }
          range = prior[c];
          break;
        case Reference::exo: {
          const std::size_t today = static_cast<std::size_t>(days_between(group->origin, s.day));
          while (group_upto[c] < today) prior[c].merge(group->day[c][group_upto[c]++]);
          range = prior[c];
          break;
        }
        case Reference::snp:
          range = group->day[c][static_cast<std::size_t>(days_between(group->origin, s.day))];
          break;
      }
      s.components[c] = scale_or_default(v, range);
    }
    s.value = harmonic_score(s.components);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// Daily scores of one user over [from, to] (clipped to the user's range).
inline std::vector<EngagementScore> score_series(const CohortPanel& panel, const ScoreSpec& spec,
                                                 std::size_t user, Date from, Date to) {
  spec.validate();
  const auto& u = panel.users.at(user);
  std::optional<detail::GroupDayRanges> group;
  if (spec.scaling != Reference::endo) {
    group = detail::group_day_ranges(panel, u.group, spec.components);
  }
  return detail::score_user(spec, u, group ? &*group : nullptr, from, to);
}

/// Scores of every user over [from, to], group references built once.
inline std::vector<std::vector<EngagementScore>> score_panel(const CohortPanel& panel,
                                                             const ScoreSpec& spec, Date from,
                                                             Date to, unsigned workers = 1) {
  spec.validate();
  std::vector<std::pair<std::string, detail::GroupDayRanges>> groups;
  if (spec.scaling != Reference::endo) {
    for (const auto& g : panel.groups()) {
      groups.emplace_back(g, detail::group_day_ranges(panel, g, spec.components));
    }
  }
  std::vector<std::vector<EngagementScore>> out(panel.users.size());
  parallel_for(panel.users.size(), workers, [&](std::size_t u) {
    const auto& up = panel.users[u];
    const detail::GroupDayRanges* g = nullptr;
    for (const auto& [label, ranges] : groups) {
      if (label == up.group) g = &ranges;
    }
    out[u] = detail::score_user(spec, up, g, from, to);
  });
  return out;
}

}  // namespace engage

#endif  // ENGAGE_SCORE_HPP_
