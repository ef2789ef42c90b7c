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

// Turning panels into survival data: churn labels, static per-user feature
// rows and time-varying pseudo-observations.

#ifndef ENGAGE_FEATURES_HPP_
#define ENGAGE_FEATURES_HPP_

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "engage/common.hpp"
#include "engage/panel.hpp"
#include "engage/survival.hpp"

namespace engage {

struct FeatureRow {
  std::size_t subject = 0;
  int entry = 0;
  int exit = 1;
  bool event = false;
  std::vector<double> features;

  SurvivalObservation observation() const { return {entry, exit, event}; }
  bool operator==(const FeatureRow&) const = default;
};

struct SurvivalDataset {
  std::vector<std::string> feature_names;
  std::vector<FeatureRow> rows;
};

/// Per-user lifetime labels: duration from first to last login, with an event
/// when the terminal gap to the panel end exceeds k days.
struct ChurnLabels {
  std::vector<std::size_t> users;  // panel user index per observation
  std::vector<SurvivalObservation> obs;
  std::vector<std::string> warnings;
};

inline ChurnLabels label_churn(const CohortPanel& panel, int churn_k) {
  if (churn_k < 1) throw Error("churn horizon must be >= 1");
  ChurnLabels out;
  for (std::size_t u = 0; u < panel.users.size(); ++u) {
    const auto& up = panel.users[u];
    int last = 0;
    for (int i = 0; i < up.length(); ++i) {
      if (up.days[i].logged_in) last = i;
    }
    if (last == 0) {
      out.warnings.push_back("user " + up.user_id + ": zero-length lifetime dropped");
      continue;
    }
    const int terminal_gap = up.length() - 1 - last;
    out.users.push_back(u);
    out.obs.push_back({0, last, terminal_gap > churn_k});
  }
  return out;
}

enum class PseudoInterval { day, week, month };

inline int interval_days(PseudoInterval interval) {
  switch (interval) {
    case PseudoInterval::day: return 1;
    case PseudoInterval::week: return 7;
    case PseudoInterval::month: return 30;
  }
  return 7;
}

inline PseudoInterval parse_interval(std::string_view name) {
  if (name == "day") return PseudoInterval::day;
  if (name == "week") return PseudoInterval::week;
  if (name == "month") return PseudoInterval::month;
  throw ParseError("unknown interval '" + std::string(name) + "'");
}

/// Engineered columns used as model features by default: every appended
/// panel column plus the loyalty and cumulative progression metrics.
inline std::vector<std::string> default_feature_columns(const CohortPanel& panel) {
  std::vector<std::string> cols = panel.feature_names;
  cols.emplace_back(to_string(Metric::loyalty_index));
  cols.emplace_back(to_string(Metric::weekly_loyalty_index));
  cols.emplace_back(to_string(Metric::cumulative_progression));
  return cols;
}

namespace detail {

inline std::vector<ColumnRef> resolve_columns(const CohortPanel& panel,
                                              std::span<const std::string> columns) {
  std::vector<ColumnRef> refs;
  for (const auto& c : columns) refs.push_back(resolve_column(panel, c));
  return refs;
}

inline std::vector<double> row_features(const UserPanel& user, std::span<const ColumnRef> refs,
                                        std::size_t day_index) {
  std::vector<double> f;
  f.reserve(refs.size());
  for (const auto& r : refs) f.push_back(column_value(user, r, day_index));
  return f;
}

}  // namespace detail

/// One row per labeled user, features taken on the user's last active day.
inline SurvivalDataset static_rows(const CohortPanel& panel, const ChurnLabels& labels,
                                   std::span<const std::string> columns) {
  const auto refs = detail::resolve_columns(panel, columns);
  SurvivalDataset data;
  data.feature_names.assign(columns.begin(), columns.end());
  for (std::size_t i = 0; i < labels.users.size(); ++i) {
    const auto& o = labels.obs[i];
    const auto& up = panel.users[labels.users[i]];
    data.rows.push_back({labels.users[i], 0, o.exit, o.event,
                         detail::row_features(up, refs, static_cast<std::size_t>(o.exit))});
  }
  return data;
}

/// Cuts a labeled lifetime [0, exit) at interval boundaries. Each segment
/// carries the features of its first day; only the final segment of an event
/// subject carries the event.
inline std::vector<FeatureRow> pseudo_observations(const CohortPanel& panel, std::size_t user,
                                                   std::span<const ColumnRef> refs,
                                                   const SurvivalObservation& label,
                                                   PseudoInterval interval) {
  if (label.exit < 1) throw Error("pseudo-observations need a positive lifetime");
  const int step = interval_days(interval);
  const auto& up = panel.users.at(user);
  std::vector<FeatureRow> rows;
  for (int start = 0; start < label.exit; start += step) {
    const int stop = std::min(start + step, label.exit);
    rows.push_back({user, start, stop, label.event && stop == label.exit,
                    detail::row_features(up, refs, static_cast<std::size_t>(start))});
  }
  return rows;
}

inline SurvivalDataset pseudo_rows(const CohortPanel& panel, const ChurnLabels& labels,
                                   std::span<const std::string> columns, PseudoInterval interval) {
  const auto refs = detail::resolve_columns(panel, columns);
  SurvivalDataset data;
  data.feature_names.assign(columns.begin(), columns.end());
  for (std::size_t i = 0; i < labels.users.size(); ++i) {
    auto rows = pseudo_observations(panel, labels.users[i], refs, labels.obs[i], interval);
    for (auto& r : rows) data.rows.push_back(std::move(r));
  }
  return data;
}

}  // namespace engage

#endif  // ENGAGE_FEATURES_HPP_
