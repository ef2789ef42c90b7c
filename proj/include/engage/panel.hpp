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

// Per-user daily metric panels built from the event log.
//
// Every user gets one row per calendar day (UTC) from the day of their first
// login through the common panel end. Days without activity carry zero
// counts. Session time is taken from session_end durations (or a timeout for
// sessions that are never closed) and split at midnight, prorated by seconds.

#ifndef ENGAGE_PANEL_HPP_
#define ENGAGE_PANEL_HPP_

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "engage/common.hpp"
#include "engage/events.hpp"
#include "engage/parallel.hpp"

namespace engage {

struct UserDayMetrics {
  Date day;
  int lifetime_days = 0;
  bool logged_in = false;
  int session_count = 0;
  double connection_time_s = 0.0;
  double elearning_connection_time_s = 0.0;
  int action_count = 0;
  int elearning_action_count = 0;
  int progression = 0;             // tests passed that day
  int cumulative_progression = 0;  // tests passed since first login
  int video_view_count = 0;
  double video_watch_time_s = 0.0;
  int login_day_count = 0;  // days with a login, first login through this day
  double loyalty_index = 0.0;
  double weekly_loyalty_index = 0.0;
  int days_since_last_login = 0;

  bool operator==(const UserDayMetrics&) const = default;
};

struct UserPanel {
  std::string user_id;
  std::string group;
  Date first_day;
  std::vector<UserDayMetrics> days;  // days[i].day == first_day + i
  // Appended feature columns, indexed [column][day].
  std::vector<std::vector<double>> features;

  int length() const { return static_cast<int>(days.size()); }
  Date last_day() const { return days.back().day; }

  bool operator==(const UserPanel&) const = default;
};

struct CohortPanel {
  Date end;  // common last day of every user's range
  std::vector<UserPanel> users;
  std::vector<std::string> feature_names;

  std::optional<std::size_t> find_user(std::string_view user_id) const {
    auto it = std::lower_bound(users.begin(), users.end(), user_id,
                               [](const UserPanel& u, std::string_view id) { return u.user_id < id; });
    if (it == users.end() || it->user_id != user_id) return std::nullopt;
    return static_cast<std::size_t>(it - users.begin());
  }

  std::vector<std::string> groups() const {
    std::vector<std::string> out;
    for (const auto& u : users) out.push_back(u.group);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool operator==(const CohortPanel&) const = default;
};

// ---------------------------------------------------------------------------
// Metric identifiers.

enum class Metric {
  lifetime_days,
  logged_in,
  session_count,
  connection_time_s,
  elearning_connection_time_s,
  action_count,
  elearning_action_count,
  progression,
  cumulative_progression,
  video_view_count,
  video_watch_time_s,
  loyalty_index,
  weekly_loyalty_index,
  days_since_last_login,
};

inline constexpr std::array<std::string_view, 14> kMetricNames = {
    "lifetime_days",          "logged_in",
    "session_count",          "connection_time_s",
    "elearning_connection_time_s", "action_count",
    "elearning_action_count", "progression",
    "cumulative_progression", "video_view_count",
    "video_watch_time_s",     "loyalty_index",
    "weekly_loyalty_index",   "days_since_last_login"};

inline std::string_view to_string(Metric m) { return kMetricNames[static_cast<std::size_t>(m)]; }

inline std::optional<Metric> try_parse_metric(std::string_view name) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (kMetricNames[i] == name) return static_cast<Metric>(i);
  }
  // Short forms used on the command line.
  static const std::map<std::string_view, Metric> aliases = {
      {"connection_time", Metric::connection_time_s},
      {"elearning_connection_time", Metric::elearning_connection_time_s},
      {"video_watch_time", Metric::video_watch_time_s},
      {"days_between_logins", Metric::days_since_last_login},
      {"lifetime", Metric::lifetime_days},
  };
  if (auto it = aliases.find(name); it != aliases.end()) return it->second;
  return std::nullopt;
}

inline Metric parse_metric(std::string_view name) {
  if (auto m = try_parse_metric(name)) return *m;
  throw ParseError("unknown metric '" + std::string(name) + "'");
}

inline std::vector<Metric> parse_metric_list(std::string_view csv) {
  std::vector<Metric> out;
  for (const auto& part : split(csv, ',')) {
    if (!part.empty()) out.push_back(parse_metric(part));
  }
  return out;
}

inline double metric_value(const UserDayMetrics& d, Metric m) {
  switch (m) {
    case Metric::lifetime_days: return d.lifetime_days;
    case Metric::logged_in: return d.logged_in ? 1.0 : 0.0;
    case Metric::session_count: return d.session_count;
    case Metric::connection_time_s: return d.connection_time_s;
    case Metric::elearning_connection_time_s: return d.elearning_connection_time_s;
    case Metric::action_count: return d.action_count;
    case Metric::elearning_action_count: return d.elearning_action_count;
    case Metric::progression: return d.progression;
    case Metric::cumulative_progression: return d.cumulative_progression;
    case Metric::video_view_count: return d.video_view_count;
    case Metric::video_watch_time_s: return d.video_watch_time_s;
    case Metric::loyalty_index: return d.loyalty_index;
    case Metric::weekly_loyalty_index: return d.weekly_loyalty_index;
    case Metric::days_since_last_login: return d.days_since_last_login;
  }
  return 0.0;
}

/// A panel column: either a base metric or an appended feature column.
using ColumnRef = std::variant<Metric, std::size_t>;

inline ColumnRef resolve_column(const CohortPanel& panel, std::string_view name) {
  for (std::size_t i = 0; i < panel.feature_names.size(); ++i) {
    if (panel.feature_names[i] == name) return i;
  }
  return parse_metric(name);
}

inline double column_value(const UserPanel& user, const ColumnRef& col, std::size_t day_index) {
  if (const auto* m = std::get_if<Metric>(&col)) return metric_value(user.days[day_index], *m);
  return user.features[std::get<std::size_t>(col)][day_index];
}

/// Day offsets (from first_day) of every day with a login.
inline std::vector<int> login_offsets(const UserPanel& user) {
  std::vector<int> out;
  for (int i = 0; i < user.length(); ++i) {
    if (user.days[i].logged_in) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Construction.

struct PanelOptions {
  std::int64_t session_timeout_s = 1800;
  unsigned workers = 1;
};

/// One reconstructed session span, as attributed to the panel.
struct Session {
  std::string user_id;
  double start_s = 0.0;  // seconds since epoch
  double end_s = 0.0;
  bool elearning = false;
  bool timed_out = false;
  bool orphan = false;  // session_end without a matching login
};

struct PanelReport {
  std::vector<std::string> warnings;
  std::size_t rejected = 0;
  std::vector<Session> sessions;
};

struct PanelBuild {
  CohortPanel panel;
  PanelReport report;
};

namespace detail {

// Adds `seconds` of the span [start, end) to the per-day buckets, splitting at
// UTC midnight. Pieces falling before the first panel day go to day 0.
inline void spread_span(std::vector<UserDayMetrics>& days, Date first_day, double start,
                        double end, double UserDayMetrics::*field) {
  const double origin = static_cast<double>(Timestamp{first_day}.time_since_epoch().count());
  const double total = end - start;
  double assigned = 0.0;
  double cursor = start;
  while (cursor < end) {
    const double rel = cursor - origin;
    const long long idx = static_cast<long long>(std::floor(rel / kSecondsPerDay));
    const double day_end = origin + static_cast<double>(idx + 1) * kSecondsPerDay;
    const double piece_end = std::min(day_end, end);
    const bool last = piece_end >= end;
    const double piece = last ? total - assigned : piece_end - cursor;
    const std::size_t slot =
        static_cast<std::size_t>(std::clamp<long long>(idx, 0, static_cast<long long>(days.size()) - 1));
    days[slot].*field += piece;
    assigned += piece;
    cursor = piece_end;
  }
}

struct UserBuild {
  UserPanel panel;
  std::vector<Session> sessions;
  std::vector<std::string> warnings;
  std::size_t rejected = 0;
};

inline UserBuild build_user(std::span<const EventRecord> events, Date panel_end,
                            const PanelOptions& options) {
  UserBuild out;
  const std::string& uid = events.front().user_id;
  auto first_login = std::find_if(events.begin(), events.end(),
                                  [](const EventRecord& e) { return e.kind == EventKind::login; });
  if (first_login == events.end()) throw Error("user '" + uid + "' has no login event");
  UserPanel& up = out.panel;
  up.user_id = uid;
  up.group = first_login->country;
  up.first_day = day_of(first_login->timestamp);
  const int n_days = days_between(up.first_day, panel_end) + 1;
  up.days.resize(static_cast<std::size_t>(n_days));
  for (int i = 0; i < n_days; ++i) up.days[i].day = up.first_day + std::chrono::days{i};

  auto to_seconds = [](Timestamp ts) { return static_cast<double>(ts.time_since_epoch().count()); };
  const double timeout = static_cast<double>(options.session_timeout_s);
  std::optional<Timestamp> open_login;
  auto close_open = [&](std::optional<Timestamp> next_login) {
    if (!open_login) return;
    double start = to_seconds(*open_login);
    double end = start + timeout;
    if (next_login) end = std::min(end, to_seconds(*next_login));
    const double horizon = to_seconds(Timestamp{panel_end + std::chrono::days{1}});
    end = std::min(end, horizon);
    out.sessions.push_back({uid, start, end, false, true, false});
    open_login.reset();
  };

  bool mixed_groups = false;
  std::vector<Timestamp> elearning_times;
  for (const auto& e : events) {
    if (e.country != up.group) mixed_groups = true;
    const Date day = day_of(e.timestamp);
    if (day > panel_end) throw Error("event after panel end for user '" + uid + "'");
    if (day < up.first_day) {
      out.warnings.push_back("user " + uid + ": event before first login ignored at " +
                             format_timestamp(e.timestamp));
      continue;
    }
    auto& row = up.days[static_cast<std::size_t>(days_between(up.first_day, day))];
    if (e.duration_s && *e.duration_s < 0.0) {
      ++out.rejected;
      out.warnings.push_back("user " + uid + ": negative duration rejected at " +
                             format_timestamp(e.timestamp));
      continue;
    }
    switch (e.kind) {
      case EventKind::login:
        close_open(e.timestamp);
        open_login = e.timestamp;
        row.logged_in = true;
        ++row.session_count;
        break;
      case EventKind::session_end: {
        const double end = to_seconds(e.timestamp);
        const double dur = e.duration_s.value_or(0.0);
        const bool matched =
            open_login && days_between(day_of(*open_login), day) <= 1;
        if (!matched) {
          close_open(std::nullopt);
          out.warnings.push_back("user " + uid + ": session_end without matching login at " +
                                 format_timestamp(e.timestamp));
          out.sessions.push_back({uid, end - dur, end, false, false, true});
        } else {
          open_login.reset();
          out.sessions.push_back({uid, end - dur, end, false, false, false});
        }
        break;
      }
      default:
        break;
    }
    if (is_action(e.kind)) ++row.action_count;
    if (is_elearning(e.kind)) {
      ++row.elearning_action_count;
      elearning_times.push_back(e.timestamp);
    }
    if (e.kind == EventKind::test_passed) ++row.progression;
    if (e.kind == EventKind::video_start) ++row.video_view_count;
    if (e.kind == EventKind::video_stop) {
      const double end = to_seconds(e.timestamp);
      spread_span(up.days, up.first_day, end - *e.duration_s, end,
                  &UserDayMetrics::video_watch_time_s);
    }
  }
  close_open(std::nullopt);
  if (mixed_groups) {
    out.warnings.push_back("user " + uid + ": events carry several countries; using '" +
                           up.group + "'");
  }

  // A session counts as e-learning when any e-learning click falls inside it.
  for (auto& s : out.sessions) {
    auto it = std::lower_bound(elearning_times.begin(), elearning_times.end(), s.start_s,
                               [&](Timestamp t, double v) { return to_seconds(t) < v; });
    s.elearning = it != elearning_times.end() && to_seconds(*it) <= s.end_s;
    if (s.orphan) {
      const Date day = day_of(Timestamp{std::chrono::seconds{static_cast<long long>(s.end_s)}});
      const double dur = s.end_s - s.start_s;
      auto& row = up.days[static_cast<std::size_t>(
          std::clamp(days_between(up.first_day, day), 0, n_days - 1))];
      row.connection_time_s += dur;
      if (s.elearning) row.elearning_connection_time_s += dur;
    } else {
      spread_span(up.days, up.first_day, s.start_s, s.end_s, &UserDayMetrics::connection_time_s);
      if (s.elearning) {
        spread_span(up.days, up.first_day, s.start_s, s.end_s,
                    &UserDayMetrics::elearning_connection_time_s);
      }
    }
  }

  // Derived per-day fields.
  int logins = 0;
  int cumulative = 0;
  int last_login = 0;
  for (int i = 0; i < n_days; ++i) {
    auto& row = up.days[i];
    row.lifetime_days = i;
    if (row.logged_in) {
      ++logins;
      last_login = i;
    }
    cumulative += row.progression;
    row.cumulative_progression = cumulative;
    row.login_day_count = logins;
    row.loyalty_index = static_cast<double>(logins) / static_cast<double>(i + 1);
    row.days_since_last_login = i - last_login;
    int week = 0;
    for (int j = std::max(0, i - 6); j <= i; ++j) week += up.days[j].logged_in ? 1 : 0;
    row.weekly_loyalty_index = week / 7.0;
  }
  return out;
}

}  // namespace detail

/// Builds the cohort panel and reports warnings and reconstructed sessions.
/// Input order does not matter; events are sorted internally.
inline PanelBuild build_panel_detailed(std::vector<EventRecord> events, Date panel_end,
                                       const PanelOptions& options = {}) {
  if (events.empty()) throw Error("no events");
  std::sort(events.begin(), events.end());
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t i = 0; i < events.size();) {
    std::size_t j = i;
    while (j < events.size() && events[j].user_id == events[i].user_id) ++j;
    ranges.emplace_back(i, j);
    i = j;
  }
  std::vector<detail::UserBuild> built(ranges.size());
  parallel_for(ranges.size(), options.workers, [&](std::size_t u) {
    const auto [b, e] = ranges[u];
    built[u] = detail::build_user(std::span<const EventRecord>(events).subspan(b, e - b),
                                  panel_end, options);
  });
  PanelBuild out;
  out.panel.end = panel_end;
  for (auto& ub : built) {
    out.panel.users.push_back(std::move(ub.panel));
    out.report.rejected += ub.rejected;
    for (auto& w : ub.warnings) out.report.warnings.push_back(std::move(w));
    for (auto& s : ub.sessions) out.report.sessions.push_back(std::move(s));
  }
  return out;
}

inline CohortPanel build_panel(std::vector<EventRecord> events, Date panel_end,
                               const PanelOptions& options = {}) {
  return build_panel_detailed(std::move(events), panel_end, options).panel;
}

// ---------------------------------------------------------------------------
// Rolling features.

inline constexpr std::array<Metric, 4> kRollingBaseMetrics = {
    Metric::connection_time_s, Metric::action_count, Metric::session_count,
    Metric::progression};

inline std::string rolling_column_name(Metric m, int window) {
  return std::string(to_string(m)) + "_r" + std::to_string(window);
}

/// Appends trailing-window sums over (d-w, d] of the rolling base metrics for
/// every window, plus the ISO week of the year. Windows longer than a user's
/// history sum over the available days.
inline CohortPanel rolling_features(CohortPanel panel, std::span<const int> windows) {
  for (int w : windows) {
    if (w <= 0) throw Error("rolling window must be positive");
  }
  for (Metric m : kRollingBaseMetrics) {
    for (int w : windows) panel.feature_names.push_back(rolling_column_name(m, w));
  }
  panel.feature_names.push_back("week_of_year");
  for (auto& user : panel.users) {
    const std::size_t n = user.days.size();
    for (Metric m : kRollingBaseMetrics) {
      for (int w : windows) {
        std::vector<double> col(n);
        double running = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
          running += metric_value(user.days[d], m);
          if (d >= static_cast<std::size_t>(w)) running -= metric_value(user.days[d - w], m);
          col[d] = running;
        }
        user.features.push_back(std::move(col));
      }
    }
    std::vector<double> week(n);
    for (std::size_t d = 0; d < n; ++d) week[d] = iso_week(user.days[d].day);
    user.features.push_back(std::move(week));
  }
  return panel;
}

// ---------------------------------------------------------------------------
// CSV export / import.

inline constexpr std::string_view kPanelCsvHeader =
    "user_id,group,day,lifetime_days,logged_in,session_count,connection_time_s,"
    "elearning_connection_time_s,action_count,elearning_action_count,progression,"
    "cumulative_progression,video_view_count,video_watch_time_s,loyalty_index,"
    "weekly_loyalty_index,days_since_last_login";

inline void write_panel_csv(std::ostream& out, const CohortPanel& panel) {
  out << kPanelCsvHeader;
  for (const auto& f : panel.feature_names) out << ',' << csv_field(f);
  out << '\n';
  for (const auto& u : panel.users) {
    for (std::size_t i = 0; i < u.days.size(); ++i) {
      const auto& d = u.days[i];
      out << csv_field(u.user_id) << ',' << csv_field(u.group) << ',' << format_date(d.day) << ','
          << d.lifetime_days << ',' << (d.logged_in ? 1 : 0) << ',' << d.session_count << ','
          << format_double(d.connection_time_s) << ','
          << format_double(d.elearning_connection_time_s) << ',' << d.action_count << ','
          << d.elearning_action_count << ',' << d.progression << ',' << d.cumulative_progression
          << ',' << d.video_view_count << ',' << format_double(d.video_watch_time_s) << ','
          << format_double(d.loyalty_index) << ',' << format_double(d.weekly_loyalty_index)
          << ',' << d.days_since_last_login;
      for (const auto& col : u.features) out << ',' << format_double(col[i]);
      out << '\n';
    }
  }
}

inline CohortPanel read_panel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty panel file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(kPanelCsvHeader, 0) != 0) throw ParseError("unexpected panel CSV header");
  const auto header = split_csv_line(line);
  const std::size_t base = split_csv_line(kPanelCsvHeader).size();
  CohortPanel panel;
  panel.feature_names.assign(header.begin() + static_cast<std::ptrdiff_t>(base), header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw ParseError("panel line " + std::to_string(line_no) + ": wrong field count");
    }
    UserDayMetrics d;
    d.day = parse_date(f[2]);
    d.lifetime_days = static_cast<int>(parse_int(f[3]));
    d.logged_in = parse_int(f[4]) != 0;
    d.session_count = static_cast<int>(parse_int(f[5]));
    d.connection_time_s = parse_double(f[6]);
    d.elearning_connection_time_s = parse_double(f[7]);
    d.action_count = static_cast<int>(parse_int(f[8]));
    d.elearning_action_count = static_cast<int>(parse_int(f[9]));
    d.progression = static_cast<int>(parse_int(f[10]));
    d.cumulative_progression = static_cast<int>(parse_int(f[11]));
    d.video_view_count = static_cast<int>(parse_int(f[12]));
    d.video_watch_time_s = parse_double(f[13]);
    d.loyalty_index = parse_double(f[14]);
    d.weekly_loyalty_index = parse_double(f[15]);
    d.days_since_last_login = static_cast<int>(parse_int(f[16]));
    if (panel.users.empty() || panel.users.back().user_id != f[0]) {
      if (!panel.users.empty() && panel.users.back().user_id > f[0]) {
        throw ParseError("panel rows must be ordered by user_id");
      }
      UserPanel u;
      u.user_id = f[0];
      u.group = f[1];
      u.first_day = d.day;
      u.features.resize(panel.feature_names.size());
      panel.users.push_back(std::move(u));
    }
    auto& u = panel.users.back();
    if (d.day != u.first_day + std::chrono::days{u.length()}) {
      throw ParseError("panel line " + std::to_string(line_no) + ": day range not contiguous");
    }
    d.login_day_count = (u.days.empty() ? 0 : u.days.back().login_day_count) + (d.logged_in ? 1 : 0);
    u.days.push_back(d);
    for (std::size_t c = 0; c < panel.feature_names.size(); ++c) {
      u.features[c].push_back(parse_double(f[base + c]));
    }
  }
  if (panel.users.empty()) throw ParseError("panel has no rows");
  panel.end = panel.users.front().last_day();
  for (const auto& u : panel.users) {
    if (u.last_day() != panel.end) throw ParseError("users end on different days");
  }
  return panel;
}

}  // namespace engage

#endif  // ENGAGE_PANEL_HPP_
