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

// Shared fixtures for the test suites: hand-built event logs, random panels
// and the synthetic cohorts used by the forest tests.

#ifndef ENGAGE_TESTS_SUPPORT_HPP_
#define ENGAGE_TESTS_SUPPORT_HPP_

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "engage/engage.hpp"

namespace engage::testing {

inline Date day(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline Date base_day() { return day(2021, 3, 1); }

inline Timestamp at(Date d, int hh, int mm = 0, int ss = 0) {
  return Timestamp{d} + std::chrono::hours{hh} + std::chrono::minutes{mm} +
         std::chrono::seconds{ss};
}

inline EventRecord ev(const std::string& user, Timestamp ts, EventKind kind,
                      std::optional<double> duration = std::nullopt,
                      const std::string& country = "KE") {
  return EventRecord{user, ts, kind, duration, country};
}

struct LoginDay {
  int offset = 0;
  int clicks = 1;
  int tests = 0;
};

// One 10-minute session per login day starting at 09:00.
inline void add_user(std::vector<EventRecord>& out, const std::string& user,
                     const std::string& country, Date first, const std::vector<LoginDay>& days) {
  for (const auto& d : days) {
    const Date dd = first + std::chrono::days{d.offset};
    out.push_back(ev(user, at(dd, 9), EventKind::login, std::nullopt, country));
    int sec = 10;
    for (int i = 0; i < d.clicks; ++i) {
      out.push_back(ev(user, at(dd, 9, 0, sec++), EventKind::click, std::nullopt, country));
    }
    for (int i = 0; i < d.tests; ++i) {
      out.push_back(ev(user, at(dd, 9, 0, sec++), EventKind::test_passed, std::nullopt, country));
    }
    out.push_back(ev(user, at(dd, 9, 10), EventKind::session_end, 600.0, country));
  }
}

inline void add_logins(std::vector<EventRecord>& out, const std::string& user,
                       const std::string& country, Date first, const std::vector<int>& offsets) {
  std::vector<LoginDay> days;
  for (int o : offsets) days.push_back({o, 1, 0});
  add_user(out, user, country, first, days);
}

// Random cohort of users with geometric login gaps and random activity.
struct RandomPanelOptions {
  std::size_t users = 30;
  int span = 60;
  int max_enroll = 20;
  double gap_p = 0.3;
  std::vector<std::string> groups = {"KE", "ET"};
};

inline CohortPanel random_panel(std::uint64_t seed, const RandomPanelOptions& o = {}) {
  std::mt19937_64 rng(seed);
  std::vector<EventRecord> events;
  const Date start = base_day();
  const Date end = start + std::chrono::days{o.span - 1};
  std::uniform_int_distribution<int> enroll(0, o.max_enroll);
  std::uniform_int_distribution<int> clicks(0, 6);
  std::uniform_int_distribution<int> tests(0, 2);
  std::geometric_distribution<int> gap(o.gap_p);
  for (std::size_t u = 0; u < o.users; ++u) {
    const int first = enroll(rng);
    std::vector<LoginDay> days;
    for (int t = 0; first + t < o.span; t += 1 + gap(rng)) days.push_back({t, clicks(rng), tests(rng)});
    char id[16];
    std::snprintf(id, sizeof id, "user%03zu", u);
    add_user(events, id, o.groups[u % o.groups.size()], start + std::chrono::days{first}, days);
  }
  return build_panel(std::move(events), end);
}

// Two classes with a hazard ratio of 4 and different activity levels; the
// high-hazard class is also the less active one.
inline CohortSpec two_group_spec(std::size_t users, std::uint64_t seed) {
  CohortSpec s;
  s.users = users;
  s.seed = seed;
  s.span_days = 365;
  s.enrollment_days = 90;
  s.groups = {{"KE", 0.5}, {"ET", 0.5}};
  ClassSpec low;
  low.name = "low";
  low.weight = 0.5;
  low.gap_p = 0.5;
  low.churn.model = ChurnModel::exponential;
  low.churn.rate = 0.01;
  low.intensity.clicks = 8.0;
  ClassSpec high = low;
  high.name = "high";
  high.churn.rate = 0.04;
  high.intensity.clicks = 2.0;
  s.classes = {low, high};
  return s;
}

// Two-group cohort whose classes differ in three independent intensities
// (actions, extra sessions, tests); the signal is declared on the 15-day
// rolling sums only.
inline CohortSpec planted_signal_spec(std::size_t users, std::uint64_t seed) {
  CohortSpec s = two_group_spec(users, seed);
  s.signal_windows = {15};
  s.classes[0].intensity.extra_sessions = 1.0;
  s.classes[1].intensity.extra_sessions = 0.1;
  s.classes[0].intensity.tests = 1.0;
  s.classes[1].intensity.tests = 0.1;
  return s;
}

// Single class whose hazard multiplies when trailing 7-day activity drops
// below a threshold; activity drops at a random time.
inline CohortSpec regime_spec(std::size_t users, std::uint64_t seed) {
  CohortSpec s;
  s.users = users;
  s.seed = seed;
  s.span_days = 365;
  s.enrollment_days = 90;
  s.groups = {{"KE", 1.0}};
  ClassSpec c;
  c.name = "regime";
  c.weight = 1.0;
  c.gap_p = 0.8;
  c.churn.model = ChurnModel::regime;
  c.churn.rate = 0.004;
  c.churn.factor = 10.0;
  c.churn.threshold = 25.0;
  c.churn.window = 7;
  c.churn.switch_rate = 0.01;
  c.churn.low_activity = 0.1;
  s.classes = {c};
  return s;
}

inline CohortPanel cohort_panel(const SyntheticCohort& c) {
  return build_panel(c.events, c.truth.panel_end);
}

// Rolling-window columns only; snapshot metrics such as loyalty or the
// week of the year encode the lifetime itself in a static snapshot.
inline std::vector<std::string> rolling_columns(std::span<const int> windows) {
  std::vector<std::string> out;
  for (Metric m : kRollingBaseMetrics) {
    for (int w : windows) out.push_back(rolling_column_name(m, w));
  }
  return out;
}

}  // namespace engage::testing

#endif  // ENGAGE_TESTS_SUPPORT_HPP_
