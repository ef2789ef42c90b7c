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

// Seeded synthetic cohorts with known ground truth.
//
// Every user draws a group, a behavior class and an enrollment day. The user
// logs in on day 0 and then after geometric gaps (support 1, 2, ...). Churn
// is simulated day by day: on day t >= 1 the user leaves with probability
// 1 - exp(-h_t), where h_t is the class rate, multiplied by `factor` for
// regime classes while the trailing action count over the previous `window`
// days is below `threshold`. With a constant rate r the churn day C
// satisfies P(C > t) = exp(-r t), and a user who logs in daily has a labeled
// lifetime of C - 1 days.
//
// Each login day holds one or more sessions that never cross midnight. A
// session is a login, a shuffled sequence of action events spaced by at
// least one second, and a session_end carrying the session length.

#ifndef ENGAGE_SYNTH_HPP_
#define ENGAGE_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/common.hpp"
#include "engage/events.hpp"
#include "engage/parallel.hpp"
#include "engage/survival.hpp"

namespace engage {

/// Per-session means (Poisson counts, exponential durations in seconds).
struct Intensity {
  double extra_sessions = 0.2;  // sessions beyond the first on a login day
  double clicks = 5.0;
  double cards = 1.0;
  double drug_lists = 0.5;
  double videos = 0.5;
  double tests = 0.2;
  double think_seconds = 60.0;  // gap between consecutive events
  double video_seconds = 120.0;

  bool operator==(const Intensity&) const = default;
};

enum class ChurnModel { none, fixed, exponential, regime };

struct ChurnSpec {
  ChurnModel model = ChurnModel::exponential;
  double rate = 0.01;  // daily hazard (exponential, regime base)
  int day = 0;         // fixed: active on days 0..day-1
  // regime
  double factor = 1.0;
  double threshold = 0.0;
  int window = 7;
  double switch_rate = 0.0;   // daily chance of dropping to low activity
  double low_activity = 1.0;  // action intensity multiplier once low

  bool operator==(const ChurnSpec&) const = default;
};

struct ClassSpec {
  std::string name;
  double weight = 1.0;
  double gap_p = 0.5;  // geometric login gaps, mean 1/gap_p
  ChurnSpec churn;
  Intensity intensity;

  bool operator==(const ClassSpec&) const = default;
};

struct GroupSpec {
  std::string label;
  double weight = 1.0;

  bool operator==(const GroupSpec&) const = default;
};

struct CohortSpec {
  std::size_t users = 100;
  std::uint64_t seed = 0;
  Date start = Date{std::chrono::year{2021} / 1 / 1};
  int span_days = 365;
  int enrollment_days = 0;  // enrollment offset drawn uniformly from [0, enrollment_days]
  std::vector<GroupSpec> groups = {{"A", 1.0}};
  std::vector<ClassSpec> classes = {{"default", 1.0, 0.5, {}, {}}};
  std::vector<int> signal_windows = {3, 7, 15};

  bool operator==(const CohortSpec&) const = default;

  void validate() const {
    if (users == 0) throw Error("cohort spec has zero users");
    if (span_days < 1) throw Error("span_days must be >= 1");
    if (enrollment_days < 0 || enrollment_days >= span_days) {
      throw Error("enrollment_days must lie in [0, span_days)");
    }
    auto check_weights = [](double sum, const char* what) {
      if (std::abs(sum - 1.0) > 1e-9) throw Error(std::string(what) + " weights must sum to 1");
    };
    if (groups.empty() || classes.empty()) throw Error("cohort spec needs groups and classes");
    double sum = 0.0;
    for (const auto& g : groups) {
      if (g.label.empty()) throw Error("group label must not be empty");
      if (!(g.weight >= 0.0)) throw Error("group weight must be non-negative");
      sum += g.weight;
    }
    check_weights(sum, "group");
    sum = 0.0;
    for (const auto& c : classes) {
      if (!(c.weight >= 0.0)) throw Error("class weight must be non-negative");
      sum += c.weight;
      if (!(c.gap_p > 0.0 && c.gap_p <= 1.0)) throw Error("gap_p must lie in (0, 1]");
      const auto& ch = c.churn;
      if (!(ch.rate >= 0.0) || !(ch.factor >= 0.0)) throw Error("churn rates must be >= 0");
      if (ch.model == ChurnModel::fixed && ch.day < 1) throw Error("fixed churn day must be >= 1");
      if (ch.window < 1) throw Error("regime window must be >= 1");
      if (!(ch.switch_rate >= 0.0 && ch.switch_rate <= 1.0)) {
        throw Error("switch_rate must lie in [0, 1]");
      }
      if (!(ch.low_activity >= 0.0)) throw Error("low_activity must be >= 0");
      const auto& in = c.intensity;
      for (double v : {in.extra_sessions, in.clicks, in.cards, in.drug_lists, in.videos, in.tests,
                       in.think_seconds, in.video_seconds}) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("intensities must be finite and >= 0");
      }
    }
    check_weights(sum, "class");
  }
};

inline std::string_view to_string(ChurnModel m) {
  switch (m) {
    case ChurnModel::none: return "none";
    case ChurnModel::fixed: return "fixed";
    case ChurnModel::exponential: return "exponential";
    case ChurnModel::regime: return "regime";
  }
  return "";
}

inline ChurnModel parse_churn_model(std::string_view name) {
  if (name == "none") return ChurnModel::none;
  if (name == "fixed") return ChurnModel::fixed;
  if (name == "exponential") return ChurnModel::exponential;
  if (name == "regime") return ChurnModel::regime;
  throw ParseError("unknown churn model '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// JSON schema.

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError(std::string("cohort spec field '") + key + "' has the wrong type");
    }
  }
}

inline void check_keys(const nlohmann::json& j, std::initializer_list<std::string_view> keys,
                       const char* where) {
  if (!j.is_object()) throw ParseError(std::string(where) + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ParseError(std::string("unknown key '") + k + "' in " + where);
    }
  }
}

}  // namespace detail

inline CohortSpec cohort_spec_from_json(const nlohmann::json& j) {
  detail::check_keys(j,
                     {"users", "seed", "start_date", "span_days", "enrollment_days", "groups",
                      "classes", "signal_windows"},
                     "cohort spec");
  CohortSpec s;
  detail::read_opt(j, "users", s.users);
  detail::read_opt(j, "seed", s.seed);
  if (auto it = j.find("start_date"); it != j.end()) {
    if (!it->is_string()) throw ParseError("start_date must be a string");
    s.start = parse_date(it->get<std::string>());
  }
  detail::read_opt(j, "span_days", s.span_days);
  detail::read_opt(j, "enrollment_days", s.enrollment_days);
  detail::read_opt(j, "signal_windows", s.signal_windows);
  if (auto it = j.find("groups"); it != j.end()) {
    if (!it->is_array()) throw ParseError("groups must be an array");
    s.groups.clear();
    for (const auto& g : *it) {
      detail::check_keys(g, {"label", "weight"}, "group");
      GroupSpec gs;
      detail::read_opt(g, "label", gs.label);
      detail::read_opt(g, "weight", gs.weight);
      s.groups.push_back(std::move(gs));
    }
  }
  if (auto it = j.find("classes"); it != j.end()) {
    if (!it->is_array()) throw ParseError("classes must be an array");
    s.classes.clear();
    for (const auto& c : *it) {
      detail::check_keys(c, {"name", "weight", "gap_p", "churn", "intensity"}, "class");
      ClassSpec cs;
      detail::read_opt(c, "name", cs.name);
      detail::read_opt(c, "weight", cs.weight);
      detail::read_opt(c, "gap_p", cs.gap_p);
      if (auto ch = c.find("churn"); ch != c.end()) {
        detail::check_keys(*ch,
                           {"model", "rate", "day", "factor", "threshold", "window",
                            "switch_rate", "low_activity"},
                           "churn");
        std::string model = "exponential";
        detail::read_opt(*ch, "model", model);
        cs.churn.model = parse_churn_model(model);
        detail::read_opt(*ch, "rate", cs.churn.rate);
        detail::read_opt(*ch, "day", cs.churn.day);
        detail::read_opt(*ch, "factor", cs.churn.factor);
        detail::read_opt(*ch, "threshold", cs.churn.threshold);
        detail::read_opt(*ch, "window", cs.churn.window);
        detail::read_opt(*ch, "switch_rate", cs.churn.switch_rate);
        detail::read_opt(*ch, "low_activity", cs.churn.low_activity);
      }
      if (auto in = c.find("intensity"); in != c.end()) {
        detail::check_keys(*in,
                           {"extra_sessions", "clicks", "cards", "drug_lists", "videos", "tests",
                            "think_seconds", "video_seconds"},
                           "intensity");
        auto& t = cs.intensity;
        detail::read_opt(*in, "extra_sessions", t.extra_sessions);
        detail::read_opt(*in, "clicks", t.clicks);
        detail::read_opt(*in, "cards", t.cards);
        detail::read_opt(*in, "drug_lists", t.drug_lists);
        detail::read_opt(*in, "videos", t.videos);
        detail::read_opt(*in, "tests", t.tests);
        detail::read_opt(*in, "think_seconds", t.think_seconds);
        detail::read_opt(*in, "video_seconds", t.video_seconds);
      }
      s.classes.push_back(std::move(cs));
    }
  }
  s.validate();
  return s;
}

inline nlohmann::ordered_json to_json(const CohortSpec& s) {
  nlohmann::ordered_json j;
  j["users"] = s.users;
  j["seed"] = s.seed;
  j["start_date"] = format_date(s.start);
  j["span_days"] = s.span_days;
  j["enrollment_days"] = s.enrollment_days;
  j["signal_windows"] = s.signal_windows;
  for (const auto& g : s.groups) j["groups"].push_back({{"label", g.label}, {"weight", g.weight}});
  for (const auto& c : s.classes) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["weight"] = c.weight;
    cj["gap_p"] = c.gap_p;
    cj["churn"] = {{"model", std::string(to_string(c.churn.model))},
                   {"rate", c.churn.rate},
                   {"day", c.churn.day},
                   {"factor", c.churn.factor},
                   {"threshold", c.churn.threshold},
                   {"window", c.churn.window},
                   {"switch_rate", c.churn.switch_rate},
                   {"low_activity", c.churn.low_activity}};
    const auto& t = c.intensity;
    cj["intensity"] = {{"extra_sessions", t.extra_sessions}, {"clicks", t.clicks},
                       {"cards", t.cards},
                       {"drug_lists", t.drug_lists},
                       {"videos", t.videos},
                       {"tests", t.tests},
                       {"think_seconds", t.think_seconds},
                       {"video_seconds", t.video_seconds}};
    j["classes"].push_back(std::move(cj));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Ground truth.

struct UserTruth {
  std::string user_id;
  std::string group;
  std::size_t class_index = 0;
  Date first_day;
  int observed_days = 0;            // days from first_day to the panel end, inclusive
  std::optional<int> churn_day;     // offset C of the churn, if inside the window
  int last_login = 0;               // offset of the last login
  int logins = 0;
  std::optional<int> regime_switch;  // offset where activity dropped
  // Generated counts per day offset, first day through the panel end.
  std::vector<int> daily_sessions;
  std::vector<int> daily_actions;
  std::vector<int> daily_tests;
};

struct GroundTruth {
  CohortSpec spec;
  Date panel_end;
  std::vector<UserTruth> users;
  std::vector<std::string> signal_features;

  /// P(C > t) for a class with a constant hazard; nullopt for regime classes
  /// whose survival depends on the simulated activity path.
  std::optional<double> class_survival(std::size_t c, double t) const {
    const auto& ch = spec.classes.at(c).churn;
    switch (ch.model) {
      case ChurnModel::none: return 1.0;
      case ChurnModel::fixed: return t < ch.day ? 1.0 : 0.0;
      case ChurnModel::exponential: return std::exp(-ch.rate * std::max(0.0, t));
      case ChurnModel::regime:
        if (ch.factor == 1.0 || ch.threshold <= 0.0) return std::exp(-ch.rate * std::max(0.0, t));
        return std::nullopt;
    }
    return std::nullopt;
  }

  /// Survival of the labeled lifetime (first to last login) for a class with
  /// daily logins: P(C - 1 > t).
  std::optional<double> lifetime_survival(std::size_t c, double t) const {
    return class_survival(c, t + 1.0);
  }

  /// Curve of lifetime_survival on days 1..t_max.
  SurvivalCurve lifetime_curve(std::size_t c, int t_max) const {
    SurvivalCurve curve;
    for (int t = 1; t <= t_max; ++t) {
      const auto s = lifetime_survival(c, t);
      if (!s) throw Error("class has no analytic survival function");
      curve.times.push_back(t);
      curve.survival.push_back(*s);
    }
    return curve;
  }

  /// Expected action events and session count on one login day.
  static double expected_actions(const Intensity& in) {
    return (1.0 + in.extra_sessions) *
           (in.clicks + in.cards + in.drug_lists + in.tests + 2.0 * in.videos);
  }
};

inline nlohmann::ordered_json to_json(const GroundTruth& t) {
  nlohmann::ordered_json j;
  j["spec"] = to_json(t.spec);
  j["panel_end"] = format_date(t.panel_end);
  j["signal_features"] = t.signal_features;
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < t.spec.classes.size(); ++c) {
    const auto& cs = t.spec.classes[c];
    nlohmann::ordered_json cj;
    cj["name"] = cs.name;
    cj["mean_gap_days"] = 1.0 / cs.gap_p;
    cj["expected_actions_per_login_day"] = GroundTruth::expected_actions(cs.intensity);
    cj["expected_sessions_per_login_day"] = 1.0 + cs.intensity.extra_sessions;
    cj["tests_per_login_day"] = (1.0 + cs.intensity.extra_sessions) * cs.intensity.tests;
    if (const auto s = t.class_survival(c, 0.0); s) {
      cj["survival"] = cs.churn.model == ChurnModel::fixed
                           ? "1 for t < " + std::to_string(cs.churn.day) + ", else 0"
                           : "exp(-" + format_double(cs.churn.model == ChurnModel::none
                                                         ? 0.0
                                                         : cs.churn.rate) +
                                 " * t)";
    } else {
      cj["survival"] = nullptr;
    }
    classes.push_back(std::move(cj));
  }
  j["classes"] = std::move(classes);
  auto users = nlohmann::ordered_json::array();
  for (const auto& u : t.users) {
    nlohmann::ordered_json uj;
    uj["user_id"] = u.user_id;
    uj["group"] = u.group;
    uj["class"] = t.spec.classes[u.class_index].name;
    uj["first_day"] = format_date(u.first_day);
    uj["observed_days"] = u.observed_days;
    uj["churn_day"] = u.churn_day ? nlohmann::ordered_json(*u.churn_day) : nlohmann::ordered_json(nullptr);
    uj["last_login"] = u.last_login;
    uj["logins"] = u.logins;
    uj["regime_switch"] = u.regime_switch ? nlohmann::ordered_json(*u.regime_switch) : nlohmann::ordered_json(nullptr);
    users.push_back(std::move(uj));
  }
  j["users"] = std::move(users);
  return j;
}

// ---------------------------------------------------------------------------
// Generation.

namespace detail {

inline int poisson(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<int>(mean)(rng);
}

// Integer seconds >= 1 with the given mean.
inline std::int64_t positive_seconds(std::mt19937_64& rng, double mean) {
  if (mean <= 1.0) return 1;
  return 1 + static_cast<std::int64_t>(std::exponential_distribution<double>(1.0 / (mean - 1.0))(rng));
}

inline std::size_t draw_index(std::mt19937_64& rng, const std::vector<double>& weights) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

constexpr std::int64_t kFirstSessionStart = 6 * 3600;
constexpr std::int64_t kLastSecond = kSecondsPerDay - 120;

struct DayCounts {
  int sessions = 0;
  int actions = 0;
  int tests = 0;
};

// Emits the sessions of one login day.
inline DayCounts emit_day(std::mt19937_64& rng, const std::string& user_id, const std::string& country,
                    Date day, const Intensity& in, double action_multiplier,
                    std::vector<EventRecord>& out) {
  const Timestamp midnight{std::chrono::duration_cast<std::chrono::seconds>(day.time_since_epoch())};
  auto at = [&](std::int64_t s) { return midnight + std::chrono::seconds{s}; };
  const int sessions = 1 + poisson(rng, in.extra_sessions);
  std::int64_t clock = kFirstSessionStart +
                       std::uniform_int_distribution<std::int64_t>(0, 4 * 3600)(rng);
  DayCounts counts;
  for (int s = 0; s < sessions && clock < kLastSecond - 600; ++s) {
    enum Token { click, card, drug, test, video };
    std::vector<Token> tokens;
    auto add = [&](Token t, double mean) {
      for (int i = poisson(rng, mean); i > 0; --i) tokens.push_back(t);
    };
    add(click, in.clicks * action_multiplier);
    add(card, in.cards * action_multiplier);
    add(drug, in.drug_lists * action_multiplier);
    add(test, in.tests);
    add(video, in.videos);
    std::shuffle(tokens.begin(), tokens.end(), rng);
    const std::int64_t start = clock;
    out.push_back({user_id, at(start), EventKind::login, std::nullopt, country});
    ++counts.sessions;
    std::int64_t t = start;
    for (Token tok : tokens) {
      const std::int64_t next = t + positive_seconds(rng, in.think_seconds);
      if (next >= kLastSecond - 2) break;
      t = next;
      switch (tok) {
        case click: out.push_back({user_id, at(t), EventKind::click, std::nullopt, country}); break;
        case card:
          out.push_back({user_id, at(t), EventKind::action_card_view, std::nullopt, country});
          break;
        case drug:
          out.push_back({user_id, at(t), EventKind::drug_list_view, std::nullopt, country});
          break;
        case test:
          out.push_back({user_id, at(t), EventKind::test_passed, std::nullopt, country});
          ++counts.tests;
          break;
        case video: {
          const std::int64_t stop = std::min(t + positive_seconds(rng, in.video_seconds),
                                             kLastSecond - 1);
          out.push_back({user_id, at(t), EventKind::video_start, std::nullopt, country});
          out.push_back({user_id, at(stop), EventKind::video_stop,
                         static_cast<double>(stop - t), country});
          t = stop;
          ++counts.actions;
          break;
        }
      }
      ++counts.actions;
    }
    const std::int64_t end = std::min(t + positive_seconds(rng, in.think_seconds), kLastSecond);
    out.push_back({user_id, at(end), EventKind::session_end, static_cast<double>(end - start),
                   country});
    clock = end + 60 + std::uniform_int_distribution<std::int64_t>(0, 3600)(rng);
  }
  return counts;
}

inline std::string user_id_for(std::size_t i, std::size_t n) {
  std::string digits = std::to_string(n);
  std::string id = std::to_string(i + 1);
  const std::size_t width = std::max<std::size_t>(5, digits.size());
  return "u" + std::string(width - std::min(width, id.size()), '0') + id;
}

inline std::vector<std::string> signal_features(const CohortSpec& spec) {
  std::vector<std::string> out;
  auto differs = [&](auto field) {
    for (const auto& c : spec.classes) {
      if (field(c) != field(spec.classes.front())) return true;
    }
    return false;
  };
  auto add = [&](const char* metric) {
    for (int w : spec.signal_windows) out.push_back(std::string(metric) + "_r" + std::to_string(w));
  };
  bool hazards_differ = differs([](const ClassSpec& c) {
    return std::make_tuple(c.churn.model, c.churn.rate, c.churn.day, c.churn.factor);
  });
  bool regime = false;
  for (const auto& c : spec.classes) {
    regime = regime || (c.churn.model == ChurnModel::regime && c.churn.factor != 1.0 &&
                        c.churn.threshold > 0.0);
  }
  if (!hazards_differ && !regime) return out;
  if (regime || differs([](const ClassSpec& c) {
        const auto& i = c.intensity;
        return std::make_tuple(i.clicks, i.cards, i.drug_lists, i.videos, i.tests);
      })) {
    add("action_count");
  }
  if (differs([](const ClassSpec& c) { return c.intensity.extra_sessions; })) add("session_count");
  if (differs([](const ClassSpec& c) { return c.intensity.tests; })) add("progression");
  return out;
}

}  // namespace detail

struct SyntheticCohort {
  std::vector<EventRecord> events;  // sorted by (user_id, timestamp)
  GroundTruth truth;
};

inline SyntheticCohort generate(const CohortSpec& spec, unsigned workers = 1) {
  spec.validate();
  SyntheticCohort out;
  out.truth.spec = spec;
  out.truth.panel_end = spec.start + std::chrono::days{spec.span_days - 1};
  out.truth.signal_features = detail::signal_features(spec);
  std::vector<double> group_w, class_w;
  for (const auto& g : spec.groups) group_w.push_back(g.weight);
  for (const auto& c : spec.classes) class_w.push_back(c.weight);

  std::vector<std::vector<EventRecord>> per_user(spec.users);
  out.truth.users.resize(spec.users);
  parallel_for(spec.users, workers, [&](std::size_t i) {
    auto rng = make_stream_rng(spec.seed, i);
    UserTruth& ut = out.truth.users[i];
    ut.user_id = detail::user_id_for(i, spec.users);
    ut.group = spec.groups[detail::draw_index(rng, group_w)].label;
    ut.class_index = detail::draw_index(rng, class_w);
    const ClassSpec& cls = spec.classes[ut.class_index];
    const int enroll =
        std::uniform_int_distribution<int>(0, spec.enrollment_days)(rng);
    ut.first_day = spec.start + std::chrono::days{enroll};
    ut.observed_days = spec.span_days - enroll;
    std::geometric_distribution<int> gap(cls.gap_p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& ch = cls.churn;
    std::vector<int>& actions = ut.daily_actions;
    actions.assign(static_cast<std::size_t>(ut.observed_days), 0);
    ut.daily_sessions.assign(actions.size(), 0);
    ut.daily_tests.assign(actions.size(), 0);
    int trailing = 0;  // actions over days [t - window, t - 1]
    bool low = false;
    int next_login = 0;
    for (int t = 0; t < ut.observed_days; ++t) {
      if (t >= 1) {
        double h = 0.0;
        switch (ch.model) {
          case ChurnModel::none: break;
          case ChurnModel::fixed: h = t >= ch.day ? INFINITY : 0.0; break;
          case ChurnModel::exponential: h = ch.rate; break;
          case ChurnModel::regime:
            h = ch.rate;
            if (t >= ch.window && trailing < ch.threshold) h *= ch.factor;
            break;
        }
        if (h > 0.0 && unit(rng) < 1.0 - std::exp(-h)) {
          ut.churn_day = t;
          break;
        }
        if (ch.model == ChurnModel::regime && !low && ch.switch_rate > 0.0 &&
            unit(rng) < ch.switch_rate) {
          low = true;
          ut.regime_switch = t;
        }
      }
      if (t == next_login) {
        const Date day = ut.first_day + std::chrono::days{t};
        const auto counts = detail::emit_day(rng, ut.user_id, ut.group, day, cls.intensity,
                                             low ? ch.low_activity : 1.0, per_user[i]);
        actions[static_cast<std::size_t>(t)] = counts.actions;
        ut.daily_sessions[static_cast<std::size_t>(t)] = counts.sessions;
        ut.daily_tests[static_cast<std::size_t>(t)] = counts.tests;
        ut.last_login = t;
        ++ut.logins;
        next_login = t + 1 + gap(rng);
      }
      trailing += actions[static_cast<std::size_t>(t)];
      if (t >= ch.window) trailing -= actions[static_cast<std::size_t>(t - ch.window)];
    }
  });
  std::size_t total = 0;
  for (const auto& v : per_user) total += v.size();
  out.events.reserve(total);
  for (auto& v : per_user) {
    for (auto& e : v) out.events.push_back(std::move(e));
  }
  if (out.events.empty()) throw Error("cohort spec produced no logins");
  return out;
}

/// IBS of the training Kaplan-Meier curve applied to every held-out
/// subject, the no-covariate baseline.
inline double null_model_ibs(const GroundTruth&, std::span<const SurvivalObservation> train,
                             std::span<const SurvivalObservation> test,
                             std::optional<int> t_max = std::nullopt) {
  return null_model_ibs(train, test, t_max);
}

}  // namespace engage

#endif  // ENGAGE_SYNTH_HPP_
