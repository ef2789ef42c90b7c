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

// Empirical CDF engagement indicators.
//
// The indicator of a metric value is the ECDF of a reference sample at that
// value: the user's own strictly-prior history (endo), the group's history
// (exo), or the group on the same day (snp). For the login-frequency metric
// (days since last login) the historical samples are completed gaps between
// consecutive logins; the open gap on the query day is the query value.

#ifndef ENGAGE_ECDF_HPP_
#define ENGAGE_ECDF_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "engage/common.hpp"
#include "engage/panel.hpp"

namespace engage {

enum class Reference { endo, exo, snp };

inline std::string_view to_string(Reference r) {
  switch (r) {
    case Reference::endo: return "endo";
    case Reference::exo: return "exo";
    case Reference::snp: return "snp";
  }
  return "";
}

inline Reference parse_reference(std::string_view name) {
  if (name == "endo") return Reference::endo;
  if (name == "exo") return Reference::exo;
  if (name == "snp") return Reference::snp;
  throw ParseError("unknown reference mode '" + std::string(name) + "'");
}

struct EcdfProvenance {
  Reference mode = Reference::exo;
  std::string subject;  // user id (endo) or group label
  std::optional<Date> day;
};

/// Right-continuous ECDF: F(x) = #{samples <= x} / N.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples, std::optional<double> cutoff = std::nullopt,
                EcdfProvenance provenance = {})
      : cutoff_(cutoff), provenance_(std::move(provenance)) {
    for (double s : samples) {
      if (std::isnan(s)) throw Error("ECDF sample is NaN");
    }
    if (cutoff) {
      std::erase_if(samples, [c = *cutoff](double s) { return s > c; });
    }
    if (samples.empty()) throw Error("ECDF needs at least one sample after cutoff");
    std::sort(samples.begin(), samples.end());
    samples_ = std::move(samples);
  }

  double operator()(double x) const { return evaluate(x); }

  double evaluate(double x) const {
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
  }

  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  std::optional<double> cutoff() const { return cutoff_; }
  const EcdfProvenance& provenance() const { return provenance_; }

  /// (value, F(value)) at every distinct sample value.
  std::vector<std::pair<double, double>> steps() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (i + 1 < samples_.size() && samples_[i + 1] == samples_[i]) continue;
      out.emplace_back(samples_[i],
                       static_cast<double>(i + 1) / static_cast<double>(samples_.size()));
    }
    return out;
  }

 private:
  std::vector<double> samples_;
  std::optional<double> cutoff_;
  EcdfProvenance provenance_;
};

/// The reference set for a mode is empty.
class InsufficientHistory : public Error {
 public:
  explicit InsufficientHistory(Reference mode)
      : Error("insufficient history for " + std::string(to_string(mode)) + " reference"),
        mode_(mode) {}
  Reference mode() const { return mode_; }

 private:
  Reference mode_;
};

struct IndicatorOptions {
  // Applied to exo/snp references of the login-gap metric.
  std::optional<double> gap_cutoff = 200.0;
};

struct EcdfIndicator {
  std::string user_id;
  Date day;
  Metric metric = Metric::days_since_last_login;
  Reference mode = Reference::endo;
  double value = 0.0;
};

inline bool is_gap_metric(Metric m) { return m == Metric::days_since_last_login; }

namespace detail {

inline int day_index(const UserPanel& user, Date day) {
  const int idx = days_between(user.first_day, day);
  if (idx < 0 || idx >= user.length()) {
    throw Error("day " + format_date(day) + " outside the range of user '" + user.user_id + "'");
  }
  return idx;
}

// Completed gaps of a user that closed strictly before day offset `before`.
inline void append_closed_gaps(const UserPanel& user, int before, std::vector<double>& out) {
  int prev = -1;
  for (int i = 0; i < std::min(before, user.length()); ++i) {
    if (!user.days[i].logged_in) continue;
    if (prev >= 0) out.push_back(i - prev);
    prev = i;
  }
}

}  // namespace detail

/// Samples of the reference set for (user, day, metric, mode), before any
/// cutoff is applied.
inline std::vector<double> reference_samples(const CohortPanel& panel, std::size_t user,
                                             Date day, Metric metric, Reference mode) {
  const UserPanel& self = panel.users.at(user);
  const int idx = detail::day_index(self, day);
  std::vector<double> out;
  auto for_group = [&](auto&& fn) {
    for (const auto& u : panel.users) {
      if (u.group == self.group) fn(u);
    }
  };
  switch (mode) {
    case Reference::endo:
      if (is_gap_metric(metric)) {
        detail::append_closed_gaps(self, idx, out);
      } else {
        for (int i = 0; i < idx; ++i) out.push_back(metric_value(self.days[i], metric));
      }
      break;
    case Reference::exo:
      for_group([&](const UserPanel& u) {
        const int before = days_between(u.first_day, day);
        if (before <= 0) return;
        if (is_gap_metric(metric)) {
          detail::append_closed_gaps(u, before, out);
        } else {
          for (int i = 0; i < std::min(before, u.length()); ++i) {
            out.push_back(metric_value(u.days[i], metric));
          }
        }
      });
      break;
    case Reference::snp:
      for_group([&](const UserPanel& u) {
        const int i = days_between(u.first_day, day);
        if (i < 0 || i >= u.length()) return;
        out.push_back(metric_value(u.days[i], metric));
      });
      break;
  }
  return out;
}

inline std::optional<double> reference_cutoff(Metric metric, Reference mode,
                                              const IndicatorOptions& options) {
  if (mode == Reference::endo || !is_gap_metric(metric)) return std::nullopt;
  return options.gap_cutoff;
}

inline Ecdf reference_ecdf(const CohortPanel& panel, std::size_t user, Date day, Metric metric,
                           Reference mode, const IndicatorOptions& options = {}) {
  auto samples = reference_samples(panel, user, day, metric, mode);
  const auto cutoff = reference_cutoff(metric, mode, options);
  if (cutoff) std::erase_if(samples, [c = *cutoff](double s) { return s > c; });
  if (samples.empty()) throw InsufficientHistory(mode);
  const auto& u = panel.users[user];
  return Ecdf(std::move(samples), cutoff,
              EcdfProvenance{mode, mode == Reference::endo ? u.user_id : u.group,
                             mode == Reference::snp ? std::optional<Date>(day) : std::nullopt});
}

inline EcdfIndicator indicator(const CohortPanel& panel, std::size_t user, Date day,
                               Metric metric, Reference mode,
                               const IndicatorOptions& options = {}) {
  const auto ecdf = reference_ecdf(panel, user, day, metric, mode, options);
  const auto& u = panel.users[user];
  const double z = metric_value(u.days[detail::day_index(u, day)], metric);
  return EcdfIndicator{u.user_id, day, metric, mode, ecdf(z)};
}

/// Indicators of every user on one day, sharing the group references for the
/// exogenous modes. Users absent on that day or without enough history get
/// no value.
inline std::vector<std::optional<EcdfIndicator>> indicators_on_day(
    const CohortPanel& panel, Date day, Metric metric, Reference mode,
    const IndicatorOptions& options = {}) {
  std::vector<std::optional<EcdfIndicator>> out(panel.users.size());
  std::vector<std::pair<std::string, std::optional<Ecdf>>> shared;
  for (std::size_t u = 0; u < panel.users.size(); ++u) {
    const auto& up = panel.users[u];
    const int idx = days_between(up.first_day, day);
    if (idx < 0 || idx >= up.length()) continue;
    const double z = metric_value(up.days[idx], metric);
    if (mode == Reference::endo) {
      try {
        out[u] = EcdfIndicator{up.user_id, day, metric, mode,
                               reference_ecdf(panel, u, day, metric, mode, options)(z)};
      } catch (const InsufficientHistory&) {
      }
      continue;
    }
    auto it = std::find_if(shared.begin(), shared.end(),
                           [&](const auto& s) { return s.first == up.group; });
    if (it == shared.end()) {
      std::optional<Ecdf> ecdf;
      try {
        ecdf = reference_ecdf(panel, u, day, metric, mode, options);
      } catch (const InsufficientHistory&) {
      }
      shared.emplace_back(up.group, std::move(ecdf));
      it = std::prev(shared.end());
    }
    if (it->second) out[u] = EcdfIndicator{up.user_id, day, metric, mode, (*it->second)(z)};
  }
  return out;
}

/// Smallest whole number of days z with F(z) >= q.
inline int equivalent_churn_definition(const Ecdf& ecdf, double q = 0.9) {
  if (!(q > 0.0 && q < 1.0)) throw Error("quantile q must lie in (0, 1)");
  for (const auto& [value, prob] : ecdf.steps()) {
    if (prob >= q) return static_cast<int>(std::ceil(value));
  }
  return static_cast<int>(std::ceil(ecdf.samples().back()));
}

enum class Direction { high_is_bad, low_is_bad };

/// high_is_bad: flag when the indicator exceeds q. low_is_bad: flag when it
/// falls below 1 - q.
inline bool churn_risk_flag(double value, Direction direction, double q = 0.9) {
  if (!(q > 0.0 && q < 1.0)) throw Error("quantile q must lie in (0, 1)");
  return direction == Direction::high_is_bad ? value > q : value < 1.0 - q;
}

inline bool churn_risk_flag(const EcdfIndicator& indicator, Direction direction, double q = 0.9) {
  return churn_risk_flag(indicator.value, direction, q);
}

}  // namespace engage

#endif  // ENGAGE_ECDF_HPP_
