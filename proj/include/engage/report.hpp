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

// Per-user report cards and the RCMM-versus-ECDF churn comparison.

#ifndef ENGAGE_REPORT_HPP_
#define ENGAGE_REPORT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "engage/common.hpp"
#include "engage/ecdf.hpp"
#include "engage/features.hpp"
#include "engage/forest.hpp"
#include "engage/panel.hpp"
#include "engage/rcmm.hpp"
#include "engage/score.hpp"
#include "engage/survival.hpp"

namespace engage {

struct ReportOptions {
  double q = 0.9;
  IndicatorOptions ecdf;
  ScoreSpec score;
  RcmmThresholds thresholds;
  int churn_k = 31;  // labels for the Kaplan-Meier fallback
  PseudoInterval interval = PseudoInterval::week;
};

struct ReportCard {
  std::string user_id;
  std::string group;
  Date as_of;
  int days_since_last_login = 0;
  std::optional<double> ecdf_endo;
  std::optional<double> ecdf_exo;
  std::optional<double> ecdf_snp;
  double score = 0.0;
  std::optional<int> equivalent_k;  // endo days-between-logins definition
  double survival = 1.0;            // P(lifetime > days since first login)
  std::optional<int> rcmm_k;
  std::optional<bool> flag_rcmm;
  std::optional<bool> flag_ecdf_endo;
  std::optional<bool> flag_ecdf_exo;
  std::optional<bool> flag_ecdf_snp;
};

struct Report {
  std::vector<ReportCard> cards;
  std::vector<std::string> warnings;
};

namespace detail {

// RCMM definition per group; groups without one are reported and left out.
inline std::vector<std::pair<std::string, std::optional<int>>> rcmm_definitions(
    const CohortPanel& panel, const RcmmThresholds& thresholds, Date as_of,
    std::vector<std::string>& warnings) {
  std::vector<std::pair<std::string, std::optional<int>>> out;
  const auto grid = default_k_grid();
  for (const auto& curve : rcmm_curve(panel, grid, default_missed_metrics())) {
    try {
      out.emplace_back(curve.group, find_churn_definition(curve, thresholds.returning_max,
                                                          thresholds.missed_max, as_of)
                                        .k_days);
    } catch (const NoDefinitionError& e) {
      warnings.push_back(e.what());
      out.emplace_back(curve.group, std::nullopt);
    }
  }
  return out;
}

inline std::optional<int> lookup(const std::vector<std::pair<std::string, std::optional<int>>>& v,
                                 const std::string& key) {
  for (const auto& [k, x] : v) {
    if (k == key) return x;
  }
  return std::nullopt;
}

inline std::optional<double> try_indicator(const CohortPanel& panel, std::size_t u, Date day,
                                           Reference mode, const IndicatorOptions& options) {
  try {
    return indicator(panel, u, day, Metric::days_since_last_login, mode, options).value;
  } catch (const InsufficientHistory&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Cards for the listed users (all users when empty) on `as_of`. With a model
/// the survival column is the forest prediction from the user's features up
/// to `as_of`; otherwise the Kaplan-Meier curve of the cohort labels.
inline Report make_report(const CohortPanel& panel, const ForestModel* model,
                          const std::vector<std::string>& user_ids, Date as_of,
                          const ReportOptions& options = {}) {
  if (as_of > panel.end) throw Error("as_of is after the panel end");
  Report report;
  const auto rcmm = detail::rcmm_definitions(panel, options.thresholds, as_of, report.warnings);
  std::vector<ColumnRef> refs;
  std::optional<SurvivalCurve> km;
  if (model) {
    for (const auto& f : model->feature_names) refs.push_back(resolve_column(panel, f));
  } else {
    km = kaplan_meier(label_churn(panel, options.churn_k).obs);
  }
  std::vector<std::size_t> users;
  if (user_ids.empty()) {
    for (std::size_t u = 0; u < panel.users.size(); ++u) users.push_back(u);
  } else {
    for (const auto& id : user_ids) {
      const auto u = panel.find_user(id);
      if (!u) throw Error("unknown user '" + id + "'");
      users.push_back(*u);
    }
  }
  for (std::size_t u : users) {
    const auto& up = panel.users[u];
    const int idx = days_between(up.first_day, as_of);
    if (idx < 0) {
      report.warnings.push_back("user " + up.user_id + " has no data on " + format_date(as_of));
      continue;
    }
    ReportCard c;
    c.user_id = up.user_id;
    c.group = up.group;
    c.as_of = as_of;
    c.days_since_last_login = up.days[idx].days_since_last_login;
    c.ecdf_endo = detail::try_indicator(panel, u, as_of, Reference::endo, options.ecdf);
    c.ecdf_exo = detail::try_indicator(panel, u, as_of, Reference::exo, options.ecdf);
    c.ecdf_snp = detail::try_indicator(panel, u, as_of, Reference::snp, options.ecdf);
    c.score = score_series(panel, options.score, u, as_of, as_of).front().value;
    try {
      c.equivalent_k = equivalent_churn_definition(
          reference_ecdf(panel, u, as_of, Metric::days_since_last_login, Reference::endo,
                         options.ecdf),
          options.q);
    } catch (const InsufficientHistory&) {
    }
    if (idx == 0) {
      c.survival = 1.0;
    } else if (model) {
      std::vector<FeatureRow> path;
      if (model->algorithm == ForestAlgorithm::csf) {
        path.push_back({u, 0, idx, false,
                        detail::row_features(up, refs, static_cast<std::size_t>(idx))});
      } else {
        path = pseudo_observations(panel, u, refs, {0, idx, false}, options.interval);
      }
      c.survival = model->predict(path).at(idx);
    } else {
      c.survival = km->at(idx);
    }
    c.rcmm_k = detail::lookup(rcmm, up.group);
    if (c.rcmm_k) c.flag_rcmm = c.days_since_last_login > *c.rcmm_k;
    auto flag = [&](const std::optional<double>& v) -> std::optional<bool> {
      if (!v) return std::nullopt;
      return churn_risk_flag(*v, Direction::high_is_bad, options.q);
    };
    c.flag_ecdf_endo = flag(c.ecdf_endo);
    c.flag_ecdf_exo = flag(c.ecdf_exo);
    c.flag_ecdf_snp = flag(c.ecdf_snp);
    report.cards.push_back(std::move(c));
  }
  return report;
}

/// Rows: RCMM churned / not; columns: ECDF churned / not.
struct ConfusionMatrix {
  Reference mode = Reference::exo;
  std::size_t both = 0;       // RCMM churned, ECDF churned
  std::size_t rcmm_only = 0;  // RCMM churned, ECDF not churned
  std::size_t ecdf_only = 0;  // RCMM not churned, ECDF churned
  std::size_t neither = 0;
};

struct GroupDefinitions {
  std::string group;
  std::optional<int> rcmm_k;
  std::optional<int> exo_k;
  std::optional<int> snp_k;
  std::optional<double> endo_avg_k;
  std::size_t endo_users = 0;  // users with an endo definition
};

struct ChurnComparison {
  Date as_of;
  std::vector<ConfusionMatrix> matrices;  // endo, exo, snp
  std::vector<GroupDefinitions> groups;
  std::vector<std::string> warnings;
};

/// Classifies every user observed on `as_of` by the RCMM definition of its
/// group (days since last login > k) and by each ECDF mode (indicator of
/// days since last login > q). Users without an RCMM definition or without
/// the ECDF reference of a mode are left out of that matrix.
inline ChurnComparison compare_churn_definitions(const CohortPanel& panel, Date as_of,
                                                 const ReportOptions& options = {}) {
  if (as_of > panel.end) throw Error("as_of is after the panel end");
  ChurnComparison out;
  out.as_of = as_of;
  const auto rcmm = detail::rcmm_definitions(panel, options.thresholds, as_of, out.warnings);
  const Reference modes[] = {Reference::endo, Reference::exo, Reference::snp};
  for (Reference m : modes) out.matrices.push_back({m, 0, 0, 0, 0});
  for (const auto& g : panel.groups()) {
    GroupDefinitions gd;
    gd.group = g;
    gd.rcmm_k = detail::lookup(rcmm, g);
    out.groups.push_back(gd);
  }
  auto group_of = [&](const std::string& g) -> GroupDefinitions& {
    for (auto& gd : out.groups) {
      if (gd.group == g) return gd;
    }
    throw Error("unknown group");
  };
  std::vector<double> endo_sum(out.groups.size(), 0.0);
  for (std::size_t u = 0; u < panel.users.size(); ++u) {
    const auto& up = panel.users[u];
    const int idx = days_between(up.first_day, as_of);
    if (idx < 0 || idx >= up.length()) continue;
    GroupDefinitions& gd = group_of(up.group);
    const int dsl = up.days[idx].days_since_last_login;
    // group-level definitions from the first user of each group
    for (Reference m : {Reference::exo, Reference::snp}) {
      auto& slot = m == Reference::exo ? gd.exo_k : gd.snp_k;
      if (slot) continue;
      try {
        slot = equivalent_churn_definition(
            reference_ecdf(panel, u, as_of, Metric::days_since_last_login, m, options.ecdf),
            options.q);
      } catch (const InsufficientHistory&) {
      }
    }
    try {
      const int k = equivalent_churn_definition(
          reference_ecdf(panel, u, as_of, Metric::days_since_last_login, Reference::endo,
                         options.ecdf),
          options.q);
      endo_sum[static_cast<std::size_t>(&gd - out.groups.data())] += k;
      ++gd.endo_users;
    } catch (const InsufficientHistory&) {
    }
    if (!gd.rcmm_k) continue;
    const bool rcmm_flag = dsl > *gd.rcmm_k;
    for (auto& cm : out.matrices) {
      const auto v = detail::try_indicator(panel, u, as_of, cm.mode, options.ecdf);
      if (!v) continue;
      const bool ecdf_flag = churn_risk_flag(*v, Direction::high_is_bad, options.q);
      if (rcmm_flag && ecdf_flag) ++cm.both;
      if (rcmm_flag && !ecdf_flag) ++cm.rcmm_only;
      if (!rcmm_flag && ecdf_flag) ++cm.ecdf_only;
      if (!rcmm_flag && !ecdf_flag) ++cm.neither;
    }
  }
  for (std::size_t i = 0; i < out.groups.size(); ++i) {
    if (out.groups[i].endo_users > 0) {
      out.groups[i].endo_avg_k = endo_sum[i] / static_cast<double>(out.groups[i].endo_users);
    }
  }
  return out;
}

}  // namespace engage

#endif  // ENGAGE_REPORT_HPP_
