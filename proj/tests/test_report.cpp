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


#include <gtest/gtest.h>

#include "ecdf_oracle.hpp"
#include "engage/report.hpp"
#include "rcmm_oracle.hpp"
#include "support.hpp"

namespace engage {
namespace {

using testing::add_logins;
using testing::base_day;

std::optional<int> oracle_k(const CohortPanel& p, const std::string& group) {
  const auto grid = default_k_grid();
  for (const auto& c : testing::brute_force_rcmm(p, grid, default_missed_metrics())) {
    if (c.group == group) return testing::brute_force_definition(c, 0.3, 0.1);
  }
  return std::nullopt;
}

TEST(Compare, CellsMatchPerUserRecount) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    testing::RandomPanelOptions o;
    o.users = 60;
    o.span = 150;
    o.gap_p = 0.08;
    const auto p = testing::random_panel(seed, o);
    const Date as_of = p.end - std::chrono::days{5};
    const auto cmp = compare_churn_definitions(p, as_of);
    ASSERT_EQ(cmp.matrices.size(), 3u);
    std::vector<std::array<std::size_t, 4>> cells(3, {0, 0, 0, 0});
    const Reference modes[] = {Reference::endo, Reference::exo, Reference::snp};
    for (std::size_t u = 0; u < p.users.size(); ++u) {
      const auto& up = p.users[u];
      const int idx = days_between(up.first_day, as_of);
      if (idx < 0) continue;
      const auto k = oracle_k(p, up.group);
      if (!k) continue;
      const bool r = up.days[idx].days_since_last_login > *k;
      for (int m = 0; m < 3; ++m) {
        const auto v =
            testing::count_indicator(p, u, as_of, Metric::days_since_last_login, modes[m]);
        if (!v) continue;
        const bool e = *v > 0.9;
        ++cells[m][r ? (e ? 0 : 1) : (e ? 2 : 3)];
      }
    }
    for (int m = 0; m < 3; ++m) {
      const auto& cm = cmp.matrices[m];
      EXPECT_EQ(cm.mode, modes[m]);
      EXPECT_EQ(cm.both, cells[m][0]);
      EXPECT_EQ(cm.rcmm_only, cells[m][1]);
      EXPECT_EQ(cm.ecdf_only, cells[m][2]);
      EXPECT_EQ(cm.neither, cells[m][3]);
    }
    for (const auto& gd : cmp.groups) EXPECT_EQ(gd.rcmm_k, oracle_k(p, gd.group));
    EXPECT_GT(cells[1][0] + cells[1][1] + cells[1][2] + cells[1][3], 20u);
  }
}

// With q set to the exo ECDF value at the RCMM horizon, both definitions
// mark exactly the users whose current gap exceeds that horizon.
TEST(Compare, CoincidingDefinitionsHaveEmptyOffDiagonal) {
  testing::RandomPanelOptions o;
  o.users = 200;
  o.span = 150;
  o.gap_p = 0.08;
  o.groups = {"KE"};
  const auto p = testing::random_panel(3, o);
  const Date as_of = p.end;
  const auto k = oracle_k(p, "KE");
  ASSERT_TRUE(k.has_value());
  const auto ecdf = reference_ecdf(p, 0, as_of, Metric::days_since_last_login, Reference::exo);
  ASSERT_LT(ecdf(*k - 1), ecdf(*k));
  ASSERT_LT(ecdf(*k), ecdf(*k + 1));
  ReportOptions opt;
  opt.q = ecdf(*k);
  const auto cmp = compare_churn_definitions(p, as_of, opt);
  ASSERT_EQ(cmp.groups.size(), 1u);
  EXPECT_EQ(cmp.groups[0].rcmm_k, k);
  EXPECT_EQ(cmp.groups[0].exo_k, k);
  const auto& exo = cmp.matrices[1];
  EXPECT_EQ(exo.mode, Reference::exo);
  EXPECT_EQ(exo.rcmm_only, 0u);
  EXPECT_EQ(exo.ecdf_only, 0u);
  EXPECT_GT(exo.both, 0u);
  EXPECT_GT(exo.neither, 0u);
}

TEST(Compare, GroupKTable) {
  testing::RandomPanelOptions o;
  o.users = 40;
  o.span = 150;
  o.gap_p = 0.08;
  const auto p = testing::random_panel(6, o);
  const auto cmp = compare_churn_definitions(p, p.end);
  ASSERT_EQ(cmp.groups.size(), 2u);
  for (const auto& gd : cmp.groups) {
    std::size_t first = p.users.size();
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t u = 0; u < p.users.size(); ++u) {
      if (p.users[u].group != gd.group) continue;
      if (first == p.users.size()) first = u;
      try {
        sum += equivalent_churn_definition(
            reference_ecdf(p, u, p.end, Metric::days_since_last_login, Reference::endo), 0.9);
        ++n;
      } catch (const InsufficientHistory&) {
      }
    }
    EXPECT_EQ(gd.endo_users, n);
    ASSERT_TRUE(gd.endo_avg_k.has_value());
    EXPECT_DOUBLE_EQ(*gd.endo_avg_k, sum / static_cast<double>(n));
    EXPECT_EQ(gd.exo_k, equivalent_churn_definition(
                            reference_ecdf(p, first, p.end, Metric::days_since_last_login,
                                           Reference::exo),
                            0.9));
  }
  EXPECT_THROW(compare_churn_definitions(p, p.end + std::chrono::days{1}), Error);
}

TEST(ReportCard, ZeroActivityDay) {
  // gaps {2, 2, 2}; nothing happens on the report day
  std::vector<EventRecord> events;
  add_logins(events, "z", "KE", base_day(), {0, 2, 4, 6});
  const auto p = build_panel(events, base_day() + std::chrono::days{8});
  const auto r = make_report(p, nullptr, {"z"}, p.end);
  ASSERT_EQ(r.cards.size(), 1u);
  const auto& c = r.cards[0];
  EXPECT_EQ(c.score, 0.0);
  EXPECT_EQ(c.days_since_last_login, 2);
  ASSERT_TRUE(c.ecdf_endo.has_value());
  EXPECT_EQ(*c.ecdf_endo, 1.0);
  EXPECT_EQ(c.flag_ecdf_endo, true);
  EXPECT_EQ(c.equivalent_k, 2);
  EXPECT_EQ(c.flag_rcmm.has_value(), c.rcmm_k.has_value());
  if (c.rcmm_k) EXPECT_EQ(*c.flag_rcmm, 2 > *c.rcmm_k);
  EXPECT_GE(c.survival, 0.0);
  EXPECT_LE(c.survival, 1.0);
}

void expect_card_matches_modules(const CohortPanel& p, const ForestModel* model,
                                 const ReportCard& c, const ReportOptions& opt) {
  const auto u = *p.find_user(c.user_id);
  const auto& up = p.users[u];
  const int idx = days_between(up.first_day, c.as_of);
  EXPECT_EQ(c.group, up.group);
  EXPECT_EQ(c.days_since_last_login, up.days[idx].days_since_last_login);
  const std::pair<Reference, const std::optional<double>*> ind[] = {
      {Reference::endo, &c.ecdf_endo}, {Reference::exo, &c.ecdf_exo}, {Reference::snp, &c.ecdf_snp}};
  for (const auto& [mode, v] : ind) {
    std::optional<double> direct;
    try {
      direct = indicator(p, u, c.as_of, Metric::days_since_last_login, mode).value;
    } catch (const InsufficientHistory&) {
    }
    EXPECT_EQ(*v, direct);
  }
  EXPECT_EQ(c.flag_ecdf_endo.has_value(), c.ecdf_endo.has_value());
  if (c.ecdf_endo) EXPECT_EQ(*c.flag_ecdf_endo, *c.ecdf_endo > opt.q);
  if (c.ecdf_exo) EXPECT_EQ(*c.flag_ecdf_exo, *c.ecdf_exo > opt.q);
  if (c.ecdf_snp) EXPECT_EQ(*c.flag_ecdf_snp, *c.ecdf_snp > opt.q);
  EXPECT_EQ(c.score, score_series(p, opt.score, u, c.as_of, c.as_of).front().value);
  EXPECT_EQ(c.rcmm_k, oracle_k(p, up.group));
  if (c.rcmm_k) EXPECT_EQ(*c.flag_rcmm, c.days_since_last_login > *c.rcmm_k);
  double expected = 1.0;
  if (idx > 0 && model) {
    const auto refs = detail::resolve_columns(p, model->feature_names);
    std::vector<FeatureRow> path;
    if (model->algorithm == ForestAlgorithm::csf) {
      path.push_back({u, 0, idx, false, detail::row_features(up, refs, static_cast<std::size_t>(idx))});
    } else {
      path = pseudo_observations(p, u, refs, {0, idx, false}, opt.interval);
    }
    expected = model->predict(path).at(idx);
  } else if (idx > 0) {
    expected = kaplan_meier(label_churn(p, opt.churn_k).obs).at(idx);
  }
  EXPECT_EQ(c.survival, expected);
  EXPECT_GE(c.survival, 0.0);
  EXPECT_LE(c.survival, 1.0);
}

TEST(ReportCard, FieldsEqualDirectModuleCalls) {
  testing::RandomPanelOptions o;
  o.users = 50;
  o.span = 150;
  o.gap_p = 0.08;
  const auto p = testing::random_panel(11, o);
  const Date as_of = p.end - std::chrono::days{3};
  ReportOptions opt;
  const auto km_report = make_report(p, nullptr, {}, as_of, opt);
  ASSERT_EQ(km_report.cards.size(), p.users.size());
  for (const auto& c : km_report.cards) expect_card_matches_modules(p, nullptr, c, opt);

  const auto labels = label_churn(p, opt.churn_k);
  const auto columns = default_feature_columns(p);
  ForestParams params;
  params.ntree = 10;
  const auto csf = fit_forest(static_rows(p, labels, columns), ForestAlgorithm::csf, params, 3);
  const auto rrf = fit_forest(pseudo_rows(p, labels, columns, opt.interval),
                              ForestAlgorithm::ltrc_rrf, params, 3);
  for (const ForestModel* m : {&csf, &rrf}) {
    const auto r = make_report(p, m, {"user001", "user004", "user017"}, as_of, opt);
    ASSERT_EQ(r.cards.size(), 3u);
    for (const auto& c : r.cards) expect_card_matches_modules(p, m, c, opt);
  }
}

TEST(ReportCard, Errors) {
  const auto p = testing::random_panel(2);
  EXPECT_THROW(make_report(p, nullptr, {"nobody"}, p.end), Error);
  EXPECT_THROW(make_report(p, nullptr, {}, p.end + std::chrono::days{1}), Error);
}

}  // namespace
}  // namespace engage
