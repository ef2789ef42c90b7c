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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "engage/score.hpp"
#include "score_oracle.hpp"
#include "support.hpp"

namespace engage {
namespace {

using testing::base_day;

TEST(MinMax, Examples) {
  const std::vector<double> ref{0, 10};
  EXPECT_EQ(minmax_scale(5, ref), 0.5);
  EXPECT_EQ(minmax_scale(12, ref), 1.0);
  EXPECT_EQ(minmax_scale(-3, ref), 0.0);
  EXPECT_THROW(minmax_scale(1, std::vector<double>{}), Error);
}

TEST(MinMax, DegenerateReference) {
  const std::vector<double> ref{4, 4};
  EXPECT_EQ(minmax_scale(4, ref), 1.0);
  EXPECT_EQ(minmax_scale(5, ref), 1.0);
  EXPECT_EQ(minmax_scale(3, ref), 0.0);
  const std::vector<double> zeros{0, 0};
  EXPECT_EQ(minmax_scale(0, zeros), 0.0);
}

TEST(MinMax, MatchesFormulaOnRandomInputs) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int rep = 0; rep < 10000; ++rep) {
    std::vector<double> ref(1 + rep % 9);
    for (auto& v : ref) v = u(rng);
    const double x = u(rng);
    EXPECT_EQ(minmax_scale(x, ref), testing::scale_formula(x, ref));
  }
}

TEST(Harmonic, Examples) {
  EXPECT_EQ(harmonic_score(std::vector<double>{1, 1, 1}), 1.0);
  EXPECT_EQ(harmonic_score(std::vector<double>{0.5, 1.0}), 2.0 / 3.0);
  EXPECT_EQ(harmonic_score(std::vector<double>{0.3, 0.0, 0.9}), 0.0);
  EXPECT_THROW(harmonic_score(std::vector<double>{}), Error);
  EXPECT_THROW(harmonic_score(std::vector<double>{1.5}), Error);
}

// Bounds, zero rule, strict monotonicity and permutation invariance over
// 100000 random component vectors.
TEST(HarmonicProperty, Algebra) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100000; ++rep) {
    std::vector<double> z(1 + rep % 8);
    for (auto& v : z) v = u(rng);
    if (rep % 10 == 0) z[rng() % z.size()] = 0.0;
    const double s = harmonic_score(z);
    ASSERT_GE(s, 0.0);
    ASSERT_LE(s, 1.0);
    const bool has_zero = std::find(z.begin(), z.end(), 0.0) != z.end();
    if (has_zero) {
      ASSERT_EQ(s, 0.0);
      continue;
    }
    ASSERT_GT(s, 0.0);
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    ASSERT_LE(*lo, s * (1 + 1e-12));
    ASSERT_LE(s, *hi * (1 + 1e-12));
    auto up = z;
    const std::size_t j = rng() % z.size();
    up[j] = up[j] + (1.0 - up[j]) * 0.5;
    if (up[j] > z[j]) ASSERT_GT(harmonic_score(up), s);
    auto perm = z;
    std::shuffle(perm.begin(), perm.end(), rng);
    ASSERT_NEAR(harmonic_score(perm), s, 1e-12);
  }
}

TEST(ScoreSeries, InactiveDayScoresZero) {
  std::vector<EventRecord> events;
  testing::add_user(events, "u", "KE", base_day(), {{0, 3, 1}, {1, 5, 0}});
  const auto p = build_panel(events, base_day() + std::chrono::days{3});
  for (Reference mode : {Reference::endo, Reference::exo, Reference::snp}) {
    ScoreSpec spec;
    spec.scaling = mode;
    const auto s = score_series(p, spec, 0, p.end, p.end);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].value, 0.0);
  }
}

TEST(ScoreSeries, RejectsBadSpecs) {
  const auto p = testing::random_panel(1);
  ScoreSpec dup;
  dup.components = {Metric::action_count, Metric::action_count};
  EXPECT_THROW(score_series(p, dup, 0, p.end, p.end), Error);
  ScoreSpec none;
  none.components.clear();
  EXPECT_THROW(score_series(p, none, 0, p.end, p.end), Error);
  EXPECT_THROW(parse_metric("bogus_metric"), Error);
}

TEST(ScoreOracle, SeriesMatchesDayByDayRecomputation) {
  const auto p = testing::random_panel(6);
  for (Reference mode : {Reference::endo, Reference::exo, Reference::snp}) {
    ScoreSpec spec;
    spec.scaling = mode;
    spec.components = {Metric::weekly_loyalty_index, Metric::action_count, Metric::progression,
                       Metric::connection_time_s};
    const auto all = score_panel(p, spec, p.users[0].first_day - std::chrono::days{30}, p.end, 3);
    for (std::size_t u = 0; u < p.users.size(); ++u) {
      const auto& up = p.users[u];
      const auto one = score_series(p, spec, u, up.first_day, p.end);
      ASSERT_EQ(one.size(), up.days.size());
      for (int i = 0; i < up.length(); ++i) {
        const auto expected = testing::score_formula(p, spec, u, i);
        EXPECT_EQ(one[i].components, expected.components);
        EXPECT_EQ(one[i].value, expected.value);
        EXPECT_EQ(all[u][i].value, expected.value);
      }
    }
  }
}

// In a one-user group the group history is the user's own history.
TEST(ScoreProperty, EndoEqualsExoForSoleUser) {
  testing::RandomPanelOptions o;
  o.users = 1;
  o.groups = {"KE"};
  const auto p = testing::random_panel(10, o);
  ScoreSpec endo, exo;
  exo.scaling = Reference::exo;
  const auto a = score_series(p, endo, 0, p.users[0].first_day, p.end);
  const auto b = score_series(p, exo, 0, p.users[0].first_day, p.end);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value, b[i].value);
}

TEST(ScoreProperty, ValuesInUnitIntervalAndZeroIffZeroComponent) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = testing::random_panel(seed);
    for (Reference mode : {Reference::endo, Reference::exo, Reference::snp}) {
      ScoreSpec spec;
      spec.scaling = mode;
      for (const auto& series : score_panel(p, spec, p.users[0].first_day, p.end)) {
        for (const auto& s : series) {
          EXPECT_GE(s.value, 0.0);
          EXPECT_LE(s.value, 1.0);
          const bool zero = std::find(s.components.begin(), s.components.end(), 0.0) !=
                            s.components.end();
          EXPECT_EQ(s.value == 0.0, zero);
        }
      }
    }
  }
}

}  // namespace
}  // namespace engage
