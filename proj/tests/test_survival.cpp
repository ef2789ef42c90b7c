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

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "engage/ecdf.hpp"
#include "engage/survival.hpp"

namespace engage {
namespace {

const std::vector<SurvivalObservation> kToy = {{0, 1, true}, {0, 2, false}, {0, 3, true}};

std::vector<SurvivalObservation> random_obs(std::mt19937_64& rng, std::size_t n, bool truncate,
                                            double censor_p) {
  std::geometric_distribution<int> life(0.05);
  std::uniform_int_distribution<int> entry(0, 20);
  std::bernoulli_distribution censored(censor_p);
  std::vector<SurvivalObservation> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int e = truncate ? entry(rng) : 0;
    out.push_back({e, e + 1 + life(rng), !censored(rng)});
  }
  return out;
}

// Product-limit with the risk set recounted at every event time.
SurvivalCurve brute_force_km(const std::vector<SurvivalObservation>& obs) {
  std::vector<int> times;
  for (const auto& o : obs) {
    if (o.event) times.push_back(o.exit);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  SurvivalCurve c;
  double s = 1.0;
  for (int t : times) {
    double n = 0, d = 0;
    for (const auto& o : obs) {
      n += o.entry < t && t <= o.exit;
      d += o.event && o.exit == t;
    }
    s *= (n - d) / n;
    c.times.push_back(t);
    c.survival.push_back(s);
  }
  return c;
}

TEST(KaplanMeier, HandWorkedToy) {
  const auto km = kaplan_meier(kToy);
  EXPECT_EQ(km.at(0), 1.0);
  EXPECT_EQ(km.at(1), 2.0 / 3.0);
  EXPECT_EQ(km.at(2), 2.0 / 3.0);
  EXPECT_EQ(km.at(3), 0.0);
  ASSERT_TRUE(km.has_band());
  for (std::size_t i = 0; i < km.times.size(); ++i) {
    EXPECT_LE(km.lower[i], km.survival[i]);
    EXPECT_GE(km.upper[i], km.survival[i]);
  }
}

TEST(KaplanMeier, AllCensoredStaysAtOne) {
  const std::vector<SurvivalObservation> obs = {{0, 3, false}, {0, 8, false}, {2, 5, false}};
  const auto km = kaplan_meier(obs);
  for (int t = 0; t < 20; ++t) EXPECT_EQ(km.at(t), 1.0);
}

TEST(KaplanMeier, RejectsInvalidInput) {
  EXPECT_THROW(kaplan_meier(std::vector<SurvivalObservation>{}), Error);
  EXPECT_THROW(kaplan_meier(std::vector<SurvivalObservation>{{3, 3, true}}), Error);
  EXPECT_THROW(kaplan_meier(std::vector<SurvivalObservation>{{-1, 3, true}}), Error);
}

TEST(KaplanMeierOracle, TruncatedRiskSetsMatchRecount) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto obs = random_obs(rng, 5 + rep * 3, true, 0.3);
    const auto km = kaplan_meier(obs);
    const auto bf = brute_force_km(obs);
    EXPECT_EQ(km.times, bf.times);
    EXPECT_EQ(km.survival, bf.survival);
  }
}

TEST(KaplanMeierProperty, NoCensoringEqualsEmpiricalSurvival) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const auto obs = random_obs(rng, 50, false, 0.0);
    std::vector<double> durations;
    for (const auto& o : obs) durations.push_back(o.exit);
    const Ecdf e(durations);
    const auto km = kaplan_meier(obs);
    for (int t = 0; t <= 200; ++t) EXPECT_NEAR(km.at(t), 1.0 - e(t), 1e-12);
  }
}

TEST(KaplanMeierProperty, OrderInvariant) {
  std::mt19937_64 rng(13);
  auto obs = random_obs(rng, 200, true, 0.4);
  const auto km = kaplan_meier(obs);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(obs.begin(), obs.end(), rng);
    EXPECT_EQ(kaplan_meier(obs), km);
  }
}

TEST(KaplanMeierProperty, ValidCurveWithBand) {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 30; ++rep) {
    const auto km = kaplan_meier(random_obs(rng, 80, rep % 2 == 0, 0.3));
    double prev = 1.0;
    for (std::size_t i = 0; i < km.times.size(); ++i) {
      EXPECT_LE(km.survival[i], prev);
      EXPECT_GE(km.survival[i], 0.0);
      EXPECT_LE(km.lower[i], km.survival[i]);
      EXPECT_GE(km.upper[i], km.survival[i]);
      EXPECT_LE(km.upper[i], 1.0);
      prev = km.survival[i];
    }
  }
}

// Mean band width at the true median for n and 4n subjects.
TEST(KaplanMeierProperty, GreenwoodWidthShrinksWithRootN) {
  std::mt19937_64 rng(15);
  std::exponential_distribution<double> life(0.02);
  const int median = static_cast<int>(std::log(2.0) / 0.02);
  auto width = [&](std::size_t n) {
    double total = 0.0;
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<SurvivalObservation> obs;
      for (std::size_t i = 0; i < n; ++i) obs.push_back({0, 1 + static_cast<int>(life(rng)), true});
      const auto km = kaplan_meier(obs);
      const std::size_t j = km.index_at(median) - 1;
      total += km.upper[j] - km.lower[j];
    }
    return total / 40.0;
  };
  const double ratio = width(800) / width(200);
  EXPECT_NEAR(ratio, 0.5, 0.5 * 0.15);
}

TEST(NelsonAalen, HandWorked) {
  const auto h = nelson_aalen(kToy);
  EXPECT_EQ(h.at(0), 0.0);
  EXPECT_EQ(h.at(1), 1.0 / 3.0);
  EXPECT_EQ(h.at(3), 1.0 / 3.0 + 1.0);
  EXPECT_EQ(h.at(3), 4.0 / 3.0);
  EXPECT_EQ(nelson_aalen(std::vector<SurvivalObservation>{{0, 1, true}}).at(1), 1.0);
}

TEST(NelsonAalenProperty, FlemingHarringtonDominatesKaplanMeier) {
  std::mt19937_64 rng(16);
  for (int rep = 0; rep < 100; ++rep) {
    const auto obs = random_obs(rng, 10 + rep, rep % 2 == 1, 0.25);
    const auto km = kaplan_meier(obs);
    const auto h = nelson_aalen(obs);
    ASSERT_EQ(km.times, h.times);
    for (int t : km.times) EXPECT_GE(std::exp(-h.at(t)), km.at(t));
  }
}

TEST(Median, Examples) {
  SurvivalCurve c;
  c.times = {100, 250, 410, 600};
  c.survival = {0.9, 0.7, 0.5, 0.3};
  EXPECT_EQ(median_survival(c), 410);
  SurvivalCurve floor;
  floor.times = {10, 50};
  floor.survival = {0.9, 0.8};
  EXPECT_FALSE(median_survival(floor).has_value());
  SurvivalCurve step;
  step.times = {5};
  step.survival = {0.4};
  EXPECT_EQ(median_survival(step), 5);
}

SurvivalCurve step_to_zero(int t) {
  SurvivalCurve c;
  c.times = {t};
  c.survival = {0.0};
  return c;
}

TEST(Brier, PerfectPredictionsScoreZero) {
  std::mt19937_64 rng(17);
  const auto obs = random_obs(rng, 60, false, 0.0);
  std::vector<SurvivalCurve> pred;
  for (const auto& o : obs) pred.push_back(step_to_zero(o.exit));
  for (int t = 1; t <= 120; ++t) EXPECT_EQ(brier_score(pred, obs, t), 0.0);
  EXPECT_EQ(integrated_brier_score(pred, obs), 0.0);
}

TEST(Brier, ConstantHalfScoresQuarter) {
  std::mt19937_64 rng(18);
  const auto obs = random_obs(rng, 60, false, 0.0);
  SurvivalCurve half;
  half.times = {1};
  half.survival = {0.5};
  const std::vector<SurvivalCurve> pred(obs.size(), half);
  for (int t = 1; t <= 120; ++t) EXPECT_EQ(brier_score(pred, obs, t), 0.25);
  EXPECT_EQ(integrated_brier_score(pred, obs), 0.25);
}

TEST(BrierOracle, UncensoredEqualsMeanSquaredError) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0, 1);
  const auto obs = random_obs(rng, 40, false, 0.0);
  std::vector<SurvivalCurve> pred;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    SurvivalCurve c;
    double s = 1.0;
    for (int t = 5; t < 150; t += 5) {
      s *= u(rng);
      c.times.push_back(t);
      c.survival.push_back(s);
    }
    pred.push_back(c);
  }
  for (int t : {1, 7, 20, 33, 60, 90}) {
    double mse = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double y = obs[i].exit > t ? 1.0 : 0.0;
      mse += (y - pred[i].at(t)) * (y - pred[i].at(t));
    }
    EXPECT_NEAR(brier_score(pred, obs, t), mse / obs.size(), 1e-12);
  }
}

TEST(Brier, ZeroCensoringSurvivalNamesTime) {
  const std::vector<SurvivalObservation> obs = {{0, 3, true}};
  const std::vector<SurvivalCurve> pred = {step_to_zero(3)};
  SurvivalCurve g;
  g.times = {1};
  g.survival = {0.0};
  try {
    brier_score(pred, obs, 4, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("t=3"), std::string::npos);
  }
}

TEST(IntegratedBrier, ConstantIntegrands) {
  const std::vector<int> grid = {1, 4, 9, 20};
  EXPECT_EQ(integrated_brier_score(grid, std::vector<double>(4, 0.0), 20), 0.0);
  EXPECT_EQ(integrated_brier_score(grid, std::vector<double>(4, 0.25), 20), 0.25);
  // linear integrand BS(t) = t / 20 integrates to 1/2 on [0, 20] past the first point
  const std::vector<double> lin = {1 / 20.0, 4 / 20.0, 9 / 20.0, 1.0};
  const double expected = (1 / 20.0 * 1 + 0.5 * (1 / 20.0 + 1.0) * 19) / 20.0;
  EXPECT_NEAR(integrated_brier_score(grid, lin, 20), expected, 1e-12);
  EXPECT_THROW(integrated_brier_score(grid, lin, 0), Error);
}

TEST(IntegratedBrier, HorizonAndGrid) {
  std::vector<SurvivalObservation> obs;
  for (int i = 1; i <= 20; ++i) obs.push_back({0, i * 2, true});
  EXPECT_EQ(default_ibs_horizon(obs), 38);
  const auto grid = ibs_grid(obs, 7);
  EXPECT_EQ(grid, (std::vector<int>{2, 4, 6, 7}));
}

TEST(IntegratedBrierProperty, NullModelBoundsInUnitInterval) {
  std::mt19937_64 rng(20);
  for (int rep = 0; rep < 20; ++rep) {
    const auto train = random_obs(rng, 100, false, 0.3);
    const auto test = random_obs(rng, 50, false, 0.3);
    const double ibs = null_model_ibs(train, test);
    EXPECT_GE(ibs, 0.0);
    EXPECT_LE(ibs, 1.0);
  }
}

TEST(CurveCsv, StartsAtOne) {
  std::ostringstream out;
  write_curve_csv(out, kaplan_meier(kToy));
  EXPECT_EQ(out.str().substr(0, 8), "0,1,1,1\n");
  std::ostringstream grouped;
  write_curve_csv(grouped, kaplan_meier(kToy), "KE");
  EXPECT_EQ(grouped.str().substr(0, 11), "KE,0,1,1,1\n");
}

}  // namespace
}  // namespace engage
