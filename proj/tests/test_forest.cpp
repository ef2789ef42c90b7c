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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "engage/evaluate.hpp"
#include "engage/forest.hpp"
#include "engage/model_io.hpp"
#include "engage/synth.hpp"
#include "support.hpp"

namespace engage {
namespace {

// Static rows: feature 0 is the group (hazard multiplied by `hr` when 1),
// the rest are uniform noise; uniform censoring on [1, 400].
SurvivalDataset planted_rows(std::uint64_t seed, std::size_t n, double hr, int noise = 3,
                             bool censor = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> c(1, 400);
  SurvivalDataset d;
  d.feature_names = {"group"};
  for (int k = 0; k < noise; ++k) d.feature_names.push_back("noise" + std::to_string(k));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = static_cast<double>(i % 2);
    std::exponential_distribution<double> life(0.01 * (g > 0 ? hr : 1.0));
    const int t = 1 + static_cast<int>(life(rng));
    const int cens = censor ? c(rng) : 1 << 30;
    FeatureRow r;
    r.subject = i;
    r.exit = std::min(t, cens);
    r.event = t <= cens;
    r.features.push_back(g);
    for (int k = 0; k < noise; ++k) r.features.push_back(std::floor(u(rng) * 100));
    d.rows.push_back(r);
  }
  return d;
}

ForestParams small_params(int ntree = 20) {
  ForestParams p;
  p.ntree = ntree;
  return p;
}

void expect_valid_curve(const SurvivalCurve& c) {
  double prev = 1.0;
  for (double s : c.survival) {
    ASSERT_LE(s, prev + 1e-12);
    ASSERT_GE(s, 0.0);
    ASSERT_LE(s, 1.0);
    prev = s;
  }
  EXPECT_EQ(c.at(0), 1.0);
}

TEST(Forest, SameSeedIsBitIdenticalForAnyWorkerCount) {
  const auto d = planted_rows(1, 300, 4.0);
  for (auto algo : {ForestAlgorithm::csf, ForestAlgorithm::ltrc_cif, ForestAlgorithm::ltrc_rrf}) {
    auto p = small_params();
    const auto a = fit_forest(d, algo, p, 7);
    const auto b = fit_forest(d, algo, p, 7);
    p.workers = 4;
    const auto c = fit_forest(d, algo, p, 7);
    EXPECT_EQ(a.trees, b.trees);
    EXPECT_EQ(a.trees, c.trees);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(a.predict(d.rows[i]), c.predict(d.rows[i]));
  }
}

TEST(Forest, InvariantToRowOrder) {
  auto d = planted_rows(2, 300, 4.0);
  const auto a = fit_csf(d, small_params(), 3);
  std::mt19937_64 rng(5);
  std::shuffle(d.rows.begin(), d.rows.end(), rng);
  const auto b = fit_csf(d, small_params(), 3);
  EXPECT_EQ(a.trees, b.trees);
}

TEST(Forest, ZeroAlphaGivesTrainingKaplanMeier) {
  const auto d = planted_rows(3, 200, 4.0);
  auto p = small_params(1);
  p.alpha = 0.0;
  p.resample = false;
  const auto m = fit_csf(d, p, 1);
  ASSERT_EQ(m.trees[0].nodes.size(), 1u);
  std::vector<SurvivalObservation> obs;
  for (const auto& r : d.rows) obs.push_back(r.observation());
  const auto km = kaplan_meier(obs);
  const auto pred = m.predict(d.rows[0]);
  for (int t = 0; t <= 400; ++t) EXPECT_EQ(pred.at(t), km.at(t));
}

TEST(Forest, LtrcCifReducesToCsfOnStaticRows) {
  const auto d = planted_rows(4, 300, 4.0);
  const auto csf = fit_csf(d, small_params(), 11);
  const auto cif = fit_ltrc_cif(d, small_params(), 11);
  for (const auto& r : d.rows) EXPECT_EQ(csf.predict(r), cif.predict(r));
}

TEST(Forest, PredictionsAreValidCurves) {
  const auto cohort = generate(testing::regime_spec(300, 2));
  const auto panel = testing::cohort_panel(cohort);
  for (auto algo : {ForestAlgorithm::csf, ForestAlgorithm::ltrc_cif, ForestAlgorithm::ltrc_rrf}) {
    ModelSpec spec;
    spec.algorithm = algo;
    spec.params = small_params();
    const auto data = prepare_model_data(panel, spec);
    std::vector<std::size_t> all(data.labels.obs.size());
    std::iota(all.begin(), all.end(), 0);
    const auto rows = model_rows(data, spec, all);
    const auto model = fit_forest(rows, algo, spec.params, 5);
    for (std::size_t b = 0; b < rows.rows.size();) {
      std::size_t e = b;
      while (e < rows.rows.size() && rows.rows[e].subject == rows.rows[b].subject) ++e;
      expect_valid_curve(model.predict(std::span<const FeatureRow>(rows.rows.data() + b, e - b)));
      b = e;
    }
  }
}

TEST(Forest, ConstantFeaturesGiveRootOnlyTreesWithWarning) {
  auto d = planted_rows(5, 100, 1.0);
  for (auto& r : d.rows) std::fill(r.features.begin(), r.features.end(), 1.0);
  const auto m = fit_csf(d, small_params(5), 1);
  ASSERT_FALSE(m.warnings.empty());
  for (const auto& t : m.trees) EXPECT_EQ(t.nodes.size(), 1u);
}

TEST(Forest, RejectsBadInput) {
  auto d = planted_rows(6, 50, 1.0);
  EXPECT_THROW(fit_csf(SurvivalDataset{}, small_params(), 1), Error);
  auto p = small_params();
  p.ntree = 0;
  EXPECT_THROW(fit_csf(d, p, 1), Error);
  d.rows[0].entry = 1;
  EXPECT_THROW(fit_csf(d, small_params(), 1), Error);
  EXPECT_NO_THROW(fit_ltrc_cif(d, small_params(2), 1));
}

TEST(Forest, SeparatingFeatureSplitsEveryRoot) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> shortl(1, 20), longl(100, 200), noise(0, 50);
  SurvivalDataset d;
  d.feature_names = {"x", "n1", "n2"};
  for (std::size_t i = 0; i < 200; ++i) {
    const bool fast = i % 2 == 0;
    d.rows.push_back({i, 0, fast ? shortl(rng) : longl(rng), true,
                      {fast ? 0.0 : 1.0, double(noise(rng)), double(noise(rng))}});
  }
  auto p = small_params(30);
  p.mtry = 3;
  const auto m = fit_csf(d, p, 4);
  for (const auto& t : m.trees) EXPECT_EQ(t.nodes[0].feature, 0);
  const auto fast = median_survival(m.predict(d.rows[0]));
  const auto slow = median_survival(m.predict(d.rows[1]));
  ASSERT_TRUE(fast && slow);
  EXPECT_LT(*fast, *slow);
}

double mean_leaf_risk(const ForestModel& m, const FeatureRow& r) {
  double s = 0.0;
  for (const auto& t : m.trees) s += t.leaf_for(r.features).risk;
  return s / static_cast<double>(m.trees.size());
}

// Spurious splits stay within the significance level, and the forest's
// risk for every subject stays near 1.
TEST(RelativeRiskForest, NullCohortRisksNearOne) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = planted_rows(100 + seed, 600, 1.0);
    const auto p = small_params(50);
    const auto m = fit_ltrc_rrf(d, p, seed);
    int split = 0;
    for (const auto& t : m.trees) {
      if (t.nodes.size() > 1) {
        ++split;
        continue;
      }
      EXPECT_NEAR(t.leaves[0].risk, 1.0, 1e-9);
    }
    EXPECT_LE(split, static_cast<int>(p.alpha * p.ntree)) << "seed " << seed;
    for (const auto& r : d.rows) {
      const double risk = mean_leaf_risk(m, r);
      EXPECT_GE(risk, 0.9);
      EXPECT_LE(risk, 1.1);
    }
  }
}

TEST(RelativeRiskForest, HazardRatioFourRecovered) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto d = planted_rows(200 + seed, 1000, 4.0);
    auto p = small_params(50);
    p.mtry = static_cast<int>(d.feature_names.size());
    const auto m = fit_ltrc_rrf(d, p, seed);
    double r0 = 0.0, r1 = 0.0;
    for (const auto& r : d.rows) (r.features[0] > 0 ? r1 : r0) += mean_leaf_risk(m, r);
    const double ratio = r1 / r0;
    EXPECT_GE(ratio, 2.5) << "seed " << seed;
    EXPECT_LE(ratio, 6.0) << "seed " << seed;
  }
}

TEST(RelativeRiskForest, SingleLeafBaselineIsNelsonAalen) {
  const auto d = planted_rows(8, 200, 1.0);
  auto p = small_params(1);
  p.alpha = 0.0;
  p.resample = false;
  const auto m = fit_ltrc_rrf(d, p, 1);
  std::vector<SurvivalObservation> obs;
  for (const auto& r : d.rows) obs.push_back(r.observation());
  const auto h = nelson_aalen(obs);
  ASSERT_EQ(m.trees[0].leaves.size(), 1u);
  EXPECT_NEAR(m.trees[0].leaves[0].risk, 1.0, 1e-12);
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    EXPECT_NEAR(m.trees[0].baseline[i], h.at(m.grid[i]), 1e-12);
  }
}

TEST(ModelIo, RoundTrip) {
  const auto d = planted_rows(7, 200, 4.0);
  for (auto algo : {ForestAlgorithm::csf, ForestAlgorithm::ltrc_rrf}) {
    const auto m = fit_forest(d, algo, small_params(10), 21);
    std::stringstream buf;
    write_model(buf, m);
    const auto back = read_model(buf);
    EXPECT_EQ(back.algorithm, m.algorithm);
    EXPECT_EQ(back.seed, 21u);
    EXPECT_EQ(back.params.ntree, 10);
    EXPECT_EQ(back.feature_names, m.feature_names);
    EXPECT_EQ(back.grid, m.grid);
    EXPECT_EQ(back.trees, m.trees);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(back.predict(d.rows[i]), m.predict(d.rows[i]));
  }
  std::stringstream junk("NOPE1234");
  EXPECT_THROW(read_model(junk), Error);
}

EvaluationReport report_with(std::vector<std::string> names, std::vector<double> imp) {
  EvaluationReport r;
  r.feature_names = std::move(names);
  r.importance = std::move(imp);
  return r;
}

TEST(SelectTop, TieBreakByName) {
  const auto r = report_with({"c", "a", "b"}, {0.2, 0.5, 0.2});
  EXPECT_EQ(select_top_features(r, 2).features, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(select_top_features(r, 3).features, (std::vector<std::string>{"a", "b", "c"}));
  const auto over = select_top_features(r, 5);
  EXPECT_EQ(over.features.size(), 3u);
  EXPECT_EQ(over.warnings.size(), 1u);
  EXPECT_THROW(select_top_features(r, 0), Error);
}

}  // namespace
}  // namespace engage
