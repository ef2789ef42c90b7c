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

// Repeated train/test evaluation of survival forests and feature ranking.
//
// Each round splits the labeled users at random, fits on the training users
// and scores the held-out users by integrated Brier score. A Kaplan-Meier
// curve of the training labels applied to every held-out user is scored on
// the same split as the no-covariate baseline. Feature importance is the
// increase in held-out IBS after permuting one feature column.

#ifndef ENGAGE_EVALUATE_HPP_
#define ENGAGE_EVALUATE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/common.hpp"
#include "engage/features.hpp"
#include "engage/forest.hpp"
#include "engage/panel.hpp"
#include "engage/parallel.hpp"
#include "engage/survival.hpp"

namespace engage {

struct ModelSpec {
  ForestAlgorithm algorithm = ForestAlgorithm::csf;
  ForestParams params;
  int churn_k = 31;
  // Rolling windows added when the panel has no engineered columns yet.
  std::vector<int> windows = {3, 7, 15};
  std::vector<std::string> features;  // empty: default_feature_columns
  PseudoInterval interval = PseudoInterval::week;
  bool importance = true;
  std::optional<int> horizon;  // IBS t_max; default 95th percentile of held-out exits
};

/// Panel with engineered columns, churn labels and resolved feature columns,
/// shared by every round.
struct ModelData {
  CohortPanel panel;
  ChurnLabels labels;
  std::vector<std::string> columns;
  std::vector<ColumnRef> refs;
};

inline ModelData prepare_model_data(const CohortPanel& panel, const ModelSpec& spec) {
  ModelData d;
  d.panel = panel.feature_names.empty() && !spec.windows.empty()
                ? rolling_features(panel, spec.windows)
                : panel;
  d.labels = label_churn(d.panel, spec.churn_k);
  d.columns = spec.features.empty() ? default_feature_columns(d.panel) : spec.features;
  for (const auto& c : d.columns) d.refs.push_back(resolve_column(d.panel, c));
  return d;
}

/// Rows of the given labeled users (indices into labels), static or
/// pseudo-observations depending on the algorithm.
inline SurvivalDataset model_rows(const ModelData& d, const ModelSpec& spec,
                                  std::span<const std::size_t> members) {
  SurvivalDataset out;
  out.feature_names = d.columns;
  for (std::size_t i : members) {
    const std::size_t u = d.labels.users[i];
    const auto& o = d.labels.obs[i];
    if (is_ltrc(spec.algorithm)) {
      for (auto& r : pseudo_observations(d.panel, u, d.refs, o, spec.interval)) {
        out.rows.push_back(std::move(r));
      }
    } else {
      out.rows.push_back({u, 0, o.exit, o.event,
                          detail::row_features(d.panel.users[u], d.refs,
                                               static_cast<std::size_t>(o.exit))});
    }
  }
  return out;
}

inline ForestModel fit_model(const ModelData& d, const ModelSpec& spec,
                             std::span<const std::size_t> members, std::uint64_t seed) {
  return fit_forest(model_rows(d, spec, members), spec.algorithm, spec.params, seed);
}

struct TrainTestSplit {
  std::vector<std::size_t> train;  // indices into labels, ascending
  std::vector<std::size_t> test;
};

/// User-level shuffle split; the training share is rounded and kept within
/// [1, n - 1].
inline TrainTestSplit split_users(std::size_t n, double train_share, std::mt19937_64& rng) {
  if (n < 2) throw Error("a train/test split needs at least two users");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  auto n_train = static_cast<std::size_t>(std::llround(train_share * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  TrainTestSplit s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

struct RoundResult {
  int round = 0;
  std::uint64_t forest_seed = 0;
  std::size_t train_users = 0;
  std::size_t test_users = 0;
  std::size_t test_events = 0;
  int horizon = 0;
  bool skipped = false;
  double ibs = 0.0;
  double null_ibs = 0.0;
  std::vector<double> importance;
};

namespace detail {

// Held-out predictions, one per labeled test user, from its own rows.
inline std::vector<SurvivalCurve> predict_users(const ForestModel& model,
                                                const SurvivalDataset& rows, unsigned workers) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t i = 0; i < rows.rows.size();) {
    std::size_t j = i;
    while (j < rows.rows.size() && rows.rows[j].subject == rows.rows[i].subject) ++j;
    ranges.emplace_back(i, j);
    i = j;
  }
  std::vector<SurvivalCurve> out(ranges.size());
  parallel_for(ranges.size(), workers, [&](std::size_t k) {
    const auto [b, e] = ranges[k];
    out[k] = model.predict(std::span<const FeatureRow>(rows.rows.data() + b, e - b));
  });
  return out;
}

}  // namespace detail

/// Fits on `split.train`, scores `split.test`. `rng` drives the permutations
/// of the importance measure.
inline RoundResult evaluate_split(const ModelData& d, const ModelSpec& spec,
                                  const TrainTestSplit& split, std::uint64_t forest_seed,
                                  std::mt19937_64& rng) {
  RoundResult r;
  r.forest_seed = forest_seed;
  r.train_users = split.train.size();
  r.test_users = split.test.size();
  std::vector<SurvivalObservation> train_obs, test_obs;
  for (std::size_t i : split.train) train_obs.push_back(d.labels.obs[i]);
  for (std::size_t i : split.test) test_obs.push_back(d.labels.obs[i]);
  for (const auto& o : test_obs) r.test_events += o.event ? 1 : 0;
  if (r.test_events == 0) {
    r.skipped = true;
    return r;
  }
  r.horizon = spec.horizon.value_or(default_ibs_horizon(test_obs));
  const ForestModel model = fit_model(d, spec, split.train, forest_seed);
  SurvivalDataset test_rows = model_rows(d, spec, split.test);
  const auto pred = detail::predict_users(model, test_rows, spec.params.workers);
  r.ibs = integrated_brier_score(pred, test_obs, r.horizon);
  r.null_ibs = null_model_ibs(train_obs, test_obs, r.horizon);
  if (spec.importance) {
    const std::size_t n = test_rows.rows.size();
    for (std::size_t f = 0; f < d.columns.size(); ++f) {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      SurvivalDataset shuffled = test_rows;
      for (std::size_t i = 0; i < n; ++i) {
        shuffled.rows[i].features[f] = test_rows.rows[perm[i]].features[f];
      }
      const auto p = detail::predict_users(model, shuffled, spec.params.workers);
      r.importance.push_back(integrated_brier_score(p, test_obs, r.horizon) - r.ibs);
    }
  }
  return r;
}

struct EvaluationReport {
  ForestAlgorithm algorithm = ForestAlgorithm::csf;
  int bootstrap = 0;
  double split = 0.75;
  std::uint64_t seed = 0;
  std::vector<RoundResult> rounds;
  double ibs_boot_avg = 0.0;
  double null_ibs_avg = 0.0;
  std::vector<std::string> feature_names;
  std::vector<double> importance;  // averaged over evaluated rounds
  std::vector<std::string> top;
  std::vector<std::string> warnings;
};

struct FeatureSelection {
  std::vector<std::string> features;
  std::vector<std::string> warnings;
};

/// The m features with the highest importance; ties broken by name.
inline FeatureSelection select_top_features(const EvaluationReport& report, int m) {
  if (m < 1) throw Error("feature count m must be >= 1");
  FeatureSelection out;
  const std::size_t n = report.feature_names.size();
  if (report.importance.size() != n) throw Error("report has no feature importances");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (report.importance[a] != report.importance[b]) {
      return report.importance[a] > report.importance[b];
    }
    return report.feature_names[a] < report.feature_names[b];
  });
  if (static_cast<std::size_t>(m) > n) {
    out.warnings.push_back("requested " + std::to_string(m) + " features but only " +
                           std::to_string(n) + " exist");
  }
  for (std::size_t i = 0; i < std::min<std::size_t>(n, static_cast<std::size_t>(m)); ++i) {
    out.features.push_back(report.feature_names[idx[i]]);
  }
  return out;
}

/// Round j draws from stream j of the seed: the user split first, then the
/// forest seed, then the importance permutations.
inline EvaluationReport bootstrap_evaluate(const CohortPanel& panel, const ModelSpec& spec, int b,
                                           double split, std::uint64_t seed, int top_m = 30) {
  if (b < 1) throw Error("bootstrap rounds must be >= 1");
  if (!(split > 0.0 && split < 1.0)) throw Error("split must lie in (0, 1)");
  const ModelData d = prepare_model_data(panel, spec);
  EvaluationReport report;
  report.algorithm = spec.algorithm;
  report.bootstrap = b;
  report.split = split;
  report.seed = seed;
  report.feature_names = d.columns;
  report.warnings = d.labels.warnings;
  std::size_t used = 0;
  std::vector<double> imp_sum(d.columns.size(), 0.0);
  for (int j = 0; j < b; ++j) {
    auto rng = make_stream_rng(seed, static_cast<std::uint64_t>(j));
    const auto s = split_users(d.labels.obs.size(), split, rng);
    const std::uint64_t forest_seed = rng();
    RoundResult r = evaluate_split(d, spec, s, forest_seed, rng);
    r.round = j;
    if (r.skipped) {
      report.warnings.push_back("round " + std::to_string(j) + " skipped: no held-out events");
    } else {
      ++used;
      report.ibs_boot_avg += r.ibs;
      report.null_ibs_avg += r.null_ibs;
      for (std::size_t f = 0; f < r.importance.size(); ++f) imp_sum[f] += r.importance[f];
    }
    report.rounds.push_back(std::move(r));
  }
  if (used == 0) throw Error("every bootstrap round was skipped: no held-out events");
  report.ibs_boot_avg /= static_cast<double>(used);
  report.null_ibs_avg /= static_cast<double>(used);
  if (spec.importance) {
    report.importance.resize(imp_sum.size());
    for (std::size_t f = 0; f < imp_sum.size(); ++f) {
      report.importance[f] = imp_sum[f] / static_cast<double>(used);
    }
    auto sel = select_top_features(report, top_m);
    report.top = std::move(sel.features);
    for (auto& w : sel.warnings) report.warnings.push_back(std::move(w));
  }
  return report;
}

inline nlohmann::ordered_json to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["model"] = std::string(to_string(r.algorithm));
  j["bootstrap"] = r.bootstrap;
  j["split"] = r.split;
  j["seed"] = r.seed;
  j["ibs_boot_avg"] = r.ibs_boot_avg;
  j["null_ibs_avg"] = r.null_ibs_avg;
  auto rounds = nlohmann::ordered_json::array();
  for (const auto& x : r.rounds) {
    nlohmann::ordered_json o;
    o["round"] = x.round;
    o["skipped"] = x.skipped;
    o["train_users"] = x.train_users;
    o["test_users"] = x.test_users;
    o["test_events"] = x.test_events;
    if (!x.skipped) {
      o["horizon"] = x.horizon;
      o["ibs"] = x.ibs;
      o["null_ibs"] = x.null_ibs;
    }
    rounds.push_back(std::move(o));
  }
  j["rounds"] = std::move(rounds);
  auto imp = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < r.importance.size(); ++f) {
    imp.push_back({{"feature", r.feature_names[f]}, {"importance", r.importance[f]}});
  }
  j["importances"] = std::move(imp);
  j["top_features"] = r.top;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace engage

#endif  // ENGAGE_EVALUATE_HPP_
