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

// Survival forests.
//
//   csf       conditional inference survival forest on one static row per
//             subject. Each node picks the feature whose linear rank
//             statistic with log-rank scores has the smallest p-value, stops
//             when the Bonferroni-adjusted p-value exceeds alpha, and cuts
//             where the two-sample log-rank statistic is largest. Leaves hold
//             Kaplan-Meier curves.
//   ltrc_cif  the same learner on left-truncated pseudo-observations; risk
//             sets honour entry times and whole subjects are resampled.
//   ltrc_rrf  relative risk trees: splits maximise the reduction in Poisson
//             deviance of observed events against expected events under the
//             node's Nelson-Aalen baseline. Leaves hold a relative risk over
//             the tree's baseline cumulative hazard.
//
// Trees are grown in parallel; tree i draws from its own random stream
// derived from the forest seed, so fitted models do not depend on the
// worker count or on the order of the training rows.

#ifndef ENGAGE_FOREST_HPP_
#define ENGAGE_FOREST_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "engage/common.hpp"
#include "engage/features.hpp"
#include "engage/parallel.hpp"
#include "engage/survival.hpp"

namespace engage {

enum class ForestAlgorithm : std::uint8_t { csf = 0, ltrc_cif = 1, ltrc_rrf = 2 };

inline std::string_view to_string(ForestAlgorithm a) {
  switch (a) {
    case ForestAlgorithm::csf: return "csf";
    case ForestAlgorithm::ltrc_cif: return "ltrc-cif";
    case ForestAlgorithm::ltrc_rrf: return "ltrc-rrf";
  }
  return "";
}

inline ForestAlgorithm parse_algorithm(std::string_view name) {
  if (name == "csf") return ForestAlgorithm::csf;
  if (name == "ltrc-cif" || name == "ltrc_cif") return ForestAlgorithm::ltrc_cif;
  if (name == "ltrc-rrf" || name == "ltrc_rrf") return ForestAlgorithm::ltrc_rrf;
  throw ParseError("unknown model '" + std::string(name) + "'");
}

inline bool is_ltrc(ForestAlgorithm a) { return a != ForestAlgorithm::csf; }

struct ForestParams {
  int ntree = 100;
  int mtry = 0;  // 0: ceil(sqrt(#features))
  double alpha = 0.05;
  int min_node_size = 20;
  int min_leaf_size = 7;
  int max_split_points = 50;
  // Nodes smaller than this get Monte Carlo permutation p-values.
  int permutation_node_size = 30;
  int permutations = 999;
  bool resample = true;  // subsample subjects for every tree
  double sample_fraction = 0.632;  // share of subjects drawn, without replacement
  unsigned workers = 1;

  bool operator==(const ForestParams&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // rows with x <= threshold go left
  double statistic = 0.0;
  double p_value = 1.0;
  int left = -1;
  int right = -1;
  int leaf = -1;

  bool operator==(const TreeNode&) const = default;
};

struct TreeLeaf {
  std::vector<double> survival;  // Kaplan-Meier on the model grid (csf, ltrc_cif)
  double risk = 1.0;             // relative risk (ltrc_rrf)
  int size = 0;
  int events = 0;

  bool operator==(const TreeLeaf&) const = default;
};

struct SurvivalTree {
  std::vector<TreeNode> nodes;
  std::vector<TreeLeaf> leaves;
  std::vector<double> baseline;  // cumulative hazard on the model grid (ltrc_rrf)

  const TreeLeaf& leaf_for(std::span<const double> x) const {
    int n = 0;
    while (nodes[n].feature >= 0) {
      n = x[static_cast<std::size_t>(nodes[n].feature)] <= nodes[n].threshold ? nodes[n].left
                                                                                : nodes[n].right;
    }
    return leaves[static_cast<std::size_t>(nodes[n].leaf)];
  }

  bool operator==(const SurvivalTree&) const = default;
};

namespace detail {

// Value of a grid-sampled step function at time t (1 or 0 before the grid).
inline double grid_step(std::span<const int> grid, std::span<const double> values, double t,
                        double before) {
  const auto i = std::upper_bound(grid.begin(), grid.end(), t) - grid.begin();
  return i == 0 ? before : values[static_cast<std::size_t>(i - 1)];
}

}  // namespace detail

struct ForestModel {
  ForestAlgorithm algorithm = ForestAlgorithm::csf;
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  std::vector<int> grid;  // distinct training event times
  std::vector<SurvivalTree> trees;
  std::vector<double> importance;  // optional, filled by evaluation
  std::vector<std::string> warnings;

  /// Survival prediction for a subject's covariate path: rows ordered by
  /// entry, the first starting at 0. The last row's covariates are held
  /// beyond its exit. Static models use the last row only.
  SurvivalCurve predict(std::span<const FeatureRow> path) const {
    if (path.empty()) throw Error("prediction needs at least one row");
    const std::size_t g = grid.size();
    std::vector<double> sum(g, 0.0);
    std::vector<double> tree_vals(g);
    for (const auto& tree : trees) {
      if (algorithm == ForestAlgorithm::csf) {
        const auto& leaf = tree.leaf_for(path.back().features);
        for (std::size_t i = 0; i < g; ++i) sum[i] += leaf.survival[i];
        continue;
      }
      std::fill(tree_vals.begin(), tree_vals.end(), 1.0);
      if (algorithm == ForestAlgorithm::ltrc_cif) {
        double cum = 1.0;
        for (std::size_t j = 0; j < path.size(); ++j) {
          const auto& row = path[j];
          const bool last = j + 1 == path.size();
          const auto& leaf = tree.leaf_for(row.features);
          const double s_entry = detail::grid_step(grid, leaf.survival, row.entry, 1.0);
          std::size_t i = static_cast<std::size_t>(
              std::upper_bound(grid.begin(), grid.end(), row.entry) - grid.begin());
          for (; i < g && (last || grid[i] <= row.exit); ++i) {
            tree_vals[i] = cum * (s_entry > 0.0 ? leaf.survival[i] / s_entry : 0.0);
          }
          if (!last) {
            const double s_exit = detail::grid_step(grid, leaf.survival, row.exit, 1.0);
            cum *= s_entry > 0.0 ? s_exit / s_entry : 0.0;
          }
        }
      } else {
        double cum = 0.0;
        for (std::size_t j = 0; j < path.size(); ++j) {
          const auto& row = path[j];
          const bool last = j + 1 == path.size();
          const auto& leaf = tree.leaf_for(row.features);
          const double h_entry = detail::grid_step(grid, tree.baseline, row.entry, 0.0);
          std::size_t i = static_cast<std::size_t>(
              std::upper_bound(grid.begin(), grid.end(), row.entry) - grid.begin());
          for (; i < g && (last || grid[i] <= row.exit); ++i) {
            tree_vals[i] = std::exp(-(cum + leaf.risk * (tree.baseline[i] - h_entry)));
          }
          if (!last) {
            const double h_exit = detail::grid_step(grid, tree.baseline, row.exit, 0.0);
            cum += leaf.risk * (h_exit - h_entry);
          }
        }
      }
      for (std::size_t i = 0; i < g; ++i) sum[i] += tree_vals[i];
    }
    SurvivalCurve out;
    out.times = grid;
    out.survival.resize(g);
    const double n = static_cast<double>(trees.size());
    for (std::size_t i = 0; i < g; ++i) out.survival[i] = sum[i] / n;
    return out;
  }

  SurvivalCurve predict(const FeatureRow& row) const {
    return predict(std::span<const FeatureRow>(&row, 1));
  }
};

namespace detail {

inline double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

// Upper tail of a standard normal, two-sided.
inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Upper tail of chi-square with one degree of freedom.
inline double chi2_1_p(double x) { return x <= 0.0 ? 1.0 : std::erfc(std::sqrt(x / 2.0)); }

class TreeBuilder {
 public:
  TreeBuilder(const SurvivalDataset& data, ForestAlgorithm algorithm, const ForestParams& params,
              std::span<const int> grid, int mtry, std::mt19937_64 rng)
      : data_(data), algorithm_(algorithm), params_(params), grid_(grid), mtry_(mtry),
        rng_(std::move(rng)) {}

  SurvivalTree build(std::vector<std::size_t> rows) {
    if (algorithm_ == ForestAlgorithm::ltrc_rrf) tree_.baseline.resize(grid_.size());
    struct Pending {
      int node;
      std::vector<std::size_t> rows;
    };
    std::vector<Pending> stack;
    tree_.nodes.emplace_back();
    stack.push_back({0, std::move(rows)});
    while (!stack.empty()) {
      Pending p = std::move(stack.back());
      stack.pop_back();
      Split split = algorithm_ == ForestAlgorithm::ltrc_rrf ? find_rrf_split(p.rows)
                                                            : find_cif_split(p.rows);
      if (split.feature < 0) {
        make_leaf(p.node, p.rows);
        continue;
      }
      std::vector<std::size_t> left, right;
      for (std::size_t r : p.rows) {
        (feature(r, split.feature) <= split.threshold ? left : right).push_back(r);
      }
      const int l = static_cast<int>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      tree_.nodes.emplace_back();
      auto& node = tree_.nodes[static_cast<std::size_t>(p.node)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.statistic = split.statistic;
      node.p_value = split.p_value;
      node.left = l;
      node.right = l + 1;
      // Right pushed first so the left subtree is grown first.
      stack.push_back({l + 1, std::move(right)});
      stack.push_back({l, std::move(left)});
    }
    if (algorithm_ == ForestAlgorithm::ltrc_rrf) fit_leaf_risks();
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double statistic = 0.0;
    double p_value = 1.0;
  };

  double feature(std::size_t row, int f) const {
    return data_.rows[row].features[static_cast<std::size_t>(f)];
  }

  std::vector<SurvivalObservation> observations(std::span<const std::size_t> rows) const {
    std::vector<SurvivalObservation> obs;
    obs.reserve(rows.size());
    for (std::size_t r : rows) obs.push_back(data_.rows[r].observation());
    return obs;
  }

  std::vector<int> candidate_features() {
    const int p = static_cast<int>(data_.feature_names.size());
    std::vector<int> all(static_cast<std::size_t>(p));
    std::iota(all.begin(), all.end(), 0);
    // partial Fisher-Yates
    const int m = std::min(mtry_, p);
    for (int i = 0; i < m; ++i) {
      std::uniform_int_distribution<int> pick(i, p - 1);
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng_))]);
    }
    all.resize(static_cast<std::size_t>(m));
    return all;
  }

  // Rows sorted by feature value and the cut positions to try: a cut at
  // position k sends sorted[0..k) left. Cuts fall between distinct values,
  // thinned to a quantile grid.
  struct Ordering {
    std::vector<std::size_t> sorted;
    std::vector<std::size_t> cuts;
  };

  Ordering order_by(std::span<const std::size_t> rows, int f) const {
    Ordering o;
    o.sorted.assign(rows.begin(), rows.end());
    std::stable_sort(o.sorted.begin(), o.sorted.end(), [&](std::size_t a, std::size_t b) {
      const double xa = feature(a, f), xb = feature(b, f);
      return xa < xb || (xa == xb && a < b);
    });
    std::vector<std::size_t> all;
    const std::size_t n = o.sorted.size();
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf_size));
    for (std::size_t k = 1; k < n; ++k) {
      if (feature(o.sorted[k], f) == feature(o.sorted[k - 1], f)) continue;
      if (k < min_leaf || n - k < min_leaf) continue;
      all.push_back(k);
    }
    const std::size_t limit = static_cast<std::size_t>(std::max(1, params_.max_split_points));
    if (all.size() <= limit) {
      o.cuts = std::move(all);
    } else {
      for (std::size_t i = 0; i < limit; ++i) {
        const std::size_t k = all[(i * all.size() + all.size() / 2) / limit];
        if (o.cuts.empty() || o.cuts.back() != k) o.cuts.push_back(k);
      }
    }
    return o;
  }

  // Log-rank scores: event indicator minus Nelson-Aalen hazard accumulated
  // over the row's at-risk interval (a martingale residual).
  std::vector<double> logrank_scores(std::span<const std::size_t> rows) const {
    const auto obs = observations(rows);
    const auto h = nelson_aalen(obs);
    std::vector<double> a(rows.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      a[i] = (obs[i].event ? 1.0 : 0.0) - (h.at(obs[i].exit) - h.at(obs[i].entry));
    }
    return a;
  }

  Split find_cif_split(const std::vector<std::size_t>& rows) {
    const std::size_t n = rows.size();
    if (n < static_cast<std::size_t>(params_.min_node_size) || n < 2) return {};
    bool any_event = false;
    for (std::size_t r : rows) any_event = any_event || data_.rows[r].event;
    if (!any_event) return {};
    const auto scores = logrank_scores(rows);
    const double nn = static_cast<double>(n);
    const double mean_a = std::accumulate(scores.begin(), scores.end(), 0.0) / nn;
    double var_a = 0.0;
    for (double a : scores) var_a += (a - mean_a) * (a - mean_a);
    var_a /= nn;
    if (!(var_a > 1e-14)) return {};

    const auto features = candidate_features();
    const bool permute = n < static_cast<std::size_t>(params_.permutation_node_size);
    int best_f = -1;
    double best_p = 2.0;
    double best_stat = 0.0;
    std::vector<double> x(n);
    for (int f : features) {
      double sx = 0.0, sxx = 0.0, t = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = feature(rows[i], f);
        sx += x[i];
        sxx += x[i] * x[i];
        t += x[i] * scores[i];
      }
      const double var_t = var_a / (nn - 1.0) * (nn * sxx - sx * sx);
      if (!(var_t > 1e-12 * std::max(1.0, sxx))) continue;
      const double centered = t - sx * mean_a;
      const double c = centered / std::sqrt(var_t);
      double p = normal_two_sided_p(c);
      if (permute) p = permutation_p(x, scores, sx * mean_a, std::abs(centered));
      if (p < best_p) {
        best_p = p;
        best_f = f;
        best_stat = c * c;
      }
    }
    if (best_f < 0) return {};
    const double adjusted = std::min(1.0, best_p * static_cast<double>(features.size()));
    if (adjusted > params_.alpha) return {};

    // Cut point: largest standardized two-sample log-rank statistic.
    const Ordering o = order_by(rows, best_f);
    if (o.cuts.empty()) return {};
    std::vector<double> sorted_scores(n);
    {
      // scores are indexed like `rows`; map through positions
      std::vector<std::size_t> pos(n);
      std::iota(pos.begin(), pos.end(), 0);
      std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
        const double xa = feature(rows[a], best_f), xb = feature(rows[b], best_f);
        return xa < xb || (xa == xb && rows[a] < rows[b]);
      });
      for (std::size_t i = 0; i < n; ++i) sorted_scores[i] = scores[pos[i]];
    }
    Split split;
    double best = -1.0;
    double acc = 0.0;
    std::size_t k = 0;
    for (std::size_t cut : o.cuts) {
      for (; k < cut; ++k) acc += sorted_scores[k];
      const double nl = static_cast<double>(cut);
      const double v = var_a * nl * (nn - nl) / (nn - 1.0);
      const double stat = (acc - nl * mean_a) * (acc - nl * mean_a) / v;
      if (stat > best) {
        best = stat;
        split.threshold = feature(o.sorted[cut - 1], best_f);
      }
    }
    split.feature = best_f;
    split.statistic = best_stat;
    split.p_value = adjusted;
    return split;
  }

  double permutation_p(std::span<const double> x, std::span<const double> scores, double mu,
                       double observed) {
    std::vector<double> perm(scores.begin(), scores.end());
    int extreme = 0;
    for (int b = 0; b < params_.permutations; ++b) {
      std::shuffle(perm.begin(), perm.end(), rng_);
      double t = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) t += x[i] * perm[i];
      if (std::abs(t - mu) >= observed - 1e-12) ++extreme;
    }
    return (extreme + 1.0) / (params_.permutations + 1.0);
  }

  Split find_rrf_split(const std::vector<std::size_t>& rows) {
    const std::size_t n = rows.size();
    if (n < static_cast<std::size_t>(params_.min_node_size) || n < 2) return {};
    const auto obs = observations(rows);
    const auto h = nelson_aalen(obs);
    // expected events per row under the node baseline, by row id
    std::vector<std::pair<std::size_t, double>> expected;
    expected.reserve(n);
    double d_total = 0.0, e_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h.at(obs[i].exit) - h.at(obs[i].entry);
      expected.emplace_back(rows[i], e);
      d_total += obs[i].event ? 1.0 : 0.0;
      e_total += e;
    }
    if (d_total == 0.0 || !(e_total > 0.0)) return {};
    std::sort(expected.begin(), expected.end());
    auto expected_of = [&](std::size_t row) {
      return std::lower_bound(expected.begin(), expected.end(), std::make_pair(row, -1.0))->second;
    };
    const double parent = xlogy(d_total, d_total / e_total);

    Split split;
    double best = 0.0;
    std::size_t tests = 0;
    for (int f : candidate_features()) {
      const Ordering o = order_by(rows, f);
      double dl = 0.0, el = 0.0;
      std::size_t k = 0;
      for (std::size_t cut : o.cuts) {
        for (; k < cut; ++k) {
          dl += data_.rows[o.sorted[k]].event ? 1.0 : 0.0;
          el += expected_of(o.sorted[k]);
        }
        const double dr = d_total - dl, er = e_total - el;
        if (!(el > 0.0) || !(er > 0.0)) continue;
        ++tests;
        const double dev = 2.0 * (xlogy(dl, dl / el) + xlogy(dr, dr / er) - parent);
        if (dev > best) {
          best = dev;
          split.feature = f;
          split.threshold = feature(o.sorted[cut - 1], f);
        }
      }
    }
    if (split.feature < 0) return {};
    split.statistic = best;
    split.p_value = std::min(1.0, chi2_1_p(best) * static_cast<double>(tests));
    if (split.p_value > params_.alpha) return {};
    return split;
  }

  void make_leaf(int node, const std::vector<std::size_t>& rows) {
    TreeLeaf leaf;
    leaf.size = static_cast<int>(rows.size());
    for (std::size_t r : rows) leaf.events += data_.rows[r].event ? 1 : 0;
    if (algorithm_ == ForestAlgorithm::ltrc_rrf) {
      leaf_rows_.push_back(rows);
    } else {
      const auto obs = observations(rows);
      const RiskTable rt = risk_table(obs);
      leaf.survival.resize(grid_.size());
      double s = 1.0;
      std::size_t j = 0;
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        for (; j < rt.times.size() && rt.times[j] <= grid_[i]; ++j) {
          s *= (rt.at_risk[j] - rt.events[j]) / rt.at_risk[j];
        }
        leaf.survival[i] = s;
      }
    }
    tree_.nodes[static_cast<std::size_t>(node)].leaf = static_cast<int>(tree_.leaves.size());
    tree_.leaves.push_back(std::move(leaf));
  }

  // Joint Poisson fit of the leaf risks and a Breslow baseline over the
  // tree's sample, iterated to a fixed point. Risks are scaled to an
  // exposure-weighted mean of 1.
  void fit_leaf_risks() {
    const std::size_t nl = leaf_rows_.size();
    std::vector<int> times;
    for (const auto& rows : leaf_rows_) {
      for (std::size_t r : rows) {
        if (data_.rows[r].event) times.push_back(data_.rows[r].exit);
      }
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const std::size_t nt = times.size();
    std::vector<std::vector<double>> at_risk(nl, std::vector<double>(nt, 0.0));
    std::vector<double> deaths(nt, 0.0), leaf_events(nl, 0.0), exposure(nl, 0.0);
    for (std::size_t l = 0; l < nl; ++l) {
      for (std::size_t r : leaf_rows_[l]) {
        const auto& row = data_.rows[r];
        exposure[l] += row.exit - row.entry;
        const auto lo = std::upper_bound(times.begin(), times.end(), row.entry);
        const auto hi = std::upper_bound(times.begin(), times.end(), row.exit);
        for (auto it = lo; it != hi; ++it) at_risk[l][static_cast<std::size_t>(it - times.begin())] += 1.0;
        if (row.event) {
          deaths[static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), row.exit) -
                                          times.begin())] += 1.0;
          leaf_events[l] += 1.0;
        }
      }
    }
    const double total_exposure = std::accumulate(exposure.begin(), exposure.end(), 0.0);
    std::vector<double> risk(nl, 1.0), dh(nt, 0.0);
    auto update_baseline = [&] {
      for (std::size_t k = 0; k < nt; ++k) {
        double denom = 0.0;
        for (std::size_t l = 0; l < nl; ++l) denom += risk[l] * at_risk[l][k];
        dh[k] = denom > 0.0 ? deaths[k] / denom : 0.0;
      }
    };
    for (int iter = 0; iter < 200 && nt > 0; ++iter) {
      update_baseline();
      double change = 0.0;
      std::vector<double> next(nl);
      for (std::size_t l = 0; l < nl; ++l) {
        double e = 0.0;
        for (std::size_t k = 0; k < nt; ++k) e += dh[k] * at_risk[l][k];
        next[l] = e > 0.0 ? leaf_events[l] / e : 1.0;
      }
      double mean = 0.0;
      for (std::size_t l = 0; l < nl; ++l) mean += next[l] * exposure[l];
      mean /= total_exposure;
      for (std::size_t l = 0; l < nl; ++l) {
        next[l] = mean > 0.0 ? next[l] / mean : 1.0;
        change = std::max(change, std::abs(next[l] - risk[l]));
      }
      risk = std::move(next);
      if (change < 1e-12) break;
    }
    update_baseline();
    double acc = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      for (; k < nt && times[k] <= grid_[i]; ++k) acc += dh[k];
      tree_.baseline[i] = acc;
    }
    for (std::size_t l = 0; l < nl; ++l) tree_.leaves[l].risk = risk[l];
  }

  const SurvivalDataset& data_;
  ForestAlgorithm algorithm_;
  const ForestParams& params_;
  std::span<const int> grid_;
  int mtry_;
  std::mt19937_64 rng_;
  SurvivalTree tree_;
  std::vector<std::vector<std::size_t>> leaf_rows_;
};

}  // namespace detail

/// Fits any of the three forests. Rows are put in (subject, entry) order
/// first; each tree draws a subsample of whole subjects.
inline ForestModel fit_forest(const SurvivalDataset& input, ForestAlgorithm algorithm,
                              const ForestParams& params, std::uint64_t seed) {
  if (input.rows.empty()) throw Error("no training rows");
  if (params.ntree < 1) throw Error("ntree must be >= 1");
  if (!(params.sample_fraction > 0.0 && params.sample_fraction <= 1.0)) {
    throw Error("sample_fraction must lie in (0, 1]");
  }
  const std::size_t p = input.feature_names.size();
  if (p == 0) throw Error("no features");
  for (const auto& r : input.rows) {
    if (r.features.size() != p) throw Error("feature row has the wrong width");
    if (r.entry < 0 || r.exit <= r.entry) throw Error("feature row needs 0 <= entry < exit");
    if (algorithm == ForestAlgorithm::csf && r.entry != 0) {
      throw Error("csf needs static rows with entry 0");
    }
  }
  SurvivalDataset data = input;
  std::stable_sort(data.rows.begin(), data.rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    if (a.entry != b.entry) return a.entry < b.entry;
    if (a.exit != b.exit) return a.exit < b.exit;
    if (a.event != b.event) return a.event < b.event;
    return a.features < b.features;
  });
  // subject -> [begin, end) row range
  std::vector<std::pair<std::size_t, std::size_t>> subjects;
  for (std::size_t i = 0; i < data.rows.size();) {
    std::size_t j = i;
    while (j < data.rows.size() && data.rows[j].subject == data.rows[i].subject) ++j;
    subjects.emplace_back(i, j);
    i = j;
  }
  if (algorithm == ForestAlgorithm::csf && subjects.size() != data.rows.size()) {
    throw Error("csf needs exactly one row per subject");
  }

  ForestModel model;
  model.algorithm = algorithm;
  model.params = params;
  model.seed = seed;
  model.feature_names = data.feature_names;
  for (const auto& r : data.rows) {
    if (r.event) model.grid.push_back(r.exit);
  }
  std::sort(model.grid.begin(), model.grid.end());
  model.grid.erase(std::unique(model.grid.begin(), model.grid.end()), model.grid.end());
  if (model.grid.empty()) model.warnings.push_back("training data has no events");

  bool all_constant = true;
  for (std::size_t f = 0; f < p && all_constant; ++f) {
    for (const auto& r : data.rows) {
      if (r.features[f] != data.rows.front().features[f]) {
        all_constant = false;
        break;
      }
    }
  }
  if (all_constant) model.warnings.push_back("every feature is constant; trees have a single node");

  const int mtry = params.mtry > 0
                       ? params.mtry
                       : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));
  model.trees.resize(static_cast<std::size_t>(params.ntree));
  parallel_for(model.trees.size(), params.workers, [&](std::size_t t) {
    auto rng = make_stream_rng(seed, t);
    std::vector<std::size_t> rows;
    if (params.resample) {
      const std::size_t n = subjects.size();
      const std::size_t m = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::ceil(params.sample_fraction * static_cast<double>(n))), 1, n);
      std::vector<std::size_t> pick(n);
      std::iota(pick.begin(), pick.end(), 0);
      for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> d(i, n - 1);
        std::swap(pick[i], pick[d(rng)]);
      }
      pick.resize(m);
      std::sort(pick.begin(), pick.end());
      for (std::size_t s : pick) {
        for (std::size_t r = subjects[s].first; r < subjects[s].second; ++r) rows.push_back(r);
      }
    } else {
      rows.resize(data.rows.size());
      std::iota(rows.begin(), rows.end(), 0);
    }
    detail::TreeBuilder builder(data, algorithm, params, model.grid, mtry, std::move(rng));
    model.trees[t] = builder.build(std::move(rows));
  });
  return model;
}

inline ForestModel fit_csf(const SurvivalDataset& rows, const ForestParams& params,
                           std::uint64_t seed) {
  return fit_forest(rows, ForestAlgorithm::csf, params, seed);
}

inline ForestModel fit_ltrc_cif(const SurvivalDataset& rows, const ForestParams& params,
                                std::uint64_t seed) {
  return fit_forest(rows, ForestAlgorithm::ltrc_cif, params, seed);
}

inline ForestModel fit_ltrc_rrf(const SurvivalDataset& rows, const ForestParams& params,
                                std::uint64_t seed) {
  return fit_forest(rows, ForestAlgorithm::ltrc_rrf, params, seed);
}

}  // namespace engage

#endif  // ENGAGE_FOREST_HPP_
