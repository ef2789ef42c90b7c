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

// engage: command-line front end for the engagement and churn toolkit.
//
// Exit codes: 0 success, 1 error, 2 finished with rejected input lines,
// 3 finished but some group has no churn definition.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli_support.hpp"
#include "engage/engage.hpp"

namespace engage::cli {
namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  unsigned workers = 1;
  std::string config;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--out", c.out, "Output file (default: stdout)");
  sub->add_option("--format", c.format, "Output format: csv or json");
  sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "JSON file with option values");
}

CohortPanel load_panel(const std::string& path) {
  auto in = open_input(path);
  return read_panel_csv(in);
}

Date panel_start(const CohortPanel& panel) {
  Date first = panel.end;
  for (const auto& u : panel.users) first = std::min(first, u.first_day);
  return first;
}

std::optional<Date> optional_date(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_date(text);
}

// ---------------------------------------------------------------------------
// Event input shared by ingest and panel.

struct EventInput {
  std::string events;
  std::string input_format;
  std::string window_begin;
  std::string window_end;
};

void add_event_input(CLI::App* sub, EventInput& e) {
  sub->add_option("--events", e.events, "Event log (CSV or JSON lines)")->required();
  sub->add_option("--input-format", e.input_format, "csv or jsonl (default: from extension)");
  sub->add_option("--window-begin", e.window_begin, "First day of the observation window");
  sub->add_option("--window-end", e.window_end, "Last day of the observation window");
}

IngestResult read_events(const EventInput& e) {
  LogFormat format = LogFormat::csv;
  if (!e.input_format.empty()) {
    format = parse_log_format(e.input_format);
  } else if (e.events.size() >= 6 && (e.events.ends_with(".jsonl") || e.events.ends_with(".json"))) {
    format = LogFormat::jsonl;
  }
  IngestOptions options;
  options.window_begin = optional_date(e.window_begin);
  options.window_end = optional_date(e.window_end);
  auto in = open_input(e.events);
  return ingest_events(in, format, options);
}

void report_rejections(const IngestResult& r) {
  for (const auto& rej : r.rejections) {
    std::cerr << "rejected line " << rej.line << ": " << rej.reason << '\n';
  }
  for (const auto& note : r.dedupe_notes) std::cerr << "duplicate: " << note << '\n';
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string spec;
  std::string truth;
  std::size_t users = 0;
};

int run_simulate(const Common& c, const SimulateArgs& a, bool seed_given) {
  CohortSpec spec = a.spec.empty() ? CohortSpec{} : cohort_spec_from_json(read_json_file(a.spec));
  if (seed_given) spec.seed = c.seed;
  if (a.users > 0) spec.users = a.users;
  const auto cohort = generate(spec, c.workers);
  Output out(c.out);
  if (parse_output_format(c.format) == OutputFormat::json) {
    write_events_jsonl(out.stream(), cohort.events);
  } else {
    write_events_csv(out.stream(), cohort.events);
  }
  out.close();
  if (!a.truth.empty()) {
    Output t(a.truth);
    t.stream() << to_json(cohort.truth).dump(2) << '\n';
    t.close();
  }
  std::cerr << "simulated " << cohort.events.size() << " events for " << spec.users << " users\n";
  return 0;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  EventInput input;
  std::string rejections;
};

int run_ingest(const Common& c, const IngestArgs& a) {
  const auto r = read_events(a.input);
  Output out(c.out);
  if (parse_output_format(c.format) == OutputFormat::json) {
    write_events_jsonl(out.stream(), r.events);
  } else {
    write_events_csv(out.stream(), r.events);
  }
  out.close();
  if (!a.rejections.empty()) {
    Table t{{"line", "reason"}, {}};
    for (const auto& rej : r.rejections) t.add({static_cast<long long>(rej.line), rej.reason});
    Output ro(a.rejections);
    t.write(ro.stream(), parse_output_format(c.format));
    ro.close();
  }
  report_rejections(r);
  std::cerr << "ingested " << r.events.size() << " events, " << r.rejections.size()
            << " rejected, " << r.dedupe_notes.size() << " duplicates dropped\n";
  return r.rejections.empty() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// panel

struct PanelArgs {
  EventInput input;
  std::string end;
  std::int64_t session_timeout = 1800;
  std::string windows = "3,7,15";
  std::string sessions;
};

Table panel_table(const CohortPanel& panel) {
  Table t;
  t.columns = split_csv_line(kPanelCsvHeader);
  for (const auto& f : panel.feature_names) t.columns.push_back(f);
  for (const auto& u : panel.users) {
    for (std::size_t i = 0; i < u.days.size(); ++i) {
      const auto& d = u.days[i];
      std::vector<Cell> row = {u.user_id,
                               u.group,
                               format_date(d.day),
                               static_cast<long long>(d.lifetime_days),
                               static_cast<long long>(d.logged_in ? 1 : 0),
                               static_cast<long long>(d.session_count),
                               d.connection_time_s,
                               d.elearning_connection_time_s,
                               static_cast<long long>(d.action_count),
                               static_cast<long long>(d.elearning_action_count),
                               static_cast<long long>(d.progression),
                               static_cast<long long>(d.cumulative_progression),
                               static_cast<long long>(d.video_view_count),
                               d.video_watch_time_s,
                               d.loyalty_index,
                               d.weekly_loyalty_index,
                               static_cast<long long>(d.days_since_last_login)};
      for (const auto& col : u.features) row.emplace_back(col[i]);
      t.add(std::move(row));
    }
  }
  return t;
}

int run_panel(const Common& c, const PanelArgs& a) {
  const auto r = read_events(a.input);
  report_rejections(r);
  if (r.events.empty()) throw Error("no valid events");
  Date end = day_of(r.events.front().timestamp);
  for (const auto& e : r.events) end = std::max(end, day_of(e.timestamp));
  if (!a.end.empty()) end = parse_date(a.end);
  PanelOptions options;
  options.session_timeout_s = a.session_timeout;
  options.workers = c.workers;
  auto built = build_panel_detailed(r.events, end, options);
  const auto windows = parse_int_list(a.windows);
  CohortPanel panel =
      windows.empty() ? std::move(built.panel) : rolling_features(std::move(built.panel), windows);
  for (const auto& w : built.report.warnings) std::cerr << "warning: " << w << '\n';
  Output out(c.out);
  if (parse_output_format(c.format) == OutputFormat::json) {
    panel_table(panel).write(out.stream(), OutputFormat::json);
  } else {
    write_panel_csv(out.stream(), panel);
  }
  out.close();
  if (!a.sessions.empty()) {
    Table t{{"user_id", "start", "end", "duration_s", "elearning", "timed_out", "orphan"}, {}};
    for (const auto& s : built.report.sessions) {
      t.add({s.user_id, s.start_s, s.end_s, s.end_s - s.start_s, s.elearning, s.timed_out,
             s.orphan});
    }
    Output so(a.sessions);
    t.write(so.stream(), parse_output_format(c.format));
    so.close();
  }
  std::cerr << "panel: " << panel.users.size() << " users, end " << format_date(panel.end) << '\n';
  return r.rejections.empty() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// churn-def

struct ChurnDefArgs {
  std::string panel;
  int k_max = 120;
  double returning_max = 0.30;
  double missed_max = 0.10;
  std::string metrics;
  std::string as_of;
  std::string definitions;
  std::string group_by = "country";
};

int run_churn_def(const Common& c, const ChurnDefArgs& a) {
  const auto panel = load_panel(a.panel);
  if (a.k_max < 1) throw Error("--k-max must be >= 1");
  std::vector<int> grid(static_cast<std::size_t>(a.k_max));
  for (int k = 1; k <= a.k_max; ++k) grid[static_cast<std::size_t>(k - 1)] = k;
  const auto metrics = a.metrics.empty() ? default_missed_metrics() : parse_metric_list(a.metrics);
  const Date as_of = a.as_of.empty() ? panel.end : parse_date(a.as_of);
  const auto curves = rcmm_curve(panel, grid, metrics);
  const auto format = parse_output_format(c.format);

  Table curve{{"group", "k", "returning_fraction", "returning_share", "churners"}, {}};
  for (Metric m : metrics) curve.columns.push_back("missed_" + std::string(to_string(m)));
  for (const auto& cv : curves) {
    for (std::size_t ki = 0; ki < cv.k_grid.size(); ++ki) {
      std::vector<Cell> row = {cv.group, static_cast<long long>(cv.k_grid[ki]),
                               cv.returning_fraction[ki], cv.returning_share[ki],
                               static_cast<long long>(cv.churners[ki])};
      for (const auto& mf : cv.missed_fraction) row.emplace_back(mf[ki]);
      curve.add(std::move(row));
    }
  }
  Output out(c.out);
  curve.write(out.stream(), format);
  out.close();

  Table defs{{"group", "k_days", "method", "returning_max", "missed_max", "as_of", "status"}, {}};
  bool all_defined = true;
  for (const auto& cv : curves) {
    try {
      const auto d = find_churn_definition(cv, a.returning_max, a.missed_max, as_of);
      defs.add({d.group, static_cast<long long>(d.k_days), std::string(to_string(d.method)),
                a.returning_max, a.missed_max, format_date(as_of), std::string("ok")});
      std::cerr << "group " << d.group << ": k = " << d.k_days << " days\n";
    } catch (const NoDefinitionError& e) {
      all_defined = false;
      defs.add({cv.group, std::monostate{}, std::string("rcmm"), a.returning_max, a.missed_max,
                format_date(as_of), std::string("no-definition")});
      std::cerr << "error: " << e.what() << " (returning fraction at k=" << a.k_max << ": "
                << format_double(e.best_returning()) << ")\n";
    }
  }
  if (!a.definitions.empty()) {
    Output d(a.definitions);
    defs.write(d.stream(), format);
    d.close();
  }
  return all_defined ? 0 : 3;
}

// ---------------------------------------------------------------------------
// ecdf

struct EcdfArgs {
  std::string panel;
  std::string metric = "days_since_last_login";
  std::string mode = "endo";
  std::string day;
  double q = 0.9;
  double cutoff = 200.0;
  std::string user;
  std::string distribution;
};

int run_ecdf(const Common& c, const EcdfArgs& a) {
  const auto panel = load_panel(a.panel);
  const Metric metric = parse_metric(a.metric);
  const Reference mode = parse_reference(a.mode);
  const Date day = a.day.empty() ? panel.end : parse_date(a.day);
  IndicatorOptions options;
  if (a.cutoff > 0.0) {
    options.gap_cutoff = a.cutoff;
  } else {
    options.gap_cutoff.reset();
  }
  const Direction direction = is_gap_metric(metric) ? Direction::high_is_bad : Direction::low_is_bad;
  std::vector<std::size_t> users;
  if (!a.user.empty()) {
    const auto u = panel.find_user(a.user);
    if (!u) throw Error("unknown user '" + a.user + "'");
    users.push_back(*u);
  } else {
    for (std::size_t u = 0; u < panel.users.size(); ++u) users.push_back(u);
  }
  Table t{{"user_id", "group", "day", "metric", "mode", "value", "indicator", "flag",
           "equivalent_k"},
          {}};
  Table dist{{"reference", "value", "F"}, {}};
  std::map<std::string, std::optional<Ecdf>> shared;
  std::size_t missing = 0;
  for (std::size_t u : users) {
    const auto& up = panel.users[u];
    const int idx = days_between(up.first_day, day);
    if (idx < 0 || idx >= up.length()) continue;
    std::optional<Ecdf> own;
    const Ecdf* ecdf = nullptr;
    if (mode == Reference::endo) {
      try {
        own = reference_ecdf(panel, u, day, metric, mode, options);
        ecdf = &*own;
      } catch (const InsufficientHistory&) {
      }
    } else {
      auto it = shared.find(up.group);
      if (it == shared.end()) {
        std::optional<Ecdf> e;
        try {
          e = reference_ecdf(panel, u, day, metric, mode, options);
        } catch (const InsufficientHistory&) {
        }
        it = shared.emplace(up.group, std::move(e)).first;
        if (it->second) {
          for (const auto& [v, f] : it->second->steps()) dist.add({up.group, v, f});
        }
      }
      if (it->second) ecdf = &*it->second;
    }
    if (!ecdf) {
      ++missing;
      continue;
    }
    if (mode == Reference::endo && !a.user.empty()) {
      for (const auto& [v, f] : ecdf->steps()) dist.add({up.user_id, v, f});
    }
    const double z = metric_value(up.days[idx], metric);
    const double value = (*ecdf)(z);
    Cell eq = std::monostate{};
    if (is_gap_metric(metric)) {
      eq = static_cast<long long>(equivalent_churn_definition(*ecdf, a.q));
    }
    t.add({up.user_id, up.group, format_date(day), std::string(to_string(metric)),
           std::string(to_string(mode)), z, value, churn_risk_flag(value, direction, a.q), eq});
  }
  const auto format = parse_output_format(c.format);
  Output out(c.out);
  t.write(out.stream(), format);
  out.close();
  if (!a.distribution.empty()) {
    if (mode == Reference::endo && a.user.empty()) {
      throw Error("--distribution in endo mode needs --user");
    }
    Output d(a.distribution);
    dist.write(d.stream(), format);
    d.close();
  }
  if (missing > 0) {
    std::cerr << missing << " users without enough history for the " << to_string(mode)
              << " reference\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string panel;
  std::string scaling = "endo";
  std::string components;
  std::string from;
  std::string to;
  std::string user;
};

int run_score(const Common& c, const ScoreArgs& a) {
  const auto panel = load_panel(a.panel);
  ScoreSpec spec;
  spec.scaling = parse_reference(a.scaling);
  if (!a.components.empty()) spec.components = parse_metric_list(a.components);
  const Date from = a.from.empty() ? panel_start(panel) : parse_date(a.from);
  const Date to = a.to.empty() ? panel.end : parse_date(a.to);
  std::vector<std::vector<EngagementScore>> scores;
  if (!a.user.empty()) {
    const auto u = panel.find_user(a.user);
    if (!u) throw Error("unknown user '" + a.user + "'");
    scores.push_back(score_series(panel, spec, *u, from, to));
  } else {
    scores = score_panel(panel, spec, from, to, c.workers);
  }
  Table t{{"user_id", "day", "score"}, {}};
  for (Metric m : spec.components) t.columns.emplace_back(to_string(m));
  for (const auto& series : scores) {
    for (const auto& s : series) {
      std::vector<Cell> row = {s.user_id, format_date(s.day), s.value};
      for (double z : s.components) row.emplace_back(z);
      t.add(std::move(row));
    }
  }
  Output out(c.out);
  t.write(out.stream(), parse_output_format(c.format));
  out.close();
  return 0;
}

// ---------------------------------------------------------------------------
// km

struct KmArgs {
  std::string panel;
  int churn_k = 31;
  bool by_group = false;
  std::string group_by;
};

int run_km(const Common& c, const KmArgs& a) {
  const auto panel = load_panel(a.panel);
  const auto labels = label_churn(panel, a.churn_k);
  if (!labels.warnings.empty()) {
    std::cerr << labels.warnings.size() << " users with a zero-length lifetime dropped\n";
  }
  if (!a.group_by.empty() && a.group_by != "country" && a.group_by != "group" &&
      a.group_by != "none") {
    throw Error("--group-by must be country, group or none");
  }
  std::vector<std::pair<std::string, std::vector<SurvivalObservation>>> groups;
  if (a.by_group || a.group_by == "country" || a.group_by == "group") {
    for (const auto& g : panel.groups()) {
      std::vector<SurvivalObservation> obs;
      for (std::size_t i = 0; i < labels.users.size(); ++i) {
        if (panel.users[labels.users[i]].group == g) obs.push_back(labels.obs[i]);
      }
      if (!obs.empty()) groups.emplace_back(g, std::move(obs));
    }
  } else {
    groups.emplace_back("all", labels.obs);
  }
  Table t{{"group", "t", "survival", "lower", "upper"}, {}};
  for (const auto& [g, obs] : groups) {
    const auto km = kaplan_meier(obs);
    t.add({g, 0LL, 1.0, 1.0, 1.0});
    for (std::size_t i = 0; i < km.times.size(); ++i) {
      t.add({g, static_cast<long long>(km.times[i]), km.survival[i], km.lower[i], km.upper[i]});
    }
    const auto median = median_survival(km);
    std::cerr << "median lifetime " << g << ": "
              << (median ? std::to_string(*median) + " days" : std::string("not reached")) << '\n';
  }
  Output out(c.out);
  t.write(out.stream(), parse_output_format(c.format));
  out.close();
  return 0;
}

// ---------------------------------------------------------------------------
// survival-fit / survival-eval

struct ModelArgs {
  std::string panel;
  std::string model = "csf";
  int churn_k = 31;
  int ntree = 100;
  int mtry = 0;
  double alpha = 0.05;
  int min_node_size = 20;
  int min_leaf_size = 7;
  int max_split_points = 50;
  double sample_fraction = 0.632;
  std::string interval = "week";
  std::string windows = "3,7,15";
  std::string features;
  std::string model_spec;
};

void add_model_options(CLI::App* sub, ModelArgs& m) {
  sub->add_option("--panel", m.panel, "Panel CSV")->required();
  sub->add_option("--model", m.model, "csf, ltrc-cif or ltrc-rrf");
  sub->add_option("--churn-k", m.churn_k, "Churn horizon in days");
  sub->add_option("--ntree", m.ntree, "Trees per forest");
  sub->add_option("--mtry", m.mtry, "Features tried per node (0: ceil(sqrt p))");
  sub->add_option("--alpha", m.alpha, "Split significance level");
  sub->add_option("--min-node-size", m.min_node_size, "Smallest node that may split");
  sub->add_option("--min-leaf-size", m.min_leaf_size, "Smallest child of a split");
  sub->add_option("--max-split-points", m.max_split_points, "Cut points tried per feature");
  sub->add_option("--sample-fraction", m.sample_fraction, "Share of users drawn for each tree");
  sub->add_option("--interval", m.interval, "Pseudo-observation interval: day, week, month");
  sub->add_option("--windows", m.windows, "Rolling windows in days, comma separated");
  sub->add_option("--features", m.features, "Feature columns, comma separated");
  sub->add_option("--model-spec", m.model_spec, "JSON file with model options");
}

ModelSpec model_spec(const ModelArgs& m, unsigned workers) {
  ModelSpec s;
  s.algorithm = parse_algorithm(m.model);
  s.churn_k = m.churn_k;
  s.params.ntree = m.ntree;
  s.params.mtry = m.mtry;
  s.params.alpha = m.alpha;
  s.params.min_node_size = m.min_node_size;
  s.params.min_leaf_size = m.min_leaf_size;
  s.params.max_split_points = m.max_split_points;
  s.params.sample_fraction = m.sample_fraction;
  s.params.workers = workers;
  s.interval = parse_interval(m.interval);
  s.windows = parse_int_list(m.windows);
  s.features = parse_name_list(m.features);
  return s;
}

int run_survival_fit(const Common& c, const ModelArgs& m) {
  if (c.out.empty() || c.out == "-") throw Error("survival-fit needs --out FILE");
  const auto panel = load_panel(m.panel);
  const auto spec = model_spec(m, c.workers);
  const auto data = prepare_model_data(panel, spec);
  std::vector<std::size_t> all(data.labels.obs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto model = fit_model(data, spec, all, c.seed);
  save_model(c.out, model);
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "fitted " << to_string(model.algorithm) << " with " << model.trees.size()
            << " trees on " << all.size() << " users\n";
  return 0;
}

struct EvalArgs {
  ModelArgs model;
  int bootstrap = 25;
  double split = 0.75;
  int top = 30;
};

int run_survival_eval(const Common& c, const EvalArgs& a) {
  const auto panel = load_panel(a.model.panel);
  const auto spec = model_spec(a.model, c.workers);
  const auto report = bootstrap_evaluate(panel, spec, a.bootstrap, a.split, c.seed, a.top);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  Output out(c.out);
  if (parse_output_format(c.format) == OutputFormat::csv) {
    Table t{{"round", "skipped", "train_users", "test_users", "test_events", "horizon", "ibs",
             "null_ibs"},
            {}};
    for (const auto& r : report.rounds) {
      t.add({static_cast<long long>(r.round), r.skipped, static_cast<long long>(r.train_users),
             static_cast<long long>(r.test_users), static_cast<long long>(r.test_events),
             r.skipped ? Cell{} : Cell{static_cast<long long>(r.horizon)},
             r.skipped ? Cell{} : Cell{r.ibs}, r.skipped ? Cell{} : Cell{r.null_ibs}});
    }
    t.write(out.stream(), OutputFormat::csv);
  } else {
    out.stream() << to_json(report).dump(2) << '\n';
  }
  out.close();
  std::cerr << "IBS_boot_avg " << format_double(report.ibs_boot_avg) << ", null "
            << format_double(report.null_ibs_avg) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// report / compare

struct ReportArgs {
  std::string panel;
  std::string model;
  std::string users;
  std::string as_of;
  double q = 0.9;
  int churn_k = 31;
  std::string interval = "week";
  std::string windows = "3,7,15";
};

int run_report(const Common& c, const ReportArgs& a) {
  auto panel = load_panel(a.panel);
  std::optional<ForestModel> model;
  if (!a.model.empty()) {
    model = load_model(a.model);
    const auto windows = parse_int_list(a.windows);
    if (panel.feature_names.empty() && !windows.empty()) panel = rolling_features(panel, windows);
  }
  ReportOptions options;
  options.q = a.q;
  options.churn_k = a.churn_k;
  options.interval = parse_interval(a.interval);
  const Date as_of = a.as_of.empty() ? panel.end : parse_date(a.as_of);
  const auto report =
      make_report(panel, model ? &*model : nullptr, parse_name_list(a.users), as_of, options);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  Table t{{"user_id", "group", "as_of", "days_since_last_login", "ecdf_endo", "ecdf_exo",
           "ecdf_snp", "score", "equivalent_k", "survival", "rcmm_k", "flag_rcmm",
           "flag_ecdf_endo", "flag_ecdf_exo", "flag_ecdf_snp"},
          {}};
  for (const auto& r : report.cards) {
    t.add({r.user_id, r.group, format_date(r.as_of),
           static_cast<long long>(r.days_since_last_login), opt_cell(r.ecdf_endo),
           opt_cell(r.ecdf_exo), opt_cell(r.ecdf_snp), r.score, opt_cell(r.equivalent_k),
           r.survival, opt_cell(r.rcmm_k), opt_cell(r.flag_rcmm), opt_cell(r.flag_ecdf_endo),
           opt_cell(r.flag_ecdf_exo), opt_cell(r.flag_ecdf_snp)});
  }
  Output out(c.out);
  t.write(out.stream(), parse_output_format(c.format));
  out.close();
  return 0;
}

struct CompareArgs {
  std::string panel;
  std::string as_of;
  double q = 0.9;
};

int run_compare(const Common& c, const CompareArgs& a) {
  const auto panel = load_panel(a.panel);
  ReportOptions options;
  options.q = a.q;
  const Date as_of = a.as_of.empty() ? panel.end : parse_date(a.as_of);
  const auto cmp = compare_churn_definitions(panel, as_of, options);
  for (const auto& w : cmp.warnings) std::cerr << "warning: " << w << '\n';
  Output out(c.out);
  if (parse_output_format(c.format) == OutputFormat::json) {
    nlohmann::ordered_json j;
    j["as_of"] = format_date(cmp.as_of);
    for (const auto& m : cmp.matrices) {
      nlohmann::ordered_json mj;
      mj["mode"] = std::string(to_string(m.mode));
      mj["rcmm_churned"] = {{"ecdf_churned", m.both}, {"ecdf_not_churned", m.rcmm_only}};
      mj["rcmm_not_churned"] = {{"ecdf_churned", m.ecdf_only}, {"ecdf_not_churned", m.neither}};
      j["matrices"].push_back(std::move(mj));
    }
    for (const auto& g : cmp.groups) {
      auto opt = [](const auto& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
      };
      j["definitions"].push_back({{"group", g.group},
                                  {"rcmm", opt(g.rcmm_k)},
                                  {"exo", opt(g.exo_k)},
                                  {"snp", opt(g.snp_k)},
                                  {"endo_avg", opt(g.endo_avg_k)},
                                  {"endo_users", g.endo_users}});
    }
    out.stream() << j.dump(2) << '\n';
  } else {
    Table t{{"table", "mode", "group", "rcmm", "ecdf", "value"}, {}};
    for (const auto& m : cmp.matrices) {
      const std::string mode(to_string(m.mode));
      const std::string all = "all";
      t.add({std::string("confusion"), mode, all, std::string("churned"),
             std::string("churned"), static_cast<double>(m.both)});
      t.add({std::string("confusion"), mode, all, std::string("churned"),
             std::string("not_churned"), static_cast<double>(m.rcmm_only)});
      t.add({std::string("confusion"), mode, all, std::string("not_churned"),
             std::string("churned"), static_cast<double>(m.ecdf_only)});
      t.add({std::string("confusion"), mode, all, std::string("not_churned"),
             std::string("not_churned"), static_cast<double>(m.neither)});
    }
    for (const auto& g : cmp.groups) {
      auto k_row = [&](const char* method, Cell v) {
        t.add({std::string("definition"), std::string(method), g.group, Cell{}, Cell{}, v});
      };
      k_row("rcmm", g.rcmm_k ? Cell{static_cast<double>(*g.rcmm_k)} : Cell{});
      k_row("exo", g.exo_k ? Cell{static_cast<double>(*g.exo_k)} : Cell{});
      k_row("snp", g.snp_k ? Cell{static_cast<double>(*g.snp_k)} : Cell{});
      k_row("endo_avg", opt_cell(g.endo_avg_k));
    }
    t.write(out.stream(), OutputFormat::csv);
  }
  out.close();
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Engagement, churn and survival analytics for app event logs", "engage"};
  app.require_subcommand(1);
  Common common;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic event log");
  SimulateArgs sim;
  simulate->add_option("--spec", sim.spec, "Cohort spec (JSON)");
  simulate->add_option("--truth", sim.truth, "Ground-truth output (JSON)");
  simulate->add_option("--users", sim.users, "Override the user count");

  auto* ingest = app.add_subcommand("ingest", "Validate and canonicalize an event log");
  IngestArgs ing;
  add_event_input(ingest, ing.input);
  ingest->add_option("--rejections", ing.rejections, "Rejected-line report");

  auto* panel = app.add_subcommand("panel", "Build the per-user daily metrics panel");
  PanelArgs pan;
  add_event_input(panel, pan.input);
  panel->add_option("--end", pan.end, "Panel end date (default: last event day)");
  panel->add_option("--session-timeout", pan.session_timeout, "Seconds before an open session closes");
  panel->add_option("--windows", pan.windows, "Rolling windows in days (empty: none)");
  panel->add_option("--sessions", pan.sessions, "Reconstructed session export");

  auto* churn = app.add_subcommand("churn-def", "RCMM curves and churn definitions");
  ChurnDefArgs cd;
  churn->add_option("--panel", cd.panel, "Panel CSV")->required();
  churn->add_option("--k-max", cd.k_max, "Largest k on the grid");
  churn->add_option("--returning-max", cd.returning_max, "Returning-churner threshold");
  churn->add_option("--missed-max", cd.missed_max, "Missed-metric threshold");
  churn->add_option("--metrics", cd.metrics, "Missed metrics, comma separated");
  churn->add_option("--as-of", cd.as_of, "Definition date (default: panel end)");
  churn->add_option("--definitions", cd.definitions, "Per-group definitions output");
  churn->add_option("--group-by", cd.group_by, "Grouping column (country)")
      ->check(CLI::IsMember({"country", "group"}));

  auto* ecdf = app.add_subcommand("ecdf", "ECDF engagement indicators");
  EcdfArgs ec;
  ecdf->add_option("--panel", ec.panel, "Panel CSV")->required();
  ecdf->add_option("--metric", ec.metric, "Metric name");
  ecdf->add_option("--mode", ec.mode, "endo, exo or snp");
  ecdf->add_option("--day", ec.day, "Query day (default: panel end)");
  ecdf->add_option("--q", ec.q, "Flag quantile");
  ecdf->add_option("--cutoff", ec.cutoff, "Gap cutoff for exo/snp references (<= 0: none)");
  ecdf->add_option("--user", ec.user, "Restrict to one user");
  ecdf->add_option("--distribution", ec.distribution, "Reference ECDF steps output");

  auto* score = app.add_subcommand("score", "Daily engagement scores");
  ScoreArgs sc;
  score->add_option("--panel", sc.panel, "Panel CSV")->required();
  score->add_option("--scaling,--mode", sc.scaling, "endo, exo or snp");
  score->add_option("--components", sc.components, "Metrics, comma separated");
  score->add_option("--from", sc.from, "First day");
  score->add_option("--to", sc.to, "Last day");
  score->add_option("--user", sc.user, "Restrict to one user");

  auto* km = app.add_subcommand("km", "Kaplan-Meier lifetime curves");
  KmArgs kma;
  km->add_option("--panel", kma.panel, "Panel CSV")->required();
  km->add_option("--churn-k", kma.churn_k, "Churn horizon in days");
  km->add_flag("--by-group", kma.by_group, "One curve per group");
  km->add_option("--group-by", kma.group_by, "country (one curve per group) or none");

  auto* fit = app.add_subcommand("survival-fit", "Fit a survival forest");
  ModelArgs fit_args;
  add_model_options(fit, fit_args);

  auto* eval = app.add_subcommand("survival-eval", "Repeated split evaluation of a forest");
  EvalArgs ev;
  add_model_options(eval, ev.model);
  eval->add_option("--bootstrap", ev.bootstrap, "Evaluation rounds");
  eval->add_option("--split", ev.split, "Training share of users");
  eval->add_option("--top", ev.top, "Number of top features to report");

  auto* report = app.add_subcommand("report", "Per-user report cards");
  ReportArgs rep;
  report->add_option("--panel", rep.panel, "Panel CSV")->required();
  report->add_option("--model", rep.model, "Fitted model file");
  report->add_option("--users", rep.users, "User ids, comma separated (default: all)");
  report->add_option("--as-of", rep.as_of, "Day of interest (default: panel end)");
  report->add_option("--q", rep.q, "Flag quantile");
  report->add_option("--churn-k", rep.churn_k, "Churn horizon for the Kaplan-Meier fallback");
  report->add_option("--interval", rep.interval, "Pseudo-observation interval for LTRC models");
  report->add_option("--windows", rep.windows, "Rolling windows when the panel has none");

  auto* compare = app.add_subcommand("compare", "RCMM versus ECDF churn classification");
  CompareArgs cmp;
  compare->add_option("--panel", cmp.panel, "Panel CSV")->required();
  compare->add_option("--as-of", cmp.as_of, "Day of interest (default: panel end)");
  compare->add_option("--q", cmp.q, "Flag quantile");

  for (auto* sub : app.get_subcommands({})) add_common(sub, common);

  std::vector<std::string> args(argv + 1, argv + argc);
  CLI::App* chosen = nullptr;
  for (const auto& a : args) {
    if (!a.empty() && a[0] != '-') {
      chosen = app.get_subcommand_no_throw(a);
      break;
    }
  }
  if (chosen) {
    auto value_of = [&](const std::string& flag) -> std::string {
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == flag && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind(flag + "=", 0) == 0) return args[i].substr(flag.size() + 1);
      }
      return {};
    };
    std::vector<nlohmann::json> sources;
    if (const auto spec = value_of("--model-spec"); !spec.empty()) {
      sources.push_back(read_json_file(spec));
    }
    if (const auto cfg = value_of("--config"); !cfg.empty()) sources.push_back(read_json_file(cfg));
    if (!sources.empty()) merge_json_options(app, *chosen, sources, args);
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (simulate->parsed()) {
    return run_simulate(common, sim, simulate->get_option("--seed")->count() > 0);
  }
  if (ingest->parsed()) return run_ingest(common, ing);
  if (panel->parsed()) return run_panel(common, pan);
  if (churn->parsed()) return run_churn_def(common, cd);
  if (ecdf->parsed()) return run_ecdf(common, ec);
  if (score->parsed()) return run_score(common, sc);
  if (km->parsed()) return run_km(common, kma);
  if (fit->parsed()) return run_survival_fit(common, fit_args);
  if (eval->parsed()) return run_survival_eval(common, ev);
  if (report->parsed()) return run_report(common, rep);
  if (compare->parsed()) return run_compare(common, cmp);
  return 1;
}

}  // namespace
}  // namespace engage::cli

int main(int argc, char** argv) {
  try {
    return engage::cli::run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
