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

// Raw app-usage event log: record type, CSV/JSONL ingestion and the
// canonical CSV writer.

#ifndef ENGAGE_EVENTS_HPP_
#define ENGAGE_EVENTS_HPP_

#include <algorithm>
#include <array>
#include <compare>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/common.hpp"

namespace engage {

enum class EventKind {
  login,
  session_end,
  click,
  video_start,
  video_stop,
  test_passed,
  action_card_view,
  drug_list_view,
};

inline constexpr std::array<std::string_view, 8> kEventKindNames = {
    "login",      "session_end", "click",           "video_start",
    "video_stop", "test_passed", "action_card_view", "drug_list_view"};

inline std::string_view to_string(EventKind kind) {
  return kEventKindNames[static_cast<std::size_t>(kind)];
}

inline std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kEventKindNames.size(); ++i) {
    if (kEventKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

/// Kinds that carry a duration (session and video spans).
inline bool carries_duration(EventKind kind) {
  return kind == EventKind::session_end || kind == EventKind::video_stop;
}

/// Click-type events: everything except the session markers.
inline bool is_action(EventKind kind) {
  return kind != EventKind::login && kind != EventKind::session_end;
}

/// Clicks on videos, action cards and testing features.
inline bool is_elearning(EventKind kind) {
  return kind == EventKind::video_start || kind == EventKind::video_stop ||
         kind == EventKind::test_passed || kind == EventKind::action_card_view;
}

struct EventRecord {
  std::string user_id;
  Timestamp timestamp;
  EventKind kind = EventKind::login;
  std::optional<double> duration_s;
  std::string country;

  auto operator<=>(const EventRecord&) const = default;
  bool operator==(const EventRecord&) const = default;
};

enum class LogFormat { csv, jsonl };

inline LogFormat parse_log_format(std::string_view name) {
  if (name == "csv") return LogFormat::csv;
  if (name == "jsonl") return LogFormat::jsonl;
  throw ParseError("unknown log format '" + std::string(name) + "'");
}

inline constexpr std::string_view kEventCsvHeader =
    "user_id,timestamp_iso8601,event_kind,duration_s,country";

struct Rejection {
  std::size_t line = 0;  // 1-based, header included
  std::string reason;
};

struct IngestOptions {
  // Inclusive observation window; events outside it are rejected.
  std::optional<Date> window_begin;
  std::optional<Date> window_end;
};

struct IngestResult {
  std::vector<EventRecord> events;  // sorted by (user_id, timestamp), unique
  std::vector<Rejection> rejections;
  std::vector<std::string> dedupe_notes;
};

namespace detail {

inline EventRecord make_event(std::string user_id, std::string_view timestamp,
                              std::string_view kind_name, std::optional<double> duration,
                              std::string country, const IngestOptions& options) {
  if (user_id.empty()) throw ParseError("empty user_id");
  if (country.empty()) throw ParseError("empty country");
  const auto kind = parse_event_kind(kind_name);
  if (!kind) throw ParseError("unknown event_kind '" + std::string(kind_name) + "'");
  EventRecord rec{std::move(user_id), parse_timestamp(timestamp), *kind, duration,
                  std::move(country)};
  if (rec.duration_s) {
    if (!std::isfinite(*rec.duration_s) || *rec.duration_s < 0.0) {
      throw ParseError("duration_s must be a non-negative number");
    }
  }
  if (carries_duration(rec.kind) && !rec.duration_s) {
    throw ParseError(std::string(kind_name) + " requires duration_s");
  }
  if (!carries_duration(rec.kind) && rec.duration_s) {
    throw ParseError(std::string(kind_name) + " must not carry duration_s");
  }
  const Date day = day_of(rec.timestamp);
  if (options.window_begin && day < *options.window_begin) {
    throw ParseError("timestamp before observation window");
  }
  if (options.window_end && day > *options.window_end) {
    throw ParseError("timestamp after observation window");
  }
  return rec;
}

inline EventRecord parse_csv_event(std::string_view line, const IngestOptions& options) {
  auto fields = split_csv_line(line);
  if (fields.size() != 5) {
    throw ParseError("expected 5 fields, got " + std::to_string(fields.size()));
  }
  std::optional<double> duration;
  if (!fields[3].empty()) duration = parse_double(fields[3]);
  return make_event(std::move(fields[0]), fields[1], fields[2], duration,
                    std::move(fields[4]), options);
}

inline EventRecord parse_json_event(std::string_view line, const IngestOptions& options) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError("expected a JSON object");
  auto text = [&](const char* key) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      throw ParseError(std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
  };
  std::optional<double> duration;
  if (auto it = obj.find("duration_s"); it != obj.end() && !it->is_null()) {
    if (!it->is_number()) throw ParseError("duration_s must be a number");
    duration = it->get<double>();
  }
  return make_event(text("user_id"), text("timestamp_iso8601"), text("event_kind"), duration,
                    text("country"), options);
}

}  // namespace detail

/// Reads a whole event log. Malformed rows are collected into the rejection
/// report and skipped; exact duplicates are dropped with a note each.
inline IngestResult ingest_events(std::istream& in, LogFormat format,
                                  const IngestOptions& options = {}) {
  IngestResult result;
  std::vector<std::pair<EventRecord, std::size_t>> parsed;
  std::string line;
  std::size_t line_no = 0;
  std::size_t data_lines = 0;
  bool header_seen = format != LogFormat::csv;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kEventCsvHeader) {
        throw ParseError("missing or unexpected CSV header; expected '" +
                         std::string(kEventCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++data_lines;
    try {
      parsed.emplace_back(format == LogFormat::csv ? detail::parse_csv_event(line, options)
                                                   : detail::parse_json_event(line, options),
                          line_no);
    } catch (const ParseError& e) {
      result.rejections.push_back({line_no, e.what()});
    }
  }
  if (data_lines == 0) throw Error("empty event log");

  std::stable_sort(parsed.begin(), parsed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  result.events.reserve(parsed.size());
  std::size_t kept_line = 0;
  for (auto& [rec, ln] : parsed) {
    if (!result.events.empty() && result.events.back() == rec) {
      result.dedupe_notes.push_back("line " + std::to_string(ln) + " duplicates line " +
                                    std::to_string(kept_line));
      continue;
    }
    kept_line = ln;
    result.events.push_back(std::move(rec));
  }
  return result;
}

/// Canonical CSV rendering: fixed header, input order, shortest round-trip
/// numbers, LF line endings.
inline void write_events_csv(std::ostream& out, std::span<const EventRecord> events) {
  out << kEventCsvHeader << '\n';
  for (const auto& e : events) {
    out << csv_field(e.user_id) << ',' << format_timestamp(e.timestamp) << ','
        << to_string(e.kind) << ',' << (e.duration_s ? format_double(*e.duration_s) : "")
        << ',' << csv_field(e.country) << '\n';
  }
}

inline void write_events_jsonl(std::ostream& out, std::span<const EventRecord> events) {
  for (const auto& e : events) {
    nlohmann::ordered_json obj;
    obj["user_id"] = e.user_id;
    obj["timestamp_iso8601"] = format_timestamp(e.timestamp);
    obj["event_kind"] = std::string(to_string(e.kind));
    if (e.duration_s) {
      obj["duration_s"] = *e.duration_s;
    } else {
      obj["duration_s"] = nullptr;
    }
    obj["country"] = e.country;
    out << obj.dump() << '\n';
  }
}

}  // namespace engage

#endif  // ENGAGE_EVENTS_HPP_
