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

#ifndef ENGAGE_COMMON_HPP_
#define ENGAGE_COMMON_HPP_

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace engage {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (dates, numbers, file headers).
class ParseError : public Error {
 public:
  using Error::Error;
};

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

inline constexpr std::int64_t kSecondsPerDay = 86400;

// ---------------------------------------------------------------------------
// Dates. Everything is bucketed in UTC.

inline int days_between(Date from, Date to) {
  return static_cast<int>((to - from).count());
}

inline Date day_of(Timestamp ts) {
  return std::chrono::floor<std::chrono::days>(ts);
}

namespace detail {

inline int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len,
                           std::string_view what) {
  if (pos + len > text.size()) throw ParseError("truncated " + std::string(what));
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc() || ptr != first + len) {
    throw ParseError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

/// Parses YYYY-MM-DD.
inline Date parse_date(std::string_view text) {
  using namespace std::chrono;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ParseError("expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const int y = detail::parse_fixed_int(text, 0, 4, "date");
  const int m = detail::parse_fixed_int(text, 5, 2, "date");
  const int d = detail::parse_fixed_int(text, 8, 2, "date");
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ParseError("invalid calendar date '" + std::string(text) + "'");
  return sys_days{ymd};
}

/// Parses YYYY-MM-DDTHH:MM:SS with an optional trailing 'Z' or "+00:00".
/// A space is accepted in place of 'T'. Non-UTC offsets are rejected.
inline Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  if (text.size() < 19 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
      text[16] != ':') {
    throw ParseError("expected ISO-8601 timestamp, got '" + std::string(text) + "'");
  }
  std::string_view rest = text.substr(19);
  if (!(rest.empty() || rest == "Z" || rest == "+00:00")) {
    throw ParseError("timestamp must be UTC: '" + std::string(text) + "'");
  }
  const Date date = parse_date(text.substr(0, 10));
  const int hh = detail::parse_fixed_int(text, 11, 2, "time");
  const int mm = detail::parse_fixed_int(text, 14, 2, "time");
  const int ss = detail::parse_fixed_int(text, 17, 2, "time");
  if (hh > 23 || mm > 59 || ss > 59) {
    throw ParseError("invalid time of day '" + std::string(text) + "'");
  }
  return Timestamp{date} + hours{hh} + minutes{mm} + seconds{ss};
}

inline std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_timestamp(Timestamp ts) {
  const Date date = day_of(ts);
  const auto secs = (ts - Timestamp{date}).count();
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02d:%02d:%02dZ", static_cast<int>(secs / 3600),
                static_cast<int>((secs / 60) % 60), static_cast<int>(secs % 60));
  return format_date(date) + buf;
}

/// ISO-8601 week number (1..53).
inline int iso_week(Date date) {
  using namespace std::chrono;
  const weekday wd{date};
  // Monday=0 .. Sunday=6
  const int dow = static_cast<int>((wd.c_encoding() + 6) % 7);
  const Date thursday = date + days{3 - dow};
  const year_month_day ymd{thursday};
  const Date jan1 = sys_days{ymd.year() / January / 1};
  return days_between(jan1, thursday) / 7 + 1;
}

// ---------------------------------------------------------------------------
// Numbers.

/// Shortest text that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("invalid number '" + std::string(text) + "'");
  }
  return value;
}

inline long long parse_int(std::string_view text) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("invalid integer '" + std::string(text) + "'");
  }
  return value;
}

// ---------------------------------------------------------------------------
// CSV. RFC-4180 quoting; records never span lines.

inline std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

inline std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace engage

#endif  // ENGAGE_COMMON_HPP_
