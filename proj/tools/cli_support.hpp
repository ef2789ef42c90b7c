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

// Output tables, file helpers and JSON configuration merging for the
// command-line tool.

#ifndef ENGAGE_TOOLS_CLI_SUPPORT_HPP_
#define ENGAGE_TOOLS_CLI_SUPPORT_HPP_

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "engage/common.hpp"

namespace engage::cli {

enum class OutputFormat { csv, json };

inline OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ParseError("unknown format '" + s + "' (expected csv or json)");
}

using Cell = std::variant<std::monostate, std::string, long long, double, bool>;

/// A fixed-column table rendered as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error("table row has the wrong width");
    rows.push_back(std::move(row));
  }

  void write(std::ostream& out, OutputFormat format) const {
    if (format == OutputFormat::csv) {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i ? "," : "") << csv_field(columns[i]);
      }
      out << '\n';
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) out << ',';
          std::visit(
              [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>) out << csv_field(v);
                if constexpr (std::is_same_v<T, long long>) out << v;
                if constexpr (std::is_same_v<T, double>) out << format_double(v);
                if constexpr (std::is_same_v<T, bool>) out << (v ? 1 : 0);
              },
              row[i]);
        }
        out << '\n';
      }
      return;
    }
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, std::monostate>) {
                obj[columns[i]] = nullptr;
              } else {
                obj[columns[i]] = v;
              }
            },
            row[i]);
      }
      arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
  }
};

template <typename T>
Cell opt_cell(const std::optional<T>& v) {
  if (!v) return std::monostate{};
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    return static_cast<long long>(*v);
  } else {
    return *v;
  }
}

/// Output sink: a file opened in binary mode (LF line endings) or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (file_) {
      file_->close();
      if (!*file_) throw Error("failed to write output");
    }
    std::cout.flush();
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

inline nlohmann::json read_json_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(static_cast<int>(parse_int(part)));
  return out;
}

inline std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  for (auto& part : split(text, ',')) {
    if (!part.empty()) out.push_back(std::move(part));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON configuration.
//
// A config file is an object whose keys are long option names without the
// leading dashes ('_' and '-' are interchangeable). Keys may sit at the top
// level or inside an object named after a subcommand; the subcommand section
// wins over the top level. Values become extra command-line arguments for
// options not given on the command line, so explicit flags take precedence.

namespace detail {

inline std::string option_key(std::string key) {
  for (auto& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

inline bool given_on_command_line(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

inline std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw ParseError("config key '" + key + "' has an unsupported value");
}

}  // namespace detail

/// Appends arguments from JSON sources (highest priority first) for options
/// of `sub` that the command line leaves unset.
inline void merge_json_options(CLI::App& app, CLI::App& sub,
                               const std::vector<nlohmann::json>& sources,
                               std::vector<std::string>& args) {
  std::vector<std::string> added;
  for (const auto& src : sources) {
    if (!src.is_object()) throw ParseError("config must be a JSON object");
    std::vector<std::pair<std::string, nlohmann::json>> items;
    if (auto it = src.find(sub.get_name()); it != src.end() && it->is_object()) {
      for (const auto& [k, v] : it->items()) items.emplace_back(k, v);
    }
    for (const auto& [k, v] : src.items()) {
      if (v.is_object()) {
        if (!app.get_subcommand_no_throw(k)) {
          throw ParseError("unknown config section '" + k + "'");
        }
        continue;
      }
      items.emplace_back(k, v);
    }
    for (const auto& [raw, value] : items) {
      const std::string key = detail::option_key(raw);
      if (key == "config") continue;
      CLI::Option* opt = sub.get_option_no_throw("--" + key);
      if (!opt) {
        bool known_elsewhere = false;
        for (const auto* other : app.get_subcommands({})) {
          known_elsewhere = known_elsewhere || other->get_option_no_throw("--" + key) != nullptr;
        }
        if (!known_elsewhere) throw ParseError("unknown config key '" + raw + "'");
        continue;
      }
      if (detail::given_on_command_line(args, key) ||
          std::find(added.begin(), added.end(), key) != added.end()) {
        continue;
      }
      added.push_back(key);
      if (value.is_null()) continue;
      if (value.is_boolean()) {
        if (opt->get_expected_min() == 0) {
          if (value.get<bool>()) args.push_back("--" + key);
        } else {
          args.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
        }
      } else if (value.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < value.size(); ++i) {
          joined += (i ? "," : "") + detail::scalar_text(value[i], raw);
        }
        args.push_back("--" + key + "=" + joined);
      } else {
        args.push_back("--" + key + "=" + detail::scalar_text(value, raw));
      }
    }
  }
}

}  // namespace engage::cli

#endif  // ENGAGE_TOOLS_CLI_SUPPORT_HPP_
