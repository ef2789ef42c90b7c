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


// Runs the command-line tool as a child process.

#ifndef ENGAGE_TESTS_CLI_RUNNER_HPP_
#define ENGAGE_TESTS_CLI_RUNNER_HPP_

#include <sys/wait.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace engage::testing {

namespace fs = std::filesystem;

inline std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

// Exit status of `engage args...`; stderr goes to `err` when given.
inline int run_cli(const std::vector<std::string>& args, const fs::path& err = {}) {
  std::string cmd = quote(ENGAGE_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += err.empty() ? " 2>/dev/null" : " 2>" + quote(err.string());
  cmd += " >/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("engage_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Every stage from simulate to report in `dir`. Returns the output files, or
// an empty list when a stage fails.
inline std::vector<fs::path> run_pipeline(const fs::path& dir, int workers, std::uint64_t seed) {
  const std::string w = std::to_string(workers);
  const std::string s = std::to_string(seed);
  auto f = [&](const char* name) { return (dir / name).string(); };
  const std::vector<std::vector<std::string>> stages = {
      {"simulate", "--users", "150", "--seed", s, "--out", f("events.csv"), "--truth",
       f("truth.json")},
      {"ingest", "--events", f("events.csv"), "--out", f("canonical.csv")},
      {"panel", "--events", f("canonical.csv"), "--windows", "3,7", "--sessions",
       f("sessions.csv"), "--out", f("panel.csv")},
      {"churn-def", "--panel", f("panel.csv"), "--definitions", f("definitions.json"), "--out",
       f("rcmm_curve.csv")},
      {"ecdf", "--panel", f("panel.csv"), "--mode", "exo", "--distribution", f("ecdf.csv"),
       "--out", f("indicators.csv")},
      {"score", "--panel", f("panel.csv"), "--mode", "exo", "--out", f("scores.csv")},
      {"km", "--panel", f("panel.csv"), "--by-group", "--out", f("km.csv")},
      {"survival-fit", "--panel", f("panel.csv"), "--model", "ltrc-rrf", "--ntree", "8",
       "--seed", s, "--out", f("model.bin")},
      {"survival-eval", "--panel", f("panel.csv"), "--model", "csf", "--ntree", "8",
       "--bootstrap", "2", "--seed", s, "--format", "json", "--out", f("eval.json")},
      {"report", "--panel", f("panel.csv"), "--model", f("model.bin"), "--out", f("report.csv")},
      {"compare", "--panel", f("panel.csv"), "--format", "json", "--out", f("compare.json")},
  };
  for (auto args : stages) {
    args.push_back("--workers");
    args.push_back(w);
    if (run_cli(args) != 0) return {};
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path().filename());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace engage::testing

#endif  // ENGAGE_TESTS_CLI_RUNNER_HPP_
