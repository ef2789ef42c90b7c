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

// Binary container for fitted forests.
//
// Layout, all integers little-endian:
//   "ENGF" u32 version u8 algorithm
//   params: i32 ntree mtry, f64 alpha, i32 min_node min_leaf max_splits
//           perm_node permutations, u8 resample, f64 sample_fraction
//   u64 seed, strings feature_names, i32[] grid, f64[] importance,
//   strings warnings, u32 tree count, trees
// Arrays and strings are prefixed by a u32 length.

#ifndef ENGAGE_MODEL_IO_HPP_
#define ENGAGE_MODEL_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "engage/common.hpp"
#include "engage/forest.hpp"

namespace engage {

inline constexpr char kModelMagic[4] = {'E', 'N', 'G', 'F'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little, "model I/O assumes little-endian hosts");

class ModelWriter {
 public:
  explicit ModelWriter(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void put_size(std::size_t n) { put(static_cast<std::uint32_t>(n)); }
  void put(const std::string& s) {
    put_size(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  template <typename T>
  void put_vector(const std::vector<T>& v) {
    put_size(v.size());
    for (const auto& x : v) put(x);
  }

 private:
  std::ostream& out_;
};

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  template <typename T>
  T get() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw Error("model file is truncated");
    return v;
  }
  std::size_t get_size() {
    const auto n = get<std::uint32_t>();
    if (n > (1u << 28)) throw Error("model file is corrupt");
    return n;
  }
  std::string get_string() {
    std::string s(get_size(), '\0');
    in_.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!in_) throw Error("model file is truncated");
    return s;
  }
  template <typename T>
  std::vector<T> get_vector() {
    std::vector<T> v(get_size());
    for (auto& x : v) x = get<T>();
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace detail

inline void write_model(std::ostream& out, const ForestModel& model) {
  detail::ModelWriter w(out);
  out.write(kModelMagic, 4);
  w.put(kModelVersion);
  w.put(static_cast<std::uint8_t>(model.algorithm));
  const auto& p = model.params;
  w.put(static_cast<std::int32_t>(p.ntree));
  w.put(static_cast<std::int32_t>(p.mtry));
  w.put(p.alpha);
  w.put(static_cast<std::int32_t>(p.min_node_size));
  w.put(static_cast<std::int32_t>(p.min_leaf_size));
  w.put(static_cast<std::int32_t>(p.max_split_points));
  w.put(static_cast<std::int32_t>(p.permutation_node_size));
  w.put(static_cast<std::int32_t>(p.permutations));
  w.put(static_cast<std::uint8_t>(p.resample));
  w.put(p.sample_fraction);
  w.put(model.seed);
  w.put_size(model.feature_names.size());
  for (const auto& f : model.feature_names) w.put(f);
  w.put_vector(model.grid);
  w.put_vector(model.importance);
  w.put_size(model.warnings.size());
  for (const auto& s : model.warnings) w.put(s);
  w.put_size(model.trees.size());
  for (const auto& tree : model.trees) {
    w.put_size(tree.nodes.size());
    for (const auto& n : tree.nodes) {
      w.put(static_cast<std::int32_t>(n.feature));
      w.put(n.threshold);
      w.put(n.statistic);
      w.put(n.p_value);
      w.put(static_cast<std::int32_t>(n.left));
      w.put(static_cast<std::int32_t>(n.right));
      w.put(static_cast<std::int32_t>(n.leaf));
    }
    w.put_size(tree.leaves.size());
    for (const auto& l : tree.leaves) {
      w.put_vector(l.survival);
      w.put(l.risk);
      w.put(static_cast<std::int32_t>(l.size));
      w.put(static_cast<std::int32_t>(l.events));
    }
    w.put_vector(tree.baseline);
  }
  if (!out) throw Error("failed to write model");
}

inline ForestModel read_model(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kModelMagic, 4) != 0) throw Error("not a model file");
  detail::ModelReader r(in);
  const auto version = r.get<std::uint32_t>();
  if (version != kModelVersion) {
    throw Error("unsupported model version " + std::to_string(version));
  }
  ForestModel m;
  const auto algo = r.get<std::uint8_t>();
  if (algo > 2) throw Error("model file has an unknown algorithm");
  m.algorithm = static_cast<ForestAlgorithm>(algo);
  auto& p = m.params;
  p.ntree = r.get<std::int32_t>();
  p.mtry = r.get<std::int32_t>();
  p.alpha = r.get<double>();
  p.min_node_size = r.get<std::int32_t>();
  p.min_leaf_size = r.get<std::int32_t>();
  p.max_split_points = r.get<std::int32_t>();
  p.permutation_node_size = r.get<std::int32_t>();
  p.permutations = r.get<std::int32_t>();
  p.resample = r.get<std::uint8_t>() != 0;
  p.sample_fraction = r.get<double>();
  m.seed = r.get<std::uint64_t>();
  m.feature_names.resize(r.get_size());
  for (auto& f : m.feature_names) f = r.get_string();
  m.grid = r.get_vector<int>();
  m.importance = r.get_vector<double>();
  m.warnings.resize(r.get_size());
  for (auto& s : m.warnings) s = r.get_string();
  m.trees.resize(r.get_size());
  for (auto& tree : m.trees) {
    tree.nodes.resize(r.get_size());
    for (auto& n : tree.nodes) {
      n.feature = r.get<std::int32_t>();
      n.threshold = r.get<double>();
      n.statistic = r.get<double>();
      n.p_value = r.get<double>();
      n.left = r.get<std::int32_t>();
      n.right = r.get<std::int32_t>();
      n.leaf = r.get<std::int32_t>();
    }
    tree.leaves.resize(r.get_size());
    for (auto& l : tree.leaves) {
      l.survival = r.get_vector<double>();
      l.risk = r.get<double>();
      l.size = r.get<std::int32_t>();
      l.events = r.get<std::int32_t>();
    }
    tree.baseline = r.get_vector<double>();
    // structural checks so prediction cannot run off the arrays
    for (const auto& n : tree.nodes) {
      const auto nn = static_cast<int>(tree.nodes.size());
      if (n.feature >= static_cast<int>(m.feature_names.size())) throw Error("model file is corrupt");
      if (n.feature >= 0 && (n.left <= 0 || n.left >= nn || n.right <= 0 || n.right >= nn)) {
        throw Error("model file is corrupt");
      }
      if (n.feature < 0 && (n.leaf < 0 || n.leaf >= static_cast<int>(tree.leaves.size()))) {
        throw Error("model file is corrupt");
      }
    }
    if (tree.nodes.empty()) throw Error("model file is corrupt");
  }
  if (static_cast<int>(m.trees.size()) != p.ntree) throw Error("model tree count mismatch");
  return m;
}

inline void save_model(const std::string& path, const ForestModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_model(out, model);
}

inline ForestModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_model(in);
}

}  // namespace engage

#endif  // ENGAGE_MODEL_IO_HPP_
