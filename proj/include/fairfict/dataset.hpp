// Copyright 2026 The FairFict Authors.
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

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairfict/linear_threshold.hpp"

namespace fairfict {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header plus text cells, exactly as read from disk.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t size() const { return rows.size(); }

  std::optional<std::size_t> column_index(std::string_view name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j] == name) return j;
    }
    return std::nullopt;
  }
};

enum class ScalingMode : std::uint8_t { MinMax, None };

struct PreprocessConfig {
  std::vector<std::string> protected_columns;
  std::vector<std::string> categorical_columns;
  // Defaults to the last column.
  std::optional<std::string> label_column;
  // When set, y = 1 iff the label cell equals this text; otherwise label
  // cells must be numeric 0/1.
  std::optional<std::string> positive_label;
  bool balance = false;
  std::uint64_t balance_seed = 0;
  ScalingMode scaling = ScalingMode::MinMax;
};

// Affine map of a raw column onto [-1, 1].
struct ColumnScaling {
  std::string name;
  double center = 0.0;
  double half_range = 1.0;

  double apply(double raw) const {
    if (half_range == 0.0) return 0.0;
    return std::clamp((raw - center) / half_range, -1.0, 1.0);
  }

  static ColumnScaling identity(std::string name) {
    return {std::move(name), 0.0, 1.0};
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline bool is_missing(std::string_view cell) {
  std::string t = trim(cell);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return t.empty() || t == "?" || t == "na" || t == "nan" || t == "null";
}

// RFC-4180-ish split: double quotes group commas, "" escapes a quote.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  out.push_back(was_quoted ? cur : trim(cur));
  return out;
}

}  // namespace detail

inline RawTable parse_csv(std::istream& in) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (table.columns.empty()) {
      table.columns = std::move(cells);
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.columns.size()) + " cells, got " +
                      std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.columns.empty()) throw DataError("CSV has no header");
  if (table.rows.empty()) throw DataError("CSV has no data rows");
  return table;
}

inline RawTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_csv(in);
}

// Immutable design: protected block x (n x d_p), unprotected block x'
// (n x d_u) and binary labels y.
class Dataset {
 public:
  Dataset(Matrix protected_x, Matrix unprotected_x, std::vector<int> labels,
          std::vector<std::string> protected_names,
          std::vector<std::string> unprotected_names,
          std::vector<ColumnScaling> scaling = {},
          std::vector<std::size_t> source_rows = {})
      : protected_(std::move(protected_x)),
        unprotected_(std::move(unprotected_x)),
        labels_(std::move(labels)),
        protected_names_(std::move(protected_names)),
        unprotected_names_(std::move(unprotected_names)),
        scaling_(std::move(scaling)),
        source_rows_(std::move(source_rows)) {
    const auto n = static_cast<Eigen::Index>(labels_.size());
    if (n == 0) throw DataError("dataset is empty");
    if (protected_.rows() != n || unprotected_.rows() != n) {
      throw DataError("dataset blocks disagree on row count");
    }
    if (protected_names_.size() != static_cast<std::size_t>(protected_.cols()) ||
        unprotected_names_.size() != static_cast<std::size_t>(unprotected_.cols())) {
      throw DataError("dataset column names disagree with block widths");
    }
    for (int y : labels_) {
      if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
      negatives_ += (y == 0);
    }
    if (negatives_ == 0) {
      throw DataError("dataset needs at least one y=0 row for false-positive rates");
    }
    if (!protected_.allFinite() || !unprotected_.allFinite()) {
      throw DataError("dataset contains non-finite values");
    }
    if (source_rows_.empty()) {
      source_rows_.resize(labels_.size());
      for (std::size_t i = 0; i < source_rows_.size(); ++i) source_rows_[i] = i;
    }
    features_.resize(n, protected_.cols() + unprotected_.cols());
    features_ << protected_, unprotected_;
  }

  std::size_t size() const { return labels_.size(); }
  Eigen::Index protected_dim() const { return protected_.cols(); }
  Eigen::Index unprotected_dim() const { return unprotected_.cols(); }
  Eigen::Index feature_dim() const { return features_.cols(); }
  std::size_t negatives() const { return negatives_; }
  std::size_t positives() const { return size() - negatives_; }

  const Matrix& protected_features() const { return protected_; }
  const Matrix& unprotected_features() const { return unprotected_; }
  // Joint X = (x, x'), protected columns first.
  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& protected_names() const { return protected_names_; }
  const std::vector<std::string>& unprotected_names() const { return unprotected_names_; }
  const std::vector<ColumnScaling>& scaling() const { return scaling_; }
  // Index of each row in the table it was loaded from.
  const std::vector<std::size_t>& source_rows() const { return source_rows_; }

  Dataset select_rows(const std::vector<std::size_t>& rows) const {
    const auto m = static_cast<Eigen::Index>(rows.size());
    Matrix p(m, protected_.cols());
    Matrix u(m, unprotected_.cols());
    std::vector<int> y(rows.size());
    std::vector<std::size_t> src(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(rows[k]);
      p.row(static_cast<Eigen::Index>(k)) = protected_.row(i);
      u.row(static_cast<Eigen::Index>(k)) = unprotected_.row(i);
      y[k] = labels_[rows[k]];
      src[k] = source_rows_[rows[k]];
    }
    return Dataset(std::move(p), std::move(u), std::move(y), protected_names_,
                   unprotected_names_, scaling_, std::move(src));
  }

 private:
  Matrix protected_;
  Matrix unprotected_;
  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::string> protected_names_;
  std::vector<std::string> unprotected_names_;
  std::vector<ColumnScaling> scaling_;
  std::vector<std::size_t> source_rows_;
  std::size_t negatives_ = 0;
};

// Subsamples the majority class uniformly without replacement down to the
// minority count. Survivors keep their relative order.
inline Dataset balance_labels(const Dataset& data, std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data.labels()[i] == 1 ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw DataError("balance_labels: both label classes must be present");
  }
  if (pos.size() == neg.size()) return data;

  auto& majority = pos.size() > neg.size() ? pos : neg;
  const auto& minority = pos.size() > neg.size() ? neg : pos;
  std::vector<std::size_t> kept;
  kept.reserve(minority.size());
  std::mt19937_64 rng(seed);
  std::sample(majority.begin(), majority.end(), std::back_inserter(kept),
              minority.size(), rng);

  std::vector<std::size_t> rows(minority.begin(), minority.end());
  rows.insert(rows.end(), kept.begin(), kept.end());
  std::sort(rows.begin(), rows.end());
  return data.select_rows(rows);
}

// Builds a Dataset from a parsed table: drops rows with missing cells,
// one-hot encodes categorical columns (all categories kept, sorted), min-max
// scales numeric columns to [-1, 1] and splits protected from unprotected.
inline Dataset preprocess(const RawTable& table, const PreprocessConfig& config,
                          std::vector<std::string>* warnings = nullptr) {
  auto warn = [&](const std::string& msg) {
    if (warnings) {
      warnings->push_back(msg);
    } else {
      std::cerr << "warning: " << msg << '\n';
    }
  };

  const std::size_t label_col = [&] {
    if (!config.label_column) return table.columns.size() - 1;
    auto idx = table.column_index(*config.label_column);
    if (!idx) throw DataError("label column '" + *config.label_column + "' not found");
    return *idx;
  }();
  std::set<std::string> protected_set(config.protected_columns.begin(),
                                      config.protected_columns.end());
  std::set<std::string> categorical_set(config.categorical_columns.begin(),
                                        config.categorical_columns.end());
  for (const auto& name : protected_set) {
    auto idx = table.column_index(name);
    if (!idx) throw DataError("protected column '" + name + "' not found");
    if (*idx == label_col) throw DataError("label column cannot be protected");
  }
  for (const auto& name : categorical_set) {
    if (!table.column_index(name)) {
      throw DataError("categorical column '" + name + "' not found");
    }
  }

  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (std::any_of(row.begin(), row.end(),
                    [](const std::string& c) { return detail::is_missing(c); })) {
      continue;
    }
    keep.push_back(r);
  }
  if (keep.size() != table.rows.size()) {
    warn("dropped " + std::to_string(table.rows.size() - keep.size()) +
         " row(s) with missing values");
  }
  if (keep.empty()) throw DataError("no complete rows");

  std::vector<int> labels;
  labels.reserve(keep.size());
  for (std::size_t r : keep) {
    const std::string cell = detail::trim(table.rows[r][label_col]);
    if (config.positive_label) {
      labels.push_back(cell == *config.positive_label ? 1 : 0);
      continue;
    }
    auto v = detail::parse_double(cell);
    if (!v || (*v != 0.0 && *v != 1.0)) {
      throw DataError("label not binary: '" + cell + "' in row " +
                      std::to_string(r + 2));
    }
    labels.push_back(*v == 1.0 ? 1 : 0);
  }

  struct Column {
    std::string name;
    std::vector<double> values;
    ColumnScaling scaling;
  };
  std::vector<Column> prot;
  std::vector<Column> unprot;

  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j == label_col) continue;
    const std::string& name = table.columns[j];
    auto& dest = protected_set.count(name) ? prot : unprot;
    if (categorical_set.count(name)) {
      std::set<std::string> cats;
      for (std::size_t r : keep) cats.insert(detail::trim(table.rows[r][j]));
      for (const auto& cat : cats) {
        Column col{name + "=" + cat, {}, ColumnScaling::identity(name + "=" + cat)};
        col.values.reserve(keep.size());
        for (std::size_t r : keep) {
          col.values.push_back(detail::trim(table.rows[r][j]) == cat ? 1.0 : 0.0);
        }
        dest.push_back(std::move(col));
      }
      continue;
    }
    Column col{name, {}, ColumnScaling::identity(name)};
    col.values.reserve(keep.size());
    for (std::size_t r : keep) {
      auto v = detail::parse_double(table.rows[r][j]);
      if (!v) {
        throw DataError("unparseable cell '" + table.rows[r][j] + "' in column '" +
                        name + "', row " + std::to_string(r + 2));
      }
      col.values.push_back(*v);
    }
    if (config.scaling == ScalingMode::MinMax) {
      auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.end());
      col.scaling.center = (*lo + *hi) / 2.0;
      col.scaling.half_range = (*hi - *lo) / 2.0;
      if (col.scaling.half_range == 0.0) {
        warn("column '" + name + "' is constant; scaled to 0");
      }
      for (double& v : col.values) v = col.scaling.apply(v);
    }
    dest.push_back(std::move(col));
  }

  auto to_matrix = [&](const std::vector<Column>& cols) {
    Matrix m(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (std::size_t r = 0; r < keep.size(); ++r) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cols[c].values[r];
      }
    }
    return m;
  };
  std::vector<std::string> pnames;
  std::vector<std::string> unames;
  std::vector<ColumnScaling> scaling;
  for (const auto& c : prot) {
    pnames.push_back(c.name);
    scaling.push_back(c.scaling);
  }
  for (const auto& c : unprot) {
    unames.push_back(c.name);
    scaling.push_back(c.scaling);
  }

  Dataset data(to_matrix(prot), to_matrix(unprot), std::move(labels), std::move(pnames),
               std::move(unames), std::move(scaling), keep);
  if (config.balance) return balance_labels(data, config.balance_seed);
  return data;
}

inline Dataset load_csv(const std::string& path, const PreprocessConfig& config,
                        std::vector<std::string>* warnings = nullptr) {
  return preprocess(read_csv(path), config, warnings);
}

// The fairness-gerrymandering toy population: one row per
// race x gender x label cell. race: blue = +1, green = -1;
// gender: man = +1, woman = -1. Both are protected. The single unprotected
// column `proxy` = race * gender lets a linear hypothesis over the joint
// features express the "blue man or green woman" classifier.
inline Dataset make_gerrymander_fixture() {
  Matrix prot(8, 2);
  Matrix unprot(8, 1);
  std::vector<int> y;
  Eigen::Index r = 0;
  for (double race : {1.0, -1.0}) {
    for (double gender : {1.0, -1.0}) {
      for (int label : {0, 1}) {
        prot(r, 0) = race;
        prot(r, 1) = gender;
        unprot(r, 0) = race * gender;
        y.push_back(label);
        ++r;
      }
    }
  }
  return Dataset(std::move(prot), std::move(unprot), std::move(y), {"race", "gender"},
                 {"proxy"},
                 {ColumnScaling::identity("race"), ColumnScaling::identity("gender"),
                  ColumnScaling::identity("proxy")});
}

// Labels 1 exactly the blue men and green women of the fixture.
inline LinearThreshold gerrymander_classifier() {
  return {Vector::Unit(3, 2), 0.0, Boundary::Open};
}

struct SyntheticSpec {
  std::size_t n = 200;
  std::uint64_t seed = 1;
  // Shift of the label's latent score along the first protected attribute.
  double protected_shift = 2.0;
  // Noise on the unprotected signal feature.
  double feature_noise = 1.5;
};

// Two protected attributes uniform on [-1, 1], two unprotected features
// (a noisy copy of the latent score and pure noise). The label leans on the
// first protected attribute, so an accuracy-only linear learner concentrates
// false positives where that attribute is high.
inline Dataset make_synthetic(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(spec.n);
  Matrix prot(n, 2);
  Matrix unprot(n, 2);
  std::vector<int> y(spec.n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = unif(rng);
    const double b = unif(rng);
    const double latent = gauss(rng);
    const double score = latent + spec.protected_shift * a;
    prot(i, 0) = a;
    prot(i, 1) = b;
    unprot(i, 0) = std::clamp((latent + spec.feature_noise * gauss(rng)) / 3.0, -1.0, 1.0);
    unprot(i, 1) = unif(rng);
    y[static_cast<std::size_t>(i)] = score > 0.0 ? 1 : 0;
  }
  return Dataset(std::move(prot), std::move(unprot), std::move(y), {"a", "b"},
                 {"signal", "noise"},
                 {ColumnScaling::identity("a"), ColumnScaling::identity("b"),
                  ColumnScaling::identity("signal"), ColumnScaling::identity("noise")});
}

// Writes the design back out as numeric CSV (protected, unprotected, label).
inline void write_dataset_csv(std::ostream& out, const Dataset& data,
                              const std::string& label_name = "label") {
  out.precision(17);
  bool first = true;
  for (const auto& n : data.protected_names()) {
    out << (first ? "" : ",") << n;
    first = false;
  }
  for (const auto& n : data.unprotected_names()) {
    out << (first ? "" : ",") << n;
    first = false;
  }
  out << (first ? "" : ",") << label_name << '\n';
  const Matrix& x = data.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << x(i, j) << ',';
    out << data.labels()[static_cast<std::size_t>(i)] << '\n';
  }
}

}  // namespace fairfict
