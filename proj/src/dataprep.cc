// Copyright 2026 The FairRank Authors.
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

#include "fairrank/dataprep.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fairrank/keyvalue.h"

namespace fairrank {
namespace {

std::pair<std::string, std::string> SplitPair(const std::string& item,
                                              const std::string& key) {
  const auto colon = item.find(':');
  if (colon == std::string::npos || colon == 0) {
    throw DataError("schema: " + key + " entry '" + item +
                    "' is not column:value");
  }
  return {Trim(item.substr(0, colon)), Trim(item.substr(colon + 1))};
}

}  // namespace

DatasetSchema DatasetSchema::Parse(const std::string& text) {
  DatasetSchema schema;
  KeyValueList entries;
  try {
    entries = ParseKeyValue(text);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  for (const auto& [key, value] : entries) {
    try {
      if (key == "version") {
        schema.version = static_cast<int>(ParseInt(value, key));
      } else if (key == "label") {
        schema.label = value;
      } else if (key == "positive_label") {
        schema.positive_label = value;
      } else if (key == "protected") {
        schema.protected_column = value;
      } else if (key == "protected_value") {
        schema.protected_value = value;
      } else if (key == "numeric") {
        schema.numeric = SplitList(value);
      } else if (key == "ordinal") {
        schema.ordinal = SplitList(value);
      } else if (key == "onehot") {
        schema.onehot = SplitList(value);
      } else if (key == "require") {
        schema.require = SplitList(value);
      } else if (key == "missing") {
        schema.missing_tokens = SplitList(value);
      } else if (key == "indicator") {
        for (const auto& item : SplitList(value)) {
          schema.indicator.push_back(SplitPair(item, key));
        }
      } else if (key == "exclude") {
        for (const auto& item : SplitList(value)) {
          schema.exclude.push_back(SplitPair(item, key));
        }
      } else if (key == "range") {
        for (const auto& item : SplitList(value)) {
          // The bounds may be negative, so split from the right.
          const auto last = item.rfind(':');
          const auto middle =
              last == std::string::npos ? last : item.rfind(':', last - 1);
          if (middle == std::string::npos || middle == 0) {
            throw DataError("schema: range entry '" + item +
                            "' is not column:lo:hi");
          }
          Range range;
          range.column = Trim(item.substr(0, middle));
          range.lo = ParseDouble(item.substr(middle + 1, last - middle - 1),
                                 "range lower bound");
          range.hi = ParseDouble(item.substr(last + 1), "range upper bound");
          schema.ranges.push_back(range);
        }
      } else if (key == "expected_features") {
        schema.expected_features = static_cast<int>(ParseInt(value, key));
      } else {
        throw DataError("schema: unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("schema: ") + e.what());
    }
  }
  if (schema.label.empty() || schema.positive_label.empty() ||
      schema.protected_column.empty() || schema.protected_value.empty()) {
    throw DataError(
        "schema: label, positive_label, protected and protected_value are "
        "required");
  }
  return schema;
}

DatasetSchema DatasetSchema::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError("schema file not found: " + path.string());
  }
  return Parse(ReadFile(path));
}

TabularDataset TabularDataset::Subset(
    const std::vector<int>& row_indices) const {
  TabularDataset out;
  const int n = static_cast<int>(row_indices.size());
  out.features.resize(n, features.cols());
  out.labels.resize(n);
  out.groups.resize(n);
  for (int i = 0; i < n; ++i) {
    const int r = row_indices[i];
    if (r < 0 || r >= rows()) {
      throw InvalidInputError("TabularDataset::Subset: row out of range");
    }
    out.features.row(i) = features.row(r);
    out.labels[i] = labels[r];
    out.groups[i] = groups[r];
  }
  out.feature_names = feature_names;
  out.source = source;
  return out;
}

std::vector<std::string> ParseCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
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
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(Trim(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(Trim(field));
  return fields;
}

TabularDataset LoadCsv(const std::filesystem::path& path,
                       const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty data file: " +
                                               path.string());
  const std::vector<std::string> header = ParseCsvLine(line);
  std::unordered_map<std::string, int> column_index;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    column_index.emplace(header[c], c);
  }
  auto column = [&](const std::string& name) {
    const auto it = column_index.find(name);
    if (it == column_index.end()) {
      throw DataError(path.string() + ": missing column '" + name + "'");
    }
    return it->second;
  };

  // Every column whose value must be present for a row to be kept.
  std::vector<int> used;
  auto use = [&](const std::string& name) { used.push_back(column(name)); };
  use(schema.label);
  use(schema.protected_column);
  for (const auto& c : schema.numeric) use(c);
  for (const auto& c : schema.ordinal) use(c);
  for (const auto& c : schema.onehot) use(c);
  for (const auto& [c, v] : schema.indicator) use(c);
  for (const auto& c : schema.require) use(c);
  for (const auto& r : schema.ranges) use(r.column);
  std::vector<std::pair<int, std::string>> excludes;
  for (const auto& [c, v] : schema.exclude) excludes.emplace_back(column(c), v);

  const std::set<std::string> missing(schema.missing_tokens.begin(),
                                      schema.missing_tokens.end());
  auto is_missing = [&](const std::string& s) {
    return s.empty() || missing.count(s) > 0;
  };

  std::vector<std::vector<std::string>> kept;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields = ParseCsvLine(line);
    if (fields.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_number) +
                      ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    bool keep = true;
    for (int c : used) {
      if (is_missing(fields[c])) {
        keep = false;
        break;
      }
    }
    for (const auto& [c, v] : excludes) {
      if (keep && fields[c] == v) keep = false;
    }
    for (const auto& r : schema.ranges) {
      if (!keep) break;
      const double x = ParseDouble(fields[column(r.column)], r.column);
      if (x < r.lo || x > r.hi) keep = false;
    }
    if (keep) kept.push_back(std::move(fields));
  }
  if (kept.empty()) {
    throw DataError(path.string() + ": no rows left after cleaning");
  }

  TabularDataset out;
  out.source = path.filename().string();
  const int n = static_cast<int>(kept.size());

  // Column-major build: one std::vector per encoded feature.
  std::vector<std::vector<double>> cols;
  auto add_feature = [&](std::string name) {
    out.feature_names.push_back(std::move(name));
    cols.emplace_back(n, 0.0);
    return &cols.back();
  };
  for (const auto& name : schema.numeric) {
    const int c = column(name);
    auto* col = add_feature(name);
    for (int i = 0; i < n; ++i) {
      try {
        (*col)[i] = ParseDouble(kept[i][c], name);
      } catch (const std::invalid_argument& e) {
        throw DataError(path.string() + ": " + e.what());
      }
    }
  }
  for (const auto& name : schema.ordinal) {
    const int c = column(name);
    std::map<std::string, int> codes;
    for (int i = 0; i < n; ++i) codes.emplace(kept[i][c], 0);
    int next = 0;
    for (auto& [value, code] : codes) code = next++;
    auto* col = add_feature(name);
    for (int i = 0; i < n; ++i) (*col)[i] = codes[kept[i][c]];
  }
  for (const auto& [name, value] : schema.indicator) {
    const int c = column(name);
    auto* col = add_feature(name + "=" + value);
    for (int i = 0; i < n; ++i) (*col)[i] = kept[i][c] == value ? 1.0 : 0.0;
  }
  for (const auto& name : schema.onehot) {
    const int c = column(name);
    std::set<std::string> values;
    for (int i = 0; i < n; ++i) values.insert(kept[i][c]);
    for (const auto& value : values) {
      auto* col = add_feature(name + "=" + value);
      for (int i = 0; i < n; ++i) (*col)[i] = kept[i][c] == value ? 1.0 : 0.0;
    }
  }

  const int l = static_cast<int>(cols.size());
  if (schema.expected_features >= 0 && l != schema.expected_features) {
    throw DataError(path.string() + ": schema yields " + std::to_string(l) +
                    " features, expected " +
                    std::to_string(schema.expected_features));
  }
  out.features.resize(n, l);
  for (int k = 0; k < l; ++k) {
    for (int i = 0; i < n; ++i) out.features(i, k) = cols[k][i];
  }
  out.labels.resize(n);
  out.groups.resize(n);
  const int label_col = column(schema.label);
  const int group_col = column(schema.protected_column);
  for (int i = 0; i < n; ++i) {
    out.labels[i] = kept[i][label_col] == schema.positive_label ? 1.0 : 0.0;
    out.groups[i] = kept[i][group_col] == schema.protected_value ? 1 : 0;
  }
  return out;
}

StandardScaler StandardScaler::Fit(const Matrix& features) {
  if (features.rows() == 0) {
    throw InvalidInputError("StandardScaler: cannot fit on zero rows");
  }
  StandardScaler scaler;
  scaler.mean_ = features.colwise().mean().transpose();
  const Matrix centered = features.rowwise() - scaler.mean_.transpose();
  scaler.stddev_ =
      (centered.colwise().squaredNorm() / static_cast<double>(features.rows()))
          .cwiseSqrt()
          .transpose();
  return scaler;
}

Matrix StandardScaler::Transform(const Matrix& features) const {
  if (features.cols() != mean_.size()) {
    throw InvalidInputError("StandardScaler: column count differs from fit");
  }
  Matrix out = features.rowwise() - mean_.transpose();
  for (int k = 0; k < out.cols(); ++k) {
    if (stddev_[k] > 0.0) {
      out.col(k) /= stddev_[k];
    } else {
      out.col(k).setZero();
    }
  }
  return out;
}

Matrix StandardScaler::InverseTransform(const Matrix& standardized) const {
  if (standardized.cols() != mean_.size()) {
    throw InvalidInputError("StandardScaler: column count differs from fit");
  }
  Matrix out = standardized;
  for (int k = 0; k < out.cols(); ++k) {
    if (stddev_[k] > 0.0) {
      out.col(k) = out.col(k) * stddev_[k];
    } else {
      out.col(k).setZero();
    }
  }
  return out.rowwise() + mean_.transpose();
}

TabularDataset StandardScaler::Transform(TabularDataset dataset) const {
  dataset.features = Transform(dataset.features);
  return dataset;
}

StandardizedSplits Standardize(const TabularDataset& train,
                               const std::vector<TabularDataset>& others) {
  StandardizedSplits out;
  out.scaler = StandardScaler::Fit(train.features);
  out.train = out.scaler.Transform(train);
  for (const auto& other : others) {
    out.others.push_back(out.scaler.Transform(other));
  }
  return out;
}

RankingTaskSet MakeRankingProblems(const TabularDataset& dataset,
                                   int n_queries, int items_per_query,
                                   double p_rel, uint64_t seed) {
  if (items_per_query < 2) {
    throw InvalidInputError("MakeRankingProblems: need at least two items");
  }
  if (n_queries < 1) {
    throw InvalidInputError("MakeRankingProblems: need at least one query");
  }
  if (!(p_rel >= 0.0 && p_rel <= 1.0)) {
    throw InvalidInputError("MakeRankingProblems: p_rel must lie in [0, 1]");
  }
  std::vector<int> pools[2];
  for (int i = 0; i < dataset.rows(); ++i) {
    pools[dataset.labels[i] == 1.0 ? 1 : 0].push_back(i);
  }
  if ((p_rel > 0.0 && pools[1].empty()) || (p_rel < 1.0 && pools[0].empty())) {
    throw InvalidInputError(
        "MakeRankingProblems: a label class has no rows to draw from");
  }

  RankingTaskSet out;
  out.source = dataset.source;
  out.seed = seed;
  out.items_per_query = items_per_query;
  out.relevance_probability = p_rel;
  out.problems.reserve(n_queries);
  const int l = static_cast<int>(dataset.features.cols());
  for (int q = 0; q < n_queries; ++q) {
    std::mt19937_64 rng(DeriveSeed(seed, static_cast<uint64_t>(q)));
    std::bernoulli_distribution relevant(p_rel);
    RankingProblem problem;
    problem.features.resize(items_per_query, l);
    problem.relevance.resize(items_per_query);
    problem.groups.resize(items_per_query);
    char id[32];
    std::snprintf(id, sizeof(id), "q%05d", q);
    problem.query_id = id;
    for (int j = 0; j < items_per_query; ++j) {
      const int label = relevant(rng) ? 1 : 0;
      const auto& pool = pools[label];
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      const int row = pool[pick(rng)];
      problem.features.row(j) = dataset.features.row(row);
      problem.relevance[j] = label;
      problem.groups[j] = dataset.groups[row];
    }
    out.problems.push_back(std::move(problem));
  }
  return out;
}

std::pair<TabularDataset, TabularDataset> Split(const TabularDataset& dataset,
                                                double test_fraction,
                                                uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidInputError("Split: test fraction must lie in (0, 1)");
  }
  const int n = dataset.rows();
  const int n_test = static_cast<int>(std::lround(test_fraction * n));
  if (n_test < 1 || n_test >= n) {
    throw InvalidInputError("Split: one side of the split would be empty");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> test(order.begin(), order.begin() + n_test);
  std::vector<int> train(order.begin() + n_test, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {dataset.Subset(train), dataset.Subset(test)};
}

namespace {

std::string QueryFileName(int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "query_%05d.tsv", index);
  return name;
}

std::string FormatDouble(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

}  // namespace

void WriteTaskSet(const RankingTaskSet& tasks,
                  const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  {
    std::ofstream manifest(directory / "manifest.txt");
    if (!manifest) {
      throw DataError("cannot write " + (directory / "manifest.txt").string());
    }
    manifest << "# relevance <TAB> group <TAB> features, one item per line\n";
    manifest << "format = 1\n";
    manifest << "source = " << tasks.source << "\n";
    manifest << "seed = " << tasks.seed << "\n";
    manifest << "items_per_query = " << tasks.items_per_query << "\n";
    manifest << "relevance_probability = "
             << FormatDouble(tasks.relevance_probability) << "\n";
    manifest << "queries = " << tasks.problems.size() << "\n";
    manifest << "features = "
             << (tasks.problems.empty() ? 0
                                        : tasks.problems[0].num_features())
             << "\n";
  }
  for (size_t q = 0; q < tasks.problems.size(); ++q) {
    const RankingProblem& p = tasks.problems[q];
    const auto file = directory / QueryFileName(static_cast<int>(q));
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << "# " << p.query_id << "\n";
    for (int j = 0; j < p.size(); ++j) {
      out << FormatDouble(p.relevance[j]) << '\t' << p.groups[j];
      for (int k = 0; k < p.num_features(); ++k) {
        out << '\t' << FormatDouble(p.features(j, k));
      }
      out << '\n';
    }
  }
}

RankingTaskSet ReadTaskSet(const std::filesystem::path& directory) {
  const auto manifest_path = directory / "manifest.txt";
  if (!std::filesystem::exists(manifest_path)) {
    throw DataError("task set manifest not found: " + manifest_path.string());
  }
  RankingTaskSet tasks;
  int n_queries = -1;
  int n_features = -1;
  try {
    for (const auto& [key, value] : ParseKeyValue(ReadFile(manifest_path))) {
      if (key == "source") {
        tasks.source = value;
      } else if (key == "seed") {
        tasks.seed = std::stoull(value);
      } else if (key == "items_per_query") {
        tasks.items_per_query = static_cast<int>(ParseInt(value, key));
      } else if (key == "relevance_probability") {
        tasks.relevance_probability = ParseDouble(value, key);
      } else if (key == "queries") {
        n_queries = static_cast<int>(ParseInt(value, key));
      } else if (key == "features") {
        n_features = static_cast<int>(ParseInt(value, key));
      }
    }
  } catch (const std::invalid_argument& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  if (n_queries < 0 || n_features < 0) {
    throw DataError(manifest_path.string() +
                    ": queries and features are required");
  }

  for (int q = 0; q < n_queries; ++q) {
    const auto file = directory / QueryFileName(q);
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    RankingProblem problem;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        problem.query_id = Trim(line.substr(1));
        continue;
      }
      const auto fields = SplitList(line, '\t');
      if (static_cast<int>(fields.size()) != n_features + 2) {
        throw DataError(file.string() + ": expected " +
                        std::to_string(n_features + 2) + " fields per row");
      }
      std::vector<double> row;
      try {
        for (const auto& f : fields) row.push_back(ParseDouble(f, "field"));
      } catch (const std::invalid_argument& e) {
        throw DataError(file.string() + ": " + e.what());
      }
      rows.push_back(std::move(row));
    }
    const int m = static_cast<int>(rows.size());
    problem.features.resize(m, n_features);
    problem.relevance.resize(m);
    problem.groups.resize(m);
    for (int j = 0; j < m; ++j) {
      problem.relevance[j] = rows[j][0];
      problem.groups[j] = static_cast<int>(rows[j][1]);
      for (int k = 0; k < n_features; ++k) {
        problem.features(j, k) = rows[j][k + 2];
      }
    }
    try {
      problem.Validate();
    } catch (const InvalidInputError& e) {
      throw DataError(file.string() + ": " + e.what());
    }
    tasks.problems.push_back(std::move(problem));
  }
  return tasks;
}

}  // namespace fairrank
