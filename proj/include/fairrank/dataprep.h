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

// Turning tabular classification data into learning-to-rank problems.
//
// A schema file is flat `key = value` text; `#` starts a comment and list
// values are comma separated:
//
//   version           schema revision, informational
//   label             label column
//   positive_label    value of `label` that makes an item relevant
//   protected         protected-attribute column
//   protected_value   value of `protected` mapped to group 1 (others: 0)
//   numeric           columns parsed as real numbers
//   ordinal           categorical columns coded 0..k-1 in sorted value order
//   onehot            categorical columns expanded to one 0/1 column per value
//   indicator         column:value pairs, 1 when the column equals the value
//   require           extra columns that must be present and non-missing
//   missing           tokens treated as missing (the empty field always is)
//   range             column:lo:hi, rows outside [lo, hi] are dropped
//   exclude           column:value, rows with that value are dropped
//   expected_features feature count after encoding; checked when given
//
// Rows with a missing value in any used column are dropped. The protected
// attribute never enters the feature matrix.

#ifndef FAIRRANK_DATAPREP_H_
#define FAIRRANK_DATAPREP_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairrank/core.h"

namespace fairrank {

// Missing files, malformed schemas, absent columns, empty results.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSchema {
  struct Range {
    std::string column;
    double lo = 0.0;
    double hi = 0.0;
  };

  int version = 1;
  std::string label;
  std::string positive_label;
  std::string protected_column;
  std::string protected_value;
  std::vector<std::string> numeric;
  std::vector<std::string> ordinal;
  std::vector<std::string> onehot;
  std::vector<std::pair<std::string, std::string>> indicator;
  std::vector<std::string> require;
  std::vector<std::string> missing_tokens;
  std::vector<Range> ranges;
  std::vector<std::pair<std::string, std::string>> exclude;
  int expected_features = -1;

  static DatasetSchema Parse(const std::string& text);
  static DatasetSchema Load(const std::filesystem::path& path);
};

struct TabularDataset {
  Matrix features;  // rows x encoded features.
  Vector labels;    // 0/1.
  std::vector<int> groups;
  std::vector<std::string> feature_names;
  std::string source;

  int rows() const { return static_cast<int>(features.rows()); }
  TabularDataset Subset(const std::vector<int>& row_indices) const;
};

// Parses one CSV record, honouring double quotes. Exposed for testing.
std::vector<std::string> ParseCsvLine(const std::string& line);

// Throws DataError on a missing file or column, a feature count that
// disagrees with the schema, or zero rows left after cleaning.
TabularDataset LoadCsv(const std::filesystem::path& path,
                       const DatasetSchema& schema);

// Z-scores with statistics of the data it was fitted on (population standard
// deviation). Zero-variance columns map to 0.
class StandardScaler {
 public:
  // Throws InvalidInputError on an empty matrix.
  static StandardScaler Fit(const Matrix& features);

  Matrix Transform(const Matrix& features) const;
  // Recovers the inputs of non-constant columns; constant columns come back
  // as their mean.
  Matrix InverseTransform(const Matrix& standardized) const;
  TabularDataset Transform(TabularDataset dataset) const;

  const Vector& mean() const { return mean_; }
  const Vector& stddev() const { return stddev_; }

 private:
  Vector mean_;
  Vector stddev_;
};

struct StandardizedSplits {
  TabularDataset train;
  std::vector<TabularDataset> others;
  StandardScaler scaler;
};

// Fits on `train` and applies the same transform to every other split.
StandardizedSplits Standardize(const TabularDataset& train,
                               const std::vector<TabularDataset>& others = {});

struct RankingTaskSet {
  std::vector<RankingProblem> problems;
  std::string source;
  uint64_t seed = 0;
  int items_per_query = 0;
  double relevance_probability = 0.0;
};

// Each of the M slots of a query is relevant with probability p_rel; its item
// is then drawn uniformly, with replacement, from the rows of that label.
// Query i uses its own stream derived from (seed, i). Throws
// InvalidInputError if a label pool is empty, M < 2 or n_queries < 1.
RankingTaskSet MakeRankingProblems(const TabularDataset& dataset,
                                   int n_queries, int items_per_query,
                                   double p_rel, uint64_t seed);

// Disjoint row split after a seeded shuffle; the test part has
// round(test_fraction * rows) rows. Throws InvalidInputError unless
// 0 < test_fraction < 1 and both parts are non-empty.
std::pair<TabularDataset, TabularDataset> Split(const TabularDataset& dataset,
                                                double test_fraction,
                                                uint64_t seed);

// Directory layout: manifest.txt (key = value) plus query_NNNNN.tsv per query,
// each row `relevance <TAB> group <TAB> feature...` with 17 significant
// digits so a read gives back the exact doubles.
void WriteTaskSet(const RankingTaskSet& tasks,
                  const std::filesystem::path& directory);
RankingTaskSet ReadTaskSet(const std::filesystem::path& directory);

}  // namespace fairrank

#endif  // FAIRRANK_DATAPREP_H_
