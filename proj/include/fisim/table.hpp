/*
 * Copyright 2026 The fisim Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FISIM_TABLE_HPP
#define FISIM_TABLE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fisim {

enum class ColumnKind { Continuous, Categorical };

// Schema entry for one column. Categorical cells store a level index in
// [0, levels); `labels` optionally carries the original string label per
// level (size 0 or exactly `levels`). `engineered` marks derived columns so
// feature generation never re-consumes its own output.
struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  int levels = 0;  // categorical only; ignored for continuous
  bool is_target = false;
  bool engineered = false;
  std::vector<std::string> labels;
};

// Immutable rectangular dataset: one schema entry per column of `values`.
// Continuous cells are finite reals; categorical cells are integral level
// indices. Exactly one column is the target. Construction validates all of
// this and throws SchemaError on violation.
class Table {
 public:
  Table(std::vector<ColumnSchema> schema, Eigen::MatrixXd values,
        std::map<std::string, std::string> metadata = {});

  const std::vector<ColumnSchema>& schema() const { return schema_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index rowCount() const { return values_.rows(); }
  Eigen::Index colCount() const { return values_.cols(); }

  const ColumnSchema& column(Eigen::Index j) const { return schema_.at(static_cast<std::size_t>(j)); }
  // Index of a column by name; throws SchemaError for unknown names.
  Eigen::Index columnIndex(std::string_view name) const;
  Eigen::VectorXd col(Eigen::Index j) const { return values_.col(j); }
  Eigen::VectorXd col(std::string_view name) const { return values_.col(columnIndex(name)); }

  Eigen::Index targetIndex() const { return target_index_; }
  // All non-target column indices, in schema order.
  std::vector<Eigen::Index> featureIndices() const;

  // Free-form annotations (e.g. division-by-zero counters from feature
  // generation). Not part of the validated invariants.
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

 private:
  std::vector<ColumnSchema> schema_;
  Eigen::MatrixXd values_;
  std::map<std::string, std::string> metadata_;
  Eigen::Index target_index_ = -1;
};

enum class ImportanceProfile { Uniform, Distinct };

// Recipe for the synthetic classification datasets: Gaussian class clusters
// centred on hypercube vertices (scaled by class_sep), optional exact linear
// combinations as redundant features, independent Gaussian noise features,
// and optional equal-frequency binning into n_levels categories.
struct ArtificialSpec {
  int n_rows = 10000;
  int n_informative = 5;
  int n_redundant = 0;
  int n_noise = 0;
  bool categorical = false;
  int n_levels = 5;
  double class_sep = 1.0;
  int n_classes = 2;
  ImportanceProfile profile = ImportanceProfile::Uniform;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

struct SplitPair {
  Table train;
  Table validation;
};

// Named presets artificial-1 .. artificial-5. Throws ConfigError for other
// names.
ArtificialSpec presetArtificial(std::string_view name);

// Deterministic per seed. Columns: informative, redundant, noise, then the
// binary/multiclass target "y" (balanced classes).
Table generateArtificial(const ArtificialSpec& spec, std::uint64_t seed);

// New table holding the given rows (in the given order); schema and metadata
// carried over.
Table selectRows(const Table& table, const std::vector<Eigen::Index>& rows);

// Uniformly random partition; train size = round(train_frac * rows). Row
// order within each part follows the source table. Throws SizeError when the
// table has fewer than 2 rows.
SplitPair splitTable(const Table& table, double train_frac, std::uint64_t seed);

// Equal-frequency bin upper edges (deduplicated, ascending, last = max).
std::vector<double> quantileEdges(std::vector<double> values, int n_bins);
// Index of the first edge >= v (values above the last edge map to the last
// bin).
int binValue(const std::vector<double>& edges, double v);

// Replaces one continuous column by its equal-frequency bin index as a
// Categorical(effective bins) column; everything else untouched.
Table discretizeColumn(const Table& table, std::string_view name, int n_bins);

// CSV: comma separated, one header row, '.' decimal separator, no quoting.
// Continuous cells print with round-trip precision; categorical cells print
// their label (or the level index when no labels are stored).
void writeCsv(const Table& table, const std::string& path);
// Sidecar: one line per column, "name, continuous" or "name, categorical(N)",
// with ", target" appended on the target column.
void writeSchemaSidecar(const Table& table, const std::string& path);
std::vector<ColumnSchema> loadSchemaSidecar(const std::string& path);
// Parses a CSV against a declared schema. Header must match schema names.
// Categorical strings are mapped to level indices in first-appearance order.
// Malformed cells raise IngestError with row/column location.
Table loadCsv(const std::string& path, const std::vector<ColumnSchema>& schema);

}  // namespace fisim

#endif  // FISIM_TABLE_HPP
