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

#ifndef FISIM_IMPORTANCE_HPP
#define FISIM_IMPORTANCE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fisim/forest.hpp"
#include "fisim/ranksim.hpp"
#include "fisim/table.hpp"

namespace fisim {

enum class ImportanceMeasure { MDI, PFI, SHAP };

// Lower-case token ("mdi"/"pfi"/"shap") used in configs and CSV output.
std::string measureName(ImportanceMeasure measure);
// Case-insensitive inverse of measureName; ConfigError on anything else.
ImportanceMeasure parseMeasure(std::string_view token);

// Per-feature importance scores, aligned with feature_names.
struct ImportanceVector {
  std::vector<std::string> feature_names;
  Eigen::VectorXd scores;
  ImportanceMeasure measure = ImportanceMeasure::MDI;
};

// Mean-decrease-in-impurity importance: the forest's accumulated raw Gini
// decreases normalized to sum 1 (uniform when no split ever fired).
// Training-data only; independent of any validation set.
ImportanceVector mdiImportance(const Forest& forest);

// Permutation importance: mean over n_repeats of (baseline AUC - AUC after
// shuffling feature f within the validation rows). Negative values possible;
// features untouched by every tree score exactly 0.
ImportanceVector pfiImportance(const Forest& forest, const Table& validation, int n_repeats,
                               std::uint64_t seed);

// Class whose predicted probability serves as the scalar model score:
// the positive class (1) for binary forests, otherwise the class with the
// largest accumulated leaf mass (ties to the smaller index).
int referenceClass(const Forest& forest);

// Interventional Shapley values for one instance by full enumeration of all
// 2^d coalitions against a generic score function. Coalition value = mean
// over background rows of score(instance on the coalition, background row
// elsewhere). Throws TractabilityError above 12 features.
Eigen::VectorXd shapleyExactFn(const std::function<double(const Eigen::VectorXd&)>& score,
                               const Eigen::VectorXd& instance, const Eigen::MatrixXd& background);

// shapleyExactFn with score = forest probability of the reference class.
// `instance` and `background` columns follow training-feature order (see
// featureMatrix).
Eigen::VectorXd shapleyExact(const Forest& forest, const Eigen::VectorXd& instance,
                             const Eigen::MatrixXd& background);

// Monte-Carlo Shapley: per instance, sample n_permutations feature orderings
// (one background row each) and average the incremental score changes.
// Global score per feature = mean |phi| over the validation rows.
ImportanceVector shapleyMc(const Forest& forest, const Table& validation, const Table& background,
                           int n_permutations, std::uint64_t seed);

// Pipeline entry point: subsamples the background (<=100 training rows) and
// the instances (<=200 validation rows) by seed, then aggregates exact
// per-instance values when the forest has at most 12 features and falls back
// to shapleyMc beyond that.
ImportanceVector shapImportance(const Forest& forest, const Table& train, const Table& validation,
                                int n_permutations, std::uint64_t seed);

// Descending by score; exact ties broken by ascending feature name.
RankedList rankFeatures(const ImportanceVector& iv);

// Scores of `other` reordered to match reference.feature_names; the two must
// hold identical name sets (SchemaError otherwise).
Eigen::VectorXd alignScores(const ImportanceVector& reference, const ImportanceVector& other);

// Uniform subsample without replacement of at most max_rows rows, keeping
// the original row order. Tables already small enough pass through intact.
Table subsampleRows(const Table& table, Eigen::Index max_rows, std::uint64_t seed);

struct ImportanceRecord {
  std::string run_id;
  ImportanceVector vector;
};

// CSV with header run_id,measure,feature,score (one row per feature).
void writeImportanceCsv(const std::string& path, const std::vector<ImportanceRecord>& records);

// Inverse of writeImportanceCsv: consecutive rows sharing a run_id form one
// record. Throws IngestError on malformed rows, repeated features within a
// record, or mixed measures within a record.
std::vector<ImportanceRecord> loadImportanceCsv(const std::string& path);

}  // namespace fisim

#endif  // FISIM_IMPORTANCE_HPP
