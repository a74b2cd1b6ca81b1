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

#ifndef FISIM_BENCH_HPP
#define FISIM_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fisim/association.hpp"
#include "fisim/config.hpp"
#include "fisim/importance.hpp"
#include "fisim/ranksim.hpp"

namespace fisim {

// One evaluated (synthesizer, epsilon, repetition) cell of the sweep. Failed
// runs keep their identity fields and the error text; metric fields stay at
// their defaults and are excluded from summaries.
struct RunResult {
  std::string run_id;
  std::string dataset;
  std::string method;
  std::optional<double> epsilon;        // privbayes only: the grid value
  std::optional<double> spent_epsilon;  // privbayes only: reported by the fit
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  SimilarityReport similarity;           // original vs synthetic importances
  SimilarityReport similarity_permuted;  // vs randomly re-ranked synthetic scores
  double auc_original = 0.0;             // both AUCs on the real holdout
  double auc_synthetic = 0.0;
  ImportanceVector importance_original;
  ImportanceVector importance_synthetic;
};

// Mean / sample standard deviation of one metric over the successful runs of
// one (dataset, method, epsilon) group.
struct SummaryRow {
  std::string dataset;
  std::string method;
  std::optional<double> epsilon;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;  // n-1 denominator; 0 when n = 1
  int n = 0;
};

// All similarity values between two importance outputs: normalized and raw
// rank-biased overlap, both correlation-corrected variants (scored against
// the association matrix) and the cosine of the aligned score vectors.
SimilarityReport similarityReport(const ImportanceVector& original,
                                  const ImportanceVector& synthetic,
                                  const AssociationMatrix& assoc, RboParams params);

// Identity association over the given features: with it the corrected
// overlap variants coincide with the plain one.
AssociationMatrix identityAssociation(const std::vector<std::string>& features);

// Random reassignment of scores to features (deterministic per seed); the
// re-ranking noise floor against which methods are compared.
ImportanceVector permuteScores(const ImportanceVector& iv, std::uint64_t seed);

// Executes the full sweep: per (synthesizer, epsilon, outer j, inner l) fit,
// sample, engineer, split, train, score, compare. Results are positioned by
// enumeration order and byte-identical for any jobs >= 1. Per-run errors are
// captured in the result, never aborting the sweep.
std::vector<RunResult> runExperiment(const ExperimentConfig& cfg, int jobs = 1);

// Groups successful runs by (dataset, method, epsilon) in first-appearance
// order and emits one row per metric. Throws SizeError on empty input.
std::vector<SummaryRow> summarize(const std::vector<RunResult>& results);

// Writes the report artifacts into out_dir: runs/summary in the requested
// formats ("csv", "json"), per-feature importance profiles (csv, when the
// results carry importance vectors), and manifest.json with SHA-256 content
// hashes. Returns the written file names. Identical inputs produce identical
// bytes.
std::vector<std::string> emitReport(const std::vector<SummaryRow>& summaries,
                                    const std::vector<RunResult>& results,
                                    const std::string& out_dir,
                                    const std::vector<std::string>& formats);

// Reads a runs.csv written by emitReport back into results (importance
// vectors are not part of that file and come back empty).
std::vector<RunResult> loadRunsCsv(const std::string& path);

// Hex SHA-256 of a file's bytes (as listed in manifest.json).
std::string sha256File(const std::string& path);

}  // namespace fisim

#endif  // FISIM_BENCH_HPP
