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

#ifndef FISIM_CONFIG_HPP
#define FISIM_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fisim/featgen.hpp"
#include "fisim/forest.hpp"
#include "fisim/importance.hpp"
#include "fisim/ranksim.hpp"
#include "fisim/synth.hpp"
#include "fisim/table.hpp"

namespace fisim {

// Where the real table comes from: a generated artificial dataset or a CSV
// file with its schema sidecar ("<path>.schema").
struct DatasetSpec {
  enum class Kind { Artificial, Csv };
  Kind kind = Kind::Artificial;
  std::string tag;            // label used in run ids and reports
  ArtificialSpec artificial;  // Kind::Artificial only
  std::string csv_path;       // Kind::Csv only
};

// Full description of one experiment sweep. Everything the sweep produces is
// a pure function of this struct (master_seed included).
struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<SynthesizerSpec> synthesizers;
  std::vector<double> epsilon_grid = {1e-4, 1e-3, 1e-2, 1e-1, 0.4, 1.0, 4.0, 10.0};
  int repeats_outer = 25;  // outer repetitions m (fresh fit per repetition)
  int repeats_inner = 1;   // samples l drawn from each fitted model
  double train_frac = 0.7;
  ForestConfig forest;
  RboParams rbo_params;
  ImportanceMeasure importance_measure = ImportanceMeasure::SHAP;
  int shap_permutations = 100;  // sampled attribution only (wide tables)
  int pfi_repeats = 5;
  std::optional<FeatureRecipe> recipe;  // absent = engineering off
  std::uint64_t master_seed = 0;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

// Parses the sectioned key = value experiment format. Unknown sections or
// keys are ConfigErrors listing the accepted names; duplicated keys and
// sections are rejected. See configs/ for annotated examples.
ExperimentConfig loadExperimentConfig(const std::string& path);
ExperimentConfig parseExperimentConfig(std::istream& in, const std::string& origin);

// Materializes the real table: generates the artificial dataset (seeded from
// the experiment seed) or loads the CSV with its sidecar schema.
Table loadDataset(const DatasetSpec& spec, std::uint64_t seed);

}  // namespace fisim

#endif  // FISIM_CONFIG_HPP
