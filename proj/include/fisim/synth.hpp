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

#ifndef FISIM_SYNTH_HPP
#define FISIM_SYNTH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fisim/table.hpp"

namespace fisim {

// Differentially-private Bayesian-network synthesizer settings. The total
// budget epsilon splits into beta*epsilon for structure search and
// (1-beta)*epsilon for CPT noise. theta is the usefulness threshold limiting
// candidate parent sets to those whose contingency table keeps roughly theta
// times more signal than Laplace noise per cell (0 disables the filter).
struct PrivBayesConfig {
  double epsilon = 1.0;
  int k_parents = 3;
  double beta = 0.5;
  int n_bins = 10;
  double theta = 4.0;

  void validate() const;  // ConfigError on violations
};

// Budget halves, exposed for audit: structureBudget + parameterBudget must
// reproduce epsilon.
double structureBudget(const PrivBayesConfig& cfg);
double parameterBudget(const PrivBayesConfig& cfg);

// One node of the fitted network, in sampling order. column is the index in
// the original schema; parents are positions of earlier nodes; cpt rows run
// over parent configurations (mixed-radix, first parent most significant)
// and columns over the node's discretized levels. Continuous nodes carry
// their quantile upper edges and the column minimum for de-binning.
struct BayesNode {
  Eigen::Index column = 0;
  int levels = 0;
  std::vector<int> parents;
  Eigen::MatrixXd cpt;
  std::vector<double> bin_edges;  // continuous only
  double min_value = 0.0;         // continuous only
};

struct BayesNet {
  std::vector<ColumnSchema> schema;  // original column order of the fit table
  std::vector<BayesNode> nodes;      // topological (sampling) order
  double spent_epsilon = 0.0;

  // Structural and stochastic invariants (CPT rows simplex-valid, parents
  // acyclic, every column covered once). Throws InternalError.
  void check() const;
};

// Fits the network on all columns (the target is an ordinary node): greedy
// ordering by the exponential mechanism over (feature, parent set <=
// k_parents) candidates scored by plug-in mutual information on discretized
// data, Laplace-noised CPT counts (scale 2d/((1-beta) epsilon) per cell),
// clamp-negative-then-renormalize, uniform fallback for empty rows. The
// first node is a uniform draw and consumes no budget; beta*epsilon splits
// evenly over the remaining d-1 selections. Deterministic per seed. Throws
// SizeError below 10 rows.
BayesNet fitPrivBayes(const Table& table, const PrivBayesConfig& cfg, std::uint64_t seed);

// Ancestral sampling; continuous cells drawn uniformly inside the sampled
// bin's interval. n_rows = 0 yields an empty table with the fitted schema.
// Sampling is free of further privacy cost; deterministic per seed.
Table samplePrivBayes(const BayesNet& net, Eigen::Index n_rows, std::uint64_t seed);

// Plain-text audit serialization (schema, ordering, parent lists, CPT rows,
// bin edges, spent budget) with value round-trip precision.
void writeBayesNet(const BayesNet& net, const std::string& path);
BayesNet loadBayesNet(const std::string& path);

// Baseline 1: every column independently bootstrap-resampled, destroying
// inter-column structure while keeping marginal support. Schema, row count
// and metadata preserved.
Table resampleColumns(const Table& table, std::uint64_t seed);

// Baseline 2: round(fraction * rows) rows drawn without replacement, in
// source order. Fraction outside (0,1] is a ConfigError; an empty result a
// SizeError.
Table subsample(const Table& table, double fraction, std::uint64_t seed);

enum class SynthMethod { PrivBayes, ResampleColumns, Subsample };

std::string methodTag(SynthMethod method);  // privbayes / resample_columns / subsample
SynthMethod parseMethodTag(std::string_view tag);

// One synthesizer entry of an experiment: the method plus its settings.
// PrivBayes takes its per-run epsilon from the experiment grid.
struct SynthesizerSpec {
  SynthMethod method = SynthMethod::PrivBayes;
  PrivBayesConfig privbayes;
  double subsample_fraction = 1.0;
};

// Produces one synthetic table: PrivBayes fits at the given epsilon and
// samples real.rowCount() rows; the baselines ignore epsilon.
Table synthesize(const Table& real, const SynthesizerSpec& spec, double epsilon,
                 std::uint64_t seed);

}  // namespace fisim

#endif  // FISIM_SYNTH_HPP
