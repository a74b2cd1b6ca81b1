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

#ifndef FISIM_FOREST_HPP
#define FISIM_FOREST_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fisim/table.hpp"

namespace fisim {

struct ForestConfig {
  int n_trees = 150;
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
  enum class FeatureRule { Sqrt, All };
  FeatureRule features_per_split = FeatureRule::Sqrt;
};

// One binary decision node. Internal nodes split on a feature: continuous
// goes left when value <= threshold, categorical goes left when the level
// index equals `level`. Leaves carry bootstrap class counts.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  bool categorical = false;
  double threshold = 0.0;
  int level = -1;
  int left = -1;
  int right = -1;
  double n_samples = 0.0;       // bootstrap rows that reached this node
  Eigen::VectorXd leaf_counts;  // leaves only
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

// What prediction needs to know about one training feature: its identity and
// which categorical levels the training data actually contained (values
// outside that set route to the heavier child at each split).
struct ForestFeature {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<char> seen_levels;  // categorical: indexed by level
};

class Forest {
 public:
  Forest(std::vector<Tree> trees, int n_classes, std::vector<ForestFeature> features,
         Eigen::VectorXd mdi_raw = {});

  const std::vector<Tree>& trees() const { return trees_; }
  int nClasses() const { return n_classes_; }
  int nFeatures() const { return static_cast<int>(features_.size()); }
  const std::vector<ForestFeature>& features() const { return features_; }

  // Per-feature accumulated (node fraction x Gini decrease) over all trees,
  // un-normalized; zero for hand-assembled forests.
  const Eigen::VectorXd& mdiRaw() const { return mdi_raw_; }

  // Class-probability prediction for a single value vector laid out in
  // training-feature order. No schema checks — the fast path under the
  // importance measures.
  Eigen::VectorXd predictRow(const Eigen::VectorXd& x) const;

 private:
  std::vector<Tree> trees_;
  int n_classes_;
  std::vector<ForestFeature> features_;
  Eigen::VectorXd mdi_raw_;
};

// Gini random forest: each tree fits a full-size bootstrap resample, split
// search scans a fresh random feature subset per node (ceil(sqrt(d)) under
// Sqrt), continuous thresholds at midpoints of adjacent distinct values,
// categorical splits one level against the rest. Deterministic per seed.
// Throws DegenerateError when the training target holds a single class.
Forest trainForest(const Table& train, const ForestConfig& cfg, std::uint64_t seed);

// Feature values of `rows` laid out in training-feature order (rows x
// nFeatures). Columns are matched by name; kind mismatches or missing
// features raise SchemaError.
Eigen::MatrixXd featureMatrix(const Forest& forest, const Table& rows);

// Probability matrix (rows x classes), averaging per-tree leaf frequencies.
// Column matching as in featureMatrix.
Eigen::MatrixXd predictProba(const Forest& forest, const Table& rows);

// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie), via midranks.
// Labels must contain both 0 and 1.
double aucBinary(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

// One-vs-one multiclass AUC: for each unordered pair of observed classes,
// restrict to their rows, score by prob(a)/(prob(a)+prob(b)) (0.5 when both
// vanish), average the two pair directions, then average over pairs.
double aucOvo(const Eigen::MatrixXd& probs, const Eigen::VectorXd& labels);

// Dispatches to aucBinary on the positive-class column for 2-class
// problems, aucOvo otherwise.
double aucScore(const Eigen::MatrixXd& probs, const Eigen::VectorXd& labels);

}  // namespace fisim

#endif  // FISIM_FOREST_HPP
