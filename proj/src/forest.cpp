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

#include "fisim/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "fisim/error.hpp"
#include "fisim/seeding.hpp"

namespace fisim {

namespace {

constexpr double kMinDecrease = 1e-12;

double gini(const std::vector<double>& counts, double n) {
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += c * c;
  return 1.0 - sum_sq / (n * n);
}

struct SplitChoice {
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
  int level = -1;
  double decrease = 0.0;
};

struct BuildItem {
  int node_id;
  int begin;
  int end;
  int depth;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const std::vector<int>& y,
              const std::vector<ColumnKind>& kinds, const std::vector<int>& levels, int n_classes,
              const ForestConfig& cfg, Eigen::VectorXd& mdi_raw)
      : x_(x), y_(y), kinds_(kinds), levels_(levels), n_classes_(n_classes), cfg_(cfg), mdi_raw_(mdi_raw) {}

  Tree build(std::mt19937_64& rng) {
    const int n = static_cast<int>(x_.rows());
    const int d = static_cast<int>(x_.cols());
    idx_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      idx_[static_cast<std::size_t>(i)] = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    }
    n_subset_ = (cfg_.features_per_split == ForestConfig::FeatureRule::All)
                    ? d
                    : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
    pool_.resize(static_cast<std::size_t>(d));

    Tree tree;
    tree.nodes.emplace_back();
    std::vector<BuildItem> stack{{0, 0, n, 0}};
    while (!stack.empty()) {
      BuildItem item = stack.back();
      stack.pop_back();
      processNode(tree, item, stack, rng);
    }
    return tree;
  }

 private:
  void processNode(Tree& tree, const BuildItem& item, std::vector<BuildItem>& stack,
                   std::mt19937_64& rng) {
    const int m = item.end - item.begin;
    std::vector<double> counts(static_cast<std::size_t>(n_classes_), 0.0);
    for (int i = item.begin; i < item.end; ++i) {
      counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(idx_[static_cast<std::size_t>(i)])])] += 1.0;
    }
    TreeNode& node = tree.nodes[static_cast<std::size_t>(item.node_id)];
    node.n_samples = static_cast<double>(m);

    bool pure = *std::max_element(counts.begin(), counts.end()) == static_cast<double>(m);
    bool depth_capped = cfg_.max_depth > 0 && item.depth >= cfg_.max_depth;
    SplitChoice best;
    if (!pure && !depth_capped && m >= 2 * cfg_.min_leaf) {
      best = bestSplit(item, counts, rng);
    }
    if (best.feature < 0 || best.decrease <= kMinDecrease) {
      node.leaf_counts = Eigen::Map<const Eigen::VectorXd>(counts.data(), n_classes_);
      return;
    }

    mdi_raw_(best.feature) += (static_cast<double>(m) / static_cast<double>(x_.rows())) * best.decrease;
    int mid = partitionRange(item.begin, item.end, best);
    node.feature = best.feature;
    node.categorical = best.categorical;
    node.threshold = best.threshold;
    node.level = best.level;
    int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    int right_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    // Re-fetch: emplace_back may have reallocated the node storage.
    tree.nodes[static_cast<std::size_t>(item.node_id)].left = left_id;
    tree.nodes[static_cast<std::size_t>(item.node_id)].right = right_id;
    stack.push_back({right_id, mid, item.end, item.depth + 1});
    stack.push_back({left_id, item.begin, mid, item.depth + 1});
  }

  SplitChoice bestSplit(const BuildItem& item, const std::vector<double>& counts,
                        std::mt19937_64& rng) {
    const int d = static_cast<int>(x_.cols());
    std::iota(pool_.begin(), pool_.end(), 0);
    for (int j = 0; j < n_subset_; ++j) {
      int swap_with = j + static_cast<int>(rng() % static_cast<std::uint64_t>(d - j));
      std::swap(pool_[static_cast<std::size_t>(j)], pool_[static_cast<std::size_t>(swap_with)]);
    }
    const double m = static_cast<double>(item.end - item.begin);
    const double parent_gini = gini(counts, m);
    SplitChoice best;
    for (int j = 0; j < n_subset_; ++j) {
      int f = pool_[static_cast<std::size_t>(j)];
      if (kinds_[static_cast<std::size_t>(f)] == ColumnKind::Continuous) {
        scanContinuous(item, f, counts, parent_gini, m, &best);
      } else {
        scanCategorical(item, f, counts, parent_gini, m, &best);
      }
    }
    return best;
  }

  void scanContinuous(const BuildItem& item, int f, const std::vector<double>& counts,
                      double parent_gini, double m, SplitChoice* best) {
    scratch_.clear();
    for (int i = item.begin; i < item.end; ++i) {
      int row = idx_[static_cast<std::size_t>(i)];
      scratch_.emplace_back(x_(row, f), y_[static_cast<std::size_t>(row)]);
    }
    std::sort(scratch_.begin(), scratch_.end());
    std::vector<double> left(static_cast<std::size_t>(n_classes_), 0.0);
    const int n = static_cast<int>(scratch_.size());
    for (int i = 0; i + 1 < n; ++i) {
      left[static_cast<std::size_t>(scratch_[static_cast<std::size_t>(i)].second)] += 1.0;
      if (scratch_[static_cast<std::size_t>(i)].first == scratch_[static_cast<std::size_t>(i + 1)].first) continue;
      double n_left = static_cast<double>(i + 1);
      double n_right = m - n_left;
      if (n_left < cfg_.min_leaf || n_right < cfg_.min_leaf) continue;
      double gini_left = gini(left, n_left);
      double right_sq = 0.0;
      for (int k = 0; k < n_classes_; ++k) {
        double c = counts[static_cast<std::size_t>(k)] - left[static_cast<std::size_t>(k)];
        right_sq += c * c;
      }
      double gini_right = 1.0 - right_sq / (n_right * n_right);
      double decrease = parent_gini - (n_left / m) * gini_left - (n_right / m) * gini_right;
      if (decrease > best->decrease) {
        best->decrease = decrease;
        best->feature = f;
        best->categorical = false;
        best->threshold = (scratch_[static_cast<std::size_t>(i)].first + scratch_[static_cast<std::size_t>(i + 1)].first) / 2.0;
        best->level = -1;
      }
    }
  }

  void scanCategorical(const BuildItem& item, int f, const std::vector<double>& counts,
                       double parent_gini, double m, SplitChoice* best) {
    const int n_levels = levels_[static_cast<std::size_t>(f)];
    level_counts_.assign(static_cast<std::size_t>(n_levels * n_classes_), 0.0);
    level_totals_.assign(static_cast<std::size_t>(n_levels), 0.0);
    for (int i = item.begin; i < item.end; ++i) {
      int row = idx_[static_cast<std::size_t>(i)];
      int lvl = static_cast<int>(x_(row, f));
      level_counts_[static_cast<std::size_t>(lvl * n_classes_ + y_[static_cast<std::size_t>(row)])] += 1.0;
      level_totals_[static_cast<std::size_t>(lvl)] += 1.0;
    }
    for (int lvl = 0; lvl < n_levels; ++lvl) {
      double n_left = level_totals_[static_cast<std::size_t>(lvl)];
      double n_right = m - n_left;
      if (n_left < cfg_.min_leaf || n_right < cfg_.min_leaf) continue;
      double left_sq = 0.0, right_sq = 0.0;
      for (int k = 0; k < n_classes_; ++k) {
        double cl = level_counts_[static_cast<std::size_t>(lvl * n_classes_ + k)];
        double cr = counts[static_cast<std::size_t>(k)] - cl;
        left_sq += cl * cl;
        right_sq += cr * cr;
      }
      double gini_left = 1.0 - left_sq / (n_left * n_left);
      double gini_right = 1.0 - right_sq / (n_right * n_right);
      double decrease = parent_gini - (n_left / m) * gini_left - (n_right / m) * gini_right;
      if (decrease > best->decrease) {
        best->decrease = decrease;
        best->feature = f;
        best->categorical = true;
        best->threshold = 0.0;
        best->level = lvl;
      }
    }
  }

  int partitionRange(int begin, int end, const SplitChoice& split) {
    auto goes_left = [&](int row) {
      double v = x_(row, split.feature);
      return split.categorical ? static_cast<int>(v) == split.level : v <= split.threshold;
    };
    auto mid = std::stable_partition(idx_.begin() + begin, idx_.begin() + end,
                                     [&](int row) { return goes_left(row); });
    return static_cast<int>(mid - idx_.begin());
  }

  const Eigen::MatrixXd& x_;
  const std::vector<int>& y_;
  const std::vector<ColumnKind>& kinds_;
  const std::vector<int>& levels_;
  const int n_classes_;
  const ForestConfig& cfg_;
  Eigen::VectorXd& mdi_raw_;
  std::vector<int> idx_;
  std::vector<int> pool_;
  int n_subset_ = 1;
  std::vector<std::pair<double, int>> scratch_;
  std::vector<double> level_counts_;
  std::vector<double> level_totals_;
};

}  // namespace

Forest::Forest(std::vector<Tree> trees, int n_classes, std::vector<ForestFeature> features,
               Eigen::VectorXd mdi_raw)
    : trees_(std::move(trees)), n_classes_(n_classes), features_(std::move(features)), mdi_raw_(std::move(mdi_raw)) {
  if (trees_.empty()) throw ConfigError("forest needs at least one tree");
  if (n_classes_ < 2) throw DegenerateError("forest needs at least two classes");
  if (mdi_raw_.size() == 0) mdi_raw_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(features_.size()));
  for (const Tree& tree : trees_) {
    if (tree.nodes.empty()) throw InternalError("tree without nodes");
    for (const TreeNode& node : tree.nodes) {
      if (node.feature >= static_cast<int>(features_.size())) throw InternalError("split feature out of range");
      if (node.feature < 0 && (node.leaf_counts.size() != n_classes_ || node.leaf_counts.sum() <= 0.0 ||
                               node.leaf_counts.minCoeff() < 0.0)) {
        throw InternalError("leaf without a valid count vector");
      }
    }
  }
}

Eigen::VectorXd Forest::predictRow(const Eigen::VectorXd& x) const {
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n_classes_);
  for (const Tree& tree : trees_) {
    const TreeNode* node = &tree.nodes[0];
    while (node->feature >= 0) {
      const ForestFeature& feature = features_[static_cast<std::size_t>(node->feature)];
      double v = x(node->feature);
      bool go_left;
      if (!node->categorical) {
        go_left = v <= node->threshold;
      } else {
        auto lvl = static_cast<long long>(v);
        bool seen = lvl >= 0 && lvl < static_cast<long long>(feature.seen_levels.size()) &&
                    feature.seen_levels[static_cast<std::size_t>(lvl)];
        if (seen) {
          go_left = static_cast<int>(lvl) == node->level;
        } else {
          // Training never saw this level; fall toward the heavier child.
          const TreeNode& l = tree.nodes[static_cast<std::size_t>(node->left)];
          const TreeNode& r = tree.nodes[static_cast<std::size_t>(node->right)];
          go_left = l.n_samples >= r.n_samples;
        }
      }
      node = &tree.nodes[static_cast<std::size_t>(go_left ? node->left : node->right)];
    }
    probs += node->leaf_counts / node->leaf_counts.sum();
  }
  return probs / static_cast<double>(trees_.size());
}

Forest trainForest(const Table& train, const ForestConfig& cfg, std::uint64_t seed) {
  if (cfg.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (cfg.min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
  if (train.rowCount() < 2) throw SizeError("forest training needs at least 2 rows");
  std::vector<Eigen::Index> feature_cols = train.featureIndices();
  if (feature_cols.empty()) throw SchemaError("forest training needs at least one feature");

  const Eigen::Index target = train.targetIndex();
  const ColumnSchema& target_schema = train.column(target);
  if (target_schema.kind != ColumnKind::Categorical) {
    throw SchemaError("target column '" + target_schema.name + "' must be categorical");
  }
  const int n = static_cast<int>(train.rowCount());
  const int d = static_cast<int>(feature_cols.size());
  std::vector<int> y(static_cast<std::size_t>(n));
  std::set<int> observed;
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(train.values()(i, target));
    observed.insert(y[static_cast<std::size_t>(i)]);
  }
  if (observed.size() < 2) throw DegenerateError("training target holds a single class");
  const int n_classes = target_schema.levels;

  Eigen::MatrixXd x(n, d);
  std::vector<ColumnKind> kinds(static_cast<std::size_t>(d));
  std::vector<int> levels(static_cast<std::size_t>(d), 0);
  std::vector<ForestFeature> features(static_cast<std::size_t>(d));
  for (int f = 0; f < d; ++f) {
    const ColumnSchema& schema = train.column(feature_cols[static_cast<std::size_t>(f)]);
    x.col(f) = train.values().col(feature_cols[static_cast<std::size_t>(f)]);
    kinds[static_cast<std::size_t>(f)] = schema.kind;
    features[static_cast<std::size_t>(f)].name = schema.name;
    features[static_cast<std::size_t>(f)].kind = schema.kind;
    if (schema.kind == ColumnKind::Categorical) {
      levels[static_cast<std::size_t>(f)] = schema.levels;
      features[static_cast<std::size_t>(f)].seen_levels.assign(static_cast<std::size_t>(schema.levels), 0);
      for (int i = 0; i < n; ++i) {
        features[static_cast<std::size_t>(f)].seen_levels[static_cast<std::size_t>(x(i, f))] = 1;
      }
    }
  }

  Eigen::VectorXd mdi_raw = Eigen::VectorXd::Zero(d);
  TreeBuilder builder(x, y, kinds, levels, n_classes, cfg, mdi_raw);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(cfg.n_trees));
  for (int t = 0; t < cfg.n_trees; ++t) {
    std::mt19937_64 rng(deriveSeed(seed, {hashString("tree"), static_cast<std::uint64_t>(t)}));
    trees.push_back(builder.build(rng));
  }
  return Forest(std::move(trees), n_classes, std::move(features), std::move(mdi_raw));
}

Eigen::MatrixXd featureMatrix(const Forest& forest, const Table& rows) {
  const int d = forest.nFeatures();
  Eigen::MatrixXd x(rows.rowCount(), d);
  for (int f = 0; f < d; ++f) {
    const ForestFeature& feature = forest.features()[static_cast<std::size_t>(f)];
    Eigen::Index j = rows.columnIndex(feature.name);  // SchemaError when absent
    if (rows.column(j).kind != feature.kind) {
      throw SchemaError("column '" + feature.name + "' changed kind between training and prediction");
    }
    x.col(f) = rows.values().col(j);
  }
  return x;
}

Eigen::MatrixXd predictProba(const Forest& forest, const Table& rows) {
  Eigen::MatrixXd x = featureMatrix(forest, rows);
  Eigen::MatrixXd probs(x.rows(), forest.nClasses());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    probs.row(i) = forest.predictRow(x.row(i).transpose());
  }
  return probs;
}

double aucBinary(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  if (scores.size() != labels.size()) throw SizeError("scores and labels differ in length");
  const auto n = static_cast<std::size_t>(scores.size());
  double n_pos = 0.0, n_neg = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels(i) == 1.0) {
      n_pos += 1.0;
    } else if (labels(i) == 0.0) {
      n_neg += 1.0;
    } else {
      throw ConfigError("binary labels must be 0 or 1");
    }
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw DegenerateError("both classes must be present for AUC");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return scores(a) < scores(b); });
  // Midranks: tied scores share the average of their rank block.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores(order[j + 1]) == scores(order[i])) ++j;
    double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (labels(order[t]) == 1.0) rank_sum_pos += midrank;
    }
    i = j + 1;
  }
  return (rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double aucOvo(const Eigen::MatrixXd& probs, const Eigen::VectorXd& labels) {
  if (probs.rows() != labels.size()) throw SizeError("probability rows and labels differ in length");
  std::set<int> observed;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    double v = labels(i);
    if (v != std::floor(v) || v < 0 || v >= static_cast<double>(probs.cols())) {
      throw SchemaError("label " + std::to_string(v) + " outside the probability columns");
    }
    observed.insert(static_cast<int>(v));
  }
  if (observed.size() < 2) throw DegenerateError("one-vs-one AUC needs at least two observed classes");

  std::vector<int> classes(observed.begin(), observed.end());
  double total = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      int ca = classes[a], cb = classes[b];
      std::vector<int> keep;
      for (Eigen::Index i = 0; i < labels.size(); ++i) {
        int v = static_cast<int>(labels(i));
        if (v == ca || v == cb) keep.push_back(static_cast<int>(i));
      }
      const auto m = static_cast<Eigen::Index>(keep.size());
      Eigen::VectorXd score_a(m), score_b(m), is_a(m), is_b(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        double pa = probs(keep[static_cast<std::size_t>(i)], ca);
        double pb = probs(keep[static_cast<std::size_t>(i)], cb);
        double mass = pa + pb;
        score_a(i) = mass > 0.0 ? pa / mass : 0.5;
        score_b(i) = mass > 0.0 ? pb / mass : 0.5;
        is_a(i) = static_cast<int>(labels(keep[static_cast<std::size_t>(i)])) == ca ? 1.0 : 0.0;
        is_b(i) = 1.0 - is_a(i);
      }
      total += (aucBinary(score_a, is_a) + aucBinary(score_b, is_b)) / 2.0;
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

double aucScore(const Eigen::MatrixXd& probs, const Eigen::VectorXd& labels) {
  if (probs.cols() == 2) return aucBinary(probs.col(1), labels);
  return aucOvo(probs, labels);
}

}  // namespace fisim
