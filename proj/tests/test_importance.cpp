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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fisim/error.hpp"
#include "fisim/forest.hpp"
#include "fisim/importance.hpp"
#include "fisim/seeding.hpp"
#include "fisim/table.hpp"

namespace {

using namespace fisim;

Table twoFeatureTable(int n, double shift, bool second_constant, std::uint64_t seed) {
  std::vector<ColumnSchema> schema(3);
  schema[0].name = "x0";
  schema[1].name = "x1";
  schema[2] = {"y", ColumnKind::Categorical, 2, true, false, {}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd values(n, 3);
  for (int i = 0; i < n; ++i) {
    double label = i % 2 == 0 ? 0.0 : 1.0;
    values(i, 0) = gauss(rng) + shift * label;
    values(i, 1) = second_constant ? 0.0 : gauss(rng);
    values(i, 2) = label;
  }
  return Table(std::move(schema), std::move(values));
}

// Stump: class 1 exactly when the given feature exceeds 0.5.
Tree indicatorStump(int feature) {
  Tree tree;
  TreeNode root;
  root.feature = feature;
  root.threshold = 0.5;
  root.left = 1;
  root.right = 2;
  root.n_samples = 2.0;
  tree.nodes.push_back(root);
  TreeNode left;
  left.n_samples = 1.0;
  left.leaf_counts = Eigen::Vector2d(1.0, 0.0);
  tree.nodes.push_back(left);
  TreeNode right;
  right.n_samples = 1.0;
  right.leaf_counts = Eigen::Vector2d(0.0, 1.0);
  tree.nodes.push_back(right);
  return tree;
}

// Forest whose class-1 probability is (1{x0>0.5} + 1{x1>0.5}) / 2.
Forest twoIndicatorForest() {
  std::vector<ForestFeature> features(2);
  features[0].name = "x0";
  features[1].name = "x1";
  return Forest({indicatorStump(0), indicatorStump(1)}, 2, features);
}

Table rowsTable(const std::vector<std::vector<double>>& rows) {
  std::vector<ColumnSchema> schema(3);
  schema[0].name = "x0";
  schema[1].name = "x1";
  schema[2] = {"y", ColumnKind::Categorical, 2, true, false, {}};
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    values(static_cast<Eigen::Index>(i), 0) = rows[i][0];
    values(static_cast<Eigen::Index>(i), 1) = rows[i][1];
    values(static_cast<Eigen::Index>(i), 2) = rows[i][2];
  }
  return Table(std::move(schema), std::move(values));
}

}  // namespace

TEST_CASE("measure tokens round-trip") {
  CHECK(measureName(ImportanceMeasure::MDI) == "mdi");
  CHECK(measureName(ImportanceMeasure::PFI) == "pfi");
  CHECK(measureName(ImportanceMeasure::SHAP) == "shap");
  CHECK(parseMeasure("shap") == ImportanceMeasure::SHAP);
  CHECK(parseMeasure("MDI") == ImportanceMeasure::MDI);
  CHECK(parseMeasure("Pfi") == ImportanceMeasure::PFI);
  CHECK_THROWS_AS(parseMeasure("gini"), ConfigError);
}

TEST_CASE("mdi attributes all impurity decrease to the only split feature") {
  Table train = twoFeatureTable(200, 6.0, true, 3);
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.features_per_split = ForestConfig::FeatureRule::All;
  Forest forest = trainForest(train, cfg, 1);
  ImportanceVector iv = mdiImportance(forest);
  CHECK(iv.measure == ImportanceMeasure::MDI);
  CHECK(iv.feature_names == std::vector<std::string>({"x0", "x1"}));
  CHECK(iv.scores(0) == 1.0);
  CHECK(iv.scores(1) == 0.0);
}

TEST_CASE("mdi normalizes to one and falls back to uniform") {
  Table train = twoFeatureTable(300, 2.0, false, 9);
  ForestConfig cfg;
  cfg.n_trees = 8;
  Forest forest = trainForest(train, cfg, 5);
  ImportanceVector iv = mdiImportance(forest);
  CHECK(iv.scores.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(iv.scores.minCoeff() >= 0.0);

  Forest leaves = twoIndicatorForest();  // hand-built: no recorded decreases
  ImportanceVector uniform = mdiImportance(leaves);
  CHECK(uniform.scores(0) == 0.5);
  CHECK(uniform.scores(1) == 0.5);
}

TEST_CASE("mdi prefers signal over noise across seeds") {
  int wins = 0;
  for (std::uint64_t s = 0; s < 25; ++s) {
    Table train = twoFeatureTable(2000, 3.0, false, 100 + s);
    ForestConfig cfg;
    cfg.n_trees = 10;
    Forest forest = trainForest(train, cfg, 200 + s);
    ImportanceVector iv = mdiImportance(forest);
    if (iv.scores(0) > iv.scores(1)) ++wins;
  }
  CHECK(wins >= 24);
}

TEST_CASE("pfi scores an unused feature as exactly zero") {
  Table train = twoFeatureTable(200, 6.0, true, 3);
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.features_per_split = ForestConfig::FeatureRule::All;
  Forest forest = trainForest(train, cfg, 1);
  ImportanceVector iv = pfiImportance(forest, train, 3, 7);
  CHECK(iv.measure == ImportanceMeasure::PFI);
  CHECK(iv.scores(1) == 0.0);
  CHECK(iv.scores(0) > 0.3);
}

TEST_CASE("pfi is deterministic and averages over repeats") {
  Table train = twoFeatureTable(300, 2.0, false, 4);
  SplitPair parts = splitTable(train, 0.6, 11);
  ForestConfig cfg;
  cfg.n_trees = 10;
  Forest forest = trainForest(parts.train, cfg, 6);

  ImportanceVector a = pfiImportance(forest, parts.validation, 4, 21);
  ImportanceVector b = pfiImportance(forest, parts.validation, 4, 21);
  CHECK((a.scores - b.scores).cwiseAbs().maxCoeff() == 0.0);

  // More repeats tighten the estimate: the informative feature's score
  // varies less across seeds at 10 repeats than at 1.
  std::vector<double> once, many;
  for (std::uint64_t s = 0; s < 12; ++s) {
    once.push_back(pfiImportance(forest, parts.validation, 1, 1000 + s).scores(0));
    many.push_back(pfiImportance(forest, parts.validation, 10, 2000 + s).scores(0));
  }
  auto sampleStd = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  CHECK(sampleStd(many) <= sampleStd(once));
}

TEST_CASE("pfi rejects degenerate validation labels") {
  Table train = twoFeatureTable(100, 4.0, false, 2);
  ForestConfig cfg;
  cfg.n_trees = 5;
  Forest forest = trainForest(train, cfg, 3);
  Table single_class = rowsTable({{0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}});
  CHECK_THROWS_AS(pfiImportance(forest, single_class, 2, 1), DegenerateError);
  CHECK_THROWS_AS(pfiImportance(forest, train, 0, 1), ConfigError);
}

TEST_CASE("reference class is the positive class for binary forests") {
  CHECK(referenceClass(twoIndicatorForest()) == 1);
}

TEST_CASE("reference class is the heaviest class for multiclass forests") {
  std::vector<ColumnSchema> schema(2);
  schema[0].name = "x0";
  schema[1] = {"y", ColumnKind::Categorical, 3, true, false, {}};
  Eigen::MatrixXd values(100, 2);
  for (int i = 0; i < 100; ++i) {
    int label = i < 15 ? 0 : (i < 45 ? 1 : 2);
    values(i, 0) = static_cast<double>(label) + 0.1 * static_cast<double>(i % 7);
    values(i, 1) = static_cast<double>(label);
  }
  Table train(std::move(schema), std::move(values));
  ForestConfig cfg;
  cfg.n_trees = 10;
  Forest forest = trainForest(train, cfg, 5);
  CHECK(referenceClass(forest) == 2);
}

TEST_CASE("exact Shapley recovers additive attributions") {
  auto additive = [](const Eigen::VectorXd& z) { return z(0) + z(1); };
  Eigen::VectorXd instance(2);
  instance << 1.0, 2.0;
  Eigen::MatrixXd background(2, 2);
  background << 1.0, -1.0, -1.0, 1.0;  // column means are zero
  Eigen::VectorXd phi = shapleyExactFn(additive, instance, background);
  CHECK(phi(0) == 1.0);
  CHECK(phi(1) == 2.0);
}

TEST_CASE("exact Shapley vanishes when instance equals the background") {
  Forest forest = twoIndicatorForest();
  Eigen::VectorXd instance(2);
  instance << 0.3, 0.7;
  Eigen::MatrixXd background(1, 2);
  background << 0.3, 0.7;
  Eigen::VectorXd phi = shapleyExact(forest, instance, background);
  CHECK(phi(0) == 0.0);
  CHECK(phi(1) == 0.0);
}

TEST_CASE("exact Shapley splits symmetric structure evenly") {
  Forest forest = twoIndicatorForest();
  Eigen::VectorXd instance(2);
  instance << 1.0, 1.0;
  Eigen::MatrixXd background(3, 2);
  background << 0.0, 0.0, 0.2, 0.1, -1.0, 0.4;
  Eigen::VectorXd phi = shapleyExact(forest, instance, background);
  CHECK(phi(0) == doctest::Approx(phi(1)).epsilon(1e-12));
  CHECK(phi.sum() == doctest::Approx(1.0 - 0.0).epsilon(1e-12));  // all background rows score 0
}

TEST_CASE("exact Shapley satisfies local accuracy on trained forests") {
  Table train = twoFeatureTable(200, 2.0, false, 8);
  ForestConfig cfg;
  cfg.n_trees = 10;
  Forest forest = trainForest(train, cfg, 13);
  Eigen::MatrixXd x = featureMatrix(forest, train);
  Eigen::MatrixXd background = x.topRows(10);
  int ref = referenceClass(forest);

  double mean_background = 0.0;
  for (Eigen::Index b = 0; b < background.rows(); ++b) {
    mean_background += forest.predictRow(background.row(b).transpose())(ref);
  }
  mean_background /= static_cast<double>(background.rows());

  for (Eigen::Index i = 50; i < 55; ++i) {
    Eigen::VectorXd instance = x.row(i).transpose();
    Eigen::VectorXd phi = shapleyExact(forest, instance, background);
    double expected = forest.predictRow(instance)(ref) - mean_background;
    CHECK(std::abs(phi.sum() - expected) < 1e-9);
  }
}

TEST_CASE("exact Shapley enforces its preconditions") {
  std::vector<ForestFeature> features(13);
  std::vector<Tree> trees;
  {
    Tree tree;
    TreeNode leaf;
    leaf.n_samples = 2.0;
    leaf.leaf_counts = Eigen::Vector2d(1.0, 1.0);
    tree.nodes.push_back(leaf);
    trees.push_back(tree);
  }
  for (int f = 0; f < 13; ++f) features[static_cast<std::size_t>(f)].name = "x" + std::to_string(f);
  Forest wide(trees, 2, features);

  Eigen::VectorXd instance = Eigen::VectorXd::Zero(13);
  Eigen::MatrixXd background = Eigen::MatrixXd::Zero(4, 13);
  CHECK_THROWS_AS(shapleyExact(wide, instance, background), TractabilityError);

  Forest narrow = twoIndicatorForest();
  Eigen::VectorXd two = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(shapleyExact(narrow, two, Eigen::MatrixXd(0, 2)), SizeError);
  CHECK_THROWS_AS(shapleyExact(narrow, two, Eigen::MatrixXd::Zero(3, 5)), SizeError);
  CHECK_THROWS_AS(shapleyExact(narrow, Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Zero(3, 4)), SizeError);
}

TEST_CASE("sampled Shapley matches the deterministic two-stump attribution") {
  Forest forest = twoIndicatorForest();
  Table validation = rowsTable({{1.0, 1.0, 1.0}});
  Table background = rowsTable({{0.0, 0.0, 0.0}});
  ImportanceVector iv = shapleyMc(forest, validation, background, 50, 17);
  // Every sampled ordering contributes exactly 0.5 to each feature.
  CHECK(iv.scores(0) == 0.5);
  CHECK(iv.scores(1) == 0.5);
  CHECK(iv.measure == ImportanceMeasure::SHAP);
}

TEST_CASE("sampled Shapley is zero under a constant model") {
  std::vector<ForestFeature> features(2);
  features[0].name = "x0";
  features[1].name = "x1";
  Tree tree;
  TreeNode leaf;
  leaf.n_samples = 4.0;
  leaf.leaf_counts = Eigen::Vector2d(2.0, 2.0);
  tree.nodes.push_back(leaf);
  Forest constant({tree}, 2, features);
  Table validation = rowsTable({{1.0, -1.0, 1.0}, {0.5, 2.0, 0.0}});
  Table background = rowsTable({{0.0, 0.0, 0.0}});
  ImportanceVector iv = shapleyMc(constant, validation, background, 20, 3);
  CHECK(iv.scores(0) == 0.0);
  CHECK(iv.scores(1) == 0.0);
}

TEST_CASE("sampled Shapley tracks the exact aggregate") {
  std::vector<ColumnSchema> schema(5);
  for (int f = 0; f < 4; ++f) schema[static_cast<std::size_t>(f)].name = "x" + std::to_string(f);
  schema[4] = {"y", ColumnKind::Categorical, 2, true, false, {}};
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd values(400, 5);
  for (int i = 0; i < 400; ++i) {
    double label = i % 2 == 0 ? 0.0 : 1.0;
    values(i, 0) = gauss(rng) + 2.0 * label;
    values(i, 1) = gauss(rng) + 1.0 * label;
    values(i, 2) = gauss(rng);
    values(i, 3) = gauss(rng);
    values(i, 4) = label;
  }
  Table train(std::move(schema), std::move(values));
  ForestConfig cfg;
  cfg.n_trees = 15;
  Forest forest = trainForest(train, cfg, 23);

  Table background = subsampleRows(train, 20, 5);
  Table validation = subsampleRows(train, 20, 6);
  ImportanceVector sampled = shapleyMc(forest, validation, background, 2000, 77);

  Eigen::MatrixXd xb = featureMatrix(forest, background);
  Eigen::MatrixXd xv = featureMatrix(forest, validation);
  Eigen::VectorXd exact = Eigen::VectorXd::Zero(4);
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    exact += shapleyExact(forest, xv.row(i).transpose(), xb).cwiseAbs();
  }
  exact /= static_cast<double>(xv.rows());
  CHECK((sampled.scores - exact).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("sampled Shapley honours local accuracy within sampling error") {
  Forest forest = twoIndicatorForest();
  Table validation = rowsTable({{1.0, 1.0, 1.0}});
  Table background = rowsTable({{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}});
  // Scores of the two background rows are 0 and 0.5; every increment along a
  // path from background to this instance is non-negative, so the summed
  // |phi| equals score(x) minus the sampled background mean.
  int n_permutations = 400;
  ImportanceVector iv = shapleyMc(forest, validation, background, n_permutations, 9);
  double expected = 1.0 - 0.25;
  double standard_error = 0.25 / std::sqrt(static_cast<double>(n_permutations));
  CHECK(std::abs(iv.scores.sum() - expected) <= 3.0 * standard_error);
}

TEST_CASE("sampled Shapley validates inputs") {
  Forest forest = twoIndicatorForest();
  Table some = rowsTable({{1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}});
  Table empty = selectRows(some, {});
  CHECK_THROWS_AS(shapleyMc(forest, some, some, 0, 1), ConfigError);
  CHECK_THROWS_AS(shapleyMc(forest, empty, some, 10, 1), SizeError);
  CHECK_THROWS_AS(shapleyMc(forest, some, empty, 10, 1), SizeError);
}

TEST_CASE("the pipeline aggregate uses exact values at low width") {
  Table data = twoFeatureTable(180, 5.0, false, 40);
  SplitPair parts = splitTable(data, 0.7, 12);
  ForestConfig cfg;
  cfg.n_trees = 10;
  Forest forest = trainForest(parts.train, cfg, 44);

  ImportanceVector a = shapImportance(forest, parts.train, parts.validation, 5, 91);
  ImportanceVector b = shapImportance(forest, parts.train, parts.validation, 9999, 91);
  // At two features the exact path runs, so the sampling budget is inert.
  CHECK((a.scores - b.scores).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.scores(0) > a.scores(1));
  CHECK(a.measure == ImportanceMeasure::SHAP);
}

TEST_CASE("ranking orders by score then name") {
  ImportanceVector iv;
  iv.feature_names = {"a", "b", "c"};
  iv.scores = Eigen::Vector3d(0.5, 0.3, 0.2);
  CHECK(rankFeatures(iv).features == std::vector<std::string>({"a", "b", "c"}));

  ImportanceVector tied;
  tied.feature_names = {"b", "a", "c"};
  tied.scores = Eigen::Vector3d(0.1, 0.1, 0.1);
  CHECK(rankFeatures(tied).features == std::vector<std::string>({"a", "b", "c"}));

  ImportanceVector swapped;
  swapped.feature_names = {"a", "b"};
  swapped.scores = Eigen::Vector2d(0.1, 0.9);
  CHECK(rankFeatures(swapped).features == std::vector<std::string>({"b", "a"}));
}

TEST_CASE("ranking rejects malformed vectors") {
  ImportanceVector short_scores;
  short_scores.feature_names = {"a", "b"};
  short_scores.scores = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(rankFeatures(short_scores), SizeError);

  ImportanceVector not_finite;
  not_finite.feature_names = {"a"};
  not_finite.scores = Eigen::VectorXd::Constant(1, std::nan(""));
  CHECK_THROWS_AS(rankFeatures(not_finite), SchemaError);
}

TEST_CASE("score alignment reorders by name") {
  ImportanceVector reference;
  reference.feature_names = {"a", "b", "c"};
  reference.scores = Eigen::Vector3d(1.0, 2.0, 3.0);
  ImportanceVector other;
  other.feature_names = {"c", "a", "b"};
  other.scores = Eigen::Vector3d(30.0, 10.0, 20.0);
  Eigen::VectorXd aligned = alignScores(reference, other);
  CHECK(aligned(0) == 10.0);
  CHECK(aligned(1) == 20.0);
  CHECK(aligned(2) == 30.0);

  ImportanceVector disjoint;
  disjoint.feature_names = {"a", "b", "z"};
  disjoint.scores = Eigen::Vector3d(1.0, 2.0, 3.0);
  CHECK_THROWS_AS(alignScores(reference, disjoint), SchemaError);
}

TEST_CASE("row subsampling bounds, preserves order, and stays deterministic") {
  std::vector<ColumnSchema> schema(2);
  schema[0].name = "x0";
  schema[1] = {"y", ColumnKind::Categorical, 2, true, false, {}};
  Eigen::MatrixXd values(10, 2);
  for (int i = 0; i < 10; ++i) {
    values(i, 0) = static_cast<double>(i);
    values(i, 1) = static_cast<double>(i % 2);
  }
  Table table(std::move(schema), std::move(values));

  Table same = subsampleRows(table, 20, 1);
  CHECK(same.rowCount() == 10);
  CHECK((same.values() - table.values()).cwiseAbs().maxCoeff() == 0.0);

  Table cut = subsampleRows(table, 4, 1);
  CHECK(cut.rowCount() == 4);
  for (Eigen::Index i = 1; i < 4; ++i) CHECK(cut.values()(i, 0) > cut.values()(i - 1, 0));

  Table again = subsampleRows(table, 4, 1);
  CHECK((cut.values() - again.values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(subsampleRows(table, 0, 1), ConfigError);
}

TEST_CASE("importance CSV lists one row per feature") {
  ImportanceVector iv;
  iv.feature_names = {"x0", "x1"};
  iv.scores = Eigen::Vector2d(0.25, 0.75);
  iv.measure = ImportanceMeasure::SHAP;
  std::string path = "importance_test.csv";
  writeImportanceCsv(path, {{"run-1", iv}, {"run-2", iv}});

  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  std::remove(path.c_str());

  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "run_id,measure,feature,score");
  CHECK(lines[1] == "run-1,shap,x0,0.25");
  CHECK(lines[2] == "run-1,shap,x1,0.75");
  CHECK(lines[3] == "run-2,shap,x0,0.25");
  CHECK(lines[4] == "run-2,shap,x1,0.75");
}

TEST_CASE("importance CSV round-trips through the loader") {
  ImportanceVector first;
  first.feature_names = {"age", "height", "weight"};
  first.scores = Eigen::Vector3d(0.5, -0.125, 0.625);
  first.measure = ImportanceMeasure::SHAP;
  ImportanceVector second;
  second.feature_names = {"height", "age"};
  second.scores = Eigen::Vector2d(0.9, 0.1);
  second.measure = ImportanceMeasure::MDI;
  std::string path = "importance_roundtrip.csv";
  writeImportanceCsv(path, {{"real/j=0", first}, {"syn64", second}});

  std::vector<ImportanceRecord> records = loadImportanceCsv(path);
  std::remove(path.c_str());
  REQUIRE(records.size() == 2);
  CHECK(records[0].run_id == "real/j=0");
  CHECK(records[0].vector.measure == ImportanceMeasure::SHAP);
  REQUIRE(records[0].vector.feature_names == first.feature_names);
  CHECK((records[0].vector.scores - first.scores).cwiseAbs().maxCoeff() == 0.0);
  CHECK(records[1].run_id == "syn64");
  CHECK(records[1].vector.measure == ImportanceMeasure::MDI);
  REQUIRE(records[1].vector.feature_names == second.feature_names);
  CHECK((records[1].vector.scores - second.scores).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("importance CSV loader rejects malformed input") {
  std::string path = "importance_bad.csv";
  auto writeLines = [&](const std::vector<std::string>& lines) {
    std::ofstream out(path);
    for (const std::string& line : lines) out << line << '\n';
  };

  writeLines({"run,measure,feature,score", "a,shap,x0,1"});
  CHECK_THROWS_AS(loadImportanceCsv(path), IngestError);

  writeLines({"run_id,measure,feature,score", "a,shap,x0"});
  CHECK_THROWS_AS(loadImportanceCsv(path), IngestError);

  writeLines({"run_id,measure,feature,score", "a,shap,x0,oops"});
  CHECK_THROWS_AS(loadImportanceCsv(path), IngestError);

  writeLines({"run_id,measure,feature,score", "a,shap,x0,1", "a,shap,x0,2"});
  CHECK_THROWS_AS(loadImportanceCsv(path), IngestError);

  writeLines({"run_id,measure,feature,score", "a,shap,x0,1", "a,mdi,x1,2"});
  CHECK_THROWS_AS(loadImportanceCsv(path), IngestError);

  writeLines({"run_id,measure,feature,score", "a,sorcery,x0,1"});
  CHECK_THROWS_AS(loadImportanceCsv(path), IngestError);

  std::remove(path.c_str());
  CHECK_THROWS_AS(loadImportanceCsv("no_such_importance.csv"), IoError);
}
