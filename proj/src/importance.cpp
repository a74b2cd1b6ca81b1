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

#include "fisim/importance.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "fisim/error.hpp"
#include "fisim/seeding.hpp"
#include "fisim/textutil.hpp"

namespace fisim {

namespace {

constexpr int kMaxExactFeatures = 12;

std::vector<std::string> forestFeatureNames(const Forest& forest) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(forest.nFeatures()));
  for (const ForestFeature& feature : forest.features()) names.push_back(feature.name);
  return names;
}

Eigen::MatrixXd predictMatrix(const Forest& forest, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd probs(x.rows(), forest.nClasses());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    probs.row(i) = forest.predictRow(x.row(i).transpose());
  }
  return probs;
}

void checkVector(const ImportanceVector& iv) {
  if (static_cast<Eigen::Index>(iv.feature_names.size()) != iv.scores.size()) {
    throw SizeError("importance names and scores differ in length");
  }
  if (!iv.scores.allFinite()) throw SchemaError("importance scores must be finite");
}

}  // namespace

std::string measureName(ImportanceMeasure measure) {
  switch (measure) {
    case ImportanceMeasure::MDI:
      return "mdi";
    case ImportanceMeasure::PFI:
      return "pfi";
    case ImportanceMeasure::SHAP:
      return "shap";
  }
  throw InternalError("unhandled importance measure");
}

ImportanceMeasure parseMeasure(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mdi") return ImportanceMeasure::MDI;
  if (lower == "pfi") return ImportanceMeasure::PFI;
  if (lower == "shap") return ImportanceMeasure::SHAP;
  throw ConfigError("unknown importance measure '" + std::string(token) + "' (expected mdi, pfi or shap)");
}

ImportanceVector mdiImportance(const Forest& forest) {
  ImportanceVector iv;
  iv.measure = ImportanceMeasure::MDI;
  iv.feature_names = forestFeatureNames(forest);
  const double total = forest.mdiRaw().sum();
  if (total > 0.0) {
    iv.scores = forest.mdiRaw() / total;
  } else {
    // No split anywhere (all-leaf trees): no evidence to order features.
    iv.scores = Eigen::VectorXd::Constant(forest.nFeatures(), 1.0 / forest.nFeatures());
  }
  return iv;
}

ImportanceVector pfiImportance(const Forest& forest, const Table& validation, int n_repeats,
                               std::uint64_t seed) {
  if (n_repeats < 1) throw ConfigError("pfi needs n_repeats >= 1");
  Eigen::MatrixXd x = featureMatrix(forest, validation);
  if (x.rows() == 0) throw SizeError("pfi needs a non-empty validation table");
  Eigen::VectorXd labels = validation.col(validation.targetIndex());
  const double baseline = aucScore(predictMatrix(forest, x), labels);

  const int d = forest.nFeatures();
  const Eigen::Index n = x.rows();
  ImportanceVector iv;
  iv.measure = ImportanceMeasure::PFI;
  iv.feature_names = forestFeatureNames(forest);
  iv.scores = Eigen::VectorXd::Zero(d);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (int f = 0; f < d; ++f) {
    const Eigen::VectorXd original = x.col(f);
    double drop_sum = 0.0;
    for (int r = 0; r < n_repeats; ++r) {
      std::mt19937_64 rng(deriveSeed(seed, {hashString("pfi"), static_cast<std::uint64_t>(f),
                                            static_cast<std::uint64_t>(r)}));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (Eigen::Index i = 0; i < n; ++i) x(i, f) = original(perm[static_cast<std::size_t>(i)]);
      drop_sum += baseline - aucScore(predictMatrix(forest, x), labels);
    }
    x.col(f) = original;
    iv.scores(f) = drop_sum / n_repeats;
  }
  return iv;
}

int referenceClass(const Forest& forest) {
  if (forest.nClasses() == 2) return 1;
  Eigen::VectorXd totals = Eigen::VectorXd::Zero(forest.nClasses());
  for (const Tree& tree : forest.trees()) {
    for (const TreeNode& node : tree.nodes) {
      if (node.feature < 0) totals += node.leaf_counts;
    }
  }
  int best = 0;
  for (int c = 1; c < forest.nClasses(); ++c) {
    if (totals(c) > totals(best)) best = c;
  }
  return best;
}

Eigen::VectorXd shapleyExactFn(const std::function<double(const Eigen::VectorXd&)>& score,
                               const Eigen::VectorXd& instance, const Eigen::MatrixXd& background) {
  const int d = static_cast<int>(instance.size());
  if (d < 1) throw SizeError("instance needs at least one feature");
  if (d > kMaxExactFeatures) {
    throw TractabilityError("exact Shapley enumeration supports at most 12 features; use the Monte-Carlo estimator");
  }
  if (background.rows() == 0) throw SizeError("background must be non-empty");
  if (background.cols() != d) throw SizeError("background width must match the instance length");

  const std::uint32_t n_masks = 1u << d;
  Eigen::VectorXd values(n_masks);
  Eigen::VectorXd z(d);
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < background.rows(); ++b) {
      for (int f = 0; f < d; ++f) {
        z(f) = (mask >> f) & 1u ? instance(f) : background(b, f);
      }
      acc += score(z);
    }
    values(mask) = acc / static_cast<double>(background.rows());
  }

  // weight[s] = s!(d-1-s)!/d! — the probability that a uniformly random
  // ordering places a given feature immediately after a given s-subset.
  std::vector<double> factorial(static_cast<std::size_t>(d) + 1, 1.0);
  for (int i = 1; i <= d; ++i) factorial[static_cast<std::size_t>(i)] = factorial[static_cast<std::size_t>(i - 1)] * i;
  std::vector<double> weight(static_cast<std::size_t>(d), 0.0);
  for (int s = 0; s < d; ++s) {
    weight[static_cast<std::size_t>(s)] =
        factorial[static_cast<std::size_t>(s)] * factorial[static_cast<std::size_t>(d - 1 - s)] / factorial[static_cast<std::size_t>(d)];
  }

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    const double w = weight[static_cast<std::size_t>(std::popcount(mask))];
    for (int f = 0; f < d; ++f) {
      if ((mask >> f) & 1u) continue;
      phi(f) += w * (values(mask | (1u << f)) - values(mask));
    }
  }
  return phi;
}

Eigen::VectorXd shapleyExact(const Forest& forest, const Eigen::VectorXd& instance,
                             const Eigen::MatrixXd& background) {
  if (instance.size() != forest.nFeatures()) {
    throw SizeError("instance length must match the forest's feature count");
  }
  const int ref = referenceClass(forest);
  return shapleyExactFn([&](const Eigen::VectorXd& z) { return forest.predictRow(z)(ref); }, instance,
                        background);
}

ImportanceVector shapleyMc(const Forest& forest, const Table& validation, const Table& background,
                           int n_permutations, std::uint64_t seed) {
  if (n_permutations < 1) throw ConfigError("shapley sampling needs n_permutations >= 1");
  Eigen::MatrixXd xv = featureMatrix(forest, validation);
  Eigen::MatrixXd xb = featureMatrix(forest, background);
  if (xv.rows() == 0) throw SizeError("shapley sampling needs a non-empty validation table");
  if (xb.rows() == 0) throw SizeError("shapley sampling needs a non-empty background table");

  const int d = forest.nFeatures();
  const int ref = referenceClass(forest);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  std::vector<int> order(static_cast<std::size_t>(d));
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    std::mt19937_64 rng(deriveSeed(seed, {hashString("shap-mc"), static_cast<std::uint64_t>(i)}));
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
    for (int p = 0; p < n_permutations; ++p) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      const auto b = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(xb.rows()));
      z = xb.row(b).transpose();
      double prev = forest.predictRow(z)(ref);
      for (int f : order) {
        z(f) = xv(i, f);
        double cur = forest.predictRow(z)(ref);
        phi(f) += cur - prev;
        prev = cur;
      }
    }
    acc += (phi / static_cast<double>(n_permutations)).cwiseAbs();
  }

  ImportanceVector iv;
  iv.measure = ImportanceMeasure::SHAP;
  iv.feature_names = forestFeatureNames(forest);
  iv.scores = acc / static_cast<double>(xv.rows());
  return iv;
}

ImportanceVector shapImportance(const Forest& forest, const Table& train, const Table& validation,
                                int n_permutations, std::uint64_t seed) {
  Table background = subsampleRows(train, 100, deriveSeed(seed, hashString("shap-background")));
  Table instances = subsampleRows(validation, 200, deriveSeed(seed, hashString("shap-instances")));
  if (forest.nFeatures() > kMaxExactFeatures) {
    return shapleyMc(forest, instances, background, n_permutations, seed);
  }

  Eigen::MatrixXd xb = featureMatrix(forest, background);
  Eigen::MatrixXd xv = featureMatrix(forest, instances);
  if (xv.rows() == 0) throw SizeError("shap importance needs a non-empty validation table");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(forest.nFeatures());
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    acc += shapleyExact(forest, xv.row(i).transpose(), xb).cwiseAbs();
  }
  ImportanceVector iv;
  iv.measure = ImportanceMeasure::SHAP;
  iv.feature_names = forestFeatureNames(forest);
  iv.scores = acc / static_cast<double>(xv.rows());
  return iv;
}

RankedList rankFeatures(const ImportanceVector& iv) {
  checkVector(iv);
  std::vector<Eigen::Index> order(iv.feature_names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (iv.scores(a) != iv.scores(b)) return iv.scores(a) > iv.scores(b);
    return iv.feature_names[static_cast<std::size_t>(a)] < iv.feature_names[static_cast<std::size_t>(b)];
  });
  RankedList ranked;
  ranked.features.reserve(order.size());
  for (Eigen::Index j : order) ranked.features.push_back(iv.feature_names[static_cast<std::size_t>(j)]);
  return ranked;
}

Eigen::VectorXd alignScores(const ImportanceVector& reference, const ImportanceVector& other) {
  checkVector(reference);
  checkVector(other);
  if (reference.feature_names.size() != other.feature_names.size()) {
    throw SchemaError("importance vectors cover different feature counts");
  }
  Eigen::VectorXd aligned(reference.scores.size());
  for (std::size_t i = 0; i < reference.feature_names.size(); ++i) {
    auto it = std::find(other.feature_names.begin(), other.feature_names.end(), reference.feature_names[i]);
    if (it == other.feature_names.end()) {
      throw SchemaError("feature '" + reference.feature_names[i] + "' missing from the other importance vector");
    }
    aligned(static_cast<Eigen::Index>(i)) = other.scores(it - other.feature_names.begin());
  }
  return aligned;
}

Table subsampleRows(const Table& table, Eigen::Index max_rows, std::uint64_t seed) {
  if (max_rows < 1) throw ConfigError("subsample size must be >= 1");
  if (table.rowCount() <= max_rows) return table;
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(table.rowCount()));
  std::iota(indices.begin(), indices.end(), 0);
  std::mt19937_64 rng(deriveSeed(seed, hashString("subsample")));
  for (Eigen::Index j = 0; j < max_rows; ++j) {
    auto swap_with = j + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(table.rowCount() - j));
    std::swap(indices[static_cast<std::size_t>(j)], indices[static_cast<std::size_t>(swap_with)]);
  }
  indices.resize(static_cast<std::size_t>(max_rows));
  std::sort(indices.begin(), indices.end());
  return selectRows(table, indices);
}

void writeImportanceCsv(const std::string& path, const std::vector<ImportanceRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "run_id,measure,feature,score\n";
  for (const ImportanceRecord& record : records) {
    checkVector(record.vector);
    for (std::size_t i = 0; i < record.vector.feature_names.size(); ++i) {
      out << record.run_id << ',' << measureName(record.vector.measure) << ','
          << record.vector.feature_names[i] << ','
          << formatReal(record.vector.scores(static_cast<Eigen::Index>(i)), 12) << '\n';
    }
  }
  if (!out.good()) throw IoError("failed while writing '" + path + "'");
}

std::vector<ImportanceRecord> loadImportanceCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "run_id,measure,feature,score") {
    throw IngestError("'" + path + "' does not start with the importance header");
  }
  std::vector<ImportanceRecord> records;
  std::vector<double> scores;
  auto sealRecord = [&]() {
    if (records.empty()) return;
    ImportanceVector& iv = records.back().vector;
    iv.scores = Eigen::Map<const Eigen::VectorXd>(scores.data(), static_cast<Eigen::Index>(scores.size()));
    scores.clear();
  };
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::istringstream cells(line);
    std::string run_id, measure, feature, score_text;
    if (!std::getline(cells, run_id, ',') || !std::getline(cells, measure, ',') ||
        !std::getline(cells, feature, ',') || !std::getline(cells, score_text)) {
      throw IngestError(where + ": expected run_id,measure,feature,score");
    }
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(score_text, &used);
      if (used != score_text.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw IngestError(where + ": malformed score '" + score_text + "'");
    }
    if (records.empty() || records.back().run_id != run_id) {
      sealRecord();
      ImportanceRecord record;
      record.run_id = run_id;
      try {
        record.vector.measure = parseMeasure(measure);
      } catch (const ConfigError&) {
        throw IngestError(where + ": unknown measure '" + measure + "'");
      }
      records.push_back(std::move(record));
    } else if (measureName(records.back().vector.measure) != measure) {
      throw IngestError(where + ": measure changes within run '" + run_id + "'");
    }
    ImportanceVector& iv = records.back().vector;
    for (const std::string& existing : iv.feature_names) {
      if (existing == feature) {
        throw IngestError(where + ": feature '" + feature + "' repeated in run '" + run_id + "'");
      }
    }
    iv.feature_names.push_back(feature);
    scores.push_back(score);
  }
  sealRecord();
  return records;
}

}  // namespace fisim
