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

#include "fisim/association.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fisim/error.hpp"

namespace fisim {

namespace {

void checkPair(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw SizeError("vector lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw SizeError("association needs at least 2 observations");
}

// Compacts arbitrary (integral) level values to 0..K-1 in value order.
std::vector<int> compactLevels(const Eigen::VectorXd& v, int* n_levels) {
  std::map<double, int> ids;
  for (Eigen::Index i = 0; i < v.size(); ++i) ids.emplace(v(i), 0);
  int next = 0;
  for (auto& [value, id] : ids) id = next++;
  std::vector<int> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = ids[v(i)];
  *n_levels = next;
  return out;
}

}  // namespace

Eigen::Index AssociationMatrix::indexOf(std::string_view name) const {
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    if (feature_names[j] == name) return static_cast<Eigen::Index>(j);
  }
  throw SchemaError("association matrix has no feature '" + std::string(name) + "'");
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  checkPair(x, y);
  const double n = static_cast<double>(x.size());
  Eigen::ArrayXd xc = x.array() - x.sum() / n;
  Eigen::ArrayXd yc = y.array() - y.sum() / n;
  double sxx = (xc * xc).sum();
  double syy = (yc * yc).sum();
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  double r = (xc * yc).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double cramersV(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  checkPair(x, y);
  int r = 0, c = 0;
  std::vector<int> xi = compactLevels(x, &r);
  std::vector<int> yi = compactLevels(y, &c);
  if (r < 2 || c < 2) return 0.0;
  const std::size_t n = xi.size();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(r, c);
  for (std::size_t i = 0; i < n; ++i) counts(xi[i], yi[i]) += 1.0;
  Eigen::VectorXd row = counts.rowwise().sum();
  Eigen::VectorXd col = counts.colwise().sum();
  double chi2 = 0.0;
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < c; ++b) {
      double expected = row(a) * col(b) / static_cast<double>(n);
      if (expected > 0.0) {
        double diff = counts(a, b) - expected;
        chi2 += diff * diff / expected;
      }
    }
  }
  double v = std::sqrt(chi2 / (static_cast<double>(n) * std::min(r - 1, c - 1)));
  return std::clamp(v, 0.0, 1.0);
}

double correlationRatio(const Eigen::VectorXd& cat, const Eigen::VectorXd& num) {
  checkPair(cat, num);
  int groups = 0;
  std::vector<int> gi = compactLevels(cat, &groups);
  const double n = static_cast<double>(num.size());
  const double mean = num.sum() / n;
  double ss_total = (num.array() - mean).square().sum();
  if (ss_total == 0.0) return 0.0;
  std::vector<double> sum(static_cast<std::size_t>(groups), 0.0);
  std::vector<double> count(static_cast<std::size_t>(groups), 0.0);
  for (Eigen::Index i = 0; i < num.size(); ++i) {
    sum[static_cast<std::size_t>(gi[static_cast<std::size_t>(i)])] += num(i);
    count[static_cast<std::size_t>(gi[static_cast<std::size_t>(i)])] += 1.0;
  }
  double ss_between = 0.0;
  for (int g = 0; g < groups; ++g) {
    double gm = sum[static_cast<std::size_t>(g)] / count[static_cast<std::size_t>(g)];
    ss_between += count[static_cast<std::size_t>(g)] * (gm - mean) * (gm - mean);
  }
  return std::clamp(std::sqrt(ss_between / ss_total), 0.0, 1.0);
}

AssociationMatrix associationMatrix(const Table& table) {
  std::vector<Eigen::Index> features = table.featureIndices();
  if (features.empty()) throw SchemaError("table has no feature columns");
  const auto d = static_cast<Eigen::Index>(features.size());
  AssociationMatrix m;
  m.values = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index a = 0; a < d; ++a) m.feature_names.push_back(table.column(features[static_cast<std::size_t>(a)]).name);
  for (Eigen::Index a = 0; a < d; ++a) {
    Eigen::Index ja = features[static_cast<std::size_t>(a)];
    bool cat_a = table.column(ja).kind == ColumnKind::Categorical;
    for (Eigen::Index b = a + 1; b < d; ++b) {
      Eigen::Index jb = features[static_cast<std::size_t>(b)];
      bool cat_b = table.column(jb).kind == ColumnKind::Categorical;
      double v;
      if (!cat_a && !cat_b) {
        v = pearson(table.values().col(ja), table.values().col(jb));
      } else if (cat_a && cat_b) {
        v = cramersV(table.values().col(ja), table.values().col(jb));
      } else if (cat_a) {
        v = correlationRatio(table.values().col(ja), table.values().col(jb));
      } else {
        v = correlationRatio(table.values().col(jb), table.values().col(ja));
      }
      m.values(a, b) = v;
      m.values(b, a) = v;
    }
  }
  return m;
}

double meanOffdiag(const AssociationMatrix& m) {
  const Eigen::Index d = m.values.rows();
  if (d < 2) throw SizeError("mean off-diagonal needs dimension >= 2");
  double total = 0.0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      if (a != b) total += std::abs(m.values(a, b));
    }
  }
  return total / static_cast<double>(d * (d - 1));
}

void writeAssociationCsv(const AssociationMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < m.feature_names.size(); ++j) {
    if (j) out << ',';
    out << m.feature_names[j];
  }
  out << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      if (j) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", m.values(i, j));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

AssociationMatrix loadAssociationCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IngestError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  AssociationMatrix m;
  {
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) m.feature_names.push_back(field);
  }
  const auto d = static_cast<Eigen::Index>(m.feature_names.size());
  if (d == 0) throw IngestError("'" + path + "' header names no features");
  m.values.resize(d, d);
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= d) throw IngestError("'" + path + "' has more rows than header features");
    std::stringstream cells(line);
    std::string cell;
    Eigen::Index col = 0;
    while (std::getline(cells, cell, ',')) {
      if (col >= d) throw IngestError("'" + path + "' row " + std::to_string(row + 1) + " has too many fields");
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || !std::isfinite(v)) {
        throw IngestError("'" + path + "' row " + std::to_string(row + 1) + ": bad value '" + cell + "'");
      }
      m.values(row, col++) = v;
    }
    if (col != d) throw IngestError("'" + path + "' row " + std::to_string(row + 1) + " has too few fields");
    ++row;
  }
  if (row != d) throw IngestError("'" + path + "' has " + std::to_string(row) + " rows for " + std::to_string(d) + " features");
  return m;
}

}  // namespace fisim
