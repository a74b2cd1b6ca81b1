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

#include "fisim/table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fisim/error.hpp"
#include "fisim/seeding.hpp"

namespace fisim {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> splitLine(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string formatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void checkPlainText(const std::string& s, const char* what) {
  if (s.find_first_of(",\"\n\r") != std::string::npos) {
    throw IoError(std::string(what) + " '" + s + "' contains CSV delimiter characters");
  }
}

}  // namespace

Table::Table(std::vector<ColumnSchema> schema, Eigen::MatrixXd values,
             std::map<std::string, std::string> metadata)
    : schema_(std::move(schema)), values_(std::move(values)), metadata_(std::move(metadata)) {
  if (static_cast<Eigen::Index>(schema_.size()) != values_.cols()) {
    throw SchemaError("schema has " + std::to_string(schema_.size()) + " columns but values have " +
                      std::to_string(values_.cols()));
  }
  std::unordered_set<std::string> seen;
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    const ColumnSchema& c = schema_[j];
    if (c.name.empty()) throw SchemaError("column " + std::to_string(j) + " has an empty name");
    if (!seen.insert(c.name).second) throw SchemaError("duplicate column name '" + c.name + "'");
    if (c.is_target) {
      if (target_index_ >= 0) throw SchemaError("more than one target column");
      target_index_ = static_cast<Eigen::Index>(j);
    }
    if (c.kind == ColumnKind::Categorical) {
      if (c.levels < 1) throw SchemaError("column '" + c.name + "' declares " + std::to_string(c.levels) + " levels");
      if (!c.labels.empty() && static_cast<int>(c.labels.size()) != c.levels) {
        throw SchemaError("column '" + c.name + "' has " + std::to_string(c.labels.size()) +
                          " labels for " + std::to_string(c.levels) + " levels");
      }
    }
  }
  if (target_index_ < 0) throw SchemaError("no target column");
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    const ColumnSchema& c = schema_[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      double v = values_(i, j);
      if (!std::isfinite(v)) {
        throw SchemaError("non-finite value in column '" + c.name + "' row " + std::to_string(i));
      }
      if (c.kind == ColumnKind::Categorical) {
        if (v != std::floor(v) || v < 0 || v >= static_cast<double>(c.levels)) {
          throw SchemaError("level index " + formatDouble(v) + " out of range in column '" + c.name +
                            "' row " + std::to_string(i));
        }
      }
    }
  }
}

Eigen::Index Table::columnIndex(std::string_view name) const {
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    if (schema_[j].name == name) return static_cast<Eigen::Index>(j);
  }
  throw SchemaError("unknown column '" + std::string(name) + "'");
}

std::vector<Eigen::Index> Table::featureIndices() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < colCount(); ++j) {
    if (j != target_index_) out.push_back(j);
  }
  return out;
}

void ArtificialSpec::validate() const {
  if (n_rows < 1) throw ConfigError("artificial spec: n_rows must be positive");
  if (n_informative < 0 || n_redundant < 0 || n_noise < 0) {
    throw ConfigError("artificial spec: feature counts must be non-negative");
  }
  if (n_informative + n_redundant + n_noise < 1) {
    throw ConfigError("artificial spec: n_informative + n_redundant + n_noise must be >= 1");
  }
  if (n_redundant > 0 && n_informative < 1) {
    throw ConfigError("artificial spec: redundant features require n_informative >= 1");
  }
  if (categorical && n_levels < 2) throw ConfigError("artificial spec: n_levels must be >= 2");
  if (class_sep <= 0) throw ConfigError("artificial spec: class_sep must be positive");
  if (n_classes < 2) throw ConfigError("artificial spec: n_classes must be >= 2");
  if (n_informative >= 1 && n_informative < 63 &&
      static_cast<double>(n_classes) > std::ldexp(1.0, n_informative)) {
    throw ConfigError("artificial spec: n_classes exceeds the 2^n_informative cluster vertices");
  }
}

ArtificialSpec presetArtificial(std::string_view name) {
  ArtificialSpec s;
  s.n_rows = 10000;
  s.n_classes = 2;
  s.class_sep = 1.0;
  if (name == "artificial-1") {
    s.n_informative = 5;
    s.categorical = true;
    s.n_levels = 5;
  } else if (name == "artificial-2") {
    s.n_informative = 1;
    s.n_redundant = 4;
    s.categorical = true;
    s.n_levels = 5;
  } else if (name == "artificial-3") {
    s.n_informative = 15;
    s.categorical = true;
    s.n_levels = 5;
  } else if (name == "artificial-4") {
    s.n_informative = 15;
    s.categorical = false;
  } else if (name == "artificial-5") {
    s.n_informative = 3;
    s.categorical = true;
    s.n_levels = 5;
    s.profile = ImportanceProfile::Distinct;
  } else {
    throw ConfigError("unknown artificial preset '" + std::string(name) +
                      "' (expected artificial-1 .. artificial-5)");
  }
  return s;
}

Table generateArtificial(const ArtificialSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int n = spec.n_rows;
  const int d_inf = spec.n_informative;
  const int d_red = spec.n_redundant;
  const int d_noise = spec.n_noise;
  const int d = d_inf + d_red + d_noise;
  std::mt19937_64 rng(deriveSeed(seed, hashString("artificial")));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  // Balanced classes by construction; row order carries no information the
  // pipeline relies on (splits reshuffle).
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = static_cast<double>(i % spec.n_classes);

  // Class centroids on {-1,+1}^d_inf vertices: antipodal pair for two
  // classes, otherwise distinct vertices sampled from the seed stream.
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(spec.n_classes, std::max(d_inf, 1));
  if (d_inf >= 1) {
    if (spec.n_classes == 2) {
      centroids.row(0).setConstant(1.0);
      centroids.row(1).setConstant(-1.0);
    } else {
      std::unordered_set<std::uint64_t> used;
      for (int c = 0; c < spec.n_classes; ++c) {
        while (true) {
          std::uint64_t bits = rng() & ((d_inf >= 64) ? ~0ULL : ((1ULL << d_inf) - 1));
          if (!used.insert(bits).second) continue;
          for (int f = 0; f < d_inf; ++f) centroids(c, f) = (bits >> f & 1) ? 1.0 : -1.0;
          break;
        }
      }
    }
  }

  Eigen::MatrixXd features(n, std::max(d, 1));
  // Informative block: cluster mean + unit Gaussian noise. The Distinct
  // profile shrinks successive signal means geometrically (1, 1/3, 1/9, ...)
  // so importances separate cleanly; the Uniform profile keeps equal means
  // and then mixes the block by a random linear map so features carry
  // comparable but not identical signal.
  for (int f = 0; f < d_inf; ++f) {
    double w = (spec.profile == ImportanceProfile::Distinct) ? std::pow(3.0, -f) : 1.0;
    for (int i = 0; i < n; ++i) {
      int c = i % spec.n_classes;
      features(i, f) = centroids(c, f) * spec.class_sep * w + gauss(rng);
    }
  }
  if (spec.profile == ImportanceProfile::Uniform && d_inf >= 1) {
    Eigen::MatrixXd mix(d_inf, d_inf);
    for (int a = 0; a < d_inf; ++a)
      for (int b = 0; b < d_inf; ++b) mix(a, b) = unit(rng);
    features.leftCols(d_inf) = (features.leftCols(d_inf) * mix).eval();
  }
  // Redundant block: exact random linear combinations of the informative
  // block (no extra noise), matching the documented generator contract.
  if (d_red > 0) {
    Eigen::MatrixXd coeff(d_inf, d_red);
    for (int a = 0; a < d_inf; ++a)
      for (int b = 0; b < d_red; ++b) coeff(a, b) = unit(rng);
    features.middleCols(d_inf, d_red) = features.leftCols(d_inf) * coeff;
  }
  for (int f = d_inf + d_red; f < d; ++f) {
    for (int i = 0; i < n; ++i) features(i, f) = gauss(rng);
  }

  std::vector<ColumnSchema> schema;
  Eigen::MatrixXd values(n, d + 1);
  for (int f = 0; f < d; ++f) {
    ColumnSchema col;
    col.name = "x" + std::to_string(f);
    if (spec.categorical) {
      std::vector<double> raw(features.col(f).data(), features.col(f).data() + n);
      std::vector<double> edges = quantileEdges(raw, spec.n_levels);
      for (int i = 0; i < n; ++i) values(i, f) = binValue(edges, features(i, f));
      col.kind = ColumnKind::Categorical;
      col.levels = static_cast<int>(edges.size());
    } else {
      values.col(f) = features.col(f);
      col.kind = ColumnKind::Continuous;
    }
    schema.push_back(std::move(col));
  }
  ColumnSchema target;
  target.name = "y";
  target.kind = ColumnKind::Categorical;
  target.levels = spec.n_classes;
  target.is_target = true;
  schema.push_back(std::move(target));
  values.col(d) = y;
  return Table(std::move(schema), std::move(values));
}

Table selectRows(const Table& table, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), table.colCount());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= table.rowCount()) {
      throw SizeError("row index " + std::to_string(rows[i]) + " out of range");
    }
    values.row(static_cast<Eigen::Index>(i)) = table.values().row(rows[i]);
  }
  return Table(table.schema(), std::move(values), table.metadata());
}

SplitPair splitTable(const Table& table, double train_frac, std::uint64_t seed) {
  const Eigen::Index n = table.rowCount();
  if (n < 2) throw SizeError("split requires at least 2 rows, got " + std::to_string(n));
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw ConfigError("train_frac must lie in (0,1)");
  }
  auto n_train = static_cast<Eigen::Index>(std::llround(train_frac * static_cast<double>(n)));
  n_train = std::clamp<Eigen::Index>(n_train, 0, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(deriveSeed(seed, hashString("split")));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Eigen::Index> train(order.begin(), order.begin() + n_train);
  std::vector<Eigen::Index> validation(order.begin() + n_train, order.end());
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  return SplitPair{selectRows(table, train), selectRows(table, validation)};
}

std::vector<double> quantileEdges(std::vector<double> values, int n_bins) {
  if (values.empty()) throw SizeError("quantile edges need at least one value");
  if (n_bins < 1) throw ConfigError("n_bins must be >= 1");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> edges;
  for (int b = 0; b < n_bins; ++b) {
    // Upper edge of bin b: the last order statistic inside an exact
    // (b+1)/n_bins share of the sorted sample.
    std::size_t idx = (static_cast<std::size_t>(b) + 1) * n / static_cast<std::size_t>(n_bins);
    if (idx == 0) continue;
    double e = values[idx - 1];
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  if (edges.empty() || edges.back() < values.back()) edges.push_back(values.back());
  return edges;
}

int binValue(const std::vector<double>& edges, double v) {
  auto it = std::lower_bound(edges.begin(), edges.end(), v);
  if (it == edges.end()) return static_cast<int>(edges.size()) - 1;
  return static_cast<int>(it - edges.begin());
}

Table discretizeColumn(const Table& table, std::string_view name, int n_bins) {
  Eigen::Index j = table.columnIndex(name);
  const ColumnSchema& col = table.column(j);
  if (col.kind != ColumnKind::Continuous) {
    throw SchemaError("column '" + std::string(name) + "' is not continuous");
  }
  if (n_bins < 1) throw ConfigError("n_bins must be >= 1");
  std::vector<double> raw(table.values().col(j).data(), table.values().col(j).data() + table.rowCount());
  std::vector<double> edges = quantileEdges(raw, n_bins);
  Eigen::MatrixXd values = table.values();
  for (Eigen::Index i = 0; i < table.rowCount(); ++i) {
    values(i, j) = binValue(edges, values(i, j));
  }
  std::vector<ColumnSchema> schema = table.schema();
  ColumnSchema& ns = schema[static_cast<std::size_t>(j)];
  ns.kind = ColumnKind::Categorical;
  ns.levels = static_cast<int>(edges.size());
  ns.labels.clear();
  return Table(std::move(schema), std::move(values), table.metadata());
}

void writeCsv(const Table& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (Eigen::Index j = 0; j < table.colCount(); ++j) {
    checkPlainText(table.column(j).name, "column name");
    if (j) out << ',';
    out << table.column(j).name;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < table.rowCount(); ++i) {
    for (Eigen::Index j = 0; j < table.colCount(); ++j) {
      if (j) out << ',';
      const ColumnSchema& c = table.column(j);
      double v = table.values()(i, j);
      if (c.kind == ColumnKind::Categorical && !c.labels.empty()) {
        const std::string& label = c.labels[static_cast<std::size_t>(v)];
        checkPlainText(label, "categorical label");
        out << label;
      } else if (c.kind == ColumnKind::Categorical) {
        out << static_cast<long long>(v);
      } else {
        out << formatDouble(v);
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

void writeSchemaSidecar(const Table& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (Eigen::Index j = 0; j < table.colCount(); ++j) {
    const ColumnSchema& c = table.column(j);
    out << c.name << ", ";
    if (c.kind == ColumnKind::Continuous) {
      out << "continuous";
    } else {
      out << "categorical(" << c.levels << ")";
    }
    if (c.is_target) out << ", target";
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<ColumnSchema> loadSchemaSidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open schema file '" + path + "'");
  std::vector<ColumnSchema> schema;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::vector<std::string> parts = splitLine(stripped, ',');
    if (parts.size() < 2 || parts.size() > 3) {
      throw IngestError(path + ":" + std::to_string(lineno) + ": expected 'name, kind[, target]'");
    }
    ColumnSchema col;
    col.name = trim(parts[0]);
    std::string kind = trim(parts[1]);
    if (col.name.empty()) throw IngestError(path + ":" + std::to_string(lineno) + ": empty column name");
    if (kind == "continuous") {
      col.kind = ColumnKind::Continuous;
    } else if (kind.rfind("categorical(", 0) == 0 && kind.back() == ')') {
      col.kind = ColumnKind::Categorical;
      std::string digits = kind.substr(12, kind.size() - 13);
      int levels = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), levels);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || levels < 2) {
        throw IngestError(path + ":" + std::to_string(lineno) + ": categorical level count must be an integer >= 2");
      }
      col.levels = levels;
    } else {
      throw IngestError(path + ":" + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    }
    if (parts.size() == 3) {
      if (trim(parts[2]) != "target") {
        throw IngestError(path + ":" + std::to_string(lineno) + ": trailing token must be 'target'");
      }
      col.is_target = true;
    }
    schema.push_back(std::move(col));
  }
  if (schema.empty()) throw IngestError("schema file '" + path + "' declares no columns");
  return schema;
}

Table loadCsv(const std::string& path, const std::vector<ColumnSchema>& schema) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IngestError("'" + path + "' is empty (no header row)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = splitLine(line, ',');
  if (header.size() != schema.size()) {
    throw IngestError("'" + path + "' has " + std::to_string(header.size()) + " header fields, schema declares " +
                      std::to_string(schema.size()));
  }
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (trim(header[j]) != schema[j].name) {
      throw IngestError("'" + path + "' header field " + std::to_string(j + 1) + " is '" + trim(header[j]) +
                        "', expected '" + schema[j].name + "'");
    }
  }

  const std::size_t d = schema.size();
  std::vector<std::vector<double>> columns(d);
  std::vector<std::unordered_map<std::string, int>> level_of(d);
  std::vector<std::vector<std::string>> labels(d);
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::vector<std::string> cells = splitLine(line, ',');
    if (cells.size() != d) {
      throw IngestError("'" + path + "' row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                        " fields, expected " + std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      std::string cell = trim(cells[j]);
      std::string where = "'" + path + "' row " + std::to_string(row) + " column '" + schema[j].name + "'";
      if (schema[j].kind == ColumnKind::Continuous) {
        if (cell.empty()) throw IngestError(where + ": empty cell");
        char* end = nullptr;
        double v = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size()) throw IngestError(where + ": cannot parse '" + cell + "' as a real");
        if (!std::isfinite(v)) throw IngestError(where + ": non-finite value '" + cell + "'");
        columns[j].push_back(v);
      } else {
        if (cell.empty()) throw IngestError(where + ": empty cell");
        auto it = level_of[j].find(cell);
        int idx;
        if (it == level_of[j].end()) {
          idx = static_cast<int>(level_of[j].size());
          if (idx >= schema[j].levels) {
            throw IngestError(where + ": more than " + std::to_string(schema[j].levels) +
                              " distinct levels (new label '" + cell + "')");
          }
          level_of[j].emplace(cell, idx);
          labels[j].push_back(cell);
        } else {
          idx = it->second;
        }
        columns[j].push_back(static_cast<double>(idx));
      }
    }
  }

  Eigen::MatrixXd values(row, static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    for (int i = 0; i < row; ++i) values(i, static_cast<Eigen::Index>(j)) = columns[j][static_cast<std::size_t>(i)];
  }
  std::vector<ColumnSchema> full = schema;
  for (std::size_t j = 0; j < d; ++j) {
    if (full[j].kind != ColumnKind::Categorical) continue;
    // Keep the declared level count; pad label slots for levels the file
    // never exercised (they are unreachable by any stored index).
    while (static_cast<int>(labels[j].size()) < full[j].levels) {
      labels[j].push_back("__pad_" + std::to_string(labels[j].size()));
    }
    full[j].labels = labels[j];
  }
  return Table(std::move(full), std::move(values));
}

}  // namespace fisim
