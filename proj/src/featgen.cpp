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

#include "fisim/featgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "fisim/error.hpp"

namespace fisim {

namespace {

// Accumulates appended columns and rebuilds a Table once at the end.
class ColumnAppender {
 public:
  explicit ColumnAppender(const Table& table)
      : table_(table), schema_(table.schema()), metadata_(table.metadata()) {
    for (const ColumnSchema& column : schema_) names_.insert(column.name);
  }

  void append(ColumnSchema schema, Eigen::VectorXd values) {
    if (!names_.insert(schema.name).second) {
      throw SchemaError("engineered column '" + schema.name + "' collides with an existing column");
    }
    schema.engineered = true;
    schema.is_target = false;
    schema_.push_back(std::move(schema));
    columns_.push_back(std::move(values));
  }

  void note(const std::string& key, const std::string& value) { metadata_[key] = value; }

  Table finish() {
    Eigen::MatrixXd values(table_.rowCount(), static_cast<Eigen::Index>(schema_.size()));
    values.leftCols(table_.colCount()) = table_.values();
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      values.col(table_.colCount() + static_cast<Eigen::Index>(j)) = columns_[j];
    }
    return Table(std::move(schema_), std::move(values), std::move(metadata_));
  }

 private:
  const Table& table_;
  std::vector<ColumnSchema> schema_;
  std::map<std::string, std::string> metadata_;
  std::set<std::string> names_;
  std::vector<Eigen::VectorXd> columns_;
};

// Original (non-engineered) feature columns of the requested kind.
std::vector<Eigen::Index> originalFeatures(const Table& table, ColumnKind kind) {
  std::vector<Eigen::Index> result;
  for (Eigen::Index j : table.featureIndices()) {
    const ColumnSchema& column = table.column(j);
    if (!column.engineered && column.kind == kind) result.push_back(j);
  }
  return result;
}

Eigen::VectorXd percentileRanks(const Eigen::VectorXd& values) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && values(order[static_cast<std::size_t>(j + 1)]) == values(order[static_cast<std::size_t>(i)])) ++j;
    double midrank = static_cast<double>(i + 1 + j + 1) / 2.0;
    for (Eigen::Index t = i; t <= j; ++t) ranks(order[static_cast<std::size_t>(t)]) = midrank / static_cast<double>(n);
    i = j + 1;
  }
  return ranks;
}

ColumnSchema continuousColumn(std::string name) {
  ColumnSchema schema;
  schema.name = std::move(name);
  schema.kind = ColumnKind::Continuous;
  return schema;
}

}  // namespace

std::string transformName(TransformPrimitive primitive) {
  switch (primitive) {
    case TransformPrimitive::Multiply:
      return "multiply";
    case TransformPrimitive::Add:
      return "add";
    case TransformPrimitive::Subtract:
      return "subtract";
    case TransformPrimitive::Divide:
      return "divide";
    case TransformPrimitive::Percentile:
      return "percentile";
  }
  throw InternalError("unhandled transform primitive");
}

TransformPrimitive parseTransform(std::string_view token) {
  if (token == "multiply") return TransformPrimitive::Multiply;
  if (token == "add") return TransformPrimitive::Add;
  if (token == "subtract") return TransformPrimitive::Subtract;
  if (token == "divide") return TransformPrimitive::Divide;
  if (token == "percentile") return TransformPrimitive::Percentile;
  throw ConfigError("unknown transform primitive '" + std::string(token) +
                    "' (expected multiply, add, subtract, divide or percentile)");
}

std::string aggregateName(AggregatePrimitive primitive) {
  switch (primitive) {
    case AggregatePrimitive::Min:
      return "min";
    case AggregatePrimitive::Max:
      return "max";
    case AggregatePrimitive::Count:
      return "count";
    case AggregatePrimitive::Mode:
      return "mode";
    case AggregatePrimitive::NumUnique:
      return "num_unique";
    case AggregatePrimitive::Std:
      return "std";
    case AggregatePrimitive::Sum:
      return "sum";
  }
  throw InternalError("unhandled aggregate primitive");
}

AggregatePrimitive parseAggregate(std::string_view token) {
  if (token == "min") return AggregatePrimitive::Min;
  if (token == "max") return AggregatePrimitive::Max;
  if (token == "count") return AggregatePrimitive::Count;
  if (token == "mode") return AggregatePrimitive::Mode;
  if (token == "num_unique") return AggregatePrimitive::NumUnique;
  if (token == "std") return AggregatePrimitive::Std;
  if (token == "sum") return AggregatePrimitive::Sum;
  throw ConfigError("unknown aggregation primitive '" + std::string(token) +
                    "' (expected min, max, count, mode, num_unique, std or sum)");
}

void FeatureRecipe::validate() const {
  std::size_t total = transform_primitives.size();
  std::set<TransformPrimitive> transforms(transform_primitives.begin(), transform_primitives.end());
  if (transforms.size() != transform_primitives.size()) {
    throw ConfigError("duplicate transform primitive in recipe");
  }
  if (aggregation) {
    if (aggregation->group_key.empty()) throw ConfigError("aggregation group key must be named");
    std::set<AggregatePrimitive> aggregates(aggregation->primitives.begin(), aggregation->primitives.end());
    if (aggregates.size() != aggregation->primitives.size()) {
      throw ConfigError("duplicate aggregation primitive in recipe");
    }
    if (aggregation->primitives.empty()) throw ConfigError("aggregation needs at least one primitive");
    total += aggregation->primitives.size();
  }
  if (total == 0) throw ConfigError("recipe selects no primitive");
}

Table applyTransforms(const Table& table, const FeatureRecipe& recipe) {
  if (recipe.transform_primitives.empty()) return table;
  std::vector<Eigen::Index> continuous = originalFeatures(table, ColumnKind::Continuous);
  if (continuous.empty()) {
    throw ConfigError("transform primitives need at least one continuous feature");
  }

  ColumnAppender out(table);
  for (TransformPrimitive primitive : recipe.transform_primitives) {
    if (primitive == TransformPrimitive::Percentile) {
      for (Eigen::Index j : continuous) {
        out.append(continuousColumn("PERCENTILE(" + table.column(j).name + ")"),
                   percentileRanks(table.col(j)));
      }
      continue;
    }
    for (std::size_t a = 0; a < continuous.size(); ++a) {
      for (std::size_t b = a + 1; b < continuous.size(); ++b) {
        const std::string& left = table.column(continuous[a]).name;
        const std::string& right = table.column(continuous[b]).name;
        Eigen::VectorXd x = table.col(continuous[a]);
        Eigen::VectorXd y = table.col(continuous[b]);
        switch (primitive) {
          case TransformPrimitive::Multiply:
            out.append(continuousColumn(left + " MULT " + right), x.cwiseProduct(y));
            break;
          case TransformPrimitive::Add:
            out.append(continuousColumn(left + " ADD " + right), x + y);
            break;
          case TransformPrimitive::Subtract:
            out.append(continuousColumn(left + " SUB " + right), x - y);
            break;
          case TransformPrimitive::Divide: {
            Eigen::VectorXd quotient(x.size());
            long zero_hits = 0;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              double q = y(i) == 0.0 ? std::numeric_limits<double>::infinity() : x(i) / y(i);
              if (!std::isfinite(q)) {
                q = 0.0;
                ++zero_hits;
              }
              quotient(i) = q;
            }
            std::string name = left + " DIV " + right;
            out.note("zero_hits:" + name, std::to_string(zero_hits));
            out.append(continuousColumn(std::move(name)), std::move(quotient));
            break;
          }
          case TransformPrimitive::Percentile:
            break;  // handled above
        }
      }
    }
  }
  return out.finish();
}

Table applyAggregations(const Table& table, const FeatureRecipe& recipe) {
  if (!recipe.aggregation) return table;
  const Aggregation& aggregation = *recipe.aggregation;
  const Eigen::Index key = table.columnIndex(aggregation.group_key);
  const std::string& key_name = table.column(key).name;

  // Row lists per distinct group-key value.
  std::map<double, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < table.rowCount(); ++i) {
    groups[table.values()(i, key)].push_back(i);
  }

  std::vector<Eigen::Index> members;
  for (Eigen::Index j : table.featureIndices()) {
    if (j != key && !table.column(j).engineered) members.push_back(j);
  }

  ColumnAppender out(table);
  auto broadcast = [&](const std::map<double, double>& stat) {
    Eigen::VectorXd column(table.rowCount());
    for (const auto& [value, rows] : groups) {
      for (Eigen::Index i : rows) column(i) = stat.at(value);
    }
    return column;
  };

  for (AggregatePrimitive primitive : aggregation.primitives) {
    if (primitive == AggregatePrimitive::Count) {
      std::map<double, double> stat;
      for (const auto& [value, rows] : groups) stat[value] = static_cast<double>(rows.size());
      out.append(continuousColumn("COUNT BY " + key_name), broadcast(stat));
      continue;
    }
    for (Eigen::Index j : members) {
      const ColumnSchema& column = table.column(j);
      std::map<double, double> stat;
      switch (primitive) {
        case AggregatePrimitive::NumUnique: {
          for (const auto& [value, rows] : groups) {
            std::set<double> distinct;
            for (Eigen::Index i : rows) distinct.insert(table.values()(i, j));
            stat[value] = static_cast<double>(distinct.size());
          }
          out.append(continuousColumn("NUM_UNIQUE(" + column.name + ") BY " + key_name), broadcast(stat));
          break;
        }
        case AggregatePrimitive::Mode: {
          if (column.kind != ColumnKind::Categorical) break;
          for (const auto& [value, rows] : groups) {
            std::vector<long> level_counts(static_cast<std::size_t>(column.levels), 0);
            for (Eigen::Index i : rows) ++level_counts[static_cast<std::size_t>(table.values()(i, j))];
            int best = 0;
            for (int lvl = 1; lvl < column.levels; ++lvl) {
              if (level_counts[static_cast<std::size_t>(lvl)] > level_counts[static_cast<std::size_t>(best)]) best = lvl;
            }
            stat[value] = static_cast<double>(best);
          }
          ColumnSchema mode_schema = column;  // keeps kind, levels and labels
          mode_schema.name = "MODE(" + column.name + ") BY " + key_name;
          out.append(std::move(mode_schema), broadcast(stat));
          break;
        }
        case AggregatePrimitive::Min:
        case AggregatePrimitive::Max:
        case AggregatePrimitive::Std:
        case AggregatePrimitive::Sum: {
          if (column.kind != ColumnKind::Continuous) break;
          for (const auto& [value, rows] : groups) {
            double acc = 0.0;
            if (primitive == AggregatePrimitive::Min || primitive == AggregatePrimitive::Max) {
              acc = table.values()(rows.front(), j);
              for (Eigen::Index i : rows) {
                double v = table.values()(i, j);
                acc = primitive == AggregatePrimitive::Min ? std::min(acc, v) : std::max(acc, v);
              }
            } else if (primitive == AggregatePrimitive::Sum) {
              for (Eigen::Index i : rows) acc += table.values()(i, j);
            } else {
              double mean = 0.0;
              for (Eigen::Index i : rows) mean += table.values()(i, j);
              mean /= static_cast<double>(rows.size());
              double ss = 0.0;
              for (Eigen::Index i : rows) {
                double delta = table.values()(i, j) - mean;
                ss += delta * delta;
              }
              acc = std::sqrt(ss / static_cast<double>(rows.size()));  // population std: singleton -> 0
            }
            stat[value] = acc;
          }
          std::string prefix = primitive == AggregatePrimitive::Min   ? "MIN"
                               : primitive == AggregatePrimitive::Max ? "MAX"
                               : primitive == AggregatePrimitive::Std ? "STD"
                                                                      : "SUM";
          out.append(continuousColumn(prefix + "(" + column.name + ") BY " + key_name), broadcast(stat));
          break;
        }
        case AggregatePrimitive::Count:
          break;  // handled above
      }
    }
  }
  return out.finish();
}

Table applyRecipe(const Table& table, const FeatureRecipe& recipe) {
  recipe.validate();
  return applyAggregations(applyTransforms(table, recipe), recipe);
}

}  // namespace fisim
