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

#ifndef FISIM_FEATGEN_HPP
#define FISIM_FEATGEN_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fisim/table.hpp"

namespace fisim {

enum class TransformPrimitive { Multiply, Add, Subtract, Divide, Percentile };
enum class AggregatePrimitive { Min, Max, Count, Mode, NumUnique, Std, Sum };

// Config tokens: multiply/add/subtract/divide/percentile and
// min/max/count/mode/num_unique/std/sum.
std::string transformName(TransformPrimitive primitive);
TransformPrimitive parseTransform(std::string_view token);
std::string aggregateName(AggregatePrimitive primitive);
AggregatePrimitive parseAggregate(std::string_view token);

struct Aggregation {
  std::string group_key;
  std::vector<AggregatePrimitive> primitives;
};

// Deterministic feature-engineering plan, applied identically to real and
// synthetic tables so both grow the same engineered column set.
struct FeatureRecipe {
  std::vector<TransformPrimitive> transform_primitives;
  std::optional<Aggregation> aggregation;

  // At least one primitive overall, no duplicates, aggregation (if present)
  // non-trivial. Throws ConfigError.
  void validate() const;
};

// Appends one column per unordered pair of original continuous features and
// binary primitive, named "a MULT b" / "a ADD b" / "a SUB b" / "a DIV b"
// (left operand = earlier schema column), plus "PERCENTILE(a)" columns
// holding midrank/n percentile ranks. Division by zero (or any non-finite
// quotient) yields 0; each DIV column records its forced-zero count under
// metadata key "zero_hits:<column>". Engineered columns are marked and never
// re-consumed, so re-running a recipe on its own output collides on names
// and is rejected (SchemaError). Selecting any transform on a table without
// continuous features is a ConfigError.
Table applyTransforms(const Table& table, const FeatureRecipe& recipe);

// Groups rows by the exact value of recipe.aggregation->group_key and
// broadcasts group statistics back to each member row: "COUNT BY g" (group
// size, once), "NUM_UNIQUE(f) BY g" (any feature kind), "MODE(f) BY g"
// (categorical features; ties to the smallest level; stays categorical),
// and "MIN/MAX/STD/SUM(f) BY g" (continuous features; population std, 0 for
// singleton groups). Only original non-target features other than the group
// key are aggregated; primitives without an applicable feature contribute
// nothing. Missing group key raises SchemaError.
Table applyAggregations(const Table& table, const FeatureRecipe& recipe);

// validate() + applyTransforms + applyAggregations.
Table applyRecipe(const Table& table, const FeatureRecipe& recipe);

}  // namespace fisim

#endif  // FISIM_FEATGEN_HPP
