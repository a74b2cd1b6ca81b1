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

#ifndef FISIM_ASSOCIATION_HPP
#define FISIM_ASSOCIATION_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fisim/table.hpp"

namespace fisim {

// Symmetric pairwise association over a table's feature columns; diagonal is
// exactly 1. Numeric-numeric entries are signed Pearson correlations in
// [-1,1]; entries involving a categorical column live in [0,1].
struct AssociationMatrix {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd values;

  Eigen::Index indexOf(std::string_view name) const;  // throws SchemaError
};

// Sample Pearson correlation; 0 when either side has zero variance. Clamped
// to [-1,1] against floating-point overshoot.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Cramer's V = sqrt(chi^2 / (n * min(r-1, c-1))) over observed level pairs;
// 0 when either variable is constant.
double cramersV(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Correlation ratio eta = sqrt(between-group variance / total variance) of
// num grouped by cat; 0 when total variance is 0.
double correlationRatio(const Eigen::VectorXd& cat, const Eigen::VectorXd& num);

// Pairwise association over all non-target columns: pearson for
// numeric-numeric, cramersV for categorical-categorical, correlationRatio
// otherwise. Throws SchemaError if the table has no feature columns.
AssociationMatrix associationMatrix(const Table& table);

// Mean of absolute off-diagonal entries; SizeError below dimension 2.
double meanOffdiag(const AssociationMatrix& m);

void writeAssociationCsv(const AssociationMatrix& m, const std::string& path);
AssociationMatrix loadAssociationCsv(const std::string& path);

}  // namespace fisim

#endif  // FISIM_ASSOCIATION_HPP
