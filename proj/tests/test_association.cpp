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

#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "fisim/error.hpp"

using namespace fisim;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("pearson correlation") {
  CHECK(pearson(vec({1, 2, 3}), vec({1, 2, 3})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(vec({1, 2, 3}), vec({3, 2, 1})) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pearson(vec({1, 2, 3, 4}), vec({1, 3, 2, 4})) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(pearson(vec({5, 5, 5}), vec({1, 2, 3})) == 0.0);  // zero variance
  CHECK_THROWS_AS(pearson(vec({1, 2}), vec({1, 2, 3})), SizeError);
  CHECK_THROWS_AS(pearson(vec({1}), vec({1})), SizeError);
}

TEST_CASE("cramers v") {
  SUBCASE("identical balanced binary variables") {
    Eigen::VectorXd x(8);
    x << 0, 1, 0, 1, 0, 1, 0, 1;
    CHECK(cramersV(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("diagonal 2x2 table") {
    Eigen::VectorXd x(100), y(100);
    for (int i = 0; i < 100; ++i) {
      x(i) = i < 50 ? 0 : 1;
      y(i) = i < 50 ? 0 : 1;
    }
    CHECK(cramersV(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("bijective relabeling still scores 1") {
    Eigen::VectorXd x(9), y(9);
    for (int i = 0; i < 9; ++i) {
      x(i) = i % 3;
      y(i) = 2 - i % 3;
    }
    CHECK(cramersV(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("independent uniform levels") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> lvl(0, 2);
    Eigen::VectorXd x(100000), y(100000);
    for (int i = 0; i < 100000; ++i) {
      x(i) = lvl(rng);
      y(i) = lvl(rng);
    }
    CHECK(cramersV(x, y) < 0.02);
  }
  SUBCASE("constant variable") {
    CHECK(cramersV(vec({1, 1, 1, 1}), vec({0, 1, 0, 1})) == 0.0);
  }
  CHECK_THROWS_AS(cramersV(vec({0, 1}), vec({0})), SizeError);
}

TEST_CASE("correlation ratio") {
  SUBCASE("numeric determined by category") {
    CHECK(correlationRatio(vec({0, 0, 1, 1}), vec({0, 0, 1, 1})) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("single group") {
    CHECK(correlationRatio(vec({2, 2, 2}), vec({1, 5, 9})) == 0.0);
  }
  SUBCASE("interleaved two-value groups") {
    // Groups {0,2} and {1,3}: group means 1 and 2, grand mean 1.5, so the
    // between-group sum of squares is 1 against a total of 5.
    double eta = correlationRatio(vec({0, 1, 0, 1}), vec({0, 1, 2, 3}));
    CHECK(eta == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));
  }
  SUBCASE("overlapping two-value groups") {
    // Groups {0,1} and {1,2}: between-group sum of squares 1 of a total 2.
    double eta = correlationRatio(vec({0, 0, 1, 1}), vec({0, 1, 1, 2}));
    CHECK(eta == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  }
  SUBCASE("zero total variance") {
    CHECK(correlationRatio(vec({0, 1, 0, 1}), vec({4, 4, 4, 4})) == 0.0);
  }
  CHECK_THROWS_AS(correlationRatio(vec({0}), vec({1})), SizeError);
}

TEST_CASE("association matrix construction") {
  SUBCASE("independent columns stay near zero") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> lvl(0, 2);
    int n = 20000;
    Eigen::MatrixXd v(n, 4);
    for (int i = 0; i < n; ++i) {
      v(i, 0) = gauss(rng);
      v(i, 1) = gauss(rng);
      v(i, 2) = lvl(rng);
      v(i, 3) = i % 2;
    }
    std::vector<ColumnSchema> schema(4);
    schema[0].name = "n1";
    schema[1].name = "n2";
    schema[2] = ColumnSchema{"c1", ColumnKind::Categorical, 3, false, false, {}};
    schema[3] = ColumnSchema{"y", ColumnKind::Categorical, 2, true, false, {}};
    AssociationMatrix m = associationMatrix(Table(schema, v));
    CHECK(m.feature_names == std::vector<std::string>{"n1", "n2", "c1"});
    CHECK(m.values.rows() == 3);
    for (int a = 0; a < 3; ++a) {
      CHECK(m.values(a, a) == 1.0);
      for (int b = 0; b < 3; ++b) {
        CHECK(m.values(a, b) == m.values(b, a));
        if (a != b) CHECK(std::abs(m.values(a, b)) < 0.05);
      }
    }
  }
  SUBCASE("redundant continuous features associate strongly") {
    ArtificialSpec spec = presetArtificial("artificial-2");
    spec.categorical = false;
    spec.n_rows = 4000;
    AssociationMatrix m = associationMatrix(generateArtificial(spec, 13));
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) {
        if (a != b) CHECK(std::abs(m.values(a, b)) > 0.9);
      }
    }
  }
  SUBCASE("table with only a target has no feature columns") {
    std::vector<ColumnSchema> schema(1);
    schema[0] = ColumnSchema{"y", ColumnKind::Categorical, 2, true, false, {}};
    Eigen::MatrixXd v(2, 1);
    v << 0, 1;
    CHECK_THROWS_AS(associationMatrix(Table(schema, v)), SchemaError);
  }
}

TEST_CASE("mean off-diagonal") {
  AssociationMatrix m;
  m.feature_names = {"a", "b", "c"};
  m.values = Eigen::MatrixXd::Identity(3, 3);
  CHECK(meanOffdiag(m) == 0.0);
  m.values.setOnes();
  CHECK(meanOffdiag(m) == 1.0);

  AssociationMatrix two;
  two.feature_names = {"a", "b"};
  two.values.resize(2, 2);
  two.values << 1, 0.325, 0.325, 1;
  CHECK(meanOffdiag(two) == doctest::Approx(0.325).epsilon(1e-12));

  AssociationMatrix one;
  one.feature_names = {"a"};
  one.values = Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(meanOffdiag(one), SizeError);
}

TEST_CASE("association csv round trip") {
  AssociationMatrix m;
  m.feature_names = {"a", "b"};
  m.values.resize(2, 2);
  m.values << 1, -0.25, -0.25, 1;
  std::string path = (std::filesystem::temp_directory_path() / "fisim_test_assoc.csv").string();
  writeAssociationCsv(m, path);
  AssociationMatrix r = loadAssociationCsv(path);
  CHECK(r.feature_names == m.feature_names);
  CHECK(r.values == m.values);
  CHECK(r.indexOf("b") == 1);
  CHECK_THROWS_AS(r.indexOf("zz"), SchemaError);
  std::filesystem::remove(path);
}
