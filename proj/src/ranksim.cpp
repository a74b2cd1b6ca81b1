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

#include "fisim/ranksim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "fisim/error.hpp"
#include "fisim/seeding.hpp"

namespace fisim {

namespace {

void checkUniverse(const RankedList& S, const RankedList& T) {
  if (S.features.size() != T.features.size()) {
    throw SchemaError("ranked lists have different lengths: " + std::to_string(S.features.size()) + " vs " +
                      std::to_string(T.features.size()));
  }
  std::unordered_set<std::string> names(S.features.begin(), S.features.end());
  if (names.size() != S.features.size()) throw SchemaError("ranked list repeats a feature");
  for (const std::string& f : T.features) {
    if (!names.count(f)) throw SchemaError("ranked lists cover different features ('" + f + "')");
  }
}

int resolveDepth(const RankedList& S, const RboParams& params) {
  if (!(params.p > 0.0 && params.p < 1.0)) throw ConfigError("rbo weight p must lie in (0,1)");
  int k = params.k == 0 ? static_cast<int>(S.features.size()) : params.k;
  if (k < 1 || k > static_cast<int>(S.features.size())) {
    throw SizeError("rbo depth " + std::to_string(k) + " out of range for lists of length " +
                    std::to_string(S.features.size()));
  }
  return k;
}

// Prefix overlap sizes |top-d(S) ∩ top-d(T)| for d = 1..k in one O(k) sweep:
// when depth grows by one, the new S element may already sit in T's prefix
// and vice versa (a shared new element counts once).
std::vector<int> overlapCounts(const RankedList& S, const RankedList& T, int k) {
  std::unordered_set<std::string> in_s, in_t;
  std::vector<int> overlap(static_cast<std::size_t>(k));
  int count = 0;
  for (int d = 0; d < k; ++d) {
    const std::string& s = S.features[static_cast<std::size_t>(d)];
    const std::string& t = T.features[static_cast<std::size_t>(d)];
    if (s == t) {
      ++count;
    } else {
      if (in_t.count(s)) ++count;
      if (in_s.count(t)) ++count;
    }
    in_s.insert(s);
    in_t.insert(t);
    overlap[static_cast<std::size_t>(d)] = count;
  }
  return overlap;
}

// |Corr| gains between the top-k prefixes: gain(i,j) = |Corr(S_i, T_j)|.
Eigen::MatrixXd prefixGains(const RankedList& S, const RankedList& T, int k,
                            const AssociationMatrix& corr) {
  std::vector<Eigen::Index> si(static_cast<std::size_t>(k)), ti(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    si[static_cast<std::size_t>(i)] = corr.indexOf(S.features[static_cast<std::size_t>(i)]);
    ti[static_cast<std::size_t>(i)] = corr.indexOf(T.features[static_cast<std::size_t>(i)]);
  }
  Eigen::MatrixXd gain(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      gain(i, j) = std::abs(corr.values(si[static_cast<std::size_t>(i)], ti[static_cast<std::size_t>(j)]));
    }
  }
  return gain;
}

double bruteForceBestMean(const Eigen::MatrixXd& gain, int d) {
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  do {
    double total = 0.0;
    for (int i = 0; i < d; ++i) total += gain(i, perm[static_cast<std::size_t>(i)]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(d);
}

// Best mean gain over matchings of the d×d leading block, via the assignment
// solver on cost = 1 - gain.
double assignmentBestMean(const Eigen::MatrixXd& gain, int d) {
  Eigen::MatrixXd cost = Eigen::MatrixXd::Ones(d, d) - gain.topLeftCorner(d, d);
  return (static_cast<double>(d) - assignmentMinCost(cost)) / static_cast<double>(d);
}

// Geometric accumulation shared by all rbo variants. Normalization divides
// by the accumulated weight mass itself so a constant agreement of 1 yields
// exactly 1.0.
double geometricRbo(const std::vector<double>& agreements, const RboParams& params, int k) {
  double weight = 1.0 - params.p;
  double raw = 0.0, mass = 0.0;
  for (int d = 0; d < k; ++d) {
    raw += weight * agreements[static_cast<std::size_t>(d)];
    mass += weight;
    weight *= params.p;
  }
  return params.normalize ? raw / mass : raw;
}

}  // namespace

double agreement(const RankedList& S, const RankedList& T, int d) {
  checkUniverse(S, T);
  if (d < 1 || d > static_cast<int>(S.features.size())) {
    throw SizeError("agreement depth " + std::to_string(d) + " out of range");
  }
  std::vector<int> overlap = overlapCounts(S, T, d);
  return overlap[static_cast<std::size_t>(d - 1)] / static_cast<double>(d);
}

double rbo(const RankedList& S, const RankedList& T, RboParams params) {
  checkUniverse(S, T);
  int k = resolveDepth(S, params);
  std::vector<int> overlap = overlapCounts(S, T, k);
  std::vector<double> agreements(static_cast<std::size_t>(k));
  for (int d = 0; d < k; ++d) {
    agreements[static_cast<std::size_t>(d)] = overlap[static_cast<std::size_t>(d)] / static_cast<double>(d + 1);
  }
  return geometricRbo(agreements, params, k);
}

double correctedAgreementExact(const RankedList& S, const RankedList& T, int d,
                               const AssociationMatrix& corr) {
  checkUniverse(S, T);
  if (d < 1 || d > static_cast<int>(S.features.size())) {
    throw SizeError("corrected agreement depth " + std::to_string(d) + " out of range");
  }
  if (d > 8) {
    throw TractabilityError("factorial search is limited to depth 8; use the assignment form");
  }
  return bruteForceBestMean(prefixGains(S, T, d, corr), d);
}

double correctedAgreementAssignment(const RankedList& S, const RankedList& T, int d,
                                    const AssociationMatrix& corr) {
  checkUniverse(S, T);
  if (d < 1 || d > static_cast<int>(S.features.size())) {
    throw SizeError("corrected agreement depth " + std::to_string(d) + " out of range");
  }
  return assignmentBestMean(prefixGains(S, T, d, corr), d);
}

double rboCor(const RankedList& S, const RankedList& T, RboParams params,
              const AssociationMatrix& corr) {
  checkUniverse(S, T);
  int k = resolveDepth(S, params);
  Eigen::MatrixXd gain = prefixGains(S, T, k, corr);
  std::vector<double> agreements(static_cast<std::size_t>(k));
  for (int d = 1; d <= k; ++d) {
    agreements[static_cast<std::size_t>(d - 1)] = assignmentBestMean(gain, d);
  }
  return geometricRbo(agreements, params, k);
}

double rboPer(const RankedList& S, const RankedList& T, RboParams params,
              const AssociationMatrix& corr) {
  checkUniverse(S, T);
  int k = resolveDepth(S, params);
  Eigen::MatrixXd gain = prefixGains(S, T, k, corr);
  std::vector<double> agreements(static_cast<std::size_t>(k));
  for (int d = 1; d <= k; ++d) {
    // Factorial search up to depth 8; beyond that the assignment optimum is
    // provably the same value (the linear objective peaks at a permutation
    // vertex), so switch solvers rather than truncate.
    agreements[static_cast<std::size_t>(d - 1)] =
        d <= 8 ? bruteForceBestMean(gain, d) : assignmentBestMean(gain, d);
  }
  return geometricRbo(agreements, params, k);
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw SizeError("cosine vectors differ in length: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  if (a.size() == 0) throw SizeError("cosine of empty vectors");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw DegenerateError("cosine of a zero vector is undefined");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

RankedList permuteRankList(const RankedList& S, std::uint64_t seed) {
  RankedList out = S;
  std::mt19937_64 rng(deriveSeed(seed, hashString("permute-rank")));
  std::shuffle(out.features.begin(), out.features.end(), rng);
  return out;
}

double assignmentMinCost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n || n < 1) throw SizeError("assignment needs a non-empty square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  // Sequential row insertion with dual potentials (u, v); each insertion
  // runs a dense shortest-augmenting-path sweep over the columns. Column n
  // is the virtual start of every alternating path.
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(n) + 1, n);  // column -> row; n = free
  std::vector<int> way(static_cast<std::size_t>(n) + 1, n);
  for (int i = 0; i < n; ++i) {
    match[static_cast<std::size_t>(n)] = i;
    int j0 = n;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      int i0 = match[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = inf;
      for (int j = 0; j < n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        double cur = cost(i0, j) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          if (match[static_cast<std::size_t>(j)] != n) u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != n);
    // Unwind the alternating path recorded in `way`.
    while (j0 != n) {
      int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    }
  }
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += cost(match[static_cast<std::size_t>(j)], j);
  return total;
}

}  // namespace fisim
