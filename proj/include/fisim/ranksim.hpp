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

#ifndef FISIM_RANKSIM_HPP
#define FISIM_RANKSIM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fisim/association.hpp"

namespace fisim {

struct RboParams {
  double p = 0.8;     // geometric weight decay in (0,1)
  int k = 0;          // evaluation depth; 0 means full list length
  bool normalize = true;
};

// Features in descending importance order (ties already resolved upstream).
struct RankedList {
  std::vector<std::string> features;
};

// The similarity values computed per run between an original and a synthetic
// importance output.
struct SimilarityReport {
  double rbo = 0.0;      // normalized per params
  double rbo_raw = 0.0;  // un-normalized geometric sum
  double rbo_per = 0.0;  // permutation-corrected variant
  double rbo_cor = 0.0;  // assignment-relaxation variant
  double cosine = 0.0;
  RboParams params;
};

// |top-d(S) ∩ top-d(T)| / d. Throws SizeError when d is out of range and
// SchemaError when the lists rank different feature universes.
double agreement(const RankedList& S, const RankedList& T, int d);

// Rank-biased overlap: sum over depths of (1-p) p^(d-1) agreement(S,T,d),
// optionally normalized by the accumulated weight mass so identical lists
// score exactly 1.
double rbo(const RankedList& S, const RankedList& T, RboParams params);

// Best mean |Corr(S_i, T'_i)| over all d! reorderings T' of the top-d of T.
// Factorial search; depths above 8 throw TractabilityError (use the
// assignment form, which provably attains the same optimum).
double correctedAgreementExact(const RankedList& S, const RankedList& T, int d,
                               const AssociationMatrix& corr);

// Same objective relaxed over doubly-stochastic pairing matrices. The
// objective is linear, so an optimal vertex of the Birkhoff polytope is a
// permutation matrix and an exact linear-assignment solver finds it.
double correctedAgreementAssignment(const RankedList& S, const RankedList& T, int d,
                                    const AssociationMatrix& corr);

// Geometric sums of the corrected agreements, normalized like rbo.
double rboCor(const RankedList& S, const RankedList& T, RboParams params,
              const AssociationMatrix& corr);
double rboPer(const RankedList& S, const RankedList& T, RboParams params,
              const AssociationMatrix& corr);

// Cosine of the angle between two pre-aligned score vectors; throws
// DegenerateError when either has zero norm.
double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Uniformly random reordering, deterministic per seed.
RankedList permuteRankList(const RankedList& S, std::uint64_t seed);

// Minimum total cost over perfect matchings of a square cost matrix
// (Jonker-Volgenant style augmenting-path algorithm, O(n^3)). Exposed for
// direct verification against factorial brute force.
double assignmentMinCost(const Eigen::MatrixXd& cost);

}  // namespace fisim

#endif  // FISIM_RANKSIM_HPP
