// core/include/magdiar/cluster.hpp

// Copyright 2026  The magdiar Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <variant>
#include <vector>

#include "magdiar/types.hpp"

namespace magdiar {

// Spherical two-covariance PLDA: y ~ N(0, sigma_b2 I), x | y ~ N(y, sigma_w2 I).
struct PldaParams {
  double sigma_b2 = 1.0;
  double sigma_w2 = 1.0;

  void validate() const;
};

// Same-speaker vs different-speaker log-likelihood ratio of two vectors.
double plda_llr(const PldaParams& plda, const Vector& x1, const Vector& x2);

// Method-of-moments fit from labeled data: sigma_w2 is the pooled
// within-speaker variance per dimension, sigma_b2 the remaining share of the
// per-dimension second moment about zero.
PldaParams fit_plda(const EmbeddingSet& set, std::span<const int> speaker_labels);

struct CosineMetric {};
struct PldaMetric {
  PldaParams plda;
};
using SimilarityMetric = std::variant<CosineMetric, PldaMetric>;

// Symmetric N x N matrix of pairwise similarities (diagonal included).
// Throws Error on a zero vector under the cosine metric.
Matrix similarity_matrix(const EmbeddingSet& set, const SimilarityMetric& metric);
Matrix similarity_matrix(const Matrix& vectors, const SimilarityMetric& metric);

// Average-linkage agglomerative clustering on a similarity matrix. Merging
// continues while the best linkage is >= threshold; ties go to the lowest
// (i, j) cluster pair. Labels are aligned with rows and numbered by first
// appearance.
std::vector<int> ahc_threshold(const Matrix& similarity, double threshold);
// Same agglomeration stopped at exactly k clusters; 1 <= k <= N.
std::vector<int> ahc_k(const Matrix& similarity, int k);

}  // namespace magdiar
