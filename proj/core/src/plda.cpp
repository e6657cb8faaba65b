// core/src/plda.cpp

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

#include "magdiar/cluster.hpp"

#include <cmath>
#include <map>

#include "magdiar/error.hpp"

namespace magdiar {

void PldaParams::validate() const {
  if (!(std::isfinite(sigma_b2) && sigma_b2 > 0.0)) throw Error("PLDA sigma_b2 must be positive");
  if (!(std::isfinite(sigma_w2) && sigma_w2 > 0.0)) throw Error("PLDA sigma_w2 must be positive");
}

double plda_llr(const PldaParams& plda, const Vector& x1, const Vector& x2) {
  if (x1.size() != x2.size()) throw DimensionError("plda_llr: dimension mismatch");
  // Per coordinate the pair is bivariate normal with variance t = b + w and
  // covariance b under the same-speaker hypothesis, independent otherwise.
  const double b = plda.sigma_b2;
  const double t = plda.sigma_b2 + plda.sigma_w2;
  const double det = t * t - b * b;
  const double d = static_cast<double>(x1.size());
  const double sq = x1.squaredNorm() + x2.squaredNorm();
  return d * (std::log(t) - 0.5 * std::log(det)) + 0.5 * sq * (1.0 / t - t / det) +
         b * x1.dot(x2) / det;
}

PldaParams fit_plda(const EmbeddingSet& set, std::span<const int> speaker_labels) {
  if (set.empty() || speaker_labels.size() != set.size()) {
    throw DimensionError("fit_plda: need one label per embedding");
  }
  std::map<int, std::pair<Vector, int>> sums;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto [it, inserted] = sums.try_emplace(speaker_labels[i], Vector::Zero(set.dim()), 0);
    it->second.first += set[i].vector;
    it->second.second += 1;
  }
  const double n = static_cast<double>(set.size());
  const double d = static_cast<double>(set.dim());
  double within = 0.0, total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& [sum, count] = sums.at(speaker_labels[i]);
    within += (set[i].vector - sum / count).squaredNorm();
    total += set[i].vector.squaredNorm();
  }
  const double denom = n - static_cast<double>(sums.size());
  PldaParams p;
  p.sigma_w2 = denom > 0.0 ? within / (denom * d) : 1.0;
  p.sigma_b2 = std::max(total / (n * d) - p.sigma_w2, 1e-6 * p.sigma_w2);
  p.validate();
  return p;
}

Matrix similarity_matrix(const Matrix& vectors, const SimilarityMetric& metric) {
  const Eigen::Index n = vectors.rows();
  if (n < 1) throw Error("similarity_matrix: empty input");
  if (std::holds_alternative<CosineMetric>(metric)) {
    Vector norms = vectors.rowwise().norm();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(norms[i] > 0.0)) throw Error("similarity_matrix: zero vector at row " + std::to_string(i));
    }
    const Matrix unit = norms.cwiseInverse().asDiagonal() * vectors;
    Matrix s = unit * unit.transpose();
    s = (0.5 * (s + s.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
    return s;
  }
  const auto& plda = std::get<PldaMetric>(metric).plda;
  plda.validate();
  Matrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector xi = vectors.row(i).transpose();
    for (Eigen::Index j = i; j < n; ++j) {
      s(i, j) = s(j, i) = plda_llr(plda, xi, vectors.row(j).transpose());
    }
  }
  return s;
}

Matrix similarity_matrix(const EmbeddingSet& set, const SimilarityMetric& metric) {
  return similarity_matrix(set.stacked(), metric);
}

}  // namespace magdiar
