// core/src/ahc.cpp

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

#include <limits>
#include <optional>

#include "magdiar/error.hpp"

namespace magdiar {

namespace {

// Average linkage via the Lance-Williams update. Stops when the best linkage
// falls below `threshold` (if set) or `target_k` clusters remain.
std::vector<int> agglomerate(const Matrix& similarity, std::optional<double> threshold,
                             int target_k) {
  const Eigen::Index n = similarity.rows();
  if (similarity.cols() != n) throw DimensionError("ahc: similarity matrix must be square");
  if (n == 0) return {};

  Matrix link = similarity;
  std::vector<int> size(n, 1);
  std::vector<int> owner(n);
  for (Eigen::Index i = 0; i < n; ++i) owner[i] = static_cast<int>(i);
  std::vector<bool> active(n, true);
  int clusters = static_cast<int>(n);

  while (clusters > target_k) {
    double best = -std::numeric_limits<double>::infinity();
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (active[j] && link(i, j) > best) {
          best = link(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0 || (threshold && best < *threshold)) break;

    const double wi = size[bi], wj = size[bj];
    for (Eigen::Index l = 0; l < n; ++l) {
      if (!active[l] || l == bi || l == bj) continue;
      const double merged = (wi * link(bi, l) + wj * link(bj, l)) / (wi + wj);
      link(bi, l) = link(l, bi) = merged;
    }
    size[bi] += size[bj];
    active[bj] = false;
    for (auto& o : owner) {
      if (o == bj) o = static_cast<int>(bi);
    }
    --clusters;
  }
  compact_labels(owner);
  return owner;
}

}  // namespace

std::vector<int> ahc_threshold(const Matrix& similarity, double threshold) {
  return agglomerate(similarity, threshold, 1);
}

std::vector<int> ahc_k(const Matrix& similarity, int k) {
  if (k < 1 || k > similarity.rows()) {
    throw Error("ahc_k: k=" + std::to_string(k) + " out of range for " +
                std::to_string(similarity.rows()) + " items");
  }
  return agglomerate(similarity, std::nullopt, k);
}

}  // namespace magdiar
