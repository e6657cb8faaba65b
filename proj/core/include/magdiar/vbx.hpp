// core/include/magdiar/vbx.hpp

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
#include <utility>
#include <vector>

#include "magdiar/cluster.hpp"
#include "magdiar/quality.hpp"
#include "magdiar/types.hpp"

namespace magdiar {

struct VbxConfig {
  double p_loop = 0.9;
  double f_a = 1.0;
  double f_b = 1.0;
  int max_speakers = 20;
  int max_iters = 40;
  double elbo_rel_tol = 1e-6;
  // Speakers whose total responsibility falls below this are dropped after
  // each iteration; 0 disables dropping.
  double min_cluster_mass = 1.0;

  void validate() const;
};

// Variational posterior of the Bayesian HMM.
struct VbxState {
  Matrix speaker_means;        // K x d
  Vector speaker_precisions;   // K
  Matrix responsibilities;     // N x K, rows sum to one
  std::vector<double> elbo_trace;
  int iterations = 0;
  int speakers_dropped = 0;
};

struct VbxResult {
  std::vector<int> labels;  // argmax speaker per frame, numbered by first appearance
  VbxState state;
};

// Bayesian-HMM clustering of the rows of `vectors` (time ordered) with
// spherical PLDA emissions. `variances` adds a per-frame isotropic variance
// to the within-speaker variance; an empty span means all zeros.
VbxResult vbx_cluster(const Matrix& vectors, std::span<const int> init_labels,
                      const PldaParams& plda, const VbxConfig& cfg,
                      std::span<const double> variances = {});

std::pair<Labeling, VbxState> vbx_cluster(const EmbeddingSet& set, const Labeling& init,
                                          const PldaParams& plda, const VbxConfig& cfg,
                                          std::span<const double> variances = {});

// sigma_i^2 = 1 / precision_transform(|x_i|, duration_i, p).
std::vector<double> vbx_up_variances(const EmbeddingSet& set, const PrecisionParams& p);

// Key-value config text; unknown keys are an error.
struct ClusteringConfigFile {
  VbxConfig vbx;
  PldaParams plda;
};
ClusteringConfigFile read_clustering_config(std::string_view text,
                                            ClusteringConfigFile defaults = {});

}  // namespace magdiar
