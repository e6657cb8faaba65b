// core/include/magdiar/magface.hpp

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

#include <algorithm>
#include <vector>

#include "magdiar/random.hpp"
#include "magdiar/types.hpp"

namespace magdiar {

// Hyperparameters of the magnitude-aware angular-margin loss. Margins and
// the magnitude regularizer are evaluated on the magnitude clamped into
// [n_l, n_u].
struct MagfaceParams {
  double scale_s = 30.0;
  double lambda_g = 35.0;
  double n_u = 110.0;
  double n_l = 10.0;
  double m_u = 1.0;
  double m_l = 0.1;

  void validate() const;
};

struct MagfaceBatch {
  Matrix embeddings;     // N x d
  Matrix class_weights;  // C x d
  std::vector<int> labels;

  void validate() const;
};

// Linear margin between (n_l, m_l) and (n_u, m_u) on the clamped magnitude.
double margin(double a, const MagfaceParams& p);
// a / n_u^2 + 1 / a on the clamped magnitude.
double g_reg(double a, const MagfaceParams& p);
// Derivatives w.r.t. the unclamped magnitude; zero outside (n_l, n_u).
double margin_derivative(double a, const MagfaceParams& p);
double g_reg_derivative(double a, const MagfaceParams& p);

struct MagfaceLoss {
  double loss = 0.0;
  // Per-sample cross-entropy plus lambda_g * g; loss is their mean.
  Vector per_sample;
};

struct MagfaceGrad {
  Matrix d_embeddings;  // N x d
  Matrix d_weights;     // C x d
};

// Throws Error naming the row when an embedding or class weight has zero norm.
MagfaceLoss magface_loss(const MagfaceBatch& batch, const MagfaceParams& p);
MagfaceGrad magface_grad(const MagfaceBatch& batch, const MagfaceParams& p);

struct GradientCheck {
  double max_rel_error_embeddings = 0.0;
  double max_rel_error_weights = 0.0;
  double max_rel_error() const {
    return std::max(max_rel_error_embeddings, max_rel_error_weights);
  }
};

// Compares magface_grad against central finite differences of magface_loss.
// Entry-wise relative error |a - f| / max(|a|, |f|, floor).
GradientCheck check_magface_gradient(const MagfaceBatch& batch, const MagfaceParams& p,
                                     double step = 1e-5, double floor = 1e-6);

// Random batch with embedding magnitudes drawn uniformly inside (n_l, n_u)
// and unit-norm-scale class weights; every class label in [0, n_classes).
MagfaceBatch random_magface_batch(Rng& rng, int n, int n_classes, int dim,
                                  const MagfaceParams& p);

}  // namespace magdiar
