// core/src/magface.cpp

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

#include "magdiar/magface.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "magdiar/error.hpp"

namespace magdiar {

namespace {

double clamp_magnitude(double a, const MagfaceParams& p) {
  return std::clamp(a, p.n_l, p.n_u);
}

bool inside(double a, const MagfaceParams& p) { return a > p.n_l && a < p.n_u; }

// Row norms, rejecting zero rows.
Vector checked_norms(const Matrix& m, const char* what) {
  Vector norms = m.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms[i] > 0.0)) {
      throw Error(std::string(what) + " row " + std::to_string(i) + " has zero norm");
    }
  }
  return norms;
}

struct Forward {
  Vector x_norm;       // N
  Vector w_norm;       // C
  Matrix cosines;      // N x C
  Matrix probs;        // N x C softmax
  Vector sin_target;   // N
  Vector margins;      // N
  Vector per_sample;   // N
};

Forward forward(const MagfaceBatch& batch, const MagfaceParams& p) {
  p.validate();
  batch.validate();
  Forward f;
  f.x_norm = checked_norms(batch.embeddings, "embedding");
  f.w_norm = checked_norms(batch.class_weights, "class weight");
  const Matrix x_hat = f.x_norm.cwiseInverse().asDiagonal() * batch.embeddings;
  const Matrix w_hat = f.w_norm.cwiseInverse().asDiagonal() * batch.class_weights;
  f.cosines = x_hat * w_hat.transpose();

  const Eigen::Index n = batch.embeddings.rows(), c = batch.class_weights.rows();
  f.probs.resize(n, c);
  f.sin_target.resize(n);
  f.margins.resize(n);
  f.per_sample.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = batch.labels[i];
    const double cos_t = f.cosines(i, y);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double m = margin(f.x_norm[i], p);
    f.sin_target[i] = sin_t;
    f.margins[i] = m;

    Eigen::RowVectorXd logits = p.scale_s * f.cosines.row(i);
    logits[y] = p.scale_s * (cos_t * std::cos(m) - sin_t * std::sin(m));
    const double shift = logits.maxCoeff();
    Eigen::RowVectorXd e = (logits.array() - shift).exp();
    const double z = e.sum();
    f.probs.row(i) = e / z;
    const double ce = shift + std::log(z) - logits[y];
    f.per_sample[i] = ce + p.lambda_g * g_reg(f.x_norm[i], p);
  }
  return f;
}

}  // namespace

void MagfaceParams::validate() const {
  if (!(scale_s > 0.0)) throw Error("magface: scale must be positive");
  if (!(lambda_g >= 0.0)) throw Error("magface: lambda_g must be non-negative");
  if (!(n_u > n_l && n_l > 0.0)) throw Error("magface: need n_u > n_l > 0");
  if (!(m_u > m_l && m_l > 0.0)) throw Error("magface: need m_u > m_l > 0");
}

void MagfaceBatch::validate() const {
  const Eigen::Index n = embeddings.rows(), c = class_weights.rows();
  if (n < 1 || c < 1 || embeddings.cols() < 1) throw Error("magface: empty batch");
  if (embeddings.cols() != class_weights.cols()) {
    throw DimensionError("magface: embedding and class weight dimensions differ");
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimensionError("magface: label count differs from batch size");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= c) {
      throw Error("magface: label of row " + std::to_string(i) + " out of range");
    }
  }
}

double margin(double a, const MagfaceParams& p) {
  const double ac = clamp_magnitude(a, p);
  return (p.m_u - p.m_l) / (p.n_u - p.n_l) * (ac - p.n_l) + p.m_l;
}

double g_reg(double a, const MagfaceParams& p) {
  const double ac = clamp_magnitude(a, p);
  return ac / (p.n_u * p.n_u) + 1.0 / ac;
}

double margin_derivative(double a, const MagfaceParams& p) {
  return inside(a, p) ? (p.m_u - p.m_l) / (p.n_u - p.n_l) : 0.0;
}

double g_reg_derivative(double a, const MagfaceParams& p) {
  return inside(a, p) ? 1.0 / (p.n_u * p.n_u) - 1.0 / (a * a) : 0.0;
}

MagfaceLoss magface_loss(const MagfaceBatch& batch, const MagfaceParams& p) {
  Forward f = forward(batch, p);
  return {f.per_sample.mean(), std::move(f.per_sample)};
}

MagfaceGrad magface_grad(const MagfaceBatch& batch, const MagfaceParams& p) {
  const Forward f = forward(batch, p);
  const Eigen::Index n = batch.embeddings.rows(), c = batch.class_weights.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  MagfaceGrad g;
  g.d_embeddings = Matrix::Zero(n, batch.embeddings.cols());
  g.d_weights = Matrix::Zero(c, batch.class_weights.cols());

  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = batch.labels[i];
    const double a = f.x_norm[i];
    const Vector x_hat = batch.embeddings.row(i).transpose() / a;
    const double cos_t = f.cosines(i, y);
    const double sin_t = f.sin_target[i];
    const double m = f.margins[i];

    // d loss_i / d logit_j.
    Eigen::RowVectorXd dlogit = f.probs.row(i);
    dlogit[y] -= 1.0;

    // d logit_j / d cos_j; at sin(theta) = 0 the target term is taken at its
    // one-sided value without the sin(m) part.
    Eigen::RowVectorXd dcos = dlogit * p.scale_s;
    const double dtarget_dcos =
        p.scale_s * (std::cos(m) + (sin_t > 1e-12 ? std::sin(m) * cos_t / sin_t : 0.0));
    dcos[y] = dlogit[y] * dtarget_dcos;

    const double dtarget_dm = -p.scale_s * (cos_t * std::sin(m) + sin_t * std::cos(m));
    const double radial = dlogit[y] * dtarget_dm * margin_derivative(a, p) +
                          p.lambda_g * g_reg_derivative(a, p);

    Vector gx = radial * x_hat;
    for (Eigen::Index j = 0; j < c; ++j) {
      if (dcos[j] == 0.0) continue;
      const double wn = f.w_norm[j];
      const Vector w_hat = batch.class_weights.row(j).transpose() / wn;
      const double cj = f.cosines(i, j);
      gx += dcos[j] * (w_hat - cj * x_hat) / a;
      g.d_weights.row(j) += (inv_n * dcos[j] / wn) * (x_hat - cj * w_hat).transpose();
    }
    g.d_embeddings.row(i) = inv_n * gx.transpose();
  }
  return g;
}

GradientCheck check_magface_gradient(const MagfaceBatch& batch, const MagfaceParams& p,
                                     double step, double floor) {
  const MagfaceGrad analytic = magface_grad(batch, p);
  auto rel = [floor](double a, double f) {
    return std::abs(a - f) / std::max({std::abs(a), std::abs(f), floor});
  };

  GradientCheck out;
  MagfaceBatch probe = batch;
  for (Eigen::Index i = 0; i < batch.embeddings.rows(); ++i) {
    for (Eigen::Index k = 0; k < batch.embeddings.cols(); ++k) {
      const double orig = probe.embeddings(i, k);
      probe.embeddings(i, k) = orig + step;
      const double up = magface_loss(probe, p).loss;
      probe.embeddings(i, k) = orig - step;
      const double down = magface_loss(probe, p).loss;
      probe.embeddings(i, k) = orig;
      out.max_rel_error_embeddings = std::max(
          out.max_rel_error_embeddings, rel(analytic.d_embeddings(i, k), (up - down) / (2 * step)));
    }
  }
  for (Eigen::Index j = 0; j < batch.class_weights.rows(); ++j) {
    for (Eigen::Index k = 0; k < batch.class_weights.cols(); ++k) {
      const double orig = probe.class_weights(j, k);
      probe.class_weights(j, k) = orig + step;
      const double up = magface_loss(probe, p).loss;
      probe.class_weights(j, k) = orig - step;
      const double down = magface_loss(probe, p).loss;
      probe.class_weights(j, k) = orig;
      out.max_rel_error_weights = std::max(
          out.max_rel_error_weights, rel(analytic.d_weights(j, k), (up - down) / (2 * step)));
    }
  }
  return out;
}

MagfaceBatch random_magface_batch(Rng& rng, int n, int n_classes, int dim,
                                  const MagfaceParams& p) {
  if (n < 1 || n_classes < 1 || dim < 2) throw Error("random_magface_batch: bad shape");
  p.validate();
  MagfaceBatch b;
  b.embeddings.resize(n, dim);
  b.class_weights.resize(n_classes, dim);
  const double span = p.n_u - p.n_l;
  for (int i = 0; i < n; ++i) {
    const Vector v = rng.normal_vector(dim);
    const double a = p.n_l + span * rng.uniform(0.05, 0.95);
    b.embeddings.row(i) = (a / v.norm()) * v.transpose();
    b.labels.push_back(static_cast<int>(rng.below(n_classes)));
  }
  for (int c = 0; c < n_classes; ++c) {
    const Vector w = rng.normal_vector(dim);
    b.class_weights.row(c) = (rng.uniform(0.5, 2.0) / w.norm()) * w.transpose();
  }
  return b;
}

}  // namespace magdiar
