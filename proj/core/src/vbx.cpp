// core/src/vbx.cpp

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

#include "magdiar/vbx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "magdiar/error.hpp"
#include "magdiar/io.hpp"

namespace magdiar {

namespace {

// Scaled forward-backward for a speaker HMM whose transition matrix is
// p_loop * I + (1 - p_loop) * 1 pi^T. Emission log-likelihoods are shifted by
// their per-frame maximum and every forward step is renormalized, so long
// inputs do not underflow. Returns log p(X).
double forward_backward(const Matrix& log_emission, const Vector& pi, double p_loop,
                        Matrix& posteriors) {
  const Eigen::Index n = log_emission.rows(), k = log_emission.cols();
  Matrix e(n, k), alpha(n, k), beta(n, k);
  Vector scale(n);
  double log_px = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double shift = log_emission.row(t).maxCoeff();
    e.row(t) = (log_emission.row(t).array() - shift).exp();
    Eigen::RowVectorXd u;
    if (t == 0) {
      u = pi.transpose().cwiseProduct(e.row(t));
    } else {
      const double total = alpha.row(t - 1).sum();
      u = (p_loop * alpha.row(t - 1) + (1.0 - p_loop) * total * pi.transpose())
              .cwiseProduct(e.row(t));
    }
    scale[t] = u.sum();
    alpha.row(t) = u / scale[t];
    log_px += shift + std::log(scale[t]);
  }
  beta.row(n - 1).setOnes();
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    const Eigen::RowVectorXd eb = e.row(t + 1).cwiseProduct(beta.row(t + 1));
    const double mixed = (1.0 - p_loop) * pi.dot(eb.transpose());
    beta.row(t) = (p_loop * eb.array() + mixed) / scale[t + 1];
  }
  posteriors = alpha.cwiseProduct(beta);
  for (Eigen::Index t = 0; t < n; ++t) posteriors.row(t) /= posteriors.row(t).sum();
  return log_px;
}

// Keeps the columns listed in `keep` and renormalizes rows; a row that loses
// all of its mass becomes uniform over the kept speakers.
Matrix keep_columns(const Matrix& gamma, const std::vector<Eigen::Index>& keep) {
  Matrix out(gamma.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(c) = gamma.col(keep[c]);
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    const double s = out.row(t).sum();
    if (s > 0.0) {
      out.row(t) /= s;
    } else {
      out.row(t).setConstant(1.0 / static_cast<double>(keep.size()));
    }
  }
  return out;
}

Matrix initial_responsibilities(std::span<const int> init_labels, int max_speakers) {
  std::vector<int> labels(init_labels.begin(), init_labels.end());
  const int k0 = compact_labels(labels);
  std::vector<int> counts(k0, 0);
  for (int l : labels) ++counts[l];

  // Keep the largest clusters when there are too many; ties keep the lower label.
  std::vector<int> order(k0);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });
  const int k = std::min(k0, max_speakers);
  std::vector<int> column(k0, -1);
  std::vector<int> kept(order.begin(), order.begin() + k);
  std::sort(kept.begin(), kept.end());
  for (int c = 0; c < k; ++c) column[kept[c]] = c;

  Matrix gamma = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), k);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (column[labels[t]] >= 0) {
      gamma(t, column[labels[t]]) = 1.0;
    } else {
      gamma.row(t).setConstant(1.0 / k);
    }
  }
  return gamma;
}

}  // namespace

void VbxConfig::validate() const {
  if (!(p_loop > 0.0 && p_loop < 1.0)) throw Error("VBx: p_loop must lie in (0,1)");
  if (!(f_a > 0.0)) throw Error("VBx: f_a must be positive");
  if (!(f_b > 0.0)) throw Error("VBx: f_b must be positive");
  if (max_speakers < 1) throw Error("VBx: max_speakers must be positive");
  if (max_iters < 1) throw Error("VBx: max_iters must be positive");
  if (!(elbo_rel_tol > 0.0)) throw Error("VBx: elbo_rel_tol must be positive");
  if (!(min_cluster_mass >= 0.0)) throw Error("VBx: min_cluster_mass must be non-negative");
}

VbxResult vbx_cluster(const Matrix& vectors, std::span<const int> init_labels,
                      const PldaParams& plda, const VbxConfig& cfg,
                      std::span<const double> variances) {
  plda.validate();
  cfg.validate();
  const Eigen::Index n = vectors.rows();
  const Eigen::Index dim = vectors.cols();
  if (n == 0) throw Error("VBx: no embeddings");
  if (static_cast<Eigen::Index>(init_labels.size()) != n) {
    throw DimensionError("VBx: initial labeling does not cover every embedding");
  }
  if (!variances.empty() && static_cast<Eigen::Index>(variances.size()) != n) {
    throw DimensionError("VBx: variances must align with the embeddings");
  }

  // Per-frame total variance sigma_w^2 + sigma_t^2.
  Vector frame_var = Vector::Constant(n, plda.sigma_w2);
  for (std::size_t t = 0; t < variances.size(); ++t) {
    if (!(variances[t] >= 0.0) || !std::isfinite(variances[t])) {
      throw Error("VBx: variance " + std::to_string(t) + " must be finite and non-negative");
    }
    frame_var[t] += variances[t];
  }
  const Vector frame_prec = frame_var.cwiseInverse();
  const Vector sq_norm = vectors.rowwise().squaredNorm();
  const double d = static_cast<double>(dim);
  const double ratio = cfg.f_a / cfg.f_b;
  const Vector log_norm = -0.5 * d * (2.0 * std::numbers::pi * frame_var).array().log();

  VbxState st;
  Matrix gamma = initial_responsibilities(init_labels, cfg.max_speakers);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::Index k = gamma.cols();
    // Speaker posteriors q(y_s) = N(alpha_s, lambda_s^{-1} I).
    const Matrix weighted = gamma.transpose() * frame_prec.asDiagonal();  // K x N
    st.speaker_precisions = (1.0 / plda.sigma_b2) + ratio * weighted.rowwise().sum().array();
    st.speaker_means = (ratio * st.speaker_precisions.cwiseInverse()).asDiagonal() *
                       (weighted * vectors);

    // Expected log emissions.
    const Matrix cross = vectors * st.speaker_means.transpose();  // N x K
    const Vector mean_sq = st.speaker_means.rowwise().squaredNorm();
    Matrix log_emission(n, k);
    for (Eigen::Index t = 0; t < n; ++t) {
      for (Eigen::Index s = 0; s < k; ++s) {
        const double dist = sq_norm[t] - 2.0 * cross(t, s) + mean_sq[s];
        log_emission(t, s) =
            cfg.f_a * (log_norm[t] - 0.5 * frame_prec[t] *
                                         (dist + d / st.speaker_precisions[s]));
      }
    }

    const Vector pi = Vector::Constant(k, 1.0 / static_cast<double>(k));
    const double log_px = forward_backward(log_emission, pi, cfg.p_loop, gamma);

    double kl = 0.0;
    for (Eigen::Index s = 0; s < k; ++s) {
      const double v = 1.0 / (st.speaker_precisions[s] * plda.sigma_b2);
      kl += 0.5 * (d * v + mean_sq[s] / plda.sigma_b2 - d - d * std::log(v));
    }
    const double elbo = log_px - cfg.f_b * kl;
    st.elbo_trace.push_back(elbo);
    st.iterations = iter + 1;

    bool dropped = false;
    if (cfg.min_cluster_mass > 0.0 && k > 1) {
      const Vector mass = gamma.colwise().sum().transpose();
      std::vector<Eigen::Index> keep;
      for (Eigen::Index s = 0; s < k; ++s) {
        if (mass[s] >= cfg.min_cluster_mass) keep.push_back(s);
      }
      if (keep.empty()) {
        Eigen::Index best;
        mass.maxCoeff(&best);
        keep.push_back(best);
      }
      if (static_cast<Eigen::Index>(keep.size()) < k) {
        st.speakers_dropped += static_cast<int>(k - static_cast<Eigen::Index>(keep.size()));
        gamma = keep_columns(gamma, keep);
        Matrix means(keep.size(), dim);
        Vector precs(keep.size());
        for (std::size_t c = 0; c < keep.size(); ++c) {
          means.row(c) = st.speaker_means.row(keep[c]);
          precs[c] = st.speaker_precisions[keep[c]];
        }
        st.speaker_means = std::move(means);
        st.speaker_precisions = std::move(precs);
        dropped = true;
      }
    }

    if (!dropped && st.elbo_trace.size() > 1) {
      const double prev = st.elbo_trace[st.elbo_trace.size() - 2];
      if (std::abs(elbo - prev) <= cfg.elbo_rel_tol * std::abs(prev)) break;
    }
  }

  st.responsibilities = gamma;
  VbxResult result;
  result.labels.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    Eigen::Index best;
    gamma.row(t).maxCoeff(&best);
    result.labels[t] = static_cast<int>(best);
  }
  compact_labels(result.labels);
  result.state = std::move(st);
  return result;
}

std::pair<Labeling, VbxState> vbx_cluster(const EmbeddingSet& set, const Labeling& init,
                                          const PldaParams& plda, const VbxConfig& cfg,
                                          std::span<const double> variances) {
  const std::vector<int> init_idx = init.to_indices(set);
  VbxResult r = vbx_cluster(set.stacked(), init_idx, plda, cfg, variances);
  return {Labeling::from_indices(set, r.labels), std::move(r.state)};
}

std::vector<double> vbx_up_variances(const EmbeddingSet& set, const PrecisionParams& p) {
  p.validate();
  std::vector<double> out;
  out.reserve(set.size());
  for (const auto& e : set) {
    const double r = precision_transform(e.magnitude(), e.source_duration_s, p);
    if (!(r > 0.0)) throw Error("vbx_up_variances: zero precision (infinite variance) for " + e.id);
    out.push_back(1.0 / r);
  }
  return out;
}

ClusteringConfigFile read_clustering_config(std::string_view text, ClusteringConfigFile cfg) {
  const auto kv = parse_key_values(text);
  static const std::set<std::string> known = {
      "p_loop", "f_a", "f_b", "max_speakers", "max_iters", "elbo_rel_tol",
      "min_cluster_mass", "sigma_b2", "sigma_w2"};
  for (const auto& [key, value] : kv) {
    if (!known.count(key)) throw ParseError("unknown clustering option '" + key + "'", 0);
  }
  cfg.vbx.p_loop = key_value_number(kv, "p_loop", cfg.vbx.p_loop);
  cfg.vbx.f_a = key_value_number(kv, "f_a", cfg.vbx.f_a);
  cfg.vbx.f_b = key_value_number(kv, "f_b", cfg.vbx.f_b);
  cfg.vbx.max_speakers =
      static_cast<int>(key_value_number(kv, "max_speakers", cfg.vbx.max_speakers));
  cfg.vbx.max_iters = static_cast<int>(key_value_number(kv, "max_iters", cfg.vbx.max_iters));
  cfg.vbx.elbo_rel_tol = key_value_number(kv, "elbo_rel_tol", cfg.vbx.elbo_rel_tol);
  cfg.vbx.min_cluster_mass = key_value_number(kv, "min_cluster_mass", cfg.vbx.min_cluster_mass);
  cfg.plda.sigma_b2 = key_value_number(kv, "sigma_b2", cfg.plda.sigma_b2);
  cfg.plda.sigma_w2 = key_value_number(kv, "sigma_w2", cfg.plda.sigma_w2);
  cfg.vbx.validate();
  cfg.plda.validate();
  return cfg;
}

}  // namespace magdiar
