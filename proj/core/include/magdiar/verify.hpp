// core/include/magdiar/verify.hpp

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

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "magdiar/io.hpp"
#include "magdiar/quality.hpp"
#include "magdiar/types.hpp"

namespace magdiar {

// Isotropic Gaussian meta-embedding: unit direction and scalar precision.
// The natural parameter is precision * direction.
struct GmeEmbedding {
  Vector direction;
  double precision = 0.0;

  Vector natural() const { return precision * direction; }
};

double cosine_similarity(const Vector& a, const Vector& b);
double cosine_score(const Embedding& e1, const Embedding& e2);

GmeEmbedding to_gme(const Embedding& e, const PrecisionParams& p);

// Same-speaker vs different-speaker log-likelihood ratio of two meta-embeddings
// under a standard normal prior on the speaker variable:
//   1/2 |a1+a2|^2/(r1+r2+1) - 1/2 |a1|^2/(r1+1) - 1/2 |a2|^2/(r2+1)
//     + d/2 log[(r1+1)(r2+1)/(r1+r2+1)]
double gme_llr(const GmeEmbedding& g1, const GmeEmbedding& g2);

struct CosineBackend {};
struct GmeBackend {
  PrecisionParams params;
};
using ScoringBackend = std::variant<CosineBackend, GmeBackend>;

std::string backend_name(const ScoringBackend& backend);

// Scores in trial order. Throws Error naming any id missing from the set.
std::vector<ScoredTrial> score_trials(const EmbeddingSet& set, const TrialList& trials,
                                      const ScoringBackend& backend);

// Equal error rate from a sweep over thresholds placed between distinct
// scores, linearly interpolated where miss and false-alarm rates cross.
double eer(std::span<const double> target_scores, std::span<const double> nontarget_scores);

// Normalized minimum detection cost with unit miss/false-alarm costs.
double min_dcf(std::span<const double> target_scores, std::span<const double> nontarget_scores,
               double p_target = 0.01);

struct VerificationReport {
  double eer = 0.0;
  double min_dcf = 0.0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

VerificationReport evaluate_scores(const std::vector<ScoredTrial>& scores,
                                   double p_target = 0.01);

struct RejectionPoint {
  double fraction = 0.0;
  std::size_t kept = 0;
  // Empty when the kept trials lack targets or nontargets.
  std::optional<double> eer;
};

// Trial confidence is the sum of the two raw embedding magnitudes. For each
// fraction f the floor(f * |trials|) least confident trials are discarded
// (stable order on ties) before computing the EER.
std::vector<RejectionPoint> rejection_curve(const EmbeddingSet& set, const TrialList& trials,
                                            const ScoringBackend& backend,
                                            std::span<const double> fractions);

}  // namespace magdiar
