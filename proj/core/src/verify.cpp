// core/src/verify.cpp

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

#include "magdiar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "magdiar/error.hpp"

namespace magdiar {

namespace {

struct DetPoint {
  double miss;
  double fa;
};

// Miss/false-alarm pairs at every threshold separating distinct scores, from
// "accept everything" (miss 0, fa 1) to "reject everything" (miss 1, fa 0).
std::vector<DetPoint> det_sweep(std::span<const double> targets,
                                std::span<const double> nontargets) {
  if (targets.empty() || nontargets.empty()) {
    throw Error("detection metrics need target and nontarget scores");
  }
  std::vector<std::pair<double, bool>> all;
  all.reserve(targets.size() + nontargets.size());
  for (double s : targets) all.emplace_back(s, true);
  for (double s : nontargets) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double nt = static_cast<double>(targets.size());
  const double nn = static_cast<double>(nontargets.size());
  std::size_t misses = 0, rejected_nontargets = 0;
  std::vector<DetPoint> points{{0.0, 1.0}};
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? misses : rejected_nontargets) += 1;
      ++j;
    }
    points.push_back({misses / nt, 1.0 - rejected_nontargets / nn});
    i = j;
  }
  return points;
}

}  // namespace

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("cosine: dimension mismatch");
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw Error("cosine: zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double cosine_score(const Embedding& e1, const Embedding& e2) {
  if (!(e1.vector.norm() > 0.0)) throw Error("cosine: zero vector for " + e1.id);
  if (!(e2.vector.norm() > 0.0)) throw Error("cosine: zero vector for " + e2.id);
  return cosine_similarity(e1.vector, e2.vector);
}

GmeEmbedding to_gme(const Embedding& e, const PrecisionParams& p) {
  const double mag = e.vector.norm();
  if (!(mag > 0.0)) throw Error("to_gme: zero vector for " + e.id);
  GmeEmbedding g;
  g.direction = e.vector / mag;
  g.precision = precision_transform(mag, e.source_duration_s, p);
  if (!(g.precision > 0.0)) throw Error("to_gme: non-positive precision for " + e.id);
  return g;
}

double gme_llr(const GmeEmbedding& g1, const GmeEmbedding& g2) {
  if (g1.direction.size() != g2.direction.size()) {
    throw DimensionError("gme_llr: dimension mismatch");
  }
  const double r1 = g1.precision, r2 = g2.precision;
  const Vector a1 = g1.natural(), a2 = g2.natural();
  const double d = static_cast<double>(g1.direction.size());
  // Bit-identical under argument swap.
  const double own = 0.5 * a1.squaredNorm() / (r1 + 1.0) + 0.5 * a2.squaredNorm() / (r2 + 1.0);
  return 0.5 * (a1 + a2).squaredNorm() / (r1 + r2 + 1.0) - own +
         0.5 * d * ((std::log1p(r1) + std::log1p(r2)) - std::log1p(r1 + r2));
}

std::string backend_name(const ScoringBackend& backend) {
  return std::holds_alternative<CosineBackend>(backend) ? "cosine" : "gme-llr";
}

std::vector<ScoredTrial> score_trials(const EmbeddingSet& set, const TrialList& trials,
                                      const ScoringBackend& backend) {
  std::vector<ScoredTrial> out;
  out.reserve(trials.size());
  for (const auto& t : trials) {
    const Embedding& e1 = set.at(t.enroll_id);
    const Embedding& e2 = set.at(t.test_id);
    double score = std::visit(
        [&](const auto& b) -> double {
          using B = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<B, CosineBackend>) {
            return cosine_score(e1, e2);
          } else {
            return gme_llr(to_gme(e1, b.params), to_gme(e2, b.params));
          }
        },
        backend);
    out.push_back({t, score});
  }
  return out;
}

double eer(std::span<const double> target_scores, std::span<const double> nontarget_scores) {
  const auto points = det_sweep(target_scores, nontarget_scores);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = points[i].miss - points[i].fa;
    if (d < 0.0) continue;
    const double d_prev = points[i - 1].miss - points[i - 1].fa;
    if (d == 0.0) return points[i].miss;
    const double alpha = -d_prev / (d - d_prev);
    return points[i - 1].miss + alpha * (points[i].miss - points[i - 1].miss);
  }
  return points.back().miss;  // unreachable: the last point has miss 1, fa 0
}

double min_dcf(std::span<const double> target_scores, std::span<const double> nontarget_scores,
               double p_target) {
  if (!(p_target > 0.0 && p_target < 1.0)) throw Error("min_dcf: p_target must be in (0,1)");
  const auto points = det_sweep(target_scores, nontarget_scores);
  const double norm = std::min(p_target, 1.0 - p_target);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) {
    best = std::min(best, (p_target * pt.miss + (1.0 - p_target) * pt.fa) / norm);
  }
  return best;
}

VerificationReport evaluate_scores(const std::vector<ScoredTrial>& scores, double p_target) {
  std::vector<double> tar, non;
  for (const auto& s : scores) (s.trial.is_target ? tar : non).push_back(s.score);
  VerificationReport r;
  r.n_target = tar.size();
  r.n_nontarget = non.size();
  r.eer = eer(tar, non);
  r.min_dcf = min_dcf(tar, non, p_target);
  return r;
}

std::vector<RejectionPoint> rejection_curve(const EmbeddingSet& set, const TrialList& trials,
                                            const ScoringBackend& backend,
                                            std::span<const double> fractions) {
  if (!std::is_sorted(fractions.begin(), fractions.end())) {
    throw Error("rejection_curve: fractions must be sorted ascending");
  }
  const auto scores = score_trials(set, trials, backend);
  std::vector<double> confidence;
  confidence.reserve(trials.size());
  for (const auto& t : trials) {
    confidence.push_back(set.at(t.enroll_id).magnitude() + set.at(t.test_id).magnitude());
  }
  std::vector<std::size_t> order(trials.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return confidence[a] < confidence[b]; });

  std::vector<RejectionPoint> out;
  for (double f : fractions) {
    if (!(f >= 0.0 && f < 1.0)) throw Error("rejection_curve: fraction must lie in [0,1)");
    const auto drop = static_cast<std::size_t>(std::floor(f * static_cast<double>(trials.size())));
    std::vector<double> tar, non;
    for (std::size_t k = drop; k < order.size(); ++k) {
      const auto& s = scores[order[k]];
      (s.trial.is_target ? tar : non).push_back(s.score);
    }
    RejectionPoint pt{f, order.size() - drop, std::nullopt};
    if (!tar.empty() && !non.empty()) pt.eer = eer(tar, non);
    out.push_back(pt);
  }
  return out;
}

}  // namespace magdiar
