// core/src/pipeline.cpp

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

#include "magdiar/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>
#include <tuple>

#include "magdiar/error.hpp"
#include "magdiar/verify.hpp"

namespace magdiar {

namespace {

constexpr double kTimeEps = 1e-9;

Matrix prepared_vectors(const EmbeddingSet& set, bool length_normalize) {
  Matrix x = set.stacked();
  if (length_normalize) {
    const double target = std::sqrt(static_cast<double>(set.dim()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double n = x.row(i).norm();
      if (!(n > 0.0)) throw Error("zero embedding vector for " + set[i].id);
      x.row(i) *= target / n;
    }
  }
  return x;
}

std::vector<int> run_vbx(const EmbeddingSet& set, const VbxClustering& base,
                         std::span<const int> init, const VbxConfig& cfg) {
  const Matrix x = prepared_vectors(set, base.length_normalize);
  std::vector<double> variances;
  if (base.uncertainty) variances = vbx_up_variances(set, base.precision);
  return vbx_cluster(x, init, base.plda, cfg, variances).labels;
}

std::vector<Vector> cluster_centroids(const EmbeddingSet& set, std::span<const int> labels) {
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Vector> sums(k, Vector::Zero(set.dim()));
  std::vector<int> counts(k, 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    sums[labels[i]] += set[i].vector;
    ++counts[labels[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) sums[c] /= counts[c];
  }
  return sums;
}

std::vector<Turn> clip_to(const std::vector<Turn>& turns, const Timeline& vad) {
  std::vector<Turn> out;
  for (const auto& t : turns) {
    for (const auto& iv : vad.intervals()) {
      const double s = std::max(t.start_s, iv.start_s);
      const double e = std::min(t.end_s, iv.end_s);
      if (e > s + kTimeEps) out.push_back(Turn{t.recording_id, t.speaker, s, e});
    }
  }
  return out;
}

bool intersects(const Embedding& e, const Timeline& vad) {
  for (const auto& iv : vad.intervals()) {
    if (e.start_s < iv.end_s && iv.start_s < e.end_s) return true;
  }
  return false;
}

}  // namespace

std::vector<Interval> uniform_segments(const Timeline& vad, Seconds win_s, Seconds step_s) {
  if (!(step_s > 0.0 && win_s > step_s)) {
    throw Error("uniform_segments: need win > step > 0");
  }
  std::vector<Interval> out;
  for (const auto& iv : vad.intervals()) {
    const double a = iv.start_s, b = iv.end_s;
    if (b - a <= win_s + kTimeEps) {
      out.push_back(iv);
      continue;
    }
    long k = 0;
    double last_end = a;
    while (a + static_cast<double>(k) * step_s + win_s <= b + kTimeEps) {
      const double s = a + static_cast<double>(k) * step_s;
      const double e = std::min(s + win_s, b);
      out.push_back({s, e});
      last_end = e;
      ++k;
    }
    if (b - last_end > kTimeEps) out.push_back({a + static_cast<double>(k) * step_s, b});
  }
  return out;
}

TwoStepVariant parse_two_step_variant(const std::string& name) {
  if (name == "2.1" || name == "centroid_assign") return TwoStepVariant::kCentroidAssign;
  if (name == "2.2" || name == "refit_all") return TwoStepVariant::kRefitAll;
  if (name == "2.3" || name == "refit_remaining") return TwoStepVariant::kRefitRemaining;
  throw Error("unknown two-step variant '" + name + "'");
}

std::string to_string(TwoStepVariant v) {
  switch (v) {
    case TwoStepVariant::kCentroidAssign: return "2.1";
    case TwoStepVariant::kRefitAll: return "2.2";
    case TwoStepVariant::kRefitRemaining: return "2.3";
  }
  return "?";
}

std::vector<int> cluster_unknown_k(const EmbeddingSet& set, const BaseClustering& base) {
  if (set.empty()) throw Error("clustering an empty set");
  if (const auto* ahc = std::get_if<AhcClustering>(&base)) {
    return ahc_threshold(similarity_matrix(set, ahc->metric), ahc->threshold);
  }
  const auto& vbx = std::get<VbxClustering>(base);
  const Matrix x = prepared_vectors(set, vbx.length_normalize);
  const auto init = ahc_threshold(similarity_matrix(x, vbx.init.metric), vbx.init.threshold);
  return run_vbx(set, vbx, init, vbx.vbx);
}

std::vector<int> cluster_fixed_k(const EmbeddingSet& set, const BaseClustering& base, int k) {
  if (set.empty()) throw Error("clustering an empty set");
  if (const auto* ahc = std::get_if<AhcClustering>(&base)) {
    return ahc_k(similarity_matrix(set, ahc->metric), k);
  }
  const auto& vbx = std::get<VbxClustering>(base);
  const Matrix x = prepared_vectors(set, vbx.length_normalize);
  const auto init = ahc_k(similarity_matrix(x, vbx.init.metric), k);
  VbxConfig cfg = vbx.vbx;
  cfg.max_speakers = k;
  cfg.min_cluster_mass = 0.0;
  return run_vbx(set, vbx, init, cfg);
}

int closest_centroid(const Vector& x, const std::vector<Vector>& centroids) {
  int best = -1;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double s = cosine_similarity(x, centroids[c]);
    if (s > best_sim) {
      best_sim = s;
      best = static_cast<int>(c);
    }
  }
  if (best < 0) throw Error("closest_centroid: no centroids");
  return best;
}

Labeling two_step_cluster(const EmbeddingSet& set, const TwoStepConfig& cfg) {
  if (set.empty()) throw Error("two_step_cluster: empty set");
  const ReliabilitySplit split = split_by_percentile(set, cfg.percentile);
  const std::vector<int> first = cluster_unknown_k(split.reliable, cfg.base);
  const Labeling step1 = Labeling::from_indices(split.reliable, first);
  if (split.remaining.empty()) return step1;

  const int k = *std::max_element(first.begin(), first.end()) + 1;
  const EmbeddingSet& rest = split.remaining;
  std::vector<int> rest_labels(rest.size());

  switch (cfg.variant) {
    case TwoStepVariant::kCentroidAssign: {
      const auto centroids = cluster_centroids(split.reliable, first);
      for (std::size_t i = 0; i < rest.size(); ++i) {
        rest_labels[i] = closest_centroid(rest[i].vector, centroids);
      }
      break;
    }
    case TwoStepVariant::kRefitAll: {
      const auto all = cluster_fixed_k(set, cfg.base, k);
      return Labeling::from_indices(set, all);
    }
    case TwoStepVariant::kRefitRemaining: {
      const int k2 = std::min<int>(k, static_cast<int>(rest.size()));
      const auto second = cluster_fixed_k(rest, cfg.base, k2);
      const auto centroids = cluster_centroids(split.reliable, first);
      // Votes of each second-step cluster for the step-1 cluster nearest to its members.
      std::map<int, std::vector<int>> votes;
      for (std::size_t i = 0; i < rest.size(); ++i) {
        auto& v = votes[second[i]];
        v.resize(k, 0);
        ++v[closest_centroid(rest[i].vector, centroids)];
      }
      std::map<int, int> dominant;
      for (const auto& [c, v] : votes) {
        dominant[c] = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
      }
      for (std::size_t i = 0; i < rest.size(); ++i) rest_labels[i] = dominant[second[i]];
      break;
    }
  }

  std::map<std::string, int> combined = step1.assignment();
  for (std::size_t i = 0; i < rest.size(); ++i) combined.emplace(rest[i].id, rest_labels[i]);
  std::vector<int> ordered;
  ordered.reserve(set.size());
  for (const auto& e : set) ordered.push_back(combined.at(e.id));
  return Labeling::from_indices(set, ordered);
}

std::string speaker_name(int cluster) { return "spk" + std::to_string(cluster); }

std::vector<Turn> overlap_reassign(const Labeling& lab, const EmbeddingSet& set,
                                   const Timeline& osd) {
  struct Candidate {
    double gap;
    double seg_start;
    int label;
  };
  std::vector<Turn> out;
  for (const auto& iv : osd.intervals()) {
    std::map<int, Candidate> best;
    for (const auto& e : set) {
      if (e.recording_id != osd.recording_id() || !lab.contains(e.id)) continue;
      const int l = lab.at(e.id);
      const double gap = std::max({0.0, iv.start_s - e.end_s, e.start_s - iv.end_s});
      Candidate c{gap, e.start_s, l};
      auto it = best.find(l);
      if (it == best.end() ||
          std::tie(c.gap, c.seg_start) < std::tie(it->second.gap, it->second.seg_start)) {
        best[l] = c;
      }
    }
    std::vector<Candidate> ranked;
    for (const auto& [l, c] : best) ranked.push_back(c);
    std::sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.gap, a.seg_start, a.label) < std::tie(b.gap, b.seg_start, b.label);
    });
    for (std::size_t r = 0; r < std::min<std::size_t>(2, ranked.size()); ++r) {
      out.push_back(Turn{osd.recording_id(), speaker_name(ranked[r].label), iv.start_s, iv.end_s});
    }
  }
  return out;
}

Annotation labels_to_annotation(const Labeling& lab, const EmbeddingSet& set) {
  std::vector<Turn> turns;
  for (const auto& rec : set.recordings()) {
    std::vector<const Embedding*> segs;
    for (const auto& e : set) {
      if (e.recording_id == rec && lab.contains(e.id)) segs.push_back(&e);
    }
    std::vector<double> starts, ends;
    std::vector<int> labels;
    for (const auto* e : segs) {
      starts.push_back(e->start_s);
      ends.push_back(e->end_s);
      labels.push_back(lab.at(e->id));
    }
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (labels[i] == labels[i - 1] || segs[i]->start_s >= segs[i - 1]->end_s) continue;
      const double mid = 0.5 * (segs[i]->start_s + std::min(segs[i - 1]->end_s, segs[i]->end_s));
      ends[i - 1] = std::min(ends[i - 1], mid);
      starts[i] = std::max(starts[i], mid);
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (ends[i] > starts[i] + kTimeEps) {
        turns.push_back(Turn{rec, speaker_name(labels[i]), starts[i], ends[i]});
      }
    }
  }
  return Annotation(std::move(turns)).normalized();
}

Annotation diarize(const EmbeddingSet& set, const TwoStepConfig& cfg,
                   const DiarizationInputs& inputs, unsigned jobs) {
  const auto recordings = set.recordings();
  std::vector<std::vector<Turn>> per_rec(recordings.size());
  std::vector<std::exception_ptr> failures(recordings.size());

  auto run_one = [&](std::size_t r) {
    const std::string& rec = recordings[r];
    EmbeddingSet sub = set.for_recording(rec);
    const auto vad = inputs.vad.find(rec);
    if (vad != inputs.vad.end()) {
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < sub.size(); ++i) {
        if (intersects(sub[i], vad->second)) keep.push_back(i);
      }
      sub = sub.subset(keep);
    }
    if (sub.empty()) return;

    const Labeling lab = two_step_cluster(sub, cfg);
    std::vector<Turn> turns = labels_to_annotation(lab, sub).turns();
    if (const auto osd = inputs.osd.find(rec); osd != inputs.osd.end()) {
      auto extra = overlap_reassign(lab, sub, osd->second);
      turns.insert(turns.end(), extra.begin(), extra.end());
    }
    if (vad != inputs.vad.end()) turns = clip_to(turns, vad->second);
    per_rec[r] = std::move(turns);
  };

  const std::size_t n_workers = std::min<std::size_t>(std::max(1u, jobs), recordings.size());
  if (n_workers <= 1) {
    for (std::size_t r = 0; r < recordings.size(); ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        for (std::size_t r = next++; r < recordings.size(); r = next++) {
          try {
            run_one(r);
          } catch (...) {
            failures[r] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  std::vector<Turn> all;
  for (auto& turns : per_rec) all.insert(all.end(), turns.begin(), turns.end());
  return Annotation(std::move(all)).normalized();
}

}  // namespace magdiar
