// core/include/magdiar/pipeline.hpp

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

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "magdiar/cluster.hpp"
#include "magdiar/quality.hpp"
#include "magdiar/types.hpp"
#include "magdiar/vbx.hpp"

namespace magdiar {

// Fixed-length windows inside each VAD interval. A final shortened window
// starting one stride after the last full window covers any uncovered tail;
// intervals no longer than one window yield a single window equal to the
// interval.
std::vector<Interval> uniform_segments(const Timeline& vad, Seconds win_s = 1.5,
                                       Seconds step_s = 0.75);

struct AhcClustering {
  double threshold = 0.0;
  SimilarityMetric metric = CosineMetric{};
};

struct VbxClustering {
  // AHC producing the initial assignment.
  AhcClustering init;
  VbxConfig vbx;
  PldaParams plda;
  // Propagate per-segment uncertainty from embedding magnitudes.
  bool uncertainty = false;
  PrecisionParams precision;
  // Scale each vector to norm sqrt(d) before AHC and VBx; the raw magnitudes
  // are still used for the uncertainty variances.
  bool length_normalize = true;
};

using BaseClustering = std::variant<AhcClustering, VbxClustering>;

enum class TwoStepVariant {
  kCentroidAssign,   // 2.1
  kRefitAll,         // 2.2
  kRefitRemaining,   // 2.3
};

TwoStepVariant parse_two_step_variant(const std::string& name);
std::string to_string(TwoStepVariant v);

struct TwoStepConfig {
  double percentile = 0.0;
  TwoStepVariant variant = TwoStepVariant::kCentroidAssign;
  BaseClustering base = AhcClustering{};
};

// Base clustering with an unknown number of clusters. Labels follow set order.
std::vector<int> cluster_unknown_k(const EmbeddingSet& set, const BaseClustering& base);
// Base clustering with exactly k clusters (VBx: k speakers, no dropping).
std::vector<int> cluster_fixed_k(const EmbeddingSet& set, const BaseClustering& base, int k);

// Quality-aware clustering: the base algorithm runs on the high-magnitude
// split first; the remaining embeddings are attached per the variant.
Labeling two_step_cluster(const EmbeddingSet& set, const TwoStepConfig& cfg);

// Index of the centroid with the highest cosine similarity (lowest index on ties).
int closest_centroid(const Vector& x, const std::vector<Vector>& centroids);

// Speaker name used for cluster k in produced annotations.
std::string speaker_name(int cluster);

// For every OSD interval, the two distinct clusters whose segments are
// closest in time (gap 0 when intersecting; ties by earlier segment, then
// lower cluster id) are both emitted over the interval.
std::vector<Turn> overlap_reassign(const Labeling& lab, const EmbeddingSet& set,
                                   const Timeline& osd);

// Merges touching same-cluster segments and splits overlaps between
// consecutive segments of different clusters at the midpoint.
Annotation labels_to_annotation(const Labeling& lab, const EmbeddingSet& set);

struct DiarizationInputs {
  // Optional per-recording VAD: embeddings that do not intersect it are
  // discarded and output turns are clipped to it.
  std::map<std::string, Timeline> vad;
  std::map<std::string, Timeline> osd;
};

// Full per-recording pipeline: clustering, post-processing, overlap reassignment.
// Recordings are processed by up to `jobs` threads; the output does not
// depend on the thread count.
Annotation diarize(const EmbeddingSet& set, const TwoStepConfig& cfg,
                   const DiarizationInputs& inputs = {}, unsigned jobs = 1);

}  // namespace magdiar
