// core/include/magdiar/types.hpp

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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace magdiar {

using Seconds = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A speaker embedding extracted from one segment of a recording.
// source_duration_s is the amount of audio the vector summarizes and
// feeds the duration term of the precision transform.
struct Embedding {
  std::string id;
  std::string recording_id;
  Seconds start_s = 0.0;
  Seconds end_s = 0.0;
  Seconds source_duration_s = 0.0;
  Vector vector;

  double magnitude() const { return vector.norm(); }
};

// Validated, ordered collection of embeddings sharing one dimension.
// Items are kept sorted by (recording_id, start_s, id) and ids are unique.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  // Throws DimensionError on mismatched dimensions and Error on any other
  // invariant violation (duplicate ids, bad times, non-finite values).
  explicit EmbeddingSet(std::vector<Embedding> items);
  // Empty set with a fixed dimension.
  static EmbeddingSet empty(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Embedding>& items() const { return items_; }
  const Embedding& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  // Index of the embedding with this id, if present.
  std::optional<std::size_t> index_of(const std::string& id) const;
  const Embedding& at(const std::string& id) const;

  // Subset of the items at the given positions (any order).
  EmbeddingSet subset(std::span<const std::size_t> indices) const;
  // Distinct recording ids in sorted order.
  std::vector<std::string> recordings() const;
  EmbeddingSet for_recording(const std::string& recording_id) const;

  // N x d matrix, one row per item.
  Matrix stacked() const;

 private:
  std::size_t dim_ = 0;
  std::vector<Embedding> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Turn {
  std::string recording_id;
  std::string speaker;
  Seconds start_s = 0.0;
  Seconds end_s = 0.0;

  Seconds duration() const { return end_s - start_s; }
  bool operator==(const Turn&) const = default;
};

// Speaker turns for one or more recordings.
class Annotation {
 public:
  Annotation() = default;
  explicit Annotation(std::vector<Turn> turns);

  const std::vector<Turn>& turns() const { return turns_; }
  std::size_t size() const { return turns_.size(); }
  bool empty() const { return turns_.empty(); }

  // Same-speaker turns that touch or overlap inside one recording are merged;
  // result sorted by (recording, start, speaker).
  Annotation normalized() const;
  Annotation for_recording(const std::string& recording_id) const;
  std::vector<std::string> recordings() const;
  std::vector<std::string> speakers() const;

 private:
  std::vector<Turn> turns_;
};

struct Interval {
  Seconds start_s = 0.0;
  Seconds end_s = 0.0;
  Seconds duration() const { return end_s - start_s; }
  bool operator==(const Interval&) const = default;
};

// Sorted, pairwise-disjoint intervals of one recording (VAD or OSD regions).
class Timeline {
 public:
  Timeline() = default;
  // Sorts and merges overlapping or touching intervals. Throws on end <= start.
  Timeline(std::string recording_id, std::vector<Interval> intervals);

  const std::string& recording_id() const { return recording_id_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  Seconds total_duration() const;

 private:
  std::string recording_id_;
  std::vector<Interval> intervals_;
};

struct Trial {
  std::string enroll_id;
  std::string test_id;
  bool is_target = false;
  bool operator==(const Trial&) const = default;
};

using TrialList = std::vector<Trial>;

// Assignment of embedding ids to non-negative cluster ids.
class Labeling {
 public:
  Labeling() = default;
  explicit Labeling(std::map<std::string, int> assignment);

  // Builds a labeling aligned to set order; labels are compacted to
  // 0..K-1 in order of first appearance.
  static Labeling from_indices(const EmbeddingSet& set,
                               std::span<const int> labels);
  // Labels in set order. Throws if an id of the set is not covered.
  std::vector<int> to_indices(const EmbeddingSet& set) const;

  const std::map<std::string, int>& assignment() const { return assignment_; }
  std::size_t size() const { return assignment_.size(); }
  bool empty() const { return assignment_.empty(); }
  int num_clusters() const;
  int at(const std::string& id) const;
  bool contains(const std::string& id) const {
    return assignment_.count(id) > 0;
  }

  // Relabels clusters to 0..K-1 preserving the order of the old ids.
  Labeling compacted() const;
  // Union of two labelings over disjoint id sets.
  Labeling merged_with(const Labeling& other) const;

  bool operator==(const Labeling&) const = default;

 private:
  std::map<std::string, int> assignment_;
};

// Relabels in place to 0..K-1 by first appearance; returns K.
int compact_labels(std::vector<int>& labels);

// True when the two label vectors induce the same partition.
bool same_partition(std::span<const int> a, std::span<const int> b);
bool same_partition(const Labeling& a, const Labeling& b);

}  // namespace magdiar
