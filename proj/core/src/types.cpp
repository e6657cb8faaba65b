// core/src/types.cpp

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

#include "magdiar/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "magdiar/error.hpp"

namespace magdiar {

namespace {

void validate_embedding(const Embedding& e) {
  if (e.id.empty()) throw Error("embedding with empty id");
  if (!std::isfinite(e.start_s) || !std::isfinite(e.end_s) ||
      !(e.end_s > e.start_s)) {
    throw Error("embedding " + e.id + ": end must be greater than start");
  }
  if (!std::isfinite(e.source_duration_s) || !(e.source_duration_s > 0.0)) {
    throw Error("embedding " + e.id + ": source duration must be positive");
  }
  if (!e.vector.allFinite()) {
    throw Error("embedding " + e.id + ": non-finite vector component");
  }
}

}  // namespace

EmbeddingSet::EmbeddingSet(std::vector<Embedding> items)
    : items_(std::move(items)) {
  if (items_.empty()) return;
  dim_ = static_cast<std::size_t>(items_.front().vector.size());
  if (dim_ == 0) throw DimensionError("embedding " + items_.front().id + " has dimension 0");
  for (const auto& e : items_) {
    validate_embedding(e);
    if (static_cast<std::size_t>(e.vector.size()) != dim_) {
      throw DimensionError("embedding " + e.id + " has dimension " +
                           std::to_string(e.vector.size()) + ", expected " +
                           std::to_string(dim_));
    }
  }
  std::sort(items_.begin(), items_.end(),
            [](const Embedding& a, const Embedding& b) {
              return std::tie(a.recording_id, a.start_s, a.id) <
                     std::tie(b.recording_id, b.start_s, b.id);
            });
  index_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!index_.emplace(items_[i].id, i).second) {
      throw Error("duplicate embedding id " + items_[i].id);
    }
  }
}

EmbeddingSet EmbeddingSet::empty(std::size_t dim) {
  EmbeddingSet set;
  set.dim_ = dim;
  return set;
}

std::optional<std::size_t> EmbeddingSet::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Embedding& EmbeddingSet::at(const std::string& id) const {
  auto idx = index_of(id);
  if (!idx) throw Error("unknown embedding id " + id);
  return items_[*idx];
}

EmbeddingSet EmbeddingSet::subset(std::span<const std::size_t> indices) const {
  if (indices.empty()) return empty(dim_);
  std::vector<Embedding> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(items_.at(i));
  return EmbeddingSet(std::move(picked));
}

std::vector<std::string> EmbeddingSet::recordings() const {
  std::vector<std::string> out;
  for (const auto& e : items_) {
    if (out.empty() || out.back() != e.recording_id) out.push_back(e.recording_id);
  }
  return out;
}

EmbeddingSet EmbeddingSet::for_recording(const std::string& recording_id) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].recording_id == recording_id) idx.push_back(i);
  }
  return subset(idx);
}

Matrix EmbeddingSet::stacked() const {
  Matrix m(items_.size(), dim_);
  for (std::size_t i = 0; i < items_.size(); ++i) m.row(i) = items_[i].vector.transpose();
  return m;
}

Annotation::Annotation(std::vector<Turn> turns) : turns_(std::move(turns)) {
  for (const auto& t : turns_) {
    if (!std::isfinite(t.start_s) || !std::isfinite(t.end_s) ||
        !(t.end_s > t.start_s)) {
      throw Error("turn of speaker " + t.speaker + " in " + t.recording_id +
                  ": end must be greater than start");
    }
  }
}

Annotation Annotation::normalized() const {
  std::vector<Turn> sorted = turns_;
  std::sort(sorted.begin(), sorted.end(), [](const Turn& a, const Turn& b) {
    return std::tie(a.recording_id, a.speaker, a.start_s, a.end_s) <
           std::tie(b.recording_id, b.speaker, b.start_s, b.end_s);
  });
  std::vector<Turn> merged;
  for (auto& t : sorted) {
    if (!merged.empty() && merged.back().recording_id == t.recording_id &&
        merged.back().speaker == t.speaker && t.start_s <= merged.back().end_s) {
      merged.back().end_s = std::max(merged.back().end_s, t.end_s);
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::sort(merged.begin(), merged.end(), [](const Turn& a, const Turn& b) {
    return std::tie(a.recording_id, a.start_s, a.speaker) <
           std::tie(b.recording_id, b.start_s, b.speaker);
  });
  return Annotation(std::move(merged));
}

Annotation Annotation::for_recording(const std::string& recording_id) const {
  std::vector<Turn> out;
  for (const auto& t : turns_) {
    if (t.recording_id == recording_id) out.push_back(t);
  }
  return Annotation(std::move(out));
}

std::vector<std::string> Annotation::recordings() const {
  std::set<std::string> s;
  for (const auto& t : turns_) s.insert(t.recording_id);
  return {s.begin(), s.end()};
}

std::vector<std::string> Annotation::speakers() const {
  std::set<std::string> s;
  for (const auto& t : turns_) s.insert(t.speaker);
  return {s.begin(), s.end()};
}

Timeline::Timeline(std::string recording_id, std::vector<Interval> intervals)
    : recording_id_(std::move(recording_id)) {
  for (const auto& iv : intervals) {
    if (!std::isfinite(iv.start_s) || !std::isfinite(iv.end_s) ||
        !(iv.end_s > iv.start_s)) {
      throw Error("timeline " + recording_id_ + ": interval end must be greater than start");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) {
              return std::tie(a.start_s, a.end_s) < std::tie(b.start_s, b.end_s);
            });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.start_s <= intervals_.back().end_s) {
      intervals_.back().end_s = std::max(intervals_.back().end_s, iv.end_s);
    } else {
      intervals_.push_back(iv);
    }
  }
}

Seconds Timeline::total_duration() const {
  Seconds total = 0.0;
  for (const auto& iv : intervals_) total += iv.duration();
  return total;
}

Labeling::Labeling(std::map<std::string, int> assignment)
    : assignment_(std::move(assignment)) {
  for (const auto& [id, c] : assignment_) {
    if (c < 0) throw Error("negative cluster id for " + id);
  }
}

Labeling Labeling::from_indices(const EmbeddingSet& set,
                                std::span<const int> labels) {
  if (labels.size() != set.size()) {
    throw DimensionError("labeling has " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(set.size()) +
                         " embeddings");
  }
  std::vector<int> compact(labels.begin(), labels.end());
  compact_labels(compact);
  std::map<std::string, int> assignment;
  for (std::size_t i = 0; i < set.size(); ++i) assignment.emplace(set[i].id, compact[i]);
  return Labeling(std::move(assignment));
}

std::vector<int> Labeling::to_indices(const EmbeddingSet& set) const {
  std::vector<int> out;
  out.reserve(set.size());
  for (const auto& e : set) out.push_back(at(e.id));
  return out;
}

int Labeling::num_clusters() const {
  std::set<int> s;
  for (const auto& [id, c] : assignment_) s.insert(c);
  return static_cast<int>(s.size());
}

int Labeling::at(const std::string& id) const {
  auto it = assignment_.find(id);
  if (it == assignment_.end()) throw Error("labeling has no entry for " + id);
  return it->second;
}

Labeling Labeling::compacted() const {
  std::set<int> ids;
  for (const auto& [id, c] : assignment_) ids.insert(c);
  std::map<int, int> remap;
  int next = 0;
  for (int c : ids) remap[c] = next++;
  std::map<std::string, int> out;
  for (const auto& [id, c] : assignment_) out.emplace(id, remap[c]);
  return Labeling(std::move(out));
}

Labeling Labeling::merged_with(const Labeling& other) const {
  std::map<std::string, int> out = assignment_;
  for (const auto& [id, c] : other.assignment_) {
    if (!out.emplace(id, c).second) throw Error("labelings overlap on id " + id);
  }
  return Labeling(std::move(out));
}

int compact_labels(std::vector<int>& labels) {
  std::map<int, int> remap;
  for (int& l : labels) {
    auto [it, inserted] = remap.emplace(l, static_cast<int>(remap.size()));
    l = it->second;
  }
  return static_cast<int>(remap.size());
}

bool same_partition(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

bool same_partition(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) return false;
  std::vector<int> la, lb;
  for (const auto& [id, c] : a.assignment()) {
    if (!b.contains(id)) return false;
    la.push_back(c);
    lb.push_back(b.at(id));
  }
  return same_partition(la, lb);
}

}  // namespace magdiar
