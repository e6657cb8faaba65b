// tests/support/fixtures.cpp

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

#include "fixtures.hpp"

#include <map>

namespace magdiar::fixture {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

Embedding emb(const std::string& id, const Vector& v, double start, double end,
              const std::string& rec) {
  Embedding e;
  e.id = id;
  e.recording_id = rec;
  e.start_s = start;
  e.end_s = end;
  e.source_duration_s = end - start;
  e.vector = v;
  return e;
}

Embedding emb(const std::string& id, std::initializer_list<double> v, double start, double end,
              const std::string& rec) {
  return emb(id, vec(v), start, end, rec);
}

Turn turn(const std::string& spk, double start, double end, const std::string& rec) {
  return Turn{rec, spk, start, end};
}

Annotation ann(std::vector<Turn> turns) { return Annotation(std::move(turns)); }

std::vector<int> canonical(std::vector<int> labels) {
  std::map<int, int> names;
  for (int& l : labels) {
    const auto it = names.emplace(l, static_cast<int>(names.size())).first;
    l = it->second;
  }
  return labels;
}

}  // namespace magdiar::fixture
