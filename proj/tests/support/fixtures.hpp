// tests/support/fixtures.hpp

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

#include <initializer_list>
#include <string>
#include <vector>

#include "magdiar/types.hpp"

namespace magdiar::fixture {

Vector vec(std::initializer_list<double> v);

// Embedding on recording "rec" covering [start, end].
Embedding emb(const std::string& id, std::initializer_list<double> v, double start = 0.0,
              double end = 1.5, const std::string& rec = "rec");
Embedding emb(const std::string& id, const Vector& v, double start = 0.0, double end = 1.5,
              const std::string& rec = "rec");

Turn turn(const std::string& spk, double start, double end, const std::string& rec = "rec");
Annotation ann(std::vector<Turn> turns);

// Labels renamed so that equal partitions compare equal.
std::vector<int> canonical(std::vector<int> labels);

}  // namespace magdiar::fixture
