// core/include/magdiar/hungarian.hpp

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

#include <vector>

#include "magdiar/types.hpp"

namespace magdiar {

// Maximum-weight assignment on a rectangular matrix (Kuhn-Munkres with
// potentials, O(n^3) on the padded square). Returns, for every row, the
// assigned column or -1 when the row is left unassigned.
std::vector<int> max_weight_assignment(const Matrix& weights);

}  // namespace magdiar
