// core/include/magdiar/quality.hpp

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
#include <string>
#include <utility>

#include "magdiar/types.hpp"

namespace magdiar {

// Parameters of the magnitude -> precision map
//   r = s * (magnitude + gamma * min(dur_cap_s, duration)).
struct PrecisionParams {
  double s = 1.0;
  double gamma = 0.0;
  Seconds dur_cap_s = 20.0;

  // Throws Error unless s > 0, gamma >= 0 and dur_cap_s > 0.
  void validate() const;
};

std::string write_precision_params(const PrecisionParams& p);
PrecisionParams read_precision_params(std::string_view text);

double magnitude(const Embedding& e);

// Throws Error on non-finite input or non-positive duration.
double precision_transform(double magnitude, Seconds duration_s,
                           const PrecisionParams& p);

struct ReliabilitySplit {
  EmbeddingSet reliable;
  EmbeddingSet remaining;
  // Magnitude at the cut; embeddings with magnitude >= cut are reliable.
  double cut = 0.0;
};

// Nearest-rank percentile split on magnitudes. The cut is the magnitude of
// rank max(1, ceil(percentile/100 * N)) in ascending order; ties at the cut
// go to `reliable`, so percentile 0 keeps everything reliable.
ReliabilitySplit split_by_percentile(const EmbeddingSet& set, double percentile);

struct GammaGrid {
  double max = 2.0;
  double step = 0.01;
};

struct PrecisionFit {
  PrecisionParams params;
  // |corr(adjusted magnitude, duration)| at the chosen gamma.
  double abs_correlation = 0.0;
  std::optional<std::string> warning;
};

// Picks gamma on the grid minimizing |corr(mag + gamma*min(cap,dur), dur)|
// (smallest gamma on ties), then s so that the median transformed value
// equals target_median_r. Needs at least 10 embeddings.
PrecisionFit fit_precision_params(const EmbeddingSet& dev, double target_median_r,
                                  const GammaGrid& grid = {}, Seconds dur_cap_s = 20.0);

// Pearson correlation; 0 when either side has (numerically) zero variance.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace magdiar
