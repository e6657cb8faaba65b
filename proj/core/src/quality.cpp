// core/src/quality.cpp

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

#include "magdiar/quality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "magdiar/error.hpp"
#include "magdiar/io.hpp"

namespace magdiar {

void PrecisionParams::validate() const {
  if (!(std::isfinite(s) && s > 0.0)) throw Error("precision scale s must be positive");
  if (!(std::isfinite(gamma) && gamma >= 0.0)) throw Error("gamma must be non-negative");
  if (!(std::isfinite(dur_cap_s) && dur_cap_s > 0.0)) throw Error("duration cap must be positive");
}

std::string write_precision_params(const PrecisionParams& p) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "s %.17g\ngamma %.17g\ndur_cap_s %.17g\n", p.s, p.gamma,
                p.dur_cap_s);
  return buf;
}

PrecisionParams read_precision_params(std::string_view text) {
  auto kv = parse_key_values(text);
  for (const auto& [key, value] : kv) {
    if (key != "s" && key != "gamma" && key != "dur_cap_s") {
      throw ParseError("unknown precision parameter '" + key + "'", 0);
    }
  }
  PrecisionParams p;
  p.s = key_value_number(kv, "s", p.s);
  p.gamma = key_value_number(kv, "gamma", p.gamma);
  p.dur_cap_s = key_value_number(kv, "dur_cap_s", p.dur_cap_s);
  p.validate();
  return p;
}

double magnitude(const Embedding& e) { return e.vector.norm(); }

double precision_transform(double magnitude, Seconds duration_s, const PrecisionParams& p) {
  if (!std::isfinite(magnitude) || !std::isfinite(duration_s)) {
    throw Error("precision_transform: non-finite input");
  }
  if (magnitude < 0.0) throw Error("precision_transform: negative magnitude");
  if (!(duration_s > 0.0)) throw Error("precision_transform: duration must be positive");
  p.validate();
  return p.s * (magnitude + p.gamma * std::min(p.dur_cap_s, duration_s));
}

ReliabilitySplit split_by_percentile(const EmbeddingSet& set, double percentile) {
  if (!(percentile >= 0.0 && percentile <= 100.0)) {
    throw Error("percentile must lie in [0, 100]");
  }
  if (set.empty()) throw Error("split_by_percentile: empty set");
  std::vector<double> mags;
  mags.reserve(set.size());
  for (const auto& e : set) mags.push_back(magnitude(e));
  std::vector<double> sorted = mags;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  const double cut = sorted[rank - 1];

  std::vector<std::size_t> reliable, remaining;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    (mags[i] >= cut ? reliable : remaining).push_back(i);
  }
  return {set.subset(reliable), set.subset(remaining), cut};
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw DimensionError("pearson_correlation: size mismatch");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0, ax = 0.0, ay = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
    ax += std::abs(x[i]);
    ay += std::abs(y[i]);
  }
  // Rounding noise around a constant must not count as variance.
  const double sdx = std::sqrt(sxx / n), sdy = std::sqrt(syy / n);
  if (sdx <= 1e-12 * std::max(1.0, ax / n) || sdy <= 1e-12 * std::max(1.0, ay / n)) {
    return 0.0;
  }
  return sxy / std::sqrt(sxx * syy);
}

PrecisionFit fit_precision_params(const EmbeddingSet& dev, double target_median_r,
                                  const GammaGrid& grid, Seconds dur_cap_s) {
  if (dev.size() < 10) throw Error("fit_precision_params: need at least 10 embeddings");
  if (!(std::isfinite(target_median_r) && target_median_r > 0.0)) {
    throw Error("fit_precision_params: target median must be positive");
  }
  if (!(grid.max >= 0.0 && grid.step > 0.0)) throw Error("fit_precision_params: bad gamma grid");

  std::vector<double> mags, durs, capped;
  for (const auto& e : dev) {
    mags.push_back(magnitude(e));
    durs.push_back(e.source_duration_s);
    capped.push_back(std::min(dur_cap_s, e.source_duration_s));
  }

  PrecisionFit fit;
  fit.params.dur_cap_s = dur_cap_s;
  const auto [dmin, dmax] = std::minmax_element(durs.begin(), durs.end());
  std::vector<double> adjusted(mags.size());
  if (*dmin == *dmax) {
    fit.params.gamma = 0.0;
    fit.warning = "durations have zero variance; gamma set to 0";
  } else {
    const auto steps = static_cast<long>(std::llround(grid.max / grid.step));
    double best = std::numeric_limits<double>::infinity();
    for (long i = 0; i <= steps; ++i) {
      // Multiply-then-divide keeps grid points such as 0.5 exact.
      const double gamma = steps == 0 ? 0.0 : grid.max * static_cast<double>(i) / steps;
      for (std::size_t k = 0; k < mags.size(); ++k) adjusted[k] = mags[k] + gamma * capped[k];
      const double c = std::abs(pearson_correlation(adjusted, durs));
      if (c < best) {
        best = c;
        fit.params.gamma = gamma;
      }
    }
    fit.abs_correlation = best;
  }

  for (std::size_t k = 0; k < mags.size(); ++k) {
    adjusted[k] = mags[k] + fit.params.gamma * capped[k];
  }
  std::sort(adjusted.begin(), adjusted.end());
  const std::size_t n = adjusted.size();
  const double median =
      n % 2 == 1 ? adjusted[n / 2] : 0.5 * (adjusted[n / 2 - 1] + adjusted[n / 2]);
  if (!(median > 0.0)) throw Error("fit_precision_params: median adjusted magnitude is zero");
  fit.params.s = target_median_r / median;
  fit.params.validate();
  return fit;
}

}  // namespace magdiar
