// core/src/diarmetrics.cpp

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

#include "magdiar/diarmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "magdiar/hungarian.hpp"
#include "magdiar/io.hpp"

namespace magdiar {

namespace {

using Ms = std::int64_t;

Ms to_ms(Seconds t) { return static_cast<Ms>(std::llround(t * 1000.0)); }
Seconds to_s(Ms t) { return static_cast<Seconds>(t) / 1000.0; }

struct MsTurn {
  int speaker;
  Ms start;
  Ms end;
};

struct SpeakerTurns {
  std::vector<std::string> names;
  std::vector<MsTurn> turns;
  std::vector<Ms> total;  // per speaker
};

SpeakerTurns quantize(const Annotation& ann, const std::string& rec) {
  SpeakerTurns st;
  std::map<std::string, int> index;
  for (const auto& t : ann.for_recording(rec).normalized().turns()) {
    auto [it, inserted] = index.emplace(t.speaker, static_cast<int>(st.names.size()));
    if (inserted) st.names.push_back(t.speaker);
    const Ms s = to_ms(t.start_s), e = to_ms(t.end_s);
    if (e > s) st.turns.push_back({it->second, s, e});
  }
  st.total.assign(st.names.size(), 0);
  // Quantization may make neighbouring same-speaker turns touch; that is
  // harmless for the per-elementary-segment bookkeeping below.
  for (const auto& t : st.turns) st.total[t.speaker] += t.end - t.start;
  return st;
}

// Elementary segments between consecutive boundaries with per-speaker
// activity flags and the scored flag.
struct Grid {
  std::vector<Ms> bounds;
  std::vector<std::vector<char>> ref_active;  // [segment][speaker]
  std::vector<std::vector<char>> hyp_active;
  std::vector<int> ref_count, hyp_count;
  std::vector<char> scored;

  std::size_t segments() const { return bounds.empty() ? 0 : bounds.size() - 1; }
  Ms length(std::size_t k) const { return bounds[k + 1] - bounds[k]; }
};

std::pair<std::size_t, std::size_t> seg_range(const std::vector<Ms>& bounds, Ms s, Ms e) {
  const auto lo = std::lower_bound(bounds.begin(), bounds.end(), s) - bounds.begin();
  const auto hi = std::lower_bound(bounds.begin(), bounds.end(), e) - bounds.begin();
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

Grid build_grid(const SpeakerTurns& ref, const SpeakerTurns& hyp, Ms collar,
                bool include_overlap) {
  Grid g;
  std::vector<std::pair<Ms, Ms>> excluded;
  std::set<Ms> b;
  for (const auto& t : ref.turns) {
    b.insert(t.start);
    b.insert(t.end);
    if (collar > 0) {
      excluded.emplace_back(t.start - collar, t.start + collar);
      excluded.emplace_back(t.end - collar, t.end + collar);
      b.insert(t.start - collar);
      b.insert(t.start + collar);
      b.insert(t.end - collar);
      b.insert(t.end + collar);
    }
  }
  for (const auto& t : hyp.turns) {
    b.insert(t.start);
    b.insert(t.end);
  }
  g.bounds.assign(b.begin(), b.end());
  const std::size_t n = g.segments();
  g.ref_active.assign(n, std::vector<char>(ref.names.size(), 0));
  g.hyp_active.assign(n, std::vector<char>(hyp.names.size(), 0));
  g.ref_count.assign(n, 0);
  g.hyp_count.assign(n, 0);
  g.scored.assign(n, 1);

  for (const auto& t : ref.turns) {
    auto [lo, hi] = seg_range(g.bounds, t.start, t.end);
    for (std::size_t k = lo; k < hi; ++k) {
      if (!g.ref_active[k][t.speaker]) ++g.ref_count[k];
      g.ref_active[k][t.speaker] = 1;
    }
  }
  for (const auto& t : hyp.turns) {
    auto [lo, hi] = seg_range(g.bounds, t.start, t.end);
    for (std::size_t k = lo; k < hi; ++k) {
      if (!g.hyp_active[k][t.speaker]) ++g.hyp_count[k];
      g.hyp_active[k][t.speaker] = 1;
    }
  }
  for (const auto& [s, e] : excluded) {
    auto [lo, hi] = seg_range(g.bounds, s, e);
    for (std::size_t k = lo; k < hi; ++k) g.scored[k] = 0;
  }
  if (!include_overlap) {
    for (std::size_t k = 0; k < n; ++k) {
      if (g.ref_count[k] >= 2) g.scored[k] = 0;
    }
  }
  return g;
}

// hyp x ref overlap durations (ms) over scored segments.
Matrix overlap_matrix(const Grid& g, std::size_t n_ref, std::size_t n_hyp) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_hyp), static_cast<Eigen::Index>(n_ref));
  for (std::size_t k = 0; k < g.segments(); ++k) {
    if (!g.scored[k] || g.ref_count[k] == 0 || g.hyp_count[k] == 0) continue;
    const double len = static_cast<double>(g.length(k));
    for (std::size_t h = 0; h < n_hyp; ++h) {
      if (!g.hyp_active[k][h]) continue;
      for (std::size_t r = 0; r < n_ref; ++r) {
        if (g.ref_active[k][r]) m(h, r) += len;
      }
    }
  }
  return m;
}

// mapping[h] = ref index or -1.
std::vector<int> solve_mapping(const Matrix& overlap) {
  if (overlap.rows() == 0 || overlap.cols() == 0) {
    return std::vector<int>(static_cast<std::size_t>(overlap.rows()), -1);
  }
  auto assignment = max_weight_assignment(overlap);
  for (std::size_t h = 0; h < assignment.size(); ++h) {
    if (assignment[h] >= 0 && overlap(h, assignment[h]) <= 0.0) assignment[h] = -1;
  }
  return assignment;
}

std::vector<std::string> all_recordings(const Annotation& ref, const Annotation& hyp) {
  std::set<std::string> recs;
  for (const auto& r : ref.recordings()) recs.insert(r);
  for (const auto& r : hyp.recordings()) recs.insert(r);
  return {recs.begin(), recs.end()};
}

}  // namespace

SpeakerMapping optimal_mapping(const Annotation& ref, const Annotation& hyp) {
  SpeakerMapping out;
  for (const auto& rec : all_recordings(ref, hyp)) {
    const SpeakerTurns r = quantize(ref, rec), h = quantize(hyp, rec);
    const Grid g = build_grid(r, h, 0, true);
    const auto mapping = solve_mapping(overlap_matrix(g, r.names.size(), h.names.size()));
    for (std::size_t k = 0; k < mapping.size(); ++k) {
      if (mapping[k] >= 0) out[h.names[k]] = r.names[mapping[k]];
    }
  }
  return out;
}

DiarizationReport der(const Annotation& ref, const Annotation& hyp, Seconds collar_s,
                      bool include_overlap) {
  DiarizationReport rep;
  rep.collar_s = collar_s;
  rep.include_overlap = include_overlap;
  const Ms collar = to_ms(collar_s);
  Ms miss = 0, fa = 0, conf = 0, total = 0, excluded = 0;
  for (const auto& rec : all_recordings(ref, hyp)) {
    const SpeakerTurns r = quantize(ref, rec), h = quantize(hyp, rec);
    const Grid g = build_grid(r, h, collar, include_overlap);
    const auto mapping = solve_mapping(overlap_matrix(g, r.names.size(), h.names.size()));
    for (std::size_t k = 0; k < g.segments(); ++k) {
      const Ms len = g.length(k);
      const int nr = g.ref_count[k], nh = g.hyp_count[k];
      if (!g.scored[k]) {
        if (nr > 0 || nh > 0) excluded += len;
        continue;
      }
      int correct = 0;
      for (std::size_t hh = 0; hh < h.names.size(); ++hh) {
        if (g.hyp_active[k][hh] && mapping[hh] >= 0 && g.ref_active[k][mapping[hh]]) ++correct;
      }
      total += nr * len;
      miss += std::max(0, nr - nh) * len;
      fa += std::max(0, nh - nr) * len;
      conf += (std::min(nr, nh) - correct) * len;
    }
  }
  rep.miss_s = to_s(miss);
  rep.fa_s = to_s(fa);
  rep.confusion_s = to_s(conf);
  rep.total_ref_s = to_s(total);
  rep.excluded_s = to_s(excluded);
  rep.der_defined = total > 0;
  if (rep.der_defined) {
    rep.der = static_cast<double>(miss + fa + conf) / static_cast<double>(total);
  }
  return rep;
}

JerResult jer(const Annotation& ref, const Annotation& hyp) {
  JerResult out;
  const bool multi = ref.recordings().size() > 1;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& rec : all_recordings(ref, hyp)) {
    const SpeakerTurns r = quantize(ref, rec), h = quantize(hyp, rec);
    const Grid g = build_grid(r, h, 0, true);
    const Matrix overlap = overlap_matrix(g, r.names.size(), h.names.size());
    const auto mapping = solve_mapping(overlap);
    std::vector<int> ref_to_hyp(r.names.size(), -1);
    for (std::size_t hh = 0; hh < mapping.size(); ++hh) {
      if (mapping[hh] >= 0) ref_to_hyp[mapping[hh]] = static_cast<int>(hh);
    }
    for (std::size_t rr = 0; rr < r.names.size(); ++rr) {
      double value = 1.0;
      if (const int hh = ref_to_hyp[rr]; hh >= 0) {
        const double inter = overlap(hh, rr);
        const double uni = static_cast<double>(r.total[rr] + h.total[hh]) - inter;
        value = 1.0 - inter / uni;
      }
      out.per_speaker[multi ? rec + ":" + r.names[rr] : r.names[rr]] = value;
      sum += value;
      ++count;
    }
  }
  out.defined = count > 0;
  if (out.defined) out.jer = sum / static_cast<double>(count);
  return out;
}

DiarizationReport score_diarization(const Annotation& ref, const Annotation& hyp,
                                    Seconds collar_s, bool include_overlap) {
  DiarizationReport rep = der(ref, hyp, collar_s, include_overlap);
  JerResult j = jer(ref, hyp);
  rep.jer_defined = j.defined;
  rep.jer = j.jer;
  rep.per_speaker_jer = std::move(j.per_speaker);
  return rep;
}

std::string format_report(const DiarizationReport& rep) {
  auto pct = [](bool defined, double v) { return defined ? format_fixed(100.0 * v, 2) : "nan"; };
  auto part = [&](Seconds s) {
    return pct(rep.total_ref_s > 0.0, rep.total_ref_s > 0.0 ? s / rep.total_ref_s : 0.0);
  };
  std::string out = "collar overlap DER% MISS% FA% CONF% JER% scored_s excluded_s\n";
  out += format_fixed(rep.collar_s, 2) + " " + (rep.include_overlap ? "yes" : "no") + " " +
         pct(rep.der_defined, rep.der) + " " + part(rep.miss_s) + " " + part(rep.fa_s) + " " +
         part(rep.confusion_s) + " " + pct(rep.jer_defined, rep.jer) + " " +
         format_fixed(rep.total_ref_s, 3) + " " + format_fixed(rep.excluded_s, 3) + "\n";
  return out;
}

}  // namespace magdiar
