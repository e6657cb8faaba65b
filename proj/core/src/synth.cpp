// core/src/synth.cpp

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

#include "magdiar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "magdiar/error.hpp"
#include "magdiar/pipeline.hpp"
#include "magdiar/random.hpp"

namespace magdiar {

namespace {

constexpr double kCenterRadius = 60.0;

std::vector<Vector> draw_centers(Rng& rng, int n, int dim) {
  std::vector<Vector> centers;
  for (int s = 0; s < n; ++s) {
    Vector c = rng.normal_vector(dim);
    centers.push_back(kCenterRadius * c / c.norm());
  }
  return centers;
}

// Returns the embedding vector and whether it was degraded.
Vector emit(Rng& rng, const Vector& base, double within_std, bool degrade, double noise_std) {
  Vector v = base + within_std * rng.normal_vector(base.size());
  if (degrade) v += noise_std * rng.normal_vector(base.size());
  const double mag = degrade ? rng.uniform(10.0, 30.0) : rng.uniform(70.0, 110.0);
  return mag * v / v.norm();
}

std::string segment_id(const std::string& rec, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%05zu", k);
  return rec + buf;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_speakers < 1) throw Error("synth: n_speakers must be >= 1");
  if (dim < 2) throw Error("synth: dim must be >= 2");
  if (n_segments < 1) throw Error("synth: n_segments must be >= 1");
  if (!(turn_len_s > 0.0)) throw Error("synth: turn_len_s must be positive");
  if (!(within_std > 0.0)) throw Error("synth: within_std must be positive");
  if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) throw Error("synth: noise_fraction must lie in [0,1]");
  if (!(noise_std > 0.0)) throw Error("synth: noise_std must be positive");
  if (!(overlap_prob >= 0.0 && overlap_prob <= 1.0)) throw Error("synth: overlap_prob must lie in [0,1]");
  if (!(pause_prob >= 0.0 && pause_prob <= 1.0)) throw Error("synth: pause_prob must lie in [0,1]");
  if (recording_id.empty()) throw Error("synth: empty recording id");
}

SynthMeeting generate_meeting(const SynthSpec& setup) {
  setup.validate();
  Rng root(setup.seed);
  Rng center_rng = root.split(0), turn_rng = root.split(1), emb_rng = root.split(2);
  const auto centers = draw_centers(center_rng, setup.n_speakers, setup.dim);

  // Turn sequence until the speech covers roughly n_segments windows.
  struct RawTurn {
    int speaker;
    double start, end;
  };
  std::vector<RawTurn> turns;
  const double target_speech = 0.75 * (setup.n_segments + 1);
  double t = 0.0, speech = 0.0;
  int prev = -1;
  while (speech < target_speech) {
    int spk = 0;
    if (setup.n_speakers > 1) {
      spk = static_cast<int>(turn_rng.below(setup.n_speakers - (prev >= 0 ? 1 : 0)));
      if (prev >= 0 && spk >= prev) ++spk;
    }
    const double len = setup.turn_len_s * turn_rng.uniform(0.5, 1.5);
    if (!turns.empty() && turn_rng.bernoulli(setup.pause_prob)) t += turn_rng.uniform(0.2, 1.0);
    const double len_ms = std::round(len * 1000.0) / 1000.0;
    t = std::round(t * 1000.0) / 1000.0;
    turns.push_back({spk, t, t + len_ms});
    t += len_ms;
    speech += len_ms;
    prev = spk;
  }

  std::vector<Interval> speech_regions;
  for (const auto& tr : turns) speech_regions.push_back({tr.start, tr.end});
  Timeline vad(setup.recording_id, speech_regions);

  // Overlaps at speaker changes without a pause.
  std::vector<RawTurn> ref_turns = turns;
  std::vector<Interval> osd;
  for (std::size_t i = 1; i < turns.size(); ++i) {
    if (turns[i].start != turns[i - 1].end || turns[i].speaker == turns[i - 1].speaker) continue;
    if (!turn_rng.bernoulli(setup.overlap_prob)) continue;
    const double room = 0.5 * std::min(turns[i].end - turns[i].start,
                                       turns[i - 1].end - turns[i - 1].start);
    const double half = std::round(std::min(turn_rng.uniform(0.15, 0.5), 0.5 * room) * 1000.0) / 1000.0;
    if (half <= 0.0) continue;
    const double boundary = turns[i].start;
    ref_turns[i - 1].end = boundary + half;
    ref_turns[i].start = boundary - half;
    osd.push_back({boundary - half, boundary + half});
  }

  std::vector<Turn> ref;
  for (const auto& tr : ref_turns) {
    ref.push_back(Turn{setup.recording_id, "S" + std::to_string(tr.speaker), tr.start, tr.end});
  }

  SynthMeeting out;
  out.reference = Annotation(std::move(ref)).normalized();
  out.vad = vad;
  out.osd = Timeline(setup.recording_id, osd);

  std::vector<Embedding> items;
  std::vector<int> speakers;
  std::vector<bool> degraded;
  const auto windows = uniform_segments(vad);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto& w = windows[k];
    Vector base = Vector::Zero(setup.dim);
    std::vector<double> share(setup.n_speakers, 0.0);
    for (const auto& tr : ref_turns) {
      const double ov = std::min(w.end_s, tr.end) - std::max(w.start_s, tr.start);
      if (ov > 0.0) share[tr.speaker] += ov;
    }
    double total = 0.0;
    for (double s : share) total += s;
    for (int s = 0; s < setup.n_speakers; ++s) base += (share[s] / total) * centers[s];
    const int dominant =
        static_cast<int>(std::max_element(share.begin(), share.end()) - share.begin());

    const bool degrade = emb_rng.bernoulli(setup.noise_fraction);
    Embedding e;
    e.id = segment_id(setup.recording_id, k);
    e.recording_id = setup.recording_id;
    e.start_s = w.start_s;
    e.end_s = w.end_s;
    e.source_duration_s = w.duration();
    e.vector = emit(emb_rng, base, setup.within_std, degrade, setup.noise_std);
    items.push_back(std::move(e));
    speakers.push_back(dominant);
    degraded.push_back(degrade);
  }
  // Windows are generated in time order with unique ids, so construction
  // keeps this order and the side vectors stay aligned.
  out.embeddings = EmbeddingSet(std::move(items));
  out.speakers = std::move(speakers);
  out.degraded = std::move(degraded);
  return out;
}

void TrialSynthSpec::validate() const {
  if (n_speakers < 2) throw Error("synth trials: need at least 2 speakers");
  if (dim < 2) throw Error("synth trials: dim must be >= 2");
  if (utterances_per_speaker < 2) throw Error("synth trials: need >= 2 utterances per speaker");
  if (n_target < 0 || n_nontarget < 0) throw Error("synth trials: negative trial count");
  if (!(within_std > 0.0 && noise_std > 0.0)) throw Error("synth trials: noise levels must be positive");
  if (!(degrade_fraction >= 0.0 && degrade_fraction <= 1.0)) {
    throw Error("synth trials: degrade_fraction must lie in [0,1]");
  }
  if (!(min_duration_s > 0.0 && max_duration_s >= min_duration_s)) {
    throw Error("synth trials: bad duration range");
  }
  if (!(duration_slope >= 0.0 && duration_slope * 20.0 < 10.0)) {
    throw Error("synth trials: duration_slope must lie in [0, 0.5)");
  }
}

SynthTrials generate_trials(const TrialSynthSpec& setup) {
  setup.validate();
  Rng root(setup.seed);
  Rng center_rng = root.split(0), emb_rng = root.split(1), trial_rng = root.split(2);
  const auto centers = draw_centers(center_rng, setup.n_speakers, setup.dim);

  std::vector<Embedding> items;
  std::vector<int> owner;
  std::vector<bool> degraded;
  for (int s = 0; s < setup.n_speakers; ++s) {
    for (int u = 0; u < setup.utterances_per_speaker; ++u) {
      const bool degrade = emb_rng.bernoulli(setup.degrade_fraction);
      const double dur = emb_rng.uniform(setup.min_duration_s, setup.max_duration_s);
      Vector v = emit(emb_rng, centers[s], setup.within_std, degrade, setup.noise_std);
      // Longer recordings get smaller magnitudes when duration_slope > 0.
      const double mag = v.norm();
      v *= (mag - setup.duration_slope * std::min(20.0, dur)) / mag;
      char id[48];
      std::snprintf(id, sizeof(id), "spk%03d_utt%03d", s, u);
      Embedding e;
      e.id = id;
      e.recording_id = id;
      e.start_s = 0.0;
      e.end_s = dur;
      e.source_duration_s = dur;
      e.vector = std::move(v);
      items.push_back(std::move(e));
      owner.push_back(s);
      degraded.push_back(degrade);
    }
  }

  SynthTrials out;
  const int per = setup.utterances_per_speaker;
  auto pick = [&](int speaker) {
    return static_cast<std::size_t>(speaker * per + static_cast<int>(trial_rng.below(per)));
  };
  for (int k = 0; k < setup.n_target; ++k) {
    const int s = static_cast<int>(trial_rng.below(setup.n_speakers));
    const std::size_t a = pick(s);
    std::size_t b;
    do {
      b = pick(s);
    } while (b == a);
    out.trials.push_back({items[a].id, items[b].id, true});
  }
  for (int k = 0; k < setup.n_nontarget; ++k) {
    const int s1 = static_cast<int>(trial_rng.below(setup.n_speakers));
    int s2 = static_cast<int>(trial_rng.below(setup.n_speakers - 1));
    if (s2 >= s1) ++s2;
    out.trials.push_back({items[pick(s1)].id, items[pick(s2)].id, false});
  }
  // Ids sort in generation order, so the side vector stays aligned.
  out.embeddings = EmbeddingSet(std::move(items));
  out.degraded = std::move(degraded);
  return out;
}

}  // namespace magdiar
