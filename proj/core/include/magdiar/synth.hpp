// core/include/magdiar/synth.hpp

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

#include <cstdint>
#include <string>
#include <vector>

#include "magdiar/types.hpp"

namespace magdiar {

// Synthetic meeting with quality-correlated embedding magnitudes.
struct SynthSpec {
  int n_speakers = 3;
  int dim = 16;
  int n_segments = 200;
  Seconds turn_len_s = 4.0;
  double within_std = 7.5;
  double noise_fraction = 0.3;
  double noise_std = 30.0;
  // Probability that a speaker change without a pause carries overlapped speech.
  double overlap_prob = 0.15;
  // Probability of a pause between consecutive turns.
  double pause_prob = 0.2;
  std::uint64_t seed = 0;
  std::string recording_id = "meeting";

  void validate() const;
};

struct SynthMeeting {
  EmbeddingSet embeddings;
  Annotation reference;
  Timeline vad;
  Timeline osd;
  // Generating speaker of every embedding, in set order.
  std::vector<int> speakers;
  // Whether each embedding was degraded (low magnitude + extra noise).
  std::vector<bool> degraded;
};

// Speaker centers lie on a sphere of radius 60. Each segment vector is the
// overlap-weighted mix of the active centers plus within_std noise; degraded
// segments get extra noise_std noise and a magnitude in [10, 30], clean ones
// a magnitude in [70, 110]. Embeddings come from 1.5 s windows at 0.75 s
// stride inside the speech regions.
SynthMeeting generate_meeting(const SynthSpec& setup);

struct TrialSynthSpec {
  int n_speakers = 40;
  int dim = 16;
  int utterances_per_speaker = 10;
  int n_target = 1000;
  int n_nontarget = 1000;
  double within_std = 7.5;
  double noise_std = 20.0;
  double degrade_fraction = 0.3;
  Seconds min_duration_s = 2.0;
  Seconds max_duration_s = 30.0;
  // Magnitude decrease per second of (capped at 20 s) duration.
  double duration_slope = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthTrials {
  EmbeddingSet embeddings;
  TrialList trials;
  std::vector<bool> degraded;  // per embedding, set order
};

SynthTrials generate_trials(const TrialSynthSpec& setup);

}  // namespace magdiar
