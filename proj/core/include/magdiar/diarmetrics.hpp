// core/include/magdiar/diarmetrics.hpp

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

#include <map>
#include <string>

#include "magdiar/types.hpp"

namespace magdiar {

// hyp speaker -> ref speaker.
using SpeakerMapping = std::map<std::string, std::string>;

// Duration-maximizing one-to-one mapping for a single recording, solved
// exactly on the speaker overlap matrix. Pairs with no overlap are left out.
SpeakerMapping optimal_mapping(const Annotation& ref, const Annotation& hyp);

struct DiarizationReport {
  Seconds collar_s = 0.0;
  bool include_overlap = true;

  bool der_defined = false;
  double der = 0.0;
  Seconds miss_s = 0.0;
  Seconds fa_s = 0.0;
  Seconds confusion_s = 0.0;
  Seconds total_ref_s = 0.0;
  // Timeline with reference or hypothesis speech that was not scored.
  Seconds excluded_s = 0.0;

  bool jer_defined = false;
  double jer = 0.0;
  std::map<std::string, double> per_speaker_jer;
};

// Diarization error rate. All times are quantized to milliseconds and the
// interval arithmetic is exact on that grid. The collar removes
// [t - collar, t + collar] around every reference turn boundary; with
// include_overlap=false regions with two or more reference speakers are
// removed too. The speaker mapping is optimized per recording on the scored
// region.
DiarizationReport der(const Annotation& ref, const Annotation& hyp, Seconds collar_s = 0.0,
                      bool include_overlap = true);

struct JerResult {
  bool defined = false;
  double jer = 0.0;
  // Keyed by speaker, or "recording:speaker" when ref spans several recordings.
  std::map<std::string, double> per_speaker;
};

// Jaccard error rate on the full timeline with the duration-optimal mapping;
// unmapped reference speakers score 1, the mean is unweighted.
JerResult jer(const Annotation& ref, const Annotation& hyp);

// der() plus jer() in one report.
DiarizationReport score_diarization(const Annotation& ref, const Annotation& hyp,
                                    Seconds collar_s = 0.0, bool include_overlap = true);

// Two-line table: header and values, percentages with 2 decimals.
std::string format_report(const DiarizationReport& report);

}  // namespace magdiar
