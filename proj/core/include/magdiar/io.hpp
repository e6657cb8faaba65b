// core/include/magdiar/io.hpp

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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "magdiar/types.hpp"

namespace magdiar {

// RTTM. Only SPEAKER lines are read; other record types are skipped.
// Zero-duration turns are dropped, negative durations are a ParseError.
Annotation parse_rttm(std::string_view text);
// One SPEAKER line per turn, sorted by (recording, start), times printed
// with millisecond precision and channel fixed to 1.
std::string write_rttm(const Annotation& ann);

// Line-delimited JSON records:
//   {"id":"..","recording":"..","start":0.0,"end":1.5,"source_duration":1.5,"vector":[..]}
EmbeddingSet read_embedding_archive(std::string_view text);
std::string write_embedding_archive(const EmbeddingSet& set);

// "enroll test target|nontarget" per line.
TrialList read_trials(std::string_view text);
std::string write_trials(const TrialList& trials);

// Timelines keyed by recording. Accepted line forms:
//   start end                 (recording = default_recording)
//   recording start end
//   SPEAKER rec 1 start dur ...   (RTTM-like)
std::map<std::string, Timeline> read_timelines(std::string_view text,
                                               const std::string& default_recording);
// Two-column "start end" text.
std::string write_timeline(const Timeline& timeline);

// "id cluster" per line.
std::string write_labeling(const Labeling& lab);
Labeling read_labeling(std::string_view text);

struct ScoredTrial {
  Trial trial;
  double score = 0.0;
};
std::string write_scores(const std::vector<ScoredTrial>& scores);

// "key value" or "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(std::string_view text);
double key_value_number(const std::map<std::string, std::string>& kv,
                        const std::string& key, double fallback);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Fixed-point formatting used by every text writer.
std::string format_fixed(double value, int decimals);

}  // namespace magdiar
