// core/src/io.cpp

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

#include "magdiar/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "magdiar/error.hpp"

namespace magdiar {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    fn(line, line_no);
    pos = nl + 1;
  }
}

double parse_number(std::string_view token, std::size_t line_no, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw ParseError("malformed " + std::string(what) + " '" + std::string(token) + "'",
                     line_no);
  }
  return value;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  // Avoid printing "-0.000".
  if (std::abs(value) < 0.5 * std::pow(10.0, -decimals)) value = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

Annotation parse_rttm(std::string_view text) {
  std::vector<Turn> turns;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto fields = split_ws(line);
    if (fields.empty() || fields[0].front() == '#') return;
    if (fields[0] != "SPEAKER") return;
    if (fields.size() < 9) {
      throw ParseError("SPEAKER line needs at least 9 fields", line_no);
    }
    double start = parse_number(fields[3], line_no, "turn onset");
    double dur = parse_number(fields[4], line_no, "turn duration");
    if (dur < 0.0) throw ParseError("negative turn duration", line_no);
    if (start < 0.0) throw ParseError("negative turn onset", line_no);
    if (dur == 0.0) return;
    turns.push_back(Turn{std::string(fields[1]), std::string(fields[7]), start, start + dur});
  });
  return Annotation(std::move(turns));
}

std::string write_rttm(const Annotation& ann) {
  std::vector<Turn> turns = ann.turns();
  std::stable_sort(turns.begin(), turns.end(), [](const Turn& a, const Turn& b) {
    return std::tie(a.recording_id, a.start_s) < std::tie(b.recording_id, b.start_s);
  });
  std::string out;
  for (const auto& t : turns) {
    out += "SPEAKER " + t.recording_id + " 1 " + format_fixed(t.start_s, 3) + " " +
           format_fixed(t.duration(), 3) + " <NA> <NA> " + t.speaker + " <NA> <NA>\n";
  }
  return out;
}

EmbeddingSet read_embedding_archive(std::string_view text) {
  std::vector<Embedding> items;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (split_ws(line).empty()) return;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON record: ") + e.what(), line_no);
    }
    try {
      Embedding e;
      e.id = j.at("id").get<std::string>();
      e.recording_id = j.at("recording").get<std::string>();
      e.start_s = j.at("start").get<double>();
      e.end_s = j.at("end").get<double>();
      e.source_duration_s = j.at("source_duration").get<double>();
      auto values = j.at("vector").get<std::vector<double>>();
      e.vector = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
      items.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(std::string("bad embedding record: ") + ex.what(), line_no);
    }
  });
  return EmbeddingSet(std::move(items));
}

std::string write_embedding_archive(const EmbeddingSet& set) {
  std::string out;
  for (const auto& e : set) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["recording"] = e.recording_id;
    j["start"] = e.start_s;
    j["end"] = e.end_s;
    j["source_duration"] = e.source_duration_s;
    j["vector"] = std::vector<double>(e.vector.data(), e.vector.data() + e.vector.size());
    out += j.dump();
    out += '\n';
  }
  return out;
}

TrialList read_trials(std::string_view text) {
  TrialList trials;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto f = split_ws(line);
    if (f.empty()) return;
    if (f.size() != 3) throw ParseError("trial line needs 3 fields", line_no);
    bool target;
    if (f[2] == "target") {
      target = true;
    } else if (f[2] == "nontarget") {
      target = false;
    } else {
      throw ParseError("unknown trial type '" + std::string(f[2]) + "'", line_no);
    }
    trials.push_back(Trial{std::string(f[0]), std::string(f[1]), target});
  });
  return trials;
}

std::string write_trials(const TrialList& trials) {
  std::string out;
  for (const auto& t : trials) {
    out += t.enroll_id + " " + t.test_id + (t.is_target ? " target\n" : " nontarget\n");
  }
  return out;
}

std::map<std::string, Timeline> read_timelines(std::string_view text,
                                               const std::string& default_recording) {
  std::map<std::string, std::vector<Interval>> raw;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto f = split_ws(line);
    if (f.empty() || f[0].front() == '#') return;
    std::string rec;
    double start = 0.0, end = 0.0;
    if (f[0] == "SPEAKER") {
      if (f.size() < 5) throw ParseError("SPEAKER line needs at least 5 fields", line_no);
      rec = std::string(f[1]);
      start = parse_number(f[3], line_no, "onset");
      end = start + parse_number(f[4], line_no, "duration");
    } else if (f.size() == 2) {
      rec = default_recording;
      start = parse_number(f[0], line_no, "start");
      end = parse_number(f[1], line_no, "end");
    } else if (f.size() == 3) {
      rec = std::string(f[0]);
      start = parse_number(f[1], line_no, "start");
      end = parse_number(f[2], line_no, "end");
    } else {
      throw ParseError("timeline line needs 2 or 3 fields", line_no);
    }
    if (!(end > start)) throw ParseError("interval end must exceed start", line_no);
    raw[rec].push_back(Interval{start, end});
  });
  std::map<std::string, Timeline> out;
  for (auto& [rec, ivs] : raw) out.emplace(rec, Timeline(rec, std::move(ivs)));
  return out;
}

std::string write_timeline(const Timeline& timeline) {
  std::string out;
  for (const auto& iv : timeline.intervals()) {
    out += format_fixed(iv.start_s, 3) + " " + format_fixed(iv.end_s, 3) + "\n";
  }
  return out;
}

std::string write_labeling(const Labeling& lab) {
  std::string out;
  for (const auto& [id, c] : lab.assignment()) out += id + " " + std::to_string(c) + "\n";
  return out;
}

Labeling read_labeling(std::string_view text) {
  std::map<std::string, int> assignment;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto f = split_ws(line);
    if (f.empty()) return;
    if (f.size() != 2) throw ParseError("labeling line needs 2 fields", line_no);
    int c = 0;
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), c);
    if (ec != std::errc() || ptr != f[1].data() + f[1].size() || c < 0) {
      throw ParseError("malformed cluster id '" + std::string(f[1]) + "'", line_no);
    }
    if (!assignment.emplace(std::string(f[0]), c).second) {
      throw ParseError("duplicate id " + std::string(f[0]), line_no);
    }
  });
  return Labeling(std::move(assignment));
}

std::string write_scores(const std::vector<ScoredTrial>& scores) {
  std::string out;
  char buf[64];
  for (const auto& s : scores) {
    std::snprintf(buf, sizeof(buf), "%.6f", s.score);
    out += s.trial.enroll_id + " " + s.trial.test_id + " " + buf + "\n";
  }
  return out;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string normalized(line);
    std::replace(normalized.begin(), normalized.end(), '=', ' ');
    auto f = split_ws(normalized);
    if (f.empty()) return;
    if (f.size() != 2) throw ParseError("expected 'key value'", line_no);
    kv[std::string(f[0])] = std::string(f[1]);
  });
  return kv;
}

double key_value_number(const std::map<std::string, std::string>& kv,
                        const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  return parse_number(it->second, 0, key.c_str());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace magdiar
