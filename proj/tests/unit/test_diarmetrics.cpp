// tests/unit/test_diarmetrics.cpp

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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "magdiar/diarmetrics.hpp"
#include "magdiar/hungarian.hpp"
#include "magdiar/random.hpp"
#include "oracles.hpp"

using namespace magdiar;
using fixture::ann;
using fixture::turn;

namespace {

std::vector<Turn> random_turns(Rng& rng, const std::string& prefix, int n_spk, int n_turns,
                               double horizon) {
  std::vector<Turn> turns;
  for (int k = 0; k < n_turns; ++k) {
    const double s = static_cast<double>(rng.below(static_cast<std::uint64_t>(horizon * 1000))) / 1000.0;
    const double d = static_cast<double>(50 + rng.below(4000)) / 1000.0;
    turns.push_back(turn(prefix + std::to_string(rng.below(n_spk)), s, s + d));
  }
  return Annotation(turns).normalized().turns();
}

}  // namespace

TEST_SUITE("diarmetrics") {

TEST_CASE("hungarian assignment matches brute force") {
  Matrix w(2, 2);
  w << 5, 1, 1, 4;
  CHECK(max_weight_assignment(w) == std::vector<int>{0, 1});
  Rng rng(2);
  for (int rep = 0; rep < 300; ++rep) {
    const int r = 1 + static_cast<int>(rng.below(5)), c = 1 + static_cast<int>(rng.below(5));
    Matrix m(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) m(i, j) = rep % 3 == 0 ? static_cast<double>(rng.below(3)) : rng.uniform(0, 10);
    }
    const auto a = max_weight_assignment(m);
    double total = 0.0;
    std::vector<int> used;
    for (int i = 0; i < r; ++i) {
      if (a[i] < 0) continue;
      CHECK(std::find(used.begin(), used.end(), a[i]) == used.end());
      used.push_back(a[i]);
      total += m(i, a[i]);
    }
    CHECK(total == doctest::Approx(oracle::best_assignment_weight(m)));
  }
}

TEST_CASE("optimal mapping fixtures") {
  const Annotation ref = ann({turn("A", 0, 6), turn("B", 6, 11)});
  const Annotation hyp = ann({turn("s1", 0, 5), turn("s2", 5, 6), turn("s1", 6, 7), turn("s2", 7, 11)});
  const SpeakerMapping m = optimal_mapping(ref, hyp);
  CHECK(m.at("s1") == "A");
  CHECK(m.at("s2") == "B");
  CHECK(optimal_mapping(ref, Annotation()).empty());
  const SpeakerMapping same = optimal_mapping(ref, ann({turn("x", 0, 6), turn("y", 6, 11)}));
  CHECK(same.at("x") == "A");
  CHECK(same.at("y") == "B");
}

TEST_CASE("DER hand fixtures") {
  DiarizationReport r = der(ann({turn("A", 0, 10)}), ann({turn("A", 0, 8)}));
  CHECK(r.miss_s == doctest::Approx(2.0));
  CHECK(r.der == doctest::Approx(0.2).epsilon(1e-12));

  const Annotation ref = ann({turn("A", 0, 5), turn("B", 5, 10)});
  const Annotation hyp = ann({turn("s1", 0, 6), turn("s2", 6, 10)});
  r = der(ref, hyp);
  CHECK(r.confusion_s == doctest::Approx(1.0));
  CHECK(r.der == doctest::Approx(0.1).epsilon(1e-12));

  const JerResult j = jer(ref, hyp);
  CHECK(j.per_speaker.at("A") == doctest::Approx(1.0 - 5.0 / 6.0));
  CHECK(j.per_speaker.at("B") == doctest::Approx(1.0 - 4.0 / 5.0));
  CHECK(j.jer == doctest::Approx(11.0 / 60.0).epsilon(1e-12));
}

TEST_CASE("self scoring, empty hypothesis and undefined cases") {
  Rng rng(1);
  const Annotation ref(random_turns(rng, "S", 3, 12, 60));
  for (double collar : {0.0, 0.25, 1.0}) {
    for (bool ov : {true, false}) CHECK(der(ref, ref, collar, ov).der == 0.0);
  }
  CHECK(jer(ref, ref).jer == 0.0);
  CHECK(jer(ref, Annotation()).jer == 1.0);
  CHECK(der(ref, Annotation()).der == doctest::Approx(1.0));
  CHECK_FALSE(der(Annotation(), ref).der_defined);
  CHECK_FALSE(jer(Annotation(), ref).defined);
}

TEST_CASE("collar and overlap exclusion") {
  const Annotation ref = ann({turn("A", 0, 5), turn("B", 4, 10)});
  const Annotation hyp = ann({turn("s1", 0, 5), turn("s2", 5, 10)});
  const DiarizationReport strict = score_diarization(ref, hyp, 0.0, true);
  const DiarizationReport forgiving = score_diarization(ref, hyp, 0.25, false);
  CHECK(strict.miss_s == doctest::Approx(1.0));
  CHECK(forgiving.der == 0.0);
  CHECK(forgiving.excluded_s > 0.0);
  CHECK(forgiving.total_ref_s < strict.total_ref_s);
  CHECK(format_report(forgiving).find("0.25 no") != std::string::npos);
}

TEST_CASE("DER agrees with a millisecond tick oracle") {
  Rng rng(123);
  for (int rep = 0; rep < 60; ++rep) {
    const auto ref = random_turns(rng, "R", 1 + static_cast<int>(rng.below(3)), 8, 20);
    const auto hyp = random_turns(rng, "H", 1 + static_cast<int>(rng.below(4)), 8, 20);
    const double collar = rep % 3 == 0 ? 0.0 : 0.25 * static_cast<double>(rep % 3);
    const bool ov = rep % 2 == 0;
    const DiarizationReport r = der(Annotation(ref), Annotation(hyp), collar, ov);
    const auto o = oracle::der_ticks(ref, hyp, collar, ov);
    CHECK(r.miss_s == doctest::Approx(o.miss).epsilon(1e-9));
    CHECK(r.fa_s == doctest::Approx(o.fa).epsilon(1e-9));
    CHECK(r.confusion_s == doctest::Approx(o.conf).epsilon(1e-9));
    CHECK(r.total_ref_s == doctest::Approx(o.total).epsilon(1e-9));
  }
}

TEST_CASE("DER and JER ignore hypothesis speaker names") {
  Rng rng(55);
  for (int rep = 0; rep < 50; ++rep) {
    const auto ref = random_turns(rng, "R", 3, 10, 30);
    auto hyp = random_turns(rng, "H", 3, 10, 30);
    const DiarizationReport a = score_diarization(Annotation(ref), Annotation(hyp));
    const std::vector<std::string> names{"x", "y", "z"};
    const std::size_t shift = rng.below(3);
    for (auto& t : hyp) t.speaker = names[(t.speaker.back() - '0' + shift) % 3];
    const DiarizationReport b = score_diarization(Annotation(ref), Annotation(hyp));
    CHECK(a.der == doctest::Approx(b.der).epsilon(1e-12));
    CHECK(a.jer == doctest::Approx(b.jer).epsilon(1e-12));
  }
}

TEST_CASE("truncating the hypothesis never raises false alarm") {
  Rng rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    const auto ref = random_turns(rng, "R", 2, 8, 20);
    auto hyp = random_turns(rng, "H", 2, 8, 20);
    const DiarizationReport before = der(Annotation(ref), Annotation(hyp));
    hyp.erase(hyp.begin() + static_cast<long>(rng.below(hyp.size())));
    const DiarizationReport after = der(Annotation(ref), Annotation(hyp));
    CHECK(after.fa_s <= before.fa_s + 1e-9);
    CHECK(after.miss_s >= before.miss_s - 1e-9);
  }
}

TEST_CASE("multi-recording scoring sums seconds") {
  const Annotation ref = ann({turn("A", 0, 10, "r1"), turn("A", 0, 10, "r2")});
  const Annotation hyp = ann({turn("x", 0, 8, "r1"), turn("y", 0, 10, "r2")});
  const DiarizationReport r = score_diarization(ref, hyp);
  CHECK(r.total_ref_s == doctest::Approx(20.0));
  CHECK(r.der == doctest::Approx(0.1));
  CHECK(r.per_speaker_jer.count("r1:A") == 1);
}

TEST_CASE("report layout") {
  const std::string text = format_report(score_diarization(ann({turn("A", 0, 10)}), ann({turn("A", 0, 8)})));
  CHECK(text ==
        "collar overlap DER% MISS% FA% CONF% JER% scored_s excluded_s\n"
        "0.00 yes 20.00 20.00 0.00 0.00 20.00 10.000 0.000\n");
}

}  // TEST_SUITE
