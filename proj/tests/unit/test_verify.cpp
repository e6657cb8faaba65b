// tests/unit/test_verify.cpp

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
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "magdiar/error.hpp"
#include "magdiar/random.hpp"
#include "magdiar/verify.hpp"
#include "oracles.hpp"

using namespace magdiar;
using fixture::emb;
using fixture::vec;

namespace {

GmeEmbedding gme(const Vector& a) {
  const double r = a.norm();
  return {a / r, r};
}

Vector random_unit(Rng& rng, int d) {
  Vector v = rng.normal_vector(d);
  return v / v.norm();
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("cosine fixtures") {
  CHECK(cosine_score(emb("a", {1, 0}), emb("b", {1, 0})) == doctest::Approx(1.0));
  CHECK(cosine_score(emb("a", {1, 0}), emb("b", {0, 1})) == doctest::Approx(0.0));
  CHECK(cosine_score(emb("a", {1, 0}), emb("b", {-1, 0})) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine_score(emb("a", {0, 0}), emb("b", {1, 0})), Error);
}

TEST_CASE("to_gme fixtures") {
  GmeEmbedding g = to_gme(emb("a", {3, 4}, 0, 5), {1, 0, 20});
  CHECK(g.direction[0] == doctest::Approx(0.6));
  CHECK(g.direction[1] == doctest::Approx(0.8));
  CHECK(g.precision == doctest::Approx(5.0));
  CHECK(to_gme(emb("a", {3, 4}, 0, 5), {0.2, 0, 20}).precision == doctest::Approx(1.0));
  CHECK(to_gme(emb("a", {3, 4}, 0, 40), {1, 1, 20}).precision == doctest::Approx(25.0));
  CHECK_THROWS_AS(to_gme(emb("a", {0, 0}), {}), Error);
}

TEST_CASE("gme_llr closed-form fixtures") {
  const double same = 1.6 - 2.0 / 3.0 - 2.0 / 3.0 + std::log(1.8);
  const double opposed = -2.0 / 3.0 - 2.0 / 3.0 + std::log(1.8);
  CHECK(same == doctest::Approx(0.8544).epsilon(1e-4));
  CHECK(opposed == doctest::Approx(-0.7455).epsilon(1e-4));
  CHECK(gme_llr(gme(vec({2, 0})), gme(vec({2, 0}))) == doctest::Approx(same).epsilon(1e-12));
  CHECK(gme_llr(gme(vec({2, 0})), gme(vec({-2, 0}))) == doctest::Approx(opposed).epsilon(1e-12));
  const GmeEmbedding tiny1{vec({1, 0}), 1e-9}, tiny2{vec({0, 1}), 1e-9};
  CHECK(std::abs(gme_llr(tiny1, tiny2)) < 1e-8);
  CHECK_THROWS_AS(gme_llr(gme(vec({1, 0})), gme(vec({1, 0, 0}))), Error);
}

TEST_CASE("gme_llr agrees with Monte-Carlo integration") {
  Rng rng(2024);
  struct Case {
    Vector a1, a2;
  };
  std::vector<Case> cases{{vec({2, 0}), vec({2, 0})}, {vec({2, 0}), vec({-2, 0})}};
  for (int k = 0; k < 4; ++k) {
    const int d = 1 + static_cast<int>(rng.below(4));
    cases.push_back({rng.uniform(0.3, 3) * random_unit(rng, d), rng.uniform(0.3, 3) * random_unit(rng, d)});
  }
  for (const auto& c : cases) {
    const double exact = gme_llr(gme(c.a1), gme(c.a2));
    const auto mc = oracle::gme_llr_monte_carlo(c.a1, c.a1.norm(), c.a2, c.a2.norm(), 200000, rng);
    CHECK(std::abs(exact - mc.mean) <= 3.0 * mc.stderr_);
  }
}

TEST_CASE("gme_llr symmetry and cosine affinity") {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + static_cast<int>(rng.below(6));
    const GmeEmbedding g1{random_unit(rng, d), rng.uniform(0.1, 50)};
    const GmeEmbedding g2{random_unit(rng, d), rng.uniform(0.1, 50)};
    CHECK(gme_llr(g1, g2) == gme_llr(g2, g1));

    // For fixed precisions the LLR is A cos + B with A = r1 r2 / (r1 + r2 + 1).
    const GmeEmbedding g3{random_unit(rng, d), g2.precision};
    const double slope = g1.precision * g2.precision / (g1.precision + g2.precision + 1.0);
    const double dcos = g1.direction.dot(g2.direction) - g1.direction.dot(g3.direction);
    CHECK(gme_llr(g1, g2) - gme_llr(g1, g3) == doctest::Approx(slope * dcos).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("same-precision LLR ranking equals cosine ranking") {
  Rng rng(12);
  const double r = 7.0;
  std::vector<Embedding> items;
  for (int k = 0; k < 30; ++k) items.push_back(emb("e" + std::to_string(k), r * random_unit(rng, 5), k, k + 1.0));
  const EmbeddingSet set(items);
  TrialList trials;
  for (int k = 0; k + 1 < 30; ++k) trials.push_back({set[k].id, set[k + 1].id, k % 2 == 0});
  const auto cos = score_trials(set, trials, CosineBackend{});
  const auto llr = score_trials(set, trials, GmeBackend{});
  for (std::size_t i = 0; i < trials.size(); ++i) {
    for (std::size_t j = 0; j < trials.size(); ++j) {
      if (cos[i].score < cos[j].score) CHECK(llr[i].score < llr[j].score);
    }
  }
}

TEST_CASE("score_trials resolves ids, is symmetric and composes") {
  const EmbeddingSet set({emb("a", {3, 4}, 0, 2), emb("b", {1, -2}, 2, 9), emb("c", {0.5, 0.5}, 9, 10)});
  const TrialList trials{{"a", "b", true}, {"b", "a", true}, {"a", "a", true}};
  const PrecisionParams p{0.3, 0.2, 20};
  for (const ScoringBackend& backend : {ScoringBackend{CosineBackend{}}, ScoringBackend{GmeBackend{p}}}) {
    const auto s = score_trials(set, trials, backend);
    CHECK(s[0].score == s[1].score);
  }
  CHECK(score_trials(set, trials, CosineBackend{})[2].score == doctest::Approx(1.0));
  const auto g = score_trials(set, trials, GmeBackend{p});
  CHECK(g[0].score == gme_llr(to_gme(set.at("a"), p), to_gme(set.at("b"), p)));
  try {
    score_trials(set, {{"a", "zz", false}}, CosineBackend{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
}

TEST_CASE("eer fixtures") {
  const std::vector<double> tar{0.9, 0.8, 0.4}, non{0.5, 0.2, 0.1};
  CHECK(eer(tar, non) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(oracle::eer_sweep(tar, non) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(eer(std::vector<double>{3, 4}, std::vector<double>{1, 2}) == 0.0);
  std::vector<double> nt, nn;
  for (double v : tar) nt.push_back(-v);
  for (double v : non) nn.push_back(-v);
  CHECK(eer(nn, nt) == doctest::Approx(eer(tar, non)));
  CHECK_THROWS_AS(eer(std::vector<double>{}, non), Error);
}

TEST_CASE("eer and min_dcf agree with brute-force sweeps on random scores") {
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> tar, non;
    const int nt = 1 + static_cast<int>(rng.below(40)), nn = 1 + static_cast<int>(rng.below(40));
    const bool coarse = rep % 2 == 0;  // many ties
    for (int k = 0; k < nt; ++k) tar.push_back(coarse ? static_cast<double>(rng.below(6)) + 1 : rng.normal() + 1);
    for (int k = 0; k < nn; ++k) non.push_back(coarse ? static_cast<double>(rng.below(6)) : rng.normal());
    const double e = eer(tar, non);
    CHECK(e == doctest::Approx(oracle::eer_sweep(tar, non)).epsilon(1e-12).scale(1.0));
    const double p = rng.uniform(0.001, 0.5);
    const double dcf = min_dcf(tar, non, p);
    CHECK(dcf == doctest::Approx(oracle::min_dcf_sweep(tar, non, p)).epsilon(1e-12).scale(1.0));
    CHECK(dcf >= 0.0);
    CHECK(dcf <= 1.0 + 1e-12);

    // Invariance under a strictly increasing transform.
    std::vector<double> ttar, tnon;
    for (double v : tar) ttar.push_back(std::exp(2 * v) + 3);
    for (double v : non) tnon.push_back(std::exp(2 * v) + 3);
    CHECK(eer(ttar, tnon) == doctest::Approx(e).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("min_dcf fixture") {
  const std::vector<double> tar{0.9, 0.8, 0.4}, non{0.5, 0.2, 0.1};
  CHECK(min_dcf(tar, non, 0.01) == doctest::Approx(1.0 / 3.0));
  CHECK(min_dcf(std::vector<double>{3, 4}, std::vector<double>{1, 2}, 0.01) == 0.0);
  CHECK_THROWS_AS(min_dcf(tar, non, 1.0), Error);
}

TEST_CASE("rejection curve") {
  // Low-confidence trials (small magnitudes) carry all the errors.
  std::vector<Embedding> items;
  TrialList trials;
  int id = 0;
  auto add = [&](const Vector& v) {
    items.push_back(emb("u" + std::to_string(id), v, id, id + 1.0));
    return "u" + std::to_string(id++);
  };
  for (int k = 0; k < 40; ++k) {
    const bool target = k % 2 == 0;
    const double m = 100;
    const std::string a = add(vec({m, 0})), b = add(target ? vec({m, 1}) : vec({0, m}));
    trials.push_back({a, b, target});
  }
  for (int k = 0; k < 10; ++k) {
    const bool target = k % 2 == 0;
    const std::string a = add(vec({1, 0})), b = add(target ? vec({0, 1}) : vec({1, 0.01}));
    trials.push_back({a, b, target});
  }
  const EmbeddingSet set(items);
  const std::vector<double> fr{0.0, 0.2, 0.99};
  const auto curve = rejection_curve(set, trials, CosineBackend{}, fr);
  REQUIRE(curve.size() == 3);
  const auto full = evaluate_scores(score_trials(set, trials, CosineBackend{}));
  REQUIRE(curve[0].eer.has_value());
  CHECK(*curve[0].eer == doctest::Approx(full.eer));
  CHECK(*curve[0].eer > 0.0);
  CHECK(curve[1].kept == 40);
  REQUIRE(curve[1].eer.has_value());
  CHECK(*curve[1].eer == 0.0);
  CHECK(curve[2].kept == 1);
  CHECK_FALSE(curve[2].eer.has_value());
}

TEST_CASE("rejection with equal confidences drops a stable prefix") {
  Rng rng(77);
  std::vector<Embedding> items;
  TrialList trials;
  // Every vector has norm exactly 10.
  const std::vector<Vector> pool{vec({6, 8, 0}), vec({8, -6, 0}), vec({0, 6, 8}), vec({-8, 0, 6}),
                                 vec({0, -10, 0}), vec({6, 0, -8})};
  for (int k = 0; k < 40; ++k) items.push_back(emb("e" + std::to_string(k), pool[rng.below(pool.size())], k, k + 1.0));
  const EmbeddingSet set(items);
  for (int k = 0; k + 1 < 40; ++k) trials.push_back({set[k].id, set[k + 1].id, k % 3 == 0});
  const std::vector<double> fr{0.25};
  const auto curve = rejection_curve(set, trials, CosineBackend{}, fr);
  const TrialList rest(trials.begin() + 9, trials.end());
  const auto expected = evaluate_scores(score_trials(set, rest, CosineBackend{}));
  REQUIRE(curve[0].eer.has_value());
  CHECK(*curve[0].eer == doctest::Approx(expected.eer));
}

}  // TEST_SUITE
