// tests/unit/test_cluster.cpp

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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "magdiar/cluster.hpp"
#include "magdiar/error.hpp"
#include "magdiar/random.hpp"
#include "magdiar/vbx.hpp"
#include "oracles.hpp"

using namespace magdiar;
using fixture::canonical;
using fixture::emb;
using fixture::vec;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) m.row(i++) = vec(row).transpose();
  return m;
}

Matrix four_points() { return rows({{1, 0}, {0.99, 0.14}, {0, 1}, {0.14, 0.99}}); }

Matrix random_similarity(Rng& rng, int n) {
  Matrix x(n, 3);
  for (int i = 0; i < n; ++i) x.row(i) = rng.normal_vector(3).transpose();
  return similarity_matrix(x, CosineMetric{});
}

// Two speakers at +-5 on the first axis, speaking in blocks of 10 frames.
struct TwoSpeakers {
  Matrix x;
  std::vector<int> truth;
};

TwoSpeakers two_speakers(Rng& rng, int n = 60, int d = 4) {
  TwoSpeakers t;
  t.x.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const int s = (i / 10) % 2;
    Vector center = Vector::Zero(d);
    center[0] = s == 0 ? 5.0 : -5.0;
    t.x.row(i) = (center + rng.normal_vector(d)).transpose();
    t.truth.push_back(s);
  }
  return t;
}

}  // namespace

TEST_SUITE("cluster") {

TEST_CASE("cosine similarity matrix") {
  const Matrix same = similarity_matrix(rows({{1, 2}, {2, 4}, {0.5, 1}}), CosineMetric{});
  CHECK(same.isApprox(Matrix::Ones(3, 3)));
  const Matrix orth = similarity_matrix(rows({{1, 0}, {0, 3}}), CosineMetric{});
  CHECK(orth(0, 1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(similarity_matrix(rows({{1, 0}, {0, 0}}), CosineMetric{}), Error);
}

TEST_CASE("plda llr agrees with the joint Gaussian oracle") {
  Rng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(2));
    const PldaParams p{rng.uniform(0.1, 5), rng.uniform(0.1, 5)};
    const Vector x1 = 2.0 * rng.normal_vector(d), x2 = 2.0 * rng.normal_vector(d);
    CHECK(plda_llr(p, x1, x2) ==
          doctest::Approx(oracle::plda_llr_joint(p.sigma_b2, p.sigma_w2, x1, x2)).epsilon(1e-10).scale(1.0));
    CHECK(plda_llr(p, x1, x2) == plda_llr(p, x2, x1));
  }
  Matrix x(5, 3);
  for (int i = 0; i < 5; ++i) x.row(i) = rng.normal_vector(3).transpose();
  const PldaParams p{2, 0.5};
  const Matrix s = similarity_matrix(x, PldaMetric{p});
  CHECK(s.isApprox(s.transpose(), 0.0));
  CHECK(s(1, 3) == doctest::Approx(plda_llr(p, x.row(1).transpose(), x.row(3).transpose())));
  CHECK_THROWS_AS(PldaParams({0, 1}).validate(), Error);
}

TEST_CASE("fit_plda recovers spherical variances") {
  Rng rng(5);
  std::vector<Embedding> items;
  std::vector<int> labels;
  const double b = 4.0, w = 0.25;
  for (int s = 0; s < 200; ++s) {
    const Vector y = std::sqrt(b) * rng.normal_vector(3);
    for (int k = 0; k < 20; ++k) {
      const int idx = s * 20 + k;
      items.push_back(emb("e" + std::to_string(idx), y + std::sqrt(w) * rng.normal_vector(3), idx, idx + 1.0));
      labels.push_back(s);
    }
  }
  const PldaParams p = fit_plda(EmbeddingSet(items), labels);
  CHECK(p.sigma_w2 == doctest::Approx(w).epsilon(0.05));
  CHECK(p.sigma_b2 == doctest::Approx(b).epsilon(0.15));
}

TEST_CASE("ahc_threshold boundary cases and the four-point fixture") {
  const Matrix sim = similarity_matrix(four_points(), CosineMetric{});
  CHECK(ahc_threshold(sim, 1.5) == std::vector<int>{0, 1, 2, 3});
  CHECK(ahc_threshold(sim, -1.0) == std::vector<int>{0, 0, 0, 0});
  CHECK(ahc_threshold(sim, 0.5) == std::vector<int>{0, 0, 1, 1});
  CHECK(ahc_threshold(sim, 0.5) == canonical(oracle::ahc_naive(sim, 0.5)));
  CHECK(ahc_k(sim, 2) == ahc_threshold(sim, 0.5));
  CHECK(ahc_k(sim, 4) == std::vector<int>{0, 1, 2, 3});
  CHECK(ahc_k(sim, 1) == std::vector<int>{0, 0, 0, 0});
  CHECK_THROWS_AS(ahc_k(sim, 0), Error);
  CHECK_THROWS_AS(ahc_k(sim, 5), Error);
}

TEST_CASE("ahc agrees with naive average linkage on random inputs") {
  Rng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(15));
    const Matrix sim = random_similarity(rng, n);
    const double thr = rng.uniform(-0.5, 0.9);
    CHECK(ahc_threshold(sim, thr) == canonical(oracle::ahc_naive(sim, thr)));
    const int k = 1 + static_cast<int>(rng.below(n));
    CHECK(ahc_k(sim, k) == canonical(oracle::ahc_naive(sim, 0.0, k)));
  }
}

TEST_CASE("ahc is invariant under permutation of the inputs") {
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(12));
    const Matrix sim = random_similarity(rng, n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Matrix ps(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) ps(i, j) = sim(perm[i], perm[j]);
    }
    const auto base = ahc_threshold(sim, 0.2);
    const auto permuted = ahc_threshold(ps, 0.2);
    std::vector<int> back(n);
    for (int i = 0; i < n; ++i) back[perm[i]] = permuted[i];
    CHECK(same_partition(base, back));
  }
}

TEST_CASE("vbx single-frame conjugate update") {
  const Matrix x = rows({{2, 0}});
  const std::vector<int> init{0};
  const VbxResult r = vbx_cluster(x, init, {1, 1}, VbxConfig{});
  REQUIRE(r.state.speaker_precisions.size() == 1);
  CHECK(r.state.speaker_precisions[0] == doctest::Approx(2.0));
  CHECK(r.state.speaker_means(0, 0) == doctest::Approx(1.0));
  CHECK(r.state.speaker_means(0, 1) == doctest::Approx(0.0));
  CHECK(r.labels == std::vector<int>{0});
}

TEST_CASE("vbx with zero variances equals the baseline exactly") {
  Rng rng(6);
  for (int rep = 0; rep < 5; ++rep) {
    const TwoSpeakers t = two_speakers(rng);
    const std::vector<int> init = ahc_threshold(similarity_matrix(t.x, CosineMetric{}), 0.5);
    const std::vector<double> zeros(t.x.rows(), 0.0);
    const VbxResult a = vbx_cluster(t.x, init, {25, 1}, VbxConfig{});
    const VbxResult b = vbx_cluster(t.x, init, {25, 1}, VbxConfig{}, zeros);
    CHECK(a.labels == b.labels);
    CHECK(a.state.elbo_trace == b.state.elbo_trace);
  }
}

TEST_CASE("vbx recovers two separated speakers") {
  int recovered = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const TwoSpeakers t = two_speakers(rng);
    const std::vector<int> init = ahc_threshold(similarity_matrix(t.x, CosineMetric{}), 0.0);
    const VbxResult r = vbx_cluster(t.x, init, {25, 1}, VbxConfig{});
    recovered += same_partition(r.labels, t.truth);
  }
  CHECK(recovered == 20);
}

TEST_CASE("vbx posterior invariants and ELBO monotonicity") {
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const TwoSpeakers t = two_speakers(rng, 80, 5);
    // Deliberately poor initialisation with four clusters.
    std::vector<int> init(t.x.rows());
    for (std::size_t i = 0; i < init.size(); ++i) init[i] = static_cast<int>(rng.below(4));
    VbxConfig cfg;
    cfg.min_cluster_mass = 0.0;
    cfg.elbo_rel_tol = 1e-12;
    std::vector<double> var(t.x.rows());
    for (double& v : var) v = rng.uniform(0, 2);
    const VbxResult r = vbx_cluster(t.x, init, {25, 1}, cfg, var);
    for (Eigen::Index i = 0; i < r.state.responsibilities.rows(); ++i) {
      CHECK(r.state.responsibilities.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (Eigen::Index s = 0; s < r.state.speaker_precisions.size(); ++s) CHECK(r.state.speaker_precisions[s] > 0);
    const auto& e = r.state.elbo_trace;
    for (std::size_t k = 1; k < e.size(); ++k) CHECK(e[k] >= e[k - 1] - 1e-8 * std::abs(e[k - 1]));
  }
}

TEST_CASE("vbx drops speakers with little mass") {
  Rng rng(10);
  const TwoSpeakers t = two_speakers(rng);
  std::vector<int> init(t.truth);
  init[5] = 2;  // a one-frame cluster
  const VbxResult r = vbx_cluster(t.x, init, {25, 1}, VbxConfig{});
  CHECK(r.state.speakers_dropped >= 1);
  CHECK(same_partition(r.labels, t.truth));
  CHECK_THROWS_AS(vbx_cluster(Matrix(0, 2), std::vector<int>{}, {1, 1}, VbxConfig{}), Error);
}

TEST_CASE("vbx_up_variances") {
  const EmbeddingSet set({emb("a", {3, 4}, 0, 1), emb("b", {1, 0}, 1, 2), emb("c", {6, 8}, 2, 3)});
  const auto v = vbx_up_variances(set, {1, 0, 20});
  CHECK(v[0] == doctest::Approx(0.2));
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] < v[0]);
  CHECK_THROWS_AS(vbx_up_variances(EmbeddingSet({emb("z", {0, 0})}), {1, 0, 20}), Error);
}

TEST_CASE("clustering config file") {
  const auto cfg = read_clustering_config("p_loop 0.5\nsigma_b2 3\nmax_speakers 4\n");
  CHECK(cfg.vbx.p_loop == 0.5);
  CHECK(cfg.plda.sigma_b2 == 3.0);
  CHECK(cfg.vbx.max_speakers == 4);
  CHECK(cfg.vbx.f_a == 1.0);
  CHECK_THROWS_AS(read_clustering_config("nope 1\n"), Error);
  CHECK_THROWS_AS(read_clustering_config("p_loop 1.5\n"), Error);
}

}  // TEST_SUITE
