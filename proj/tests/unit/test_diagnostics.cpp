#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sdpcd/diagnostics.hpp"
#include "sdpcd/errors.hpp"
#include "sdpcd/solver.hpp"
#include "test_util.hpp"

using namespace sdpcd;

namespace {

// Spins s_i * R e_1: every clone lives on a single axis.
SpinConfig axis_config(const std::vector<int>& s, std::size_t m, std::uint64_t seed) {
  return testutil::rotate(testutil::signs_config(s, m), testutil::random_orthogonal(m, seed));
}

std::vector<int> random_signs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> s(n);
  for (int& x : s) x = (rng() & 1u) ? 1 : -1;
  return s;
}

}  // namespace

TEST(Overlap, Examples) {
  const std::vector<Label> a = {1, 1, -1, -1};
  EXPECT_DOUBLE_EQ(overlap(a, a), 1.0);
  EXPECT_DOUBLE_EQ(overlap(a, std::vector<Label>{-1, -1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(overlap(a, std::vector<Label>{1, -1, 1, -1}), 0.0);
  EXPECT_DOUBLE_EQ(overlap(a, std::vector<Label>{1, 1, 1, -1}), 0.5);
  EXPECT_DOUBLE_EQ(overlap(std::vector<Label>{}, std::vector<Label>{}), 0.0);
  EXPECT_THROW(overlap(a, std::vector<Label>{1, 1}), InvalidParameter);
}

TEST(Overlap, InRangeAndSymmetric) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = random_signs(101, seed);
    const auto y = random_signs(101, seed + 1000);
    const std::vector<Label> a(x.begin(), x.end()), b(y.begin(), y.end());
    const double q = overlap(a, b);
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, 1.0);
    EXPECT_EQ(q, overlap(b, a));
  }
}

TEST(CloneDistance, IdenticalAntipodalOrthogonal) {
  const SpinConfig a = testutil::signs_config({1, -1, 1}, 2);
  EXPECT_DOUBLE_EQ(clone_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(clone_distance(a, testutil::signs_config({-1, 1, -1}, 2)), 1.0);
  const SpinConfig ortho(3, 2, {0, 1, 0, 1, 0, -1});
  EXPECT_DOUBLE_EQ(clone_distance(a, ortho), 0.5);
  EXPECT_THROW(clone_distance(a, testutil::signs_config({1, 1}, 2)), InvalidParameter);
  EXPECT_THROW(clone_distance(a, testutil::signs_config({1, 1, 1}, 3)), InvalidParameter);
}

TEST(CloneDistance, SymmetricBoundedAndInvariantUnderCommonRotation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SpinConfig a = init_config(200, 5, seed);
    const SpinConfig b = init_config(200, 5, seed + 100);
    const double d = clone_distance(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_EQ(d, clone_distance(b, a));
    const auto r = testutil::random_orthogonal(5, seed);
    EXPECT_NEAR(d, clone_distance(testutil::rotate(a, r), testutil::rotate(b, r)), 1e-12);
  }
}

TEST(AlignRotation, IdentityWhenAlreadyAligned) {
  const SpinConfig a = testutil::signs_config({1, 1, -1, 1}, 3);
  const AlignedConfig out = align_rotation(a);
  EXPECT_EQ(out.config, a);
  EXPECT_TRUE(out.reliable);
}

TEST(AlignRotation, MapsPrincipalComponentToFirstAxis) {
  const SbmSample s = sbm_generate(params_from_snr(2000, 3.0, 1.5), 3);
  const Graph core = two_core(s.graph).core;
  SolverOptions o;
  o.rank = 5;
  o.epsilon = 1e-3;
  const SolverResult r = run_solver(core, o);
  const AlignedConfig out = align_rotation(r.config);
  ASSERT_TRUE(out.reliable);
  const PrincipalComponent pc = principal_component(component_covariance(out.config));
  EXPECT_NEAR(pc.direction[0], 1.0, 1e-9);
  EXPECT_LT(out.config.max_norm_error(), 1e-12);
  EXPECT_NEAR(objective(out.config, core), objective(r.config, core), 1e-8);
  // Reflection keeps all pairwise inner products, so the labels agree up to sign.
  EXPECT_DOUBLE_EQ(overlap(project_to_labels(out.config), project_to_labels(r.config)), 1.0);
}

TEST(AlignRotation, FlagsDegenerateCovariance) {
  // Four spins along +-e1, +-e2: Sigma = I/2.
  const SpinConfig c(4, 2, {1, 0, -1, 0, 0, 1, 0, -1});
  EXPECT_FALSE(align_rotation(c).reliable);
}

TEST(PairwiseDistances, SingleAxisClonesAlignToZero) {
  const auto s = random_signs(300, 1);
  std::vector<SpinConfig> clones;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) clones.push_back(axis_config(s, 4, seed));
  const auto raw = raw_pairwise_distances(clones);
  const auto aligned = aligned_pairwise_distances(clones);
  const auto proc = aligned_pairwise_distances(clones, AlignmentMode::kProcrustes);
  ASSERT_EQ(raw.distances.size(), 10u);
  ASSERT_EQ(aligned.distances.size(), 10u);
  bool any_raw_large = false;
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_NEAR(aligned.distances[k], 0.0, 1e-12);
    EXPECT_NEAR(proc.distances[k], 0.0, 1e-8);
    EXPECT_FALSE(aligned.flagged[k]);
    any_raw_large |= raw.distances[k] > 0.05;
  }
  EXPECT_TRUE(any_raw_large);
}

TEST(PairwiseDistances, RankOneSignFlip) {
  const std::vector<int> s = {1, -1, -1, 1, 1, 1};
  std::vector<int> neg(s);
  for (int& x : neg) x = -x;
  const std::vector<SpinConfig> clones = {testutil::signs_config(s, 1),
                                          testutil::signs_config(neg, 1)};
  EXPECT_DOUBLE_EQ(raw_pairwise_distances(clones).distances[0], 1.0);
  EXPECT_DOUBLE_EQ(aligned_pairwise_distances(clones).distances[0], 0.0);
}

TEST(PairwiseDistances, LexicographicPairOrder) {
  std::vector<SpinConfig> clones;
  for (std::uint64_t seed = 0; seed < 4; ++seed) clones.push_back(init_config(50, 3, seed));
  const auto raw = raw_pairwise_distances(clones);
  std::size_t k = 0;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      EXPECT_EQ(raw.distances[k++], clone_distance(clones[a], clones[b]));
    }
  }
  EXPECT_THROW(aligned_pairwise_distances(std::span(clones).first(1)), InvalidParameter);
}

TEST(ProcrustesDistance, FullRotationRecovered) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SpinConfig a = init_config(400, 6, seed);
    const SpinConfig b = testutil::rotate(a, testutil::random_orthogonal(6, seed + 7));
    EXPECT_NEAR(procrustes_distance(a, b), 0.0, 1e-9);
    EXPECT_GT(clone_distance(a, b), 0.1);
  }
}

TEST(ProcrustesDistance, NeverAboveOtherAlignments) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::vector<SpinConfig> clones = {init_config(300, 4, seed), init_config(300, 4, seed + 50)};
    const double p = procrustes_distance(clones[0], clones[1]);
    EXPECT_GE(p, -1e-12);
    EXPECT_LE(p, raw_pairwise_distances(clones).distances[0] + 1e-12);
    EXPECT_LE(p, aligned_pairwise_distances(clones).distances[0] + 1e-12);
  }
}

TEST(Histogram, CountsAndClamping) {
  const std::vector<double> v = {0.0, 0.01, 0.019, 0.02, 0.5, 0.999, 1.0, 1.3, -0.2};
  const DistanceHistogram h = make_histogram(v, true);
  ASSERT_EQ(h.counts.size(), 50u);
  ASSERT_EQ(h.edges.size(), 51u);
  EXPECT_EQ(h.total, v.size());
  EXPECT_EQ(h.counts[0], 4u);   // 0, 0.01, 0.019, -0.2
  EXPECT_EQ(h.counts[1], 1u);   // 0.02
  EXPECT_EQ(h.counts[25], 1u);  // 0.5
  EXPECT_EQ(h.counts[49], 3u);  // 0.999, 1.0, 1.3
  std::size_t sum = 0;
  for (auto c : h.counts) sum += c;
  EXPECT_EQ(sum, v.size());
  EXPECT_DOUBLE_EQ(h.edges.front(), 0.0);
  EXPECT_DOUBLE_EQ(h.edges.back(), 1.0);
  EXPECT_THROW(make_histogram(v, false, 0), InvalidParameter);
  EXPECT_THROW(make_histogram(v, false, 10, 1.0, 1.0), InvalidParameter);
}

TEST(Histogram, CsvRows) {
  const DistanceHistogram h = make_histogram(std::vector<double>{0.25}, false, 4);
  std::ostringstream out;
  write_histogram_csv(out, h);
  EXPECT_EQ(out.str(),
            "bin_lo,bin_hi,count,aligned\n"
            "0,0.25,0,false\n"
            "0.25,0.5,1,false\n"
            "0.5,0.75,0,false\n"
            "0.75,1,0,false\n");
}

TEST(Quantile, Interpolates) {
  const std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0 / 3.0), 2.0);
  EXPECT_DOUBLE_EQ(quantile({7.0}, 0.3), 7.0);
  EXPECT_THROW(quantile({}, 0.5), InvalidParameter);
}
