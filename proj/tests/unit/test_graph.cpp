#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "frozen_oracles.hpp"
#include "sdpcd/errors.hpp"
#include "sdpcd/graph.hpp"
#include "test_util.hpp"

using namespace sdpcd;
using testutil::graph_of;

namespace {

void expect_simple_and_symmetric(const Graph& g) {
  std::size_t degree_sum = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const auto nb = g.neighbors(v);
    degree_sum += nb.size();
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end()) << "duplicate neighbor of " << v;
    for (VertexId u : nb) {
      EXPECT_NE(u, v);
      EXPECT_LT(u, g.num_vertices());
      EXPECT_TRUE(g.has_edge(u, v));
    }
  }
  EXPECT_EQ(degree_sum, 2 * g.num_edges());
  for (const Edge& e : g.edges()) EXPECT_LT(e.u, e.v);
}

}  // namespace

TEST(Graph, FromEdgesNormalizesAndSorts) {
  const Graph g = graph_of(4, {{3, 1}, {0, 2}, {2, 1}});
  ASSERT_EQ(g.num_edges(), 3u);
  EXPECT_EQ(g.edges()[0], (Edge{0, 2}));
  EXPECT_EQ(g.edges()[1], (Edge{1, 2}));
  EXPECT_EQ(g.edges()[2], (Edge{1, 3}));
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_TRUE(g.has_edge(3, 1));
  EXPECT_FALSE(g.has_edge(0, 3));
  EXPECT_DOUBLE_EQ(g.mean_degree(), 1.5);
  expect_simple_and_symmetric(g);
}

TEST(Graph, RejectsSelfLoopsDuplicatesAndOutOfRange) {
  EXPECT_THROW(graph_of(3, {{1, 1}}), InvalidParameter);
  EXPECT_THROW(graph_of(3, {{0, 1}, {1, 0}}), InvalidParameter);
  EXPECT_THROW(graph_of(3, {{0, 3}}), InvalidParameter);
}

TEST(Graph, EmptyGraph) {
  const Graph g = Graph::from_edges(0, {});
  EXPECT_EQ(g.num_vertices(), 0u);
  EXPECT_EQ(g.mean_degree(), 0.0);
}

TEST(ParamsFromSnr, MatchesIndependentInversion) {
  const SbmParams a = params_from_snr(1000, 3.0, 1.2);
  EXPECT_NEAR(a.c_in, oracle::kCin_c3_l12, 1e-12);
  EXPECT_NEAR(a.c_out, oracle::kCout_c3_l12, 1e-12);
  const SbmParams b = params_from_snr(1000, 5.0, 1.0);
  EXPECT_NEAR(b.c_in, oracle::kCin_c5_l1, 1e-12);
  EXPECT_NEAR(b.c_out, oracle::kCout_c5_l1, 1e-12);
}

TEST(ParamsFromSnr, RoundTripRecoversMeanDegreeAndSnr) {
  for (double c : {1.5, 3.0, 5.0, 12.0}) {
    for (double lambda : {0.0, 0.3, 1.0, std::sqrt(c)}) {
      const SbmParams p = params_from_snr(100, c, lambda);
      EXPECT_NEAR(p.mean_degree(), c, 1e-12);
      EXPECT_NEAR(p.snr(), lambda, 1e-12);
    }
  }
}

TEST(ParamsFromSnr, RejectsNegativeCoutAndNamesTheBound) {
  try {
    params_from_snr(100, 3.0, 2.0);
    FAIL() << "expected InvalidParameter";
  } catch (const InvalidParameter& e) {
    EXPECT_NE(std::string(e.what()).find("sqrt(c)"), std::string::npos) << e.what();
  }
  EXPECT_THROW(params_from_snr(100, 0.0, 0.5), InvalidParameter);
}

TEST(SbmGenerate, RejectsOddSizeAndInvalidProbabilities) {
  EXPECT_THROW(sbm_generate(SbmParams{11, 3.0, 1.0}, 1), InvalidParameter);
  EXPECT_THROW(sbm_generate(SbmParams{10, 12.0, 1.0}, 1), InvalidParameter);
  EXPECT_THROW(sbm_generate(SbmParams{10, 3.0, -1.0}, 1), InvalidParameter);
}

TEST(SbmGenerate, BalancedLabelsFirstHalfPositive) {
  const SbmSample s = sbm_generate(SbmParams{100, 5.0, 1.0}, 3);
  ASSERT_EQ(s.partition.labels.size(), 100u);
  int sum = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_EQ(s.partition.labels[i], i < 50 ? 1 : -1);
    sum += s.partition.labels[i];
  }
  EXPECT_EQ(sum, 0);
  expect_simple_and_symmetric(s.graph);
}

TEST(SbmGenerate, FixedSeedIsBitReproducible) {
  const SbmParams p = params_from_snr(5000, 3.0, 1.2);
  EXPECT_EQ(sbm_generate(p, 99).graph, sbm_generate(p, 99).graph);
  EXPECT_FALSE(sbm_generate(p, 99).graph == sbm_generate(p, 100).graph);
}

TEST(SbmGenerate, ExtremeProbabilities) {
  const SbmSample full = sbm_generate(SbmParams{6, 6.0, 0.0}, 1);
  EXPECT_EQ(full.graph.num_edges(), 6u);  // two triangles
  const SbmSample bip = sbm_generate(SbmParams{6, 0.0, 6.0}, 1);
  EXPECT_EQ(bip.graph.num_edges(), 9u);  // K_{3,3}
  const SbmSample none = sbm_generate(SbmParams{6, 0.0, 0.0}, 1);
  EXPECT_EQ(none.graph.num_edges(), 0u);
}

TEST(SbmGenerate, EdgeDensitiesMatchWithinFourStandardErrors) {
  const std::size_t n = 200;
  const double c_in = 8.0, c_out = 2.0;
  const std::size_t seeds = 120;
  double intra = 0.0, inter = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const SbmSample smp = sbm_generate(SbmParams{n, c_in, c_out}, 1000 + s);
    for (const Edge& e : smp.graph.edges()) {
      (smp.partition.labels[e.u] == smp.partition.labels[e.v] ? intra : inter) += 1.0;
    }
  }
  const double half = n / 2.0;
  const double intra_pairs = seeds * 2.0 * half * (half - 1) / 2.0;
  const double inter_pairs = seeds * half * half;
  const double p_in = c_in / n, p_out = c_out / n;
  EXPECT_NEAR(intra / intra_pairs, p_in, 4.0 * std::sqrt(p_in * (1 - p_in) / intra_pairs));
  EXPECT_NEAR(inter / inter_pairs, p_out, 4.0 * std::sqrt(p_out * (1 - p_out) / inter_pairs));
}

TEST(TwoCore, PrunesTreesAndRecordsAttachments) {
  // Triangle 0-1-2, path 2-3-4, pendant 5 on 1, isolated 6, separate tree 7-8-9.
  const Graph g = graph_of(10, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {1, 5}, {7, 8}, {8, 9}});
  const TwoCore tc = two_core(g);
  ASSERT_EQ(tc.core.num_vertices(), 3u);
  EXPECT_EQ(tc.core.num_edges(), 3u);
  const AttachmentForest& f = tc.forest;
  EXPECT_EQ(f.num_original(), 10u);
  EXPECT_EQ(f.num_core(), 3u);
  for (VertexId v : {0u, 1u, 2u}) {
    EXPECT_TRUE(f.in_core(v));
    EXPECT_EQ(f.attachment(v), v);
    EXPECT_EQ(f.core_vertices()[f.core_index(v)], v);
  }
  EXPECT_EQ(f.attachment(3), 2u);
  EXPECT_EQ(f.attachment(4), 2u);
  EXPECT_EQ(f.attachment(5), 1u);
  for (VertexId v : {6u, 7u, 8u, 9u}) {
    EXPECT_FALSE(f.in_core(v));
    EXPECT_EQ(f.attachment(v), kNoVertex);
  }
}

TEST(TwoCore, AttachmentIsAlwaysACoreVertex) {
  const SbmSample s = sbm_generate(params_from_snr(3000, 3.0, 1.2), 17);
  const TwoCore tc = two_core(s.graph);
  for (VertexId v = 0; v < s.graph.num_vertices(); ++v) {
    const VertexId a = tc.forest.attachment(v);
    if (a != kNoVertex) {
      EXPECT_TRUE(tc.forest.in_core(a));
    }
    if (tc.forest.in_core(v)) {
      EXPECT_EQ(a, v);
    }
  }
  for (VertexId v = 0; v < tc.core.num_vertices(); ++v) EXPECT_GE(tc.core.degree(v), 2u);
  expect_simple_and_symmetric(tc.core);
}

TEST(TwoCore, Idempotent) {
  for (Seed seed : {1, 2, 3}) {
    const SbmSample s = sbm_generate(params_from_snr(4000, 3.0, 1.0), seed);
    const Graph core = two_core(s.graph).core;
    const TwoCore again = two_core(core);
    EXPECT_EQ(again.core, core);
    EXPECT_EQ(again.forest.num_core(), core.num_vertices());
  }
}

TEST(TwoCore, TreeHasEmptyCore) {
  const TwoCore tc = two_core(graph_of(4, {{0, 1}, {1, 2}, {1, 3}}));
  EXPECT_EQ(tc.core.num_vertices(), 0u);
}

TEST(TwoCore, SizeOnPaperInstanceWithinThreePercent) {
  // 2-core of an SBM with n = 10^4, c = 3, lambda = 1.2: 7755 vertices, 13348 edges.
  for (Seed seed : {1, 2, 3, 4, 5}) {
    const SbmSample s = sbm_generate(params_from_snr(10000, 3.0, 1.2), seed);
    const Graph core = two_core(s.graph).core;
    EXPECT_NEAR(static_cast<double>(core.num_vertices()), 7755.0, 0.03 * 7755.0);
    EXPECT_NEAR(static_cast<double>(core.num_edges()), 13348.0, 0.03 * 13348.0);
  }
}

TEST(ExtendLabels, PendantTakesLabelOfItsAttachment) {
  const Graph g = graph_of(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
  const TwoCore tc = two_core(g);
  const std::vector<Label> core = {1, 1, -1};
  const auto full = extend_labels_to_trees(core, tc.forest);
  EXPECT_EQ(full, (std::vector<Label>{1, 1, -1, -1}));
}

TEST(ExtendLabels, EmptyForestLeavesLabelsUnchanged) {
  const Graph g = testutil::cycle(6);
  const TwoCore tc = two_core(g);
  const std::vector<Label> labels = {1, -1, -1, 1, 1, -1};
  EXPECT_EQ(extend_labels_to_trees(labels, tc.forest), labels);
  EXPECT_EQ(restrict_to_core(labels, tc.forest), labels);
}

TEST(ExtendLabels, CorelessComponentsGetPlusOne) {
  const TwoCore tc = two_core(graph_of(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}}));
  const auto full = extend_labels_to_trees(std::vector<Label>{-1, -1, -1}, tc.forest);
  EXPECT_EQ(full, (std::vector<Label>{-1, -1, -1, 1, 1, 1}));
}

TEST(ExtendLabels, DanglingAttachmentIsAConsistencyError) {
  // Vertex 2 claims to hang from vertex 1, which is not in the core.
  const AttachmentForest bad({0}, {0, kNoVertex, kNoVertex}, {0, 2, 1});
  EXPECT_THROW(extend_labels_to_trees(std::vector<Label>{1}, bad), ConsistencyError);
}

TEST(ExtendLabels, WrongCoreLengthIsRejected) {
  const TwoCore tc = two_core(testutil::cycle(4));
  EXPECT_THROW(extend_labels_to_trees(std::vector<Label>{1, 1}, tc.forest), InvalidParameter);
}

TEST(ExtendLabels, AgreesWithDirectLookupOnSbmInstances) {
  for (Seed seed : {5, 6}) {
    const SbmSample s = sbm_generate(params_from_snr(3000, 3.0, 1.2), seed);
    const TwoCore tc = two_core(s.graph);
    std::mt19937_64 rng(seed);
    std::vector<Label> core(tc.core.num_vertices());
    for (auto& l : core) l = (rng() & 1) ? 1 : -1;
    const auto full = extend_labels_to_trees(core, tc.forest);
    for (VertexId v = 0; v < s.graph.num_vertices(); ++v) {
      const VertexId a = tc.forest.attachment(v);
      const Label expected = a == kNoVertex ? Label{1} : core[tc.forest.core_index(a)];
      ASSERT_EQ(full[v], expected) << "vertex " << v;
    }
  }
}

TEST(Cliques, ZeroProbabilityIsIdentity) {
  const SbmSample s = sbm_generate(params_from_snr(2000, 3.0, 1.2), 4);
  EXPECT_EQ(add_neighborhood_cliques(s.graph, 0.0, 1), s.graph);
}

TEST(Cliques, StarCenterBecomesTriangleOnLeaves) {
  const Graph star = graph_of(4, {{0, 1}, {0, 2}, {0, 3}});
  const Graph g = add_neighborhood_cliques(star, 1.0, 7);
  EXPECT_EQ(g.num_edges(), 6u);
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_TRUE(g.has_edge(1, 3));
  EXPECT_TRUE(g.has_edge(2, 3));
}

TEST(Cliques, RejectsProbabilityOutsideUnitInterval) {
  EXPECT_THROW(add_neighborhood_cliques(testutil::cycle(4), -0.1, 1), InvalidParameter);
  EXPECT_THROW(add_neighborhood_cliques(testutil::cycle(4), 1.5, 1), InvalidParameter);
}

TEST(Cliques, NeverRemovesEdgesAndCoreIsClosed) {
  const SbmSample s = sbm_generate(params_from_snr(6000, 3.0, 1.2), 8);
  const Graph core = two_core(s.graph).core;
  for (double p : {1e-3, 1e-2, 0.1}) {
    const Graph h = add_neighborhood_cliques(core, p, 123);
    EXPECT_EQ(h.num_vertices(), core.num_vertices());
    for (const Edge& e : core.edges()) ASSERT_TRUE(h.has_edge(e.u, e.v));
    expect_simple_and_symmetric(h);
    EXPECT_EQ(two_core(h).core, h);
    EXPECT_EQ(add_neighborhood_cliques(core, p, 123), h);
  }
}

TEST(Cliques, EveryAddedEdgeJoinsTwoNeighborsOfSomeVertex) {
  const SbmSample s = sbm_generate(params_from_snr(3000, 3.0, 1.2), 9);
  const Graph core = two_core(s.graph).core;
  const Graph h = add_neighborhood_cliques(core, 0.05, 77);
  std::size_t added = 0;
  for (const Edge& e : h.edges()) {
    if (core.has_edge(e.u, e.v)) continue;
    ++added;
    bool witnessed = false;
    for (VertexId w : core.neighbors(e.u)) witnessed = witnessed || core.has_edge(w, e.v);
    EXPECT_TRUE(witnessed) << e.u << "-" << e.v;
  }
  EXPECT_GT(added, 0u);
}
