#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "stereocut/graph_cut.hpp"
#include "stereocut/synth.hpp"

using namespace stereocut;

namespace {

EnergyGraph random_graph(std::mt19937& rng, std::size_t n, double max_value, bool integral) {
  auto draw = [&] {
    const double u = std::uniform_real_distribution<double>(0.0, max_value)(rng);
    return integral ? std::floor(u) : u;
  };
  EnergyGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes.push_back(i);
    g.cost0.push_back(draw());
    g.cost1.push_back(draw());
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (rng() % 3 == 0) {
        g.edges.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), draw()});
      }
    }
  }
  return g;
}

SparseGrid grid_of(std::vector<std::pair<VertexKey, GridVertex>> verts) {
  std::vector<std::pair<PackedKey, GridVertex>> packed;
  for (const auto& [k, v] : verts) packed.emplace_back(pack(k), v);
  std::sort(packed.begin(), packed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  GridParams p;
  return SparseGrid(p, std::move(packed), 0, true);
}

}  // namespace

TEST(GaussianAffinity, Examples) {
  const std::array<double, kGridDims> sigma{1, 1, 1, 1, 1, 1, 1};
  const VertexKey u{1, 2, 3, 4, 5, 1, 0};
  EXPECT_EQ(gaussian_affinity(u, u, sigma), 1.0);
  VertexKey v = u;
  v[3] += 1;
  EXPECT_NEAR(gaussian_affinity(u, v, sigma), 0.6065306597126334, 1e-15);
  v[0] -= 1;
  EXPECT_NEAR(gaussian_affinity(u, v, sigma), 0.36787944117144233, 1e-15);
}

TEST(BuildGraph, TwoAdjacentVerticesGiveOneEdge) {
  const auto grid = grid_of({{{0, 0, 0, 0, 0, 0, 0}, GridVertex{2, 1.5, 0.5}},
                             {{0, 0, 0, 1, 0, 0, 0}, GridVertex{3, 1, 2}}});
  const auto g = build_graph(grid, GraphParams{}, EnergyMode::FirstWindow);
  ASSERT_EQ(g.size(), 2u);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_NEAR(g.edges[0].weight, 0.6065306597126334 * 2 * 3, 1e-12);
  EXPECT_EQ(g.cost1[0], 0.5);
  EXPECT_EQ(g.cost0[0], 1.5);
}

TEST(BuildGraph, OnlyUnitStepsAreEdges) {
  const auto grid = grid_of({{{0, 0, 0, 0, 0, 0, 0}, GridVertex{1, 1, 0}},
                             {{1, 1, 0, 0, 0, 0, 0}, GridVertex{1, 1, 0}},
                             {{0, 0, 0, 0, 0, 2, 0}, GridVertex{1, 1, 0}}});
  EXPECT_TRUE(build_graph(grid, GraphParams{}, EnergyMode::FirstWindow).edges.empty());
}

TEST(BuildGraph, ZeroLambdaZeroesTerminalCosts) {
  const auto grid = grid_of({{{0, 0, 0, 0, 0, 0, 0}, GridVertex{2, 1.5, 0.5}},
                             {{0, 0, 0, 0, 0, 1, 0}, GridVertex{1, 0.25, 0.75}}});
  GraphParams params;
  params.lambda = 0.0;
  const auto g = build_graph(grid, params, EnergyMode::FirstWindow);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g.cost0[i], 0.0);
    EXPECT_EQ(g.cost1[i], 0.0);
  }
  const auto labels = min_cut(g);
  EXPECT_EQ(energy(g, labels).total, 0.0);
}

TEST(BuildGraph, PropagatedModeMixesMaskAffinities) {
  const auto grid = grid_of({{{0, 0, 0, 0, 0, 0, 0}, GridVertex{2, 1.5, 0.5, 4, 1}}});
  GraphParams params;
  params.lambda_d = 0.5;
  params.lambda_i = 2.0;
  const auto g = build_graph(grid, params, EnergyMode::Propagated);
  EXPECT_EQ(g.cost1[0], 0.5 * 0.5 + 2.0 * 1);
  EXPECT_EQ(g.cost0[0], 0.5 * 1.5 + 2.0 * 4);
}

TEST(BuildGraph, LiteralConventionSwapsCosts) {
  const auto grid = grid_of({{{0, 0, 0, 0, 0, 0, 0}, GridVertex{2, 1.5, 0.5}}});
  GraphParams params;
  params.literal_eq9 = true;
  const auto g = build_graph(grid, params, EnergyMode::FirstWindow);
  EXPECT_EQ(g.cost1[0], 1.5);
  EXPECT_EQ(g.cost0[0], 0.5);
}

TEST(BuildGraph, EmptyGridThrows) {
  try {
    build_graph(SparseGrid{}, GraphParams{}, EnergyMode::FirstWindow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
  }
}

TEST(Energy, Examples) {
  EnergyGraph g;
  g.nodes = {0, 1};
  g.cost0 = {10, 0};
  g.cost1 = {0, 10};
  g.edges = {{0, 1, 100}};
  EXPECT_EQ(energy(g, {1, 0}).total, 100.0);
  EXPECT_EQ(energy(g, {1, 0}).data, 0.0);
  EXPECT_EQ(energy(g, {0, 0}).total, 10.0);
  EXPECT_EQ(energy(g, {1, 1}).total, 10.0);
  EXPECT_THROW(energy(g, {1}), Error);

  EnergyGraph single;
  single.nodes = {0};
  single.cost0 = {0};
  single.cost1 = {3.5};
  EXPECT_EQ(energy(single, {1}).total, 3.5);
  EXPECT_EQ(energy(single, {0}).total, 0.0);
}

TEST(MinCut, CheaperLabelWins) {
  EnergyGraph g;
  g.nodes = {0};
  g.cost0 = {1};
  g.cost1 = {0};
  EXPECT_EQ(min_cut(g), (Labeling{1}));
}

TEST(MinCut, TiesPreferBackground) {
  EnergyGraph g;
  g.nodes = {0, 1};
  g.cost0 = {10, 0};
  g.cost1 = {0, 10};
  g.edges = {{0, 1, 100}};
  EXPECT_EQ(min_cut(g), (Labeling{0, 0}));

  EnergyGraph flat;
  flat.nodes = {0, 1, 2};
  flat.cost0 = flat.cost1 = {0, 0, 0};
  flat.edges = {{0, 1, 1}, {1, 2, 1}};
  EXPECT_EQ(min_cut(flat), (Labeling{0, 0, 0}));
}

TEST(MinCut, MatchesBruteForceOnRandomGraphs) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_graph(rng, 1 + rng() % 15, 10.0, false);
    const auto labels = min_cut(g);
    const auto [best, best_energy] = brute_force_mincut(g);
    ASSERT_NEAR(energy(g, labels).total, best_energy, 1e-9) << "trial " << trial;
  }
}

TEST(MinCut, ForegroundIsInEveryOptimum) {
  // Small integral costs produce many ties; a node labeled 1 must be 1 in
  // every optimal labeling.
  std::mt19937 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const auto g = random_graph(rng, n, 3.0, true);
    const auto labels = min_cut(g);
    const double best = brute_force_mincut(g).second;
    ASSERT_EQ(energy(g, labels).total, best);
    Labeling l(n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      for (std::size_t i = 0; i < n; ++i) l[i] = (bits >> i) & 1u;
      if (energy(g, l).total != best) continue;
      for (std::size_t i = 0; i < n; ++i) ASSERT_LE(labels[i], l[i]) << "trial " << trial;
    }
  }
}

TEST(MinCut, ScalingKeepsTheOptimum) {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_graph(rng, 2 + rng() % 10, 10.0, false);
    const auto labels = min_cut(g);
    const double e = energy(g, labels).total;
    const double k = 0.25 + (rng() % 100) / 10.0;
    for (auto& c : g.cost0) c *= k;
    for (auto& c : g.cost1) c *= k;
    for (auto& edge : g.edges) edge.weight *= k;
    const auto scaled = min_cut(g);
    EXPECT_NEAR(energy(g, labels).total, k * e, 1e-9 * k * (1 + e));
    EXPECT_NEAR(energy(g, scaled).total, brute_force_mincut(g).second, 1e-9 * k * (1 + e));
  }
}

TEST(MaxFlow, FlowEqualsMinimumEnergy) {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_graph(rng, 1 + rng() % 12, 10.0, false);
    MaxFlowGraph<double> mf;
    mf.add_nodes(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      mf.add_tweights(static_cast<int>(i), g.cost0[i], g.cost1[i]);
    }
    for (const auto& e : g.edges) {
      mf.add_edge(static_cast<int>(e.a), static_cast<int>(e.b), e.weight, e.weight);
    }
    ASSERT_NEAR(mf.maxflow(), brute_force_mincut(g).second, 1e-9);
  }
}

TEST(MaxFlow, DirectedTextbookNetwork) {
  // s->0 (16), s->1 (13), 0->1 (10), 1->0 (4), 0->2 (12), 2->1 (9),
  // 1->3 (14), 3->2 (7), 2->t (20), 3->t (4); maximum flow 23.
  MaxFlowGraph<int> mf;
  mf.add_nodes(4);
  mf.add_tweights(0, 16, 0);
  mf.add_tweights(1, 13, 0);
  mf.add_tweights(2, 0, 20);
  mf.add_tweights(3, 0, 4);
  mf.add_edge(0, 1, 10, 4);
  mf.add_edge(0, 2, 12, 0);
  mf.add_edge(2, 1, 9, 0);
  mf.add_edge(1, 3, 14, 0);
  mf.add_edge(3, 2, 7, 0);
  EXPECT_EQ(mf.maxflow(), 23);
  EXPECT_TRUE(mf.in_source_set(0));
  EXPECT_TRUE(mf.in_source_set(1));
  EXPECT_FALSE(mf.in_source_set(2));
  EXPECT_TRUE(mf.in_source_set(3));
}

TEST(BruteForce, RejectsLargeGraphs) {
  EnergyGraph g;
  g.nodes.assign(21, 0);
  g.cost0.assign(21, 0.0);
  g.cost1.assign(21, 0.0);
  try {
    brute_force_mincut(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
}

TEST(BruteForce, NoLabelingBeatsIt) {
  std::mt19937 rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const auto g = random_graph(rng, n, 10.0, false);
    const double best = brute_force_mincut(g).second;
    Labeling l(n);
    for (int probe = 0; probe < 20; ++probe) {
      for (auto& v : l) v = rng() & 1u;
      ASSERT_LE(best, energy(g, l).total);
    }
  }
}

TEST(DumpGraph, NodeAndEdgeLines) {
  const auto grid = grid_of({{{0, 0, 0, 0, 0, 0, 0}, GridVertex{2, 1.5, 0.5}},
                             {{0, 0, 0, 0, 0, 0, 1}, GridVertex{1, 0.25, 0.75}}});
  std::ostringstream os;
  dump_graph(build_graph(grid, GraphParams{}, EnergyMode::FirstWindow), os);
  EXPECT_EQ(os.str(),
            "node 0,0,0,0,0,0,0 1.5 0.5\n"
            "node 0,0,0,0,0,0,1 0.25 0.75\n"
            "edge 0,0,0,0,0,0,0 0,0,0,0,0,0,1 1.2130613194252668\n");
}
