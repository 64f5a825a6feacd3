#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "emtr/graph.hpp"
#include "graph_oracles.hpp"

using namespace emtr;
using namespace emtr::oracle;

namespace {

MultiGraph path3() { return MultiGraph(3, {{0, 1}, {1, 2}}); }
MultiGraph triangle() { return MultiGraph(3, {{0, 1}, {1, 2}, {2, 0}}); }
MultiGraph t_graph() { return MultiGraph(4, {{0, 1}, {1, 2}, {1, 3}}); }

// Land A, islands B and C, bank D; degrees 3, 5, 3, 3.
MultiGraph koenigsberg() {
  return MultiGraph(4, {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {1, 3}, {0, 3}, {2, 3}});
}

MultiGraph canonical() {
  // nodes 1..11 as 0..10
  return MultiGraph(11, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 5}, {2, 6}, {7, 3}, {3, 8}, {8, 9}, {8, 10}});
}

}  // namespace

TEST(MultiGraph, RejectsSelfLoopsAndUnknownNodes) {
  EXPECT_THROW(MultiGraph(2, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(MultiGraph(2, {{0, 2}}), std::invalid_argument);
}

TEST(MultiGraph, AdjacencyCountsParallelEdges) {
  const auto a = koenigsberg().adjacency_counts();
  EXPECT_EQ(a[0][1], 2);
  EXPECT_EQ(a[1][0], 2);
  EXPECT_EQ(a[0][2], 0);
  for (std::size_t v = 0; v < 4; ++v) {
    int sum = 0;
    for (int x : a[v]) sum += x;
    EXPECT_EQ(static_cast<std::size_t>(sum), koenigsberg().degree(v));
  }
}

TEST(OddNodes, Examples) {
  EXPECT_EQ(odd_nodes(path3()), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(odd_nodes(koenigsberg()).size(), 4u);
  EXPECT_EQ(odd_nodes(t_graph()), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_TRUE(odd_nodes(triangle()).empty());
}

TEST(IsBridge, Examples) {
  EXPECT_TRUE(is_bridge(path3(), 1));
  for (std::size_t e = 0; e < 3; ++e) EXPECT_FALSE(is_bridge(triangle(), e));
  EXPECT_FALSE(is_bridge(koenigsberg(), 0));
  EXPECT_THROW(is_bridge(path3(), 7), std::out_of_range);
}

TEST(Fleury, PathGraph) {
  const auto p = fleury_euler_path(path3(), 0);
  EXPECT_EQ(p.nodes, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(p.edges, (std::vector<std::size_t>{0, 1}));
}

TEST(Fleury, TriangleIsClosed) {
  const auto p = fleury_euler_path(triangle(), 0);
  EXPECT_TRUE(p.closed());
  EXPECT_EQ(p.edges.size(), 3u);
  EXPECT_EQ(check_decomposition(triangle(), {{p}}), "");
}

TEST(Fleury, SemiEulerGraphCoveredByOnePath) {
  // two triangles sharing node 2, with a tail 4-5
  const MultiGraph g(6, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}, {4, 5}});
  const auto odd = odd_nodes(g);
  ASSERT_EQ(odd.size(), 2u);
  const auto p = fleury_euler_path(g, odd[0]);
  EXPECT_EQ(check_decomposition(g, {{p}}), "");
  EXPECT_EQ(p.nodes.back(), odd[1]);
}

TEST(Fleury, RejectsBadStart) {
  EXPECT_THROW(fleury_euler_path(path3(), 1), std::invalid_argument);
  EXPECT_THROW(fleury_euler_path(t_graph(), 0), std::invalid_argument);
}

TEST(Decompose, TNetworkDefaultSeed) {
  const auto d = decompose_into_paths(t_graph());
  ASSERT_EQ(d.paths.size(), 2u);
  EXPECT_EQ(format_decomposition(d, {"1", "2", "3", "4"}), "1 2 3\n2 4\n");
}

TEST(Decompose, Koenigsberg) {
  const auto d = decompose_into_paths(koenigsberg(), 5);
  EXPECT_EQ(d.paths.size(), 2u);
  EXPECT_EQ(check_decomposition(koenigsberg(), d), "");
}

TEST(Decompose, CanonicalDefaultSeed) {
  const auto d = decompose_into_paths(canonical());
  const std::vector<std::string> labels{"1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11"};
  EXPECT_EQ(format_decomposition(d, labels), "1 2 3 4 5\n2 6\n3 7\n8 4 9 10\n9 11\n");
}

TEST(Decompose, EulerianGivesOneClosedPath) {
  const auto d = decompose_into_paths(triangle(), 3);
  ASSERT_EQ(d.paths.size(), 1u);
  EXPECT_TRUE(d.paths[0].closed());
}

TEST(Decompose, Errors) {
  EXPECT_THROW(decompose_into_paths(MultiGraph(1, {})), std::invalid_argument);
  EXPECT_THROW(decompose_into_paths(MultiGraph(4, {{0, 1}, {2, 3}})), std::invalid_argument);
}

TEST(Decompose, SameSeedSameResult) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 50; ++i) {
    const auto g = random_connected(rng);
    const auto a = decompose_into_paths(g, 1234);
    const auto b = decompose_into_paths(g, 1234);
    ASSERT_EQ(a.paths.size(), b.paths.size());
    for (std::size_t p = 0; p < a.paths.size(); ++p) EXPECT_EQ(a.paths[p], b.paths[p]);
  }
}

TEST(GraphProperties, RandomMultigraphs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = random_connected(rng);
    ASSERT_TRUE(g.is_connected());
    const auto odd = odd_nodes(g);
    ASSERT_EQ(odd.size(), odd_count(g));
    ASSERT_EQ(odd.size() % 2, 0u);

    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      ASSERT_EQ(is_bridge(g, e), !connected_without(g, e)) << "trial " << trial << " edge " << e;
    }

    const auto d = decompose_into_paths(g, static_cast<std::uint64_t>(trial));
    ASSERT_EQ(d.paths.size(), std::max<std::size_t>(1, odd.size() / 2)) << "trial " << trial;
    ASSERT_EQ(check_decomposition(g, d), "") << "trial " << trial;
    ASSERT_EQ(cover_errors(g, d), "") << "trial " << trial;
    if (odd.empty()) ASSERT_TRUE(d.paths[0].closed());

    if (odd.size() <= 2) {
      const auto start = odd.empty() ? 0 : odd[0];
      const auto p = fleury_euler_path(g, start);
      ASSERT_EQ(p.nodes.front(), start);
      if (odd.size() == 2) ASSERT_EQ(p.nodes.back(), odd[1]);
      ASSERT_EQ(cover_errors(g, {{p}}), "") << "trial " << trial;
    }
  }
}

TEST(CheckDecomposition, DetectsFaults) {
  const auto g = t_graph();
  EXPECT_NE(check_decomposition(g, {{Path{{0, 1, 2}, {0, 1}}}}), "");  // edge 2 missing
  EXPECT_NE(check_decomposition(g, {{Path{{0, 1, 2}, {0, 1}}, Path{{1, 3}, {2}}, Path{{1, 3}, {2}}}}), "");
  EXPECT_NE(check_decomposition(g, {{Path{{0, 2, 1}, {0, 1}}, Path{{1, 3}, {2}}}}), "");
  EXPECT_EQ(check_decomposition(g, {{Path{{0, 1, 2}, {0, 1}}, Path{{1, 3}, {2}}}}), "");
}
