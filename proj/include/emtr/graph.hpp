#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace emtr {

/// Undirected multigraph over dense node indices [0, node_count).
/// Parallel edges are allowed, self-loops are not.
class MultiGraph {
 public:
  using EdgeEnds = std::pair<std::size_t, std::size_t>;

  MultiGraph() = default;
  MultiGraph(std::size_t node_count, std::vector<EdgeEnds> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<EdgeEnds>& edges() const { return edges_; }
  const EdgeEnds& edge(std::size_t e) const;

  std::size_t degree(std::size_t v) const;
  std::vector<std::size_t> incident_edges(std::size_t v) const;

  // a_ij counts the edges between i and j; the 0/1 adjacency matrix cannot
  // represent parallel edges. Row sums equal node degrees.
  std::vector<std::vector<int>> adjacency_counts() const;

  /// True when every node is reachable from node 0 (a graph without edges
  /// is connected only if it has a single node).
  bool is_connected() const;

 private:
  std::size_t node_count_ = 0;
  std::vector<EdgeEnds> edges_;
};

/// Alternating node/edge walk: nodes.size() == edges.size() + 1.
struct Path {
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> edges;

  bool closed() const { return !nodes.empty() && nodes.front() == nodes.back() && !edges.empty(); }
  friend bool operator==(const Path&, const Path&) = default;
};

struct PathDecomposition {
  std::vector<Path> paths;
};

std::vector<std::size_t> odd_nodes(const MultiGraph& g);

bool is_bridge(const MultiGraph& g, std::size_t e);

/// Fleury's algorithm. The graph must have 0 or 2 odd nodes; with 2 the walk
/// has to start at one of them. Among the unused edges at the current node a
/// non-bridge is taken whenever one exists, lowest edge index first.
Path fleury_euler_path(const MultiGraph& g, std::size_t start);

/// Default seed of decompose_into_paths. With it the bundled T and 11-node
/// networks split into the path layouts used in their documentation.
inline constexpr std::uint64_t kDefaultDecompositionSeed = 41376;

/// Splits a connected multigraph with 2k odd nodes into k edge-disjoint
/// trails covering every edge (one closed trail when k == 0). Trails are
/// stripped one at a time between odd nodes; the choices are seeded.
PathDecomposition decompose_into_paths(const MultiGraph& g, std::uint64_t seed = kDefaultDecompositionSeed);

/// Structural check: every path is well linked and the paths cover each edge
/// of g exactly once. Returns an empty string on success, else the reason.
std::string check_decomposition(const MultiGraph& g, const PathDecomposition& d);

/// One path per line, nodes separated by single spaces.
std::string format_decomposition(const PathDecomposition& d,
                                 const std::vector<std::string>& node_labels);

}  // namespace emtr
