#include "emtr/graph.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace emtr {

MultiGraph::MultiGraph(std::size_t node_count, std::vector<EdgeEnds> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [a, b] = edges_[e];
    if (a >= node_count_ || b >= node_count_) {
      throw std::invalid_argument("edge " + std::to_string(e) + " references an unknown node");
    }
    if (a == b) {
      throw std::invalid_argument("edge " + std::to_string(e) + " is a self-loop");
    }
  }
}

const MultiGraph::EdgeEnds& MultiGraph::edge(std::size_t e) const {
  if (e >= edges_.size()) throw std::out_of_range("unknown edge " + std::to_string(e));
  return edges_[e];
}

std::size_t MultiGraph::degree(std::size_t v) const {
  std::size_t d = 0;
  for (const auto& [a, b] : edges_) d += static_cast<std::size_t>(a == v) + static_cast<std::size_t>(b == v);
  return d;
}

std::vector<std::size_t> MultiGraph::incident_edges(std::size_t v) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].first == v || edges_[e].second == v) out.push_back(e);
  }
  return out;
}

std::vector<std::vector<int>> MultiGraph::adjacency_counts() const {
  std::vector<std::vector<int>> a(node_count_, std::vector<int>(node_count_, 0));
  for (const auto& [u, v] : edges_) {
    ++a[u][v];
    ++a[v][u];
  }
  return a;
}

bool MultiGraph::is_connected() const {
  if (node_count_ == 0) return false;
  std::vector<std::vector<std::size_t>> adj(node_count_);
  for (const auto& [a, b] : edges_) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(node_count_, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == node_count_;
}

std::vector<std::size_t> odd_nodes(const MultiGraph& g) {
  std::vector<std::size_t> deg(g.node_count(), 0);
  for (const auto& [a, b] : g.edges()) {
    ++deg[a];
    ++deg[b];
  }
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < deg.size(); ++v) {
    if (deg[v] % 2 == 1) out.push_back(v);
  }
  return out;
}

namespace {

// Mutable view of a multigraph while trails are being stripped from it.
// Virtual edges pair up surplus odd nodes and are never emitted.
class Residual {
 public:
  explicit Residual(const MultiGraph& g) : incident_(g.node_count()) {
    for (const auto& ends : g.edges()) add_edge(ends, false);
  }

  std::size_t add_edge(MultiGraph::EdgeEnds ends, bool is_virtual) {
    const auto id = ends_.size();
    ends_.push_back(ends);
    active_.push_back(true);
    virtual_.push_back(is_virtual);
    incident_[ends.first].push_back(id);
    incident_[ends.second].push_back(id);
    return id;
  }

  void drop_virtual_edges() {
    while (!virtual_.empty() && virtual_.back()) {
      const auto id = ends_.size() - 1;
      for (auto v : {ends_[id].first, ends_[id].second}) {
        auto& inc = incident_[v];
        inc.erase(std::remove(inc.begin(), inc.end(), id), inc.end());
      }
      ends_.pop_back();
      active_.pop_back();
      virtual_.pop_back();
    }
  }

  std::size_t node_count() const { return incident_.size(); }
  bool active(std::size_t e) const { return active_[e]; }
  bool is_virtual(std::size_t e) const { return virtual_[e]; }
  void deactivate(std::size_t e) { active_[e] = false; }

  std::size_t other_end(std::size_t e, std::size_t v) const {
    return ends_[e].first == v ? ends_[e].second : ends_[e].first;
  }

  std::vector<std::size_t> active_incident(std::size_t v) const {
    std::vector<std::size_t> out;
    for (auto e : incident_[v]) {
      if (active_[e]) out.push_back(e);
    }
    return out;
  }

  std::size_t active_degree(std::size_t v) const { return active_incident(v).size(); }

  bool bridge(std::size_t e) const {
    const auto [from, to] = ends_[e];
    std::vector<bool> seen(node_count(), false);
    std::vector<std::size_t> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      if (v == to) return false;
      for (auto f : incident_[v]) {
        if (f == e || !active_[f]) continue;
        const auto w = other_end(f, v);
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    return true;
  }

  // Nodes of each connected component that still carries active edges,
  // ordered by the lowest active edge index they contain.
  std::vector<std::vector<std::size_t>> components() const {
    std::vector<int> comp(node_count(), -1);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t e = 0; e < ends_.size(); ++e) {
      if (!active_[e] || comp[ends_[e].first] >= 0) continue;
      const int id = static_cast<int>(out.size());
      out.emplace_back();
      std::vector<std::size_t> stack{ends_[e].first};
      comp[ends_[e].first] = id;
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        out.back().push_back(v);
        for (auto f : active_incident(v)) {
          const auto w = other_end(f, v);
          if (comp[w] < 0) {
            comp[w] = id;
            stack.push_back(w);
          }
        }
      }
      std::sort(out.back().begin(), out.back().end());
    }
    return out;
  }

 private:
  std::vector<MultiGraph::EdgeEnds> ends_;
  std::vector<bool> active_;
  std::vector<bool> virtual_;
  std::vector<std::vector<std::size_t>> incident_;
};

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Bridge-avoiding walk from start over active edges, consuming them. With
// stop_at_virtual the walk ends at the node where a virtual edge would be
// chosen next. rng == nullptr means lowest-index-first candidate order.
Path fleury_walk(Residual& r, std::size_t start, std::mt19937_64* rng, bool stop_at_virtual) {
  Path path;
  path.nodes.push_back(start);
  auto at = start;
  for (;;) {
    auto candidates = r.active_incident(at);
    if (candidates.empty()) break;
    if (rng != nullptr) std::shuffle(candidates.begin(), candidates.end(), *rng);
    auto chosen = candidates.front();
    if (candidates.size() > 1) {
      const auto it = std::find_if(candidates.begin(), candidates.end(),
                                   [&](std::size_t e) { return !r.bridge(e); });
      if (it != candidates.end()) chosen = *it;
    }
    if (stop_at_virtual && r.is_virtual(chosen)) break;
    r.deactivate(chosen);
    at = r.other_end(chosen, at);
    path.edges.push_back(chosen);
    path.nodes.push_back(at);
  }
  return path;
}

}  // namespace

bool is_bridge(const MultiGraph& g, std::size_t e) {
  g.edge(e);  // range check
  Residual r(g);
  return r.bridge(e);
}

Path fleury_euler_path(const MultiGraph& g, std::size_t start) {
  if (start >= g.node_count()) throw std::invalid_argument("start node out of range");
  const auto odd = odd_nodes(g);
  if (odd.size() > 2) {
    throw std::invalid_argument("graph has " + std::to_string(odd.size()) +
                                " odd nodes; an Euler path needs 0 or 2");
  }
  if (odd.size() == 2 && start != odd[0] && start != odd[1]) {
    throw std::invalid_argument("semi-Euler graph: walk must start at an odd node");
  }
  if (!g.is_connected()) throw std::invalid_argument("disconnected graph");
  Residual r(g);
  return fleury_walk(r, start, nullptr, false);
}

PathDecomposition decompose_into_paths(const MultiGraph& g, std::uint64_t seed) {
  if (g.edge_count() == 0) throw std::invalid_argument("graph has no edges");
  if (!g.is_connected()) throw std::invalid_argument("disconnected graph");

  std::mt19937_64 rng(seed);
  Residual r(g);
  PathDecomposition out;
  for (;;) {
    const auto comps = r.components();
    if (comps.empty()) break;
    const auto& comp = comps.front();
    std::vector<std::size_t> odd;
    for (auto v : comp) {
      if (r.active_degree(v) % 2 == 1) odd.push_back(v);
    }

    if (odd.size() <= 2) {
      const auto start = odd.empty() ? comp[pick(rng, comp.size())] : odd[pick(rng, 2)];
      out.paths.push_back(fleury_walk(r, start, &rng, false));
      continue;
    }

    // Pair every odd node except the endpoints u, v with a virtual edge. The
    // augmented component is semi-Eulerian, and its Euler trail from u cut at
    // the virtual edges yields exactly odd/2 real trails. Strip the first.
    std::shuffle(odd.begin(), odd.end(), rng);
    const auto u = odd[0];
    for (std::size_t i = 2; i + 1 < odd.size(); i += 2) r.add_edge({odd[i], odd[i + 1]}, true);
    out.paths.push_back(fleury_walk(r, u, &rng, true));
    r.drop_virtual_edges();
  }
  return out;
}

std::string check_decomposition(const MultiGraph& g, const PathDecomposition& d) {
  std::vector<int> used(g.edge_count(), 0);
  for (std::size_t p = 0; p < d.paths.size(); ++p) {
    const auto& path = d.paths[p];
    const auto tag = "path " + std::to_string(p) + ": ";
    if (path.edges.empty()) return tag + "no edges";
    if (path.nodes.size() != path.edges.size() + 1) return tag + "node/edge counts do not alternate";
    for (std::size_t i = 0; i < path.edges.size(); ++i) {
      const auto e = path.edges[i];
      if (e >= g.edge_count()) return tag + "unknown edge";
      const auto [a, b] = g.edge(e);
      const auto x = path.nodes[i];
      const auto y = path.nodes[i + 1];
      if (!((a == x && b == y) || (a == y && b == x))) {
        return tag + "edge " + std::to_string(e) + " not incident to its neighbours";
      }
      ++used[e];
    }
  }
  for (std::size_t e = 0; e < used.size(); ++e) {
    if (used[e] != 1) return "edge " + std::to_string(e) + " covered " + std::to_string(used[e]) + " times";
  }
  return {};
}

std::string format_decomposition(const PathDecomposition& d,
                                 const std::vector<std::string>& node_labels) {
  std::ostringstream os;
  for (const auto& path : d.paths) {
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
      if (i > 0) os << ' ';
      const auto v = path.nodes[i];
      if (v < node_labels.size()) {
        os << node_labels[v];
      } else {
        os << v;
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace emtr
