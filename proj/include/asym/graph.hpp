#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asym/error.hpp"

namespace asym {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

inline constexpr std::uint32_t kUnreached =
    std::numeric_limits<std::uint32_t>::max();

// Undirected simple graph in compressed sparse row form. Neighbour lists are
// sorted ascending. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on nodes 0..n-1. Rejects self-loops, duplicate edges and
  /// out-of-range endpoints.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges) {
    if (n > std::numeric_limits<NodeId>::max()) {
      throw ParameterError("graph: node count exceeds NodeId range");
    }
    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
      if (u >= n || v >= n) {
        throw ParameterError("graph: edge endpoint out of range");
      }
      if (u == v) throw ParameterError("graph: self-loop on node " + std::to_string(u));
      ++g.offsets_[u + 1];
      ++g.offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.neighbours_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
      g.neighbours_[cursor[u]++] = v;
      g.neighbours_[cursor[v]++] = u;
    }
    for (std::size_t v = 0; v < n; ++v) {
      auto first = g.neighbours_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
      auto last = g.neighbours_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last) {
        throw ParameterError("graph: duplicate edge at node " + std::to_string(v));
      }
    }
    return g;
  }

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbours_.size() / 2; }

  std::span<const NodeId> neighbours(NodeId v) const {
    return {neighbours_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  bool has_edge(NodeId u, NodeId v) const {
    const auto nb = neighbours(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Canonical edge list: u < v, sorted lexicographically.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : neighbours(u)) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbours_;
};

/// Hop distances from `source`; nodes farther than `max_depth` (or
/// unreachable) hold kUnreached.
inline std::vector<std::uint32_t> bfs_distances(
    const Graph& g, NodeId source,
    std::optional<std::uint32_t> max_depth = std::nullopt) {
  if (source >= g.node_count()) {
    throw ParameterError("bfs_distances: source out of range");
  }
  std::vector<std::uint32_t> dist(g.node_count(), kUnreached);
  std::vector<NodeId> queue;
  queue.reserve(g.node_count());
  dist[source] = 0;
  queue.push_back(source);
  const std::uint32_t limit = max_depth.value_or(kUnreached - 1);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    if (dist[u] >= limit) continue;
    for (NodeId w : g.neighbours(u)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

inline bool is_connected(const Graph& g) {
  if (g.node_count() == 0) throw ParameterError("is_connected: empty graph");
  const auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(),
                      [](std::uint32_t d) { return d == kUnreached; });
}

// Membership mask over node ids, the representation most algorithms want for
// node sets.
inline std::vector<char> membership(std::size_t n, std::span<const NodeId> nodes) {
  std::vector<char> mask(n, 0);
  for (NodeId v : nodes) {
    if (v >= n) throw ParameterError("node set: id out of range");
    mask[v] = 1;
  }
  return mask;
}

}  // namespace asym
