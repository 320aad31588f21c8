#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asym/graph.hpp"

namespace asym {

// Per-node centrality values indexed by node id.
struct CentralityScores {
  std::vector<double> values;
};

namespace detail {

// Brandes accumulation. Shortest-path DAGs are grown only from nodes flagged
// in `is_source`, and only paths ending at nodes flagged in `is_target`
// contribute dependency. Each unordered pair is seen from both ends when
// sources and targets coincide, hence the final halving.
inline CentralityScores brandes(const Graph& g, const std::vector<char>& is_source,
                                const std::vector<char>& is_target) {
  const std::size_t n = g.node_count();
  std::vector<double> score(n, 0.0);
  std::vector<double> sigma(n, 0.0);
  std::vector<double> delta(n, 0.0);
  std::vector<std::int32_t> dist(n, -1);
  std::vector<NodeId> order;
  order.reserve(n);

  for (NodeId s = 0; s < n; ++s) {
    if (!is_source[s]) continue;
    order.clear();
    dist[s] = 0;
    sigma[s] = 1.0;
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const NodeId u = order[head];
      for (NodeId w : g.neighbours(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          order.push_back(w);
        }
        sigma[w] += dist[w] == dist[u] + 1 ? sigma[u] : 0.0;
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      if (w == s) break;
      const double credit = (is_target[w] ? 1.0 : 0.0) + delta[w];
      if (credit != 0.0) {
        const double ratio = credit / sigma[w];
        const std::int32_t parent = dist[w] - 1;
        for (NodeId u : g.neighbours(w)) {
          delta[u] += dist[u] == parent ? sigma[u] * ratio : 0.0;
        }
      }
      score[w] += delta[w];
    }
    for (NodeId v : order) {
      dist[v] = -1;
      sigma[v] = 0.0;
      delta[v] = 0.0;
    }
  }
  for (double& x : score) x *= 0.5;
  return {std::move(score)};
}

}  // namespace detail

/// Unnormalized betweenness over unordered node pairs, endpoints excluded.
inline CentralityScores betweenness(const Graph& g) {
  const std::vector<char> all(g.node_count(), 1);
  return detail::brandes(g, all, all);
}

/// Betweenness restricted to shortest paths whose two endpoints both lie in
/// `observed`. Sums sigma(x,y|v)/sigma(x,y) over unordered observed pairs
/// {x,y} with x,y != v.
inline CentralityScores observed_betweenness(const Graph& g,
                                             std::span<const NodeId> observed) {
  const auto mask = membership(g.node_count(), observed);
  return detail::brandes(g, mask, mask);
}

}  // namespace asym
