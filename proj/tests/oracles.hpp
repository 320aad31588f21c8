#pragma once

// Independent reference implementations used only by the tests. They share
// nothing with the library beyond the Graph container and Rng.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "asym/graph.hpp"
#include "asym/rng.hpp"

namespace asym::oracle {

inline constexpr int kInf = std::numeric_limits<int>::max() / 4;

// Erdos-Renyi G(n, p).
inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(n, edges);
}

// Uniform random recursive tree.
inline Graph random_tree(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) edges.emplace_back(static_cast<NodeId>(rng.uniform_index(v)), v);
  return Graph::from_edges(n, edges);
}

inline std::vector<std::vector<int>> floyd_warshall(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (NodeId u = 0; u < n; ++u) {
    d[u][u] = 0;
    for (NodeId v : g.neighbours(u)) d[u][v] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// Sum over unordered pairs {x, y} (both flagged in `endpoint`) of the fraction
// of shortest x-y paths through each interior node, by explicit enumeration
// of every shortest path.
inline std::vector<double> enumerated_betweenness(const Graph& g, const std::vector<char>& endpoint) {
  const std::size_t n = g.node_count();
  const auto d = floyd_warshall(g);
  std::vector<double> score(n, 0.0);
  std::vector<NodeId> path;
  for (NodeId x = 0; x < n; ++x) {
    for (NodeId y = x + 1; y < n; ++y) {
      if (!endpoint[x] || !endpoint[y] || d[x][y] >= kInf) continue;
      double total = 0.0;
      std::vector<double> through(n, 0.0);
      std::function<void(NodeId)> walk = [&](NodeId u) {
        if (u == y) {
          total += 1.0;
          for (std::size_t i = 1; i + 1 < path.size(); ++i) through[path[i]] += 1.0;
          return;
        }
        for (NodeId w : g.neighbours(u)) {
          if (d[w][y] == d[u][y] - 1) {
            path.push_back(w);
            walk(w);
            path.pop_back();
          }
        }
      };
      path.assign(1, x);
      walk(x);
      for (std::size_t v = 0; v < n; ++v) score[v] += through[v] / total;
    }
  }
  return score;
}

// Straight-line feature reference from the all-pairs distance matrix.
inline std::vector<std::vector<double>> reference_features(const Graph& g,
                                                           const std::vector<char>& observed) {
  const std::size_t n = g.node_count();
  const auto d = floyd_warshall(g);
  std::vector<std::vector<double>> f(n, std::vector<double>(8, 0.0));
  const std::vector<char> all(n, 1);
  const auto bc = enumerated_betweenness(g, all);
  const auto obc = enumerated_betweenness(g, observed);
  for (std::size_t v = 0; v < n; ++v) {
    double hit[4] = {0, 0, 0, 0}, tot[4] = {0, 0, 0, 0};
    for (std::size_t w = 0; w < n; ++w) {
      if (w == v || d[v][w] > 3) continue;
      tot[d[v][w]] += 1;
      hit[d[v][w]] += observed[w] ? 1 : 0;
    }
    f[v][0] = observed[v] ? 1.0 : 0.0;
    f[v][1] = static_cast<double>(g.degree(static_cast<NodeId>(v)));
    for (int k = 1; k <= 3; ++k) f[v][1 + k] = tot[k] > 0 ? hit[k] / tot[k] : 0.0;
    f[v][5] = tot[1] + tot[2] > 0 ? (hit[1] + hit[2]) / (tot[1] + tot[2]) : 0.0;
    f[v][6] = bc[v];
    f[v][7] = obc[v];
  }
  return f;
}

// Pairwise Mann-Whitney AUC, O(P * N).
template <typename Labels>
double pairwise_auc(const std::vector<double>& scores, const Labels& labels,
                    const std::vector<NodeId>& pool) {
  double wins = 0.0, pairs = 0.0;
  for (NodeId a : pool) {
    if (!(labels[a] > 0.5)) continue;
    for (NodeId b : pool) {
      if (labels[b] > 0.5) continue;
      pairs += 1.0;
      wins += scores[a] > scores[b] ? 1.0 : (scores[a] == scores[b] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

}  // namespace asym::oracle
