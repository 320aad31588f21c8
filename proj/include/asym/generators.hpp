#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "asym/error.hpp"
#include "asym/graph.hpp"
#include "asym/rng.hpp"

namespace asym {

struct BarabasiAlbertParams {
  std::size_t n = 0;
  std::size_t m = 4;
  std::uint64_t seed = 0;
};

struct WattsStrogatzParams {
  std::size_t n = 0;
  std::size_t k = 8;
  double p = 0.3;
  std::uint64_t seed = 0;
};

inline constexpr int kWattsStrogatzMaxRetries = 100;

inline void validate(const BarabasiAlbertParams& params) {
  if (params.m < 1 || params.m >= params.n) {
    throw ParameterError("barabasi-albert: require 1 <= m < n (m=" +
                         std::to_string(params.m) + ", n=" + std::to_string(params.n) + ")");
  }
}

inline void validate(const WattsStrogatzParams& params) {
  if (params.k == 0 || params.k % 2 != 0 || params.k >= params.n) {
    throw ParameterError("watts-strogatz: require even k with 0 < k < n (k=" +
                         std::to_string(params.k) + ", n=" + std::to_string(params.n) + ")");
  }
  if (!(params.p >= 0.0 && params.p <= 1.0)) {
    throw ParameterError("watts-strogatz: rewiring probability must lie in [0, 1]");
  }
}

// Preferential attachment. Nodes 0..m-1 start isolated; node m links to all of
// them; every later node draws m distinct targets from the endpoint urn, so a
// node is picked with probability proportional to its degree.
inline Graph generate_ba(const BarabasiAlbertParams& params) {
  validate(params);
  const std::size_t n = params.n;
  const std::size_t m = params.m;
  Rng rng(params.seed);

  std::vector<Edge> edges;
  edges.reserve(m * (n - m));
  std::vector<NodeId> urn;
  urn.reserve(2 * m * (n - m));

  for (std::size_t s = 0; s < m; ++s) {
    edges.emplace_back(static_cast<NodeId>(s), static_cast<NodeId>(m));
    urn.push_back(static_cast<NodeId>(s));
    urn.push_back(static_cast<NodeId>(m));
  }

  std::vector<NodeId> targets;
  targets.reserve(m);
  for (std::size_t v = m + 1; v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      const NodeId t = urn[rng.uniform_index(urn.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
        targets.push_back(t);
      }
    }
    for (NodeId t : targets) {
      edges.emplace_back(t, static_cast<NodeId>(v));
      urn.push_back(t);
      urn.push_back(static_cast<NodeId>(v));
    }
  }
  return Graph::from_edges(n, edges);
}

namespace detail {

inline Graph watts_strogatz_once(const WattsStrogatzParams& params, std::uint64_t seed) {
  const std::size_t n = params.n;
  const std::size_t half = params.k / 2;
  Rng rng(seed);

  std::vector<std::vector<NodeId>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j <= half; ++j) {
      const auto w = static_cast<NodeId>((i + j) % n);
      adj[i].push_back(w);
      adj[w].push_back(static_cast<NodeId>(i));
    }
  }
  auto contains = [](const std::vector<NodeId>& list, NodeId x) {
    return std::find(list.begin(), list.end(), x) != list.end();
  };
  auto erase = [](std::vector<NodeId>& list, NodeId x) {
    list.erase(std::find(list.begin(), list.end(), x));
  };

  // Lattice edges are visited ring-distance first, as in the original model.
  for (std::size_t j = 1; j <= half; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = static_cast<NodeId>(i);
      const auto old = static_cast<NodeId>((i + j) % n);
      if (!rng.bernoulli(params.p)) continue;
      // The edge may already have been removed by an earlier rewiring of old.
      if (!contains(adj[u], old)) continue;
      if (adj[u].size() >= n - 1) continue;
      NodeId w;
      do {
        w = static_cast<NodeId>(rng.uniform_index(n));
      } while (w == u || contains(adj[u], w));
      erase(adj[u], old);
      erase(adj[old], u);
      adj[u].push_back(w);
      adj[w].push_back(u);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(n * half);
  for (std::size_t u = 0; u < n; ++u) {
    for (NodeId w : adj[u]) {
      if (u < w) edges.emplace_back(static_cast<NodeId>(u), w);
    }
  }
  return Graph::from_edges(n, edges);
}

}  // namespace detail

// Small-world ring lattice with random rewiring. Disconnected draws are
// regenerated with seed+1, seed+2, ... up to kWattsStrogatzMaxRetries times.
inline Graph generate_ws(const WattsStrogatzParams& params) {
  validate(params);
  for (int attempt = 0; attempt <= kWattsStrogatzMaxRetries; ++attempt) {
    Graph g = detail::watts_strogatz_once(params, params.seed + static_cast<std::uint64_t>(attempt));
    if (is_connected(g)) return g;
  }
  throw ParameterError("watts-strogatz: no connected graph after " +
                       std::to_string(kWattsStrogatzMaxRetries) + " retries");
}

}  // namespace asym
