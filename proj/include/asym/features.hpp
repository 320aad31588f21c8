#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "asym/centrality.hpp"
#include "asym/error.hpp"
#include "asym/graph.hpp"

namespace asym {

inline constexpr int kFeatureCount = 8;

// Column order is part of the checkpoint contract.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "infection_observation", "degree",      "contact_1",   "contact_2",
    "contact_3", "neighbourhood_contact_2", "betweenness", "observed_betweenness"};

inline constexpr std::string_view kFeatureSchema = "asym-features-v1";

enum class FeatureScale { kRaw, kNormalized };

struct FeatureMatrix {
  Eigen::MatrixXd values;  // n x kFeatureCount
  FeatureScale scale = FeatureScale::kRaw;
};

namespace detail {

// Visits every node within `radius` hops of each node, reusing scratch
// buffers. visit(v, w, d) is called for each w != v at distance d <= radius.
template <typename Visit>
void for_each_ball(const Graph& g, std::uint32_t radius, Visit&& visit) {
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> dist(n, kUnreached);
  std::vector<NodeId> queue;
  queue.reserve(n);
  for (NodeId v = 0; v < n; ++v) {
    queue.clear();
    queue.push_back(v);
    dist[v] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      if (dist[u] == radius) continue;
      for (NodeId w : g.neighbours(u)) {
        if (dist[w] == kUnreached) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
          visit(v, w, dist[w]);
        }
      }
    }
    for (NodeId u : queue) dist[u] = kUnreached;
  }
}

inline double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace detail

/// Fraction of the nodes at distance exactly k that are observed; 0 when no
/// node sits at that distance.
inline std::vector<double> contact_k(const Graph& g, std::span<const NodeId> observed, int k) {
  if (k < 1 || k > 3) throw ParameterError("contact_k: k must be 1, 2 or 3");
  const auto obs = membership(g.node_count(), observed);
  std::vector<double> hits(g.node_count(), 0.0), total(g.node_count(), 0.0);
  detail::for_each_ball(g, static_cast<std::uint32_t>(k),
                        [&](NodeId v, NodeId w, std::uint32_t d) {
                          if (d != static_cast<std::uint32_t>(k)) return;
                          total[v] += 1.0;
                          hits[v] += obs[w];
                        });
  for (std::size_t v = 0; v < hits.size(); ++v) hits[v] = detail::ratio_or_zero(hits[v], total[v]);
  return hits;
}

/// Fraction of the nodes within two hops (excluding the node itself) that are
/// observed; 0 for isolated nodes.
inline std::vector<double> neighbourhood_contact_2(const Graph& g,
                                                   std::span<const NodeId> observed) {
  const auto obs = membership(g.node_count(), observed);
  std::vector<double> hits(g.node_count(), 0.0), total(g.node_count(), 0.0);
  detail::for_each_ball(g, 2, [&](NodeId v, NodeId w, std::uint32_t) {
    total[v] += 1.0;
    hits[v] += obs[w];
  });
  for (std::size_t v = 0; v < hits.size(); ++v) hits[v] = detail::ratio_or_zero(hits[v], total[v]);
  return hits;
}

/// Raw eight-column feature matrix for a graph and its observed infected set.
inline FeatureMatrix compute_features(const Graph& g, std::span<const NodeId> observed) {
  const std::size_t n = g.node_count();
  const auto obs = membership(n, observed);
  FeatureMatrix out;
  out.values.setZero(static_cast<Eigen::Index>(n), kFeatureCount);
  auto& x = out.values;

  // Contact features share one depth-3 sweep.
  std::vector<std::array<double, 3>> hits(n, {0, 0, 0}), total(n, {0, 0, 0});
  detail::for_each_ball(g, 3, [&](NodeId v, NodeId w, std::uint32_t d) {
    total[v][d - 1] += 1.0;
    hits[v][d - 1] += obs[w];
  });

  const auto bc = betweenness(g);
  const auto obc = observed_betweenness(g, observed);
  for (NodeId v = 0; v < n; ++v) {
    const auto r = static_cast<Eigen::Index>(v);
    x(r, 0) = obs[v] ? 1.0 : 0.0;
    x(r, 1) = static_cast<double>(g.degree(v));
    for (int k = 0; k < 3; ++k) x(r, 2 + k) = detail::ratio_or_zero(hits[v][k], total[v][k]);
    x(r, 5) = detail::ratio_or_zero(hits[v][0] + hits[v][1], total[v][0] + total[v][1]);
    x(r, 6) = bc.values[v];
    x(r, 7) = obc.values[v];
  }
  return out;
}

/// Z-scores columns 1..7 with the population standard deviation; column 0 is
/// binary and left untouched. Constant columns become all zeros.
inline FeatureMatrix normalize_features(const FeatureMatrix& raw) {
  FeatureMatrix out{raw.values, FeatureScale::kNormalized};
  const auto rows = out.values.rows();
  if (rows == 0) return out;
  for (int c = 1; c < out.values.cols(); ++c) {
    auto col = out.values.col(c);
    if (col.maxCoeff() == col.minCoeff()) {
      col.setZero();
      continue;
    }
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(rows);
    col = (col.array() - mean) / std::sqrt(var);
  }
  return out;
}

}  // namespace asym
