#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "asym/error.hpp"
#include "asym/graph.hpp"

namespace asym {

// Mann-Whitney AUC over the pool: the fraction of (positive, negative) pairs in
// which the positive node scores higher, ties counting one half. Returns
// nullopt when the pool holds a single class.
template <typename Labels>
std::optional<double> auc(std::span<const double> scores, const Labels& labels,
                          std::span<const NodeId> pool) {
  std::vector<std::pair<double, bool>> ranked;
  ranked.reserve(pool.size());
  for (NodeId v : pool) ranked.emplace_back(scores[v], labels[v] > 0.5);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double positives = 0.0, negatives = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < ranked.size();) {
    std::size_t j = i;
    double group_pos = 0.0;
    while (j < ranked.size() && ranked[j].first == ranked[i].first) {
      group_pos += ranked[j].second ? 1.0 : 0.0;
      ++j;
    }
    // Midrank of the tie group, 1-based.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += group_pos * midrank;
    positives += group_pos;
    negatives += static_cast<double>(j - i) - group_pos;
    i = j;
  }
  if (positives == 0.0 || negatives == 0.0) return std::nullopt;
  const double u = rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

/// k = max(1, round(fraction * |pool|)), halves rounded away from zero.
inline std::size_t top_k_count(std::size_t pool_size, double fraction) {
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool_size)));
  return std::max<std::size_t>(1, std::min(k, pool_size));
}

// Precision among the k highest-scored pool nodes. Equal scores are broken by
// ascending node id.
template <typename Labels>
double top_k_precision(std::span<const double> scores, const Labels& labels,
                       std::span<const NodeId> pool, double fraction = 0.01) {
  if (pool.empty()) throw ParameterError("top_k_precision: empty pool");
  const std::size_t k = top_k_count(pool.size(), fraction);
  std::vector<NodeId> order(pool.begin(), pool.end());
  auto higher = [&](NodeId a, NodeId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    higher);
  double hits = 0.0;
  for (std::size_t i = 0; i < k; ++i) hits += labels[order[i]] > 0.5 ? 1.0 : 0.0;
  return hits / static_cast<double>(k);
}

}  // namespace asym
