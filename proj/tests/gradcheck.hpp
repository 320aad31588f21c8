#pragma once

// Central finite-difference check of the GCN gradient, shared by the unit
// and acceptance suites.

#include <algorithm>
#include <cmath>
#include <vector>

#include "asym/gcn.hpp"
#include "asym/graph.hpp"
#include "asym/rng.hpp"
#include "oracles.hpp"

namespace asym::testing {

struct GradCheckCase {
  Graph graph;
  NormalizedAdjacency adj;
  Eigen::MatrixXd x;
  Eigen::VectorXd labels;
  std::vector<NodeId> mask;
  GcnModel model;
};

inline double normal(Rng& rng) {
  // Box-Muller; one draw per call is enough here.
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline GradCheckCase random_case(std::size_t n, int hidden, std::uint64_t seed) {
  Rng rng(seed);
  GradCheckCase c;
  c.graph = oracle::random_graph(n, 0.3, rng.next_u64());
  c.adj = normalize_adjacency(c.graph);
  c.x.resize(static_cast<Eigen::Index>(n), kFeatureCount);
  for (Eigen::Index i = 0; i < c.x.rows(); ++i)
    for (Eigen::Index j = 0; j < c.x.cols(); ++j) c.x(i, j) = normal(rng);
  c.labels.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < c.labels.size(); ++i) c.labels(i) = rng.bernoulli(0.4) ? 1.0 : 0.0;
  for (NodeId v = 0; v < n; ++v) {
    if (rng.bernoulli(0.7)) c.mask.push_back(v);
  }
  if (c.mask.empty()) c.mask.push_back(0);
  c.model = GcnModel::glorot(kFeatureCount, hidden, rng.next_u64());
  for (Eigen::Index j = 0; j < hidden; ++j) c.model.b1(j) = 0.1 * normal(rng);
  c.model.b2 = 0.1 * normal(rng);
  return c;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
};

// Relative error |a - f| / max(|a|, |f|, floor). Coordinates whose +h/-h
// perturbations flip a ReLU are skipped: the loss is not differentiable
// across the kink.
inline GradCheckResult check_gradients(GradCheckCase c, double h = 1e-5, double floor = 1e-4) {
  const auto analytic = backward(forward(c.model, c.adj, c.x), c.labels, c.mask);
  GradCheckResult out;
  auto probe = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const auto plus = forward(c.model, c.adj, c.x);
    param = saved - h;
    const auto minus = forward(c.model, c.adj, c.x);
    param = saved;
    if (((plus.z1.array() > 0.0) != (minus.z1.array() > 0.0)).any()) {
      ++out.skipped_kinks;
      return;
    }
    const double fd = (masked_bce(plus.scores, c.labels, c.mask) -
                       masked_bce(minus.scores, c.labels, c.mask)) / (2.0 * h);
    const double rel = std::abs(grad - fd) / std::max({std::abs(grad), std::abs(fd), floor});
    out.max_rel_error = std::max(out.max_rel_error, rel);
    ++out.checked;
  };
  auto& model = c.model;
  for (Eigen::Index i = 0; i < model.w1.rows(); ++i)
    for (Eigen::Index j = 0; j < model.w1.cols(); ++j) probe(model.w1(i, j), analytic.w1(i, j));
  for (Eigen::Index j = 0; j < model.b1.size(); ++j) probe(model.b1(j), analytic.b1(j));
  for (Eigen::Index j = 0; j < model.w2.size(); ++j) probe(model.w2(j), analytic.w2(j));
  probe(model.b2, analytic.b2);
  return out;
}

}  // namespace asym::testing
