#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "asym/centrality.hpp"
#include "asym/epidemic.hpp"
#include "asym/features.hpp"
#include "asym/gcn.hpp"

namespace asym {

/// Infection indicator per node (1 for every infected node, observed or not).
inline Eigen::VectorXd infection_labels(const EpidemicInstance& inst) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.node_count()));
  for (NodeId v : inst.infected) y(v) = 1.0;
  return y;
}

inline GraphSample make_sample(const EpidemicInstance& inst) {
  GraphSample s;
  s.adj = normalize_adjacency(*inst.graph);
  s.features = normalize_features(compute_features(*inst.graph, inst.observed)).values;
  s.labels = infection_labels(inst);
  s.mask = inst.pool();
  return s;
}

/// Observed betweenness used directly as the ranking score.
inline std::vector<double> baseline_scores(const EpidemicInstance& inst) {
  return observed_betweenness(*inst.graph, inst.observed).values;
}

inline std::vector<double> model_scores(const GcnModel& model, const EpidemicInstance& inst) {
  const GraphSample s = make_sample(inst);
  const Eigen::VectorXd scores = predict(model, s);
  return {scores.data(), scores.data() + scores.size()};
}

using Scorer = std::function<std::vector<double>(const EpidemicInstance&)>;

inline Scorer baseline_scorer() { return baseline_scores; }

inline Scorer model_scorer(GcnModel model) {
  return [model = std::move(model)](const EpidemicInstance& inst) {
    return model_scores(model, inst);
  };
}

}  // namespace asym
