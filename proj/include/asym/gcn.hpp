#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "asym/error.hpp"
#include "asym/features.hpp"
#include "asym/graph.hpp"
#include "asym/metrics.hpp"
#include "asym/rng.hpp"

namespace asym {

// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
struct NormalizedAdjacency {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

  Eigen::Index size() const { return matrix.rows(); }
};

inline NormalizedAdjacency normalize_adjacency(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> inv_sqrt(n);
  for (NodeId v = 0; v < n; ++v) {
    inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n + 2 * g.edge_count());
  for (NodeId v = 0; v < n; ++v) {
    entries.emplace_back(v, v, inv_sqrt[v] * inv_sqrt[v]);
    for (NodeId w : g.neighbours(v)) entries.emplace_back(v, w, inv_sqrt[v] * inv_sqrt[w]);
  }
  NormalizedAdjacency adj;
  adj.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  adj.matrix.setFromTriplets(entries.begin(), entries.end());
  return adj;
}

// Two-layer GCN: sigmoid(A relu(A X W1 + b1) w2 + b2). The same type carries
// gradients and Adam moments, which share the parameter shapes.
struct GcnModel {
  Eigen::MatrixXd w1;     // input x hidden
  Eigen::RowVectorXd b1;  // hidden
  Eigen::VectorXd w2;     // hidden
  double b2 = 0.0;

  static GcnModel zeros(Eigen::Index input, Eigen::Index hidden) {
    GcnModel m;
    m.w1.setZero(input, hidden);
    m.b1.setZero(hidden);
    m.w2.setZero(hidden);
    return m;
  }

  /// Glorot-uniform weights, zero biases.
  static GcnModel glorot(Eigen::Index input, Eigen::Index hidden, std::uint64_t seed) {
    GcnModel m = zeros(input, hidden);
    Rng rng(seed);
    const double a1 = std::sqrt(6.0 / static_cast<double>(input + hidden));
    for (Eigen::Index j = 0; j < hidden; ++j) {
      for (Eigen::Index i = 0; i < input; ++i) m.w1(i, j) = a1 * (2.0 * rng.uniform01() - 1.0);
    }
    const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    for (Eigen::Index j = 0; j < hidden; ++j) m.w2(j) = a2 * (2.0 * rng.uniform01() - 1.0);
    return m;
  }

  Eigen::Index input_dim() const { return w1.rows(); }
  Eigen::Index hidden_dim() const { return w1.cols(); }

  bool all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && std::isfinite(b2);
  }

  GcnModel& operator+=(const GcnModel& o) {
    w1 += o.w1;
    b1 += o.b1;
    w2 += o.w2;
    b2 += o.b2;
    return *this;
  }

  GcnModel& operator*=(double s) {
    w1 *= s;
    b1 *= s;
    w2 *= s;
    b2 *= s;
    return *this;
  }

  friend bool operator==(const GcnModel& a, const GcnModel& b) {
    return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
  }
};

// Intermediates kept by forward for backward. Holds a pointer to the
// adjacency, which must outlive the cache.
struct ForwardCache {
  const NormalizedAdjacency* adj = nullptr;
  Eigen::MatrixXd ax;  // A X
  Eigen::MatrixXd z1;  // A X W1 + b1
  Eigen::MatrixXd h;   // relu(z1)
  Eigen::VectorXd z2;  // A h w2 + b2
  Eigen::VectorXd scores;
  GcnModel model;
};

inline ForwardCache forward(const GcnModel& model, const NormalizedAdjacency& adj,
                            const Eigen::MatrixXd& x) {
  if (x.rows() != adj.size()) {
    throw ParameterError("gcn forward: feature rows (" + std::to_string(x.rows()) +
                         ") do not match adjacency size (" + std::to_string(adj.size()) + ")");
  }
  if (x.cols() != model.input_dim()) {
    throw ParameterError("gcn forward: feature columns (" + std::to_string(x.cols()) +
                         ") do not match model input (" + std::to_string(model.input_dim()) + ")");
  }
  ForwardCache c;
  c.adj = &adj;
  c.model = model;
  c.ax = adj.matrix * x;
  c.z1.noalias() = c.ax * model.w1;
  c.z1.rowwise() += model.b1;
  c.h = c.z1.cwiseMax(0.0);
  const Eigen::VectorXd u = c.h * model.w2;
  c.z2 = adj.matrix * u;
  c.z2.array() += model.b2;
  c.scores = c.z2.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
  return c;
}

inline constexpr double kProbabilityFloor = 1e-7;

/// Mean binary cross-entropy over the masked nodes, probabilities clamped to
/// [1e-7, 1 - 1e-7].
inline double masked_bce(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels,
                         std::span<const NodeId> mask) {
  if (mask.empty()) throw ParameterError("masked_bce: empty mask");
  double total = 0.0;
  for (NodeId v : mask) {
    const double s = std::clamp(scores(v), kProbabilityFloor, 1.0 - kProbabilityFloor);
    const double y = labels(v);
    total -= y * std::log(s) + (1.0 - y) * std::log(1.0 - s);
  }
  return total / static_cast<double>(mask.size());
}

/// Exact gradient of masked_bce(forward(...)) with respect to every parameter.
/// Clamped probabilities contribute zero gradient.
inline GcnModel backward(const ForwardCache& c, const Eigen::VectorXd& labels,
                         std::span<const NodeId> mask) {
  if (mask.empty()) throw ParameterError("gcn backward: empty mask");
  const auto& model = c.model;
  const Eigen::Index n = c.scores.size();
  const double inv = 1.0 / static_cast<double>(mask.size());

  Eigen::VectorXd dz2 = Eigen::VectorXd::Zero(n);
  for (NodeId v : mask) {
    const double s = c.scores(v);
    if (s < kProbabilityFloor || s > 1.0 - kProbabilityFloor) continue;
    dz2(v) += (s - labels(v)) * inv;
  }

  GcnModel g;
  g.b2 = dz2.sum();
  const Eigen::VectorXd du = c.adj->matrix.transpose() * dz2;
  g.w2.noalias() = c.h.transpose() * du;
  Eigen::MatrixXd dz1 = du * model.w2.transpose();
  dz1.array() *= (c.z1.array() > 0.0).cast<double>();
  g.w1.noalias() = c.ax.transpose() * dz1;
  g.b1 = dz1.colwise().sum();
  return g;
}

struct AdamState {
  GcnModel m;
  GcnModel v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_model(const GcnModel& model, double beta1 = 0.9, double beta2 = 0.999,
                             double eps = 1e-8) {
    AdamState s;
    s.m = GcnModel::zeros(model.input_dim(), model.hidden_dim());
    s.v = GcnModel::zeros(model.input_dim(), model.hidden_dim());
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    return s;
  }
};

/// One bias-corrected Adam update, in place.
inline void adam_step(GcnModel& model, const GcnModel& grad, AdamState& state, double lr) {
  if (grad.w1.rows() != model.w1.rows() || grad.w1.cols() != model.w1.cols() ||
      state.m.w1.rows() != model.w1.rows() || state.m.w1.cols() != model.w1.cols()) {
    throw ParameterError("adam_step: shape mismatch");
  }
  ++state.step;
  const double b1 = state.beta1, b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.eps);
  };
  update(model.w1, grad.w1, state.m.w1, state.v.w1);
  update(model.b1, grad.b1, state.m.b1, state.v.b1);
  update(model.w2, grad.w2, state.m.w2, state.v.w2);
  state.m.b2 = b1 * state.m.b2 + (1.0 - b1) * grad.b2;
  state.v.b2 = b2 * state.v.b2 + (1.0 - b2) * grad.b2 * grad.b2;
  model.b2 -= lr * (state.m.b2 / c1) / (std::sqrt(state.v.b2 / c2) + state.eps);
}

// One training or validation graph: adjacency, normalized features, infection
// labels and the loss mask (nodes not observed as infected).
struct GraphSample {
  NormalizedAdjacency adj;
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
  std::vector<NodeId> mask;
};

struct TrainConfig {
  int epochs = 1000;
  double lr = 1e-3;
  int batch_size = 128;
  int hidden = 128;
  int validation_every = 50;
  double validation_fraction = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

inline void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.hidden < 1 || cfg.validation_every < 1) {
    throw ParameterError("train: epochs, batch size, hidden size and validation interval must be positive");
  }
  if (!(cfg.lr > 0.0)) throw ParameterError("train: learning rate must be positive");
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
    throw ParameterError("train: validation fraction must lie in (0, 1)");
  }
  if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0 && cfg.adam_beta2 >= 0.0 &&
        cfg.adam_beta2 < 1.0 && cfg.adam_eps > 0.0)) {
    throw ParameterError("train: invalid Adam moment parameters");
  }
}

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // mean per-node masked loss over the epoch
};

struct ValidationRecord {
  int epoch = 0;
  double auc = 0.0;  // mean per-instance AUC; NaN if no instance had both classes
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<ValidationRecord> validations;
};

struct TrainResult {
  GcnModel model;
  int best_epoch = 0;
  double best_auc = 0.0;
  TrainHistory history;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
};

inline Eigen::VectorXd predict(const GcnModel& model, const GraphSample& sample) {
  return forward(model, sample.adj, sample.features).scores;
}

/// Mean AUC over samples whose pool holds both classes; NaN if none does.
inline double mean_auc(const GcnModel& model, std::span<const GraphSample* const> samples) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const GraphSample* s : samples) {
    const Eigen::VectorXd scores = predict(model, *s);
    const auto a = auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                       s->labels, s->mask);
    if (a) {
      sum += *a;
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

/// Index of the first record holding the largest AUC (NaN never wins).
inline std::optional<std::size_t> best_validation(const std::vector<ValidationRecord>& records) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (std::isnan(records[i].auc)) continue;
    if (!best || records[i].auc > records[*best].auc) best = i;
  }
  return best;
}

using ValidationCallback = std::function<void(const ValidationRecord&, const EpochRecord&)>;

// Mini-batch training over whole graphs. A batch's loss is the mean over every
// masked node of every graph in it. The validation split, initialization and
// epoch shuffles all derive from cfg.seed. Model selection keeps the snapshot
// with the highest validation AUC, earliest on ties.
inline TrainResult train(std::span<const GraphSample> data, const TrainConfig& cfg,
                         const ValidationCallback& on_validation = {}) {
  validate(cfg);
  if (data.size() < 2) throw ParameterError("train: need at least 2 instances");
  const Eigen::Index input = data.front().features.cols();
  for (const auto& s : data) {
    if (s.features.cols() != input) throw ParameterError("train: inconsistent feature widths");
  }

  TrainResult result;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(cfg.seed, SeedRole::kSplit));
  split_rng.shuffle(order.begin(), order.end());
  auto n_val = static_cast<std::size_t>(
      std::llround(cfg.validation_fraction * static_cast<double>(data.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, data.size() - 1);
  result.validation_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  result.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(result.validation_indices.begin(), result.validation_indices.end());
  std::sort(result.train_indices.begin(), result.train_indices.end());

  std::vector<const GraphSample*> validation;
  for (auto i : result.validation_indices) validation.push_back(&data[i]);
  std::vector<std::size_t> train_order;
  for (auto i : result.train_indices) {
    if (!data[i].mask.empty()) train_order.push_back(i);
  }
  if (train_order.empty()) throw ParameterError("train: no training instance has a nonempty mask");

  GcnModel model = GcnModel::glorot(input, cfg.hidden, derive_seed(cfg.seed, SeedRole::kInit));
  AdamState adam = AdamState::for_model(model, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  Rng shuffle_rng(derive_seed(cfg.seed, SeedRole::kShuffle));
  result.model = model;
  bool have_best = false;

  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(train_order.begin(), train_order.end());
    double epoch_loss = 0.0;
    double epoch_nodes = 0.0;
    for (std::size_t start = 0; start < train_order.size(); start += batch) {
      const std::size_t stop = std::min(start + batch, train_order.size());
      GcnModel grad = GcnModel::zeros(input, cfg.hidden);
      double batch_nodes = 0.0;
      for (std::size_t b = start; b < stop; ++b) {
        const GraphSample& s = data[train_order[b]];
        const auto cache = forward(model, s.adj, s.features);
        const double nodes = static_cast<double>(s.mask.size());
        GcnModel g = backward(cache, s.labels, s.mask);
        // backward returns the per-graph mean; reweight to a per-node sum.
        g *= nodes;
        grad += g;
        epoch_loss += masked_bce(cache.scores, s.labels, s.mask) * nodes;
        batch_nodes += nodes;
      }
      grad *= 1.0 / batch_nodes;
      epoch_nodes += batch_nodes;
      adam_step(model, grad, adam, cfg.lr);
    }
    if (!model.all_finite()) {
      throw NonTerminationError("train: parameters became non-finite at epoch " + std::to_string(epoch));
    }
    const EpochRecord rec{epoch, epoch_loss / epoch_nodes};
    result.history.epochs.push_back(rec);

    if (epoch % cfg.validation_every == 0 || epoch == cfg.epochs) {
      const ValidationRecord val{epoch, mean_auc(model, validation)};
      result.history.validations.push_back(val);
      if (!std::isnan(val.auc) && (!have_best || val.auc > result.best_auc)) {
        have_best = true;
        result.best_auc = val.auc;
        result.best_epoch = epoch;
        result.model = model;
      }
      if (on_validation) on_validation(val, rec);
    }
  }
  if (!have_best) {
    result.model = model;
    result.best_epoch = cfg.epochs;
    result.best_auc = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace asym
