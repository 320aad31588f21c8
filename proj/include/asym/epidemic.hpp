#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asym/error.hpp"
#include "asym/generators.hpp"
#include "asym/graph.hpp"
#include "asym/rng.hpp"

namespace asym {

// What to do when the step that crosses the stopping threshold infects more
// nodes than needed. kTrim keeps a uniformly random subset of that step's new
// infections so exactly ceil(stop_fraction * n) nodes end up infected; kKeep
// returns the whole crossing step.
enum class Overshoot { kTrim, kKeep };

struct EpidemicConfig {
  double beta = 0.1;
  double stop_fraction = 0.2;
  Overshoot overshoot = Overshoot::kTrim;
  std::optional<NodeId> source{};  // nullopt: drawn uniformly from the seed
  std::uint64_t seed = 0;
};

struct SiResult {
  NodeId source = 0;
  std::uint32_t t_h = 0;
  std::vector<NodeId> infected;             // sorted ascending
  std::vector<std::uint32_t> infection_time;  // kUnreached for susceptible
};

inline void validate(const EpidemicConfig& cfg) {
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) {
    throw ParameterError("epidemic: beta must lie in [0, 1]");
  }
  if (!(cfg.stop_fraction > 0.0 && cfg.stop_fraction <= 1.0)) {
    throw ParameterError("epidemic: stop_fraction must lie in (0, 1]");
  }
}

/// Number of infected nodes at which the epidemic is stopped.
inline std::size_t stop_count(std::size_t n, double stop_fraction) {
  return static_cast<std::size_t>(std::ceil(stop_fraction * static_cast<double>(n)));
}

// One synchronous SI step. Every susceptible node with r > 0 infected
// neighbours is infected with probability 1 - (1 - beta)^r, judged against the
// state at the start of the step; draws are taken in ascending node order.
// Returns the newly infected nodes.
inline std::vector<NodeId> si_step(const Graph& g, std::vector<char>& infected,
                                   double beta, Rng& rng) {
  std::vector<NodeId> fresh;
  const double escape = 1.0 - beta;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (infected[v]) continue;
    unsigned r = 0;
    for (NodeId u : g.neighbours(v)) r += infected[u] ? 1u : 0u;
    if (r == 0) continue;
    const double p = 1.0 - std::pow(escape, static_cast<double>(r));
    if (rng.bernoulli(p)) fresh.push_back(v);
  }
  for (NodeId v : fresh) infected[v] = 1;
  return fresh;
}

/// Runs a discrete-time SI epidemic until at least ceil(stop_fraction * n)
/// nodes are infected (exactly that many under Overshoot::kTrim). Throws
/// NonTerminationError after 10 * n steps.
inline SiResult simulate_si(const Graph& g, const EpidemicConfig& cfg) {
  validate(cfg);
  const std::size_t n = g.node_count();
  if (n == 0) throw ParameterError("simulate_si: empty graph");
  Rng rng(cfg.seed);
  SiResult out;
  if (cfg.source) {
    if (*cfg.source >= n) throw ParameterError("simulate_si: source out of range");
    out.source = *cfg.source;
  } else {
    out.source = static_cast<NodeId>(rng.uniform_index(n));
  }

  std::vector<char> infected(n, 0);
  infected[out.source] = 1;
  out.infection_time.assign(n, kUnreached);
  out.infection_time[out.source] = 0;
  std::size_t count = 1;
  const std::size_t target = stop_count(n, cfg.stop_fraction);
  const std::size_t step_cap = 10 * n;

  std::uint32_t t = 0;
  while (count < target) {
    if (t >= step_cap) {
      throw NonTerminationError("simulate_si: infected fraction stalled below " +
                                std::to_string(cfg.stop_fraction) + " after " +
                                std::to_string(step_cap) + " steps");
    }
    ++t;
    std::vector<NodeId> fresh = si_step(g, infected, cfg.beta, rng);
    if (cfg.overshoot == Overshoot::kTrim && count + fresh.size() > target) {
      rng.shuffle(fresh.begin(), fresh.end());
      for (std::size_t i = target - count; i < fresh.size(); ++i) infected[fresh[i]] = 0;
      fresh.resize(target - count);
    }
    for (NodeId v : fresh) {
      out.infection_time[v] = t;
      ++count;
    }
  }
  out.t_h = t;
  out.infected.reserve(count);
  for (NodeId v = 0; v < n; ++v) {
    if (infected[v]) out.infected.push_back(v);
  }
  return out;
}

/// Keeps each infected node independently with probability theta.
inline std::vector<NodeId> apply_observation(std::span<const NodeId> infected,
                                             double theta, std::uint64_t seed) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw ParameterError("apply_observation: theta must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<NodeId> observed;
  for (NodeId v : infected) {
    if (rng.bernoulli(theta)) observed.push_back(v);
  }
  return observed;
}

enum class NetworkModel { kBarabasiAlbert, kWattsStrogatz };

inline std::string to_string(NetworkModel model) {
  return model == NetworkModel::kBarabasiAlbert ? "ba" : "ws";
}

inline std::string to_string(Overshoot o) { return o == Overshoot::kTrim ? "trim" : "keep"; }

inline Overshoot parse_overshoot(const std::string& s) {
  if (s == "trim") return Overshoot::kTrim;
  if (s == "keep") return Overshoot::kKeep;
  throw ParameterError("unknown overshoot policy '" + s + "' (expected trim or keep)");
}

inline NetworkModel parse_network_model(const std::string& s) {
  if (s == "ba") return NetworkModel::kBarabasiAlbert;
  if (s == "ws") return NetworkModel::kWattsStrogatz;
  throw ParameterError("unknown network model '" + s + "' (expected ba or ws)");
}

// One snapshot of a partially observed SI epidemic.
struct EpidemicInstance {
  std::shared_ptr<const Graph> graph;
  NodeId source = 0;
  double beta = 0.0;
  std::uint32_t t_h = 0;
  double theta = 0.0;
  std::vector<NodeId> infected;  // sorted ascending
  std::vector<NodeId> observed;  // sorted ascending, subset of infected

  std::size_t node_count() const { return graph->node_count(); }

  /// Infected but unobserved nodes.
  std::vector<NodeId> asymptomatic() const {
    std::vector<NodeId> out;
    std::set_difference(infected.begin(), infected.end(), observed.begin(),
                        observed.end(), std::back_inserter(out));
    return out;
  }

  /// Evaluation pool: every node not observed as infected.
  std::vector<NodeId> pool() const {
    std::vector<NodeId> out;
    out.reserve(node_count() - observed.size());
    std::size_t j = 0;
    for (NodeId v = 0; v < node_count(); ++v) {
      if (j < observed.size() && observed[j] == v) {
        ++j;
      } else {
        out.push_back(v);
      }
    }
    return out;
  }
};

/// Checks the structural invariants of an instance; throws FormatError.
inline void validate(const EpidemicInstance& inst, double stop_fraction = 0.2) {
  if (!inst.graph) throw FormatError("instance: missing graph");
  const std::size_t n = inst.node_count();
  auto sorted_in_range = [n](const std::vector<NodeId>& ids) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] >= n || (i > 0 && ids[i - 1] >= ids[i])) return false;
    }
    return true;
  };
  if (!sorted_in_range(inst.infected) || !sorted_in_range(inst.observed)) {
    throw FormatError("instance: node sets must be sorted, unique and < n");
  }
  if (!std::includes(inst.infected.begin(), inst.infected.end(),
                     inst.observed.begin(), inst.observed.end())) {
    throw FormatError("instance: observed set is not a subset of the infected set");
  }
  if (!std::binary_search(inst.infected.begin(), inst.infected.end(), inst.source)) {
    throw FormatError("instance: source is not infected");
  }
  if (inst.infected.size() < stop_count(n, stop_fraction)) {
    throw FormatError("instance: fewer infected nodes than the stopping rule requires");
  }
  if (!(inst.beta >= 0.0 && inst.beta <= 1.0) || !(inst.theta >= 0.0 && inst.theta <= 1.0)) {
    throw FormatError("instance: beta and theta must lie in [0, 1]");
  }
}

inline constexpr std::array<double, 3> kDefaultBetaChoices{0.1, 0.3, 0.5};

struct InstanceSpec {
  NetworkModel model = NetworkModel::kWattsStrogatz;
  std::size_t n = 3000;
  double theta = 0.5;
  std::size_t ba_m = 4;
  std::size_t ws_k = 8;
  double ws_p = 0.3;
  std::vector<double> beta_choices{kDefaultBetaChoices.begin(), kDefaultBetaChoices.end()};
  double stop_fraction = 0.2;
  Overshoot overshoot = Overshoot::kTrim;
};

inline Graph generate_graph(const InstanceSpec& spec, std::uint64_t seed) {
  if (spec.model == NetworkModel::kBarabasiAlbert) {
    return generate_ba({.n = spec.n, .m = spec.ba_m, .seed = seed});
  }
  return generate_ws({.n = spec.n, .k = spec.ws_k, .p = spec.ws_p, .seed = seed});
}

// Builds one instance from a single seed. Each stage draws from its own
// sub-seed (see SeedRole) so stages can be re-randomized independently.
inline EpidemicInstance generate_instance(const InstanceSpec& spec, std::uint64_t seed) {
  if (spec.beta_choices.empty()) throw ParameterError("generate_instance: no beta choices");
  auto graph = std::make_shared<const Graph>(
      generate_graph(spec, derive_seed(seed, SeedRole::kGraph)));

  Rng source_rng(derive_seed(seed, SeedRole::kSource));
  Rng beta_rng(derive_seed(seed, SeedRole::kBeta));
  EpidemicConfig cfg;
  cfg.source = static_cast<NodeId>(source_rng.uniform_index(graph->node_count()));
  cfg.beta = spec.beta_choices[beta_rng.uniform_index(spec.beta_choices.size())];
  cfg.stop_fraction = spec.stop_fraction;
  cfg.overshoot = spec.overshoot;
  cfg.seed = derive_seed(seed, SeedRole::kEpidemic);

  SiResult si = simulate_si(*graph, cfg);
  EpidemicInstance inst;
  inst.graph = std::move(graph);
  inst.source = si.source;
  inst.beta = cfg.beta;
  inst.t_h = si.t_h;
  inst.theta = spec.theta;
  inst.infected = std::move(si.infected);
  inst.observed = apply_observation(inst.infected, spec.theta,
                                    derive_seed(seed, SeedRole::kObservation));
  return inst;
}

}  // namespace asym
