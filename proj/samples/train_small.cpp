// Trains a small GCN on in-memory snapshots and compares it with the
// observed-betweenness ranking on fresh instances.
//
//   ./train_small [train_instances] [epochs]

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "asym/asym.hpp"

int main(int argc, char** argv) {
  const std::size_t count = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 40;
  const int epochs = argc > 2 ? std::atoi(argv[2]) : 100;

  asym::InstanceSpec train_spec;
  train_spec.n = 500;
  train_spec.theta = 0.9;
  std::vector<asym::GraphSample> samples;
  for (std::size_t i = 0; i < count; ++i) {
    samples.push_back(asym::make_sample(asym::generate_instance(train_spec, asym::instance_seed(1, i))));
  }

  asym::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.validation_every = 10;
  cfg.batch_size = 8;
  cfg.hidden = 32;
  cfg.lr = 1e-2;
  const auto result = asym::train(samples, cfg, [](const auto& v, const auto& e) {
    std::printf("epoch %4d  loss %.4f  validation AUC %.4f\n", v.epoch, e.loss, v.auc);
  });
  std::printf("selected epoch %d (validation AUC %.4f)\n", result.best_epoch, result.best_auc);

  asym::InstanceSpec test_spec = train_spec;
  test_spec.theta = 0.5;
  std::vector<asym::EpidemicInstance> test;
  for (std::size_t i = 0; i < 20; ++i) test.push_back(asym::generate_instance(test_spec, asym::instance_seed(2, i)));

  const auto gnn = asym::evaluate(asym::model_scorer(result.model), test);
  const auto base = asym::evaluate(asym::baseline_scorer(), test);
  std::printf("test AUC: GCN %.4f, observed betweenness %.4f\n", gnn.auc.mean, base.auc.mean);
  std::printf("test top-1%%: GCN %.4f, observed betweenness %.4f\n", gnn.top_k_precision.mean,
              base.top_k_precision.mean);
  return 0;
}
