// Command-line front end: dataset generation, GCN training, evaluation and
// report tables.
//
//   asymdetect generate --model ws --nodes 3000 --instances 1000 --theta 0.9 --out data/ws3k
//   asymdetect train --dataset data/ws3k --out runs/ws3k-model
//   asymdetect eval --checkpoint runs/ws3k-model/checkpoint.json --baseline --dataset data/test
//   asymdetect report --input a.json --input b.json --out runs/table
//   asymdetect features --dataset data/test --index 0 --out runs/debug
//
// train, eval, features and report write into --out, or into
// $ASYM_OUTPUT_DIR/<command>-<timestamp> (default ./runs) when it is omitted.
// Every command writes run.json describing the invocation and its outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "asym/asym.hpp"
#include "asym/hash.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return os.str();
}

fs::path resolve_out(const std::string& out, const std::string& command) {
  if (!out.empty()) return out;
  const char* env = std::getenv("ASYM_OUTPUT_DIR");
  const fs::path root = env && *env ? env : "runs";
  return root / (command + "-" + timestamp());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw asym::FormatError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw asym::FormatError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw asym::FormatError("write failed for " + path.string());
}

// Records the invocation, its configuration and the hashes of what it wrote.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv)
      : command_(std::move(command)), argv_(std::move(argv)), start_(Clock::now()) {}

  ordered_json& config() { return config_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_artifact(const fs::path& path) { artifacts_.push_back(path); }

  void write(const fs::path& dir) const {
    ordered_json j;
    j["command"] = command_;
    j["argv"] = argv_;
    j["config"] = config_;
    j["seed"] = seed_ ? ordered_json(*seed_) : ordered_json();
    auto& a = j["artifacts"];
    a = ordered_json::array();
    for (const auto& p : artifacts_) {
      a.push_back({{"path", fs::relative(p, dir).string()}, {"sha256", asym::sha256_file(p.string())}});
    }
    j["runtime_seconds"] = std::chrono::duration<double>(Clock::now() - start_).count();
    write_text(dir / "run.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::chrono::time_point<Clock> start_;
  ordered_json config_ = ordered_json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<fs::path> artifacts_;
};

unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) over `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < jobs; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---- generate ---------------------------------------------------------------

struct GenerateOptions {
  std::string model;
  std::size_t nodes = 3000;
  std::size_t instances = 1000;
  double theta = 0.5;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t m = 4;
  std::size_t k = 8;
  double p = 0.3;
  double stop_fraction = 0.2;
  std::vector<double> betas{0.1, 0.3, 0.5};
  std::string overshoot = "trim";
  unsigned jobs = 1;
};

int cmd_generate(const GenerateOptions& o, const std::vector<std::string>& argv) {
  RunManifest run("generate", argv);
  asym::DatasetConfig cfg;
  cfg.spec.model = asym::parse_network_model(o.model);
  cfg.spec.n = o.nodes;
  cfg.spec.theta = o.theta;
  cfg.spec.ba_m = o.m;
  cfg.spec.ws_k = o.k;
  cfg.spec.ws_p = o.p;
  cfg.spec.stop_fraction = o.stop_fraction;
  cfg.spec.beta_choices = o.betas;
  cfg.spec.overshoot = asym::parse_overshoot(o.overshoot);
  cfg.instance_count = o.instances;
  cfg.master_seed = o.seed;

  const fs::path dir = o.out;
  const auto manifest = asym::generate_dataset(cfg, dir, resolve_jobs(o.jobs));
  if (!asym::verify_dataset(dir)) throw asym::FormatError("dataset hash check failed after writing");

  run.config() = asym::config_json(cfg);
  run.set_seed(o.seed);
  run.add_artifact(dir / asym::kManifestFile);
  run.add_artifact(dir / asym::kInstancesFile);
  run.write(dir);
  std::cerr << "wrote " << manifest.records << " instances to " << dir.string() << " (sha256 "
            << manifest.sha256.substr(0, 12) << ")\n";
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainOptions {
  std::vector<std::string> datasets;
  std::string out;
  asym::TrainConfig config;
  unsigned jobs = 1;
  bool quiet = false;
};

std::vector<asym::GraphSample> load_samples(const std::vector<std::string>& datasets, unsigned jobs,
                                            ordered_json& echo) {
  std::vector<asym::GraphSample> samples;
  echo = ordered_json::array();
  for (const auto& d : datasets) {
    asym::DatasetReader reader(d);
    echo.push_back({{"path", d}, {"sha256", reader.manifest().sha256},
                    {"config", reader.manifest().json.at("config")}});
    std::vector<asym::EpidemicInstance> chunk;
    auto flush = [&] {
      std::vector<asym::GraphSample> made(chunk.size());
      parallel_for(chunk.size(), jobs, [&](std::size_t i) { made[i] = asym::make_sample(chunk[i]); });
      for (auto& s : made) samples.push_back(std::move(s));
      chunk.clear();
    };
    while (auto rec = reader.next()) {
      chunk.push_back(std::move(rec->instance));
      if (chunk.size() >= 4 * std::max(1u, jobs)) flush();
    }
    flush();
  }
  return samples;
}

int cmd_train(const TrainOptions& o, const std::vector<std::string>& argv) {
  RunManifest run("train", argv);
  const auto dir = resolve_out(o.out, "train");
  ensure_dir(dir);
  ordered_json inputs;
  const unsigned jobs = resolve_jobs(o.jobs);
  const auto samples = load_samples(o.datasets, jobs, inputs);
  if (!o.quiet) std::cerr << "loaded " << samples.size() << " training instances\n";

  const auto result = asym::train(samples, o.config, [&](const auto& val, const auto& epoch) {
    if (!o.quiet) {
      std::cerr << "epoch " << val.epoch << "  loss " << epoch.loss << "  validation auc " << val.auc << "\n";
    }
  });
  const auto ck = asym::make_checkpoint(result, o.config);
  const auto ck_path = dir / "checkpoint.json";
  asym::save_checkpoint(ck, ck_path);

  std::ostringstream hist;
  hist << "epoch,loss,validation_auc\n";
  std::size_t vi = 0;
  for (const auto& e : result.history.epochs) {
    hist << e.epoch << ',' << asym::format_real(e.loss) << ',';
    if (vi < result.history.validations.size() && result.history.validations[vi].epoch == e.epoch) {
      const double a = result.history.validations[vi++].auc;
      if (!std::isnan(a)) hist << asym::format_real(a);
    }
    hist << '\n';
  }
  const auto hist_path = dir / "history.csv";
  write_text(hist_path, hist.str());

  auto& c = run.config();
  c["datasets"] = inputs;
  c["train"] = asym::checkpoint_json(ck).at("config");
  c["best_epoch"] = result.best_epoch;
  c["best_validation_auc"] = std::isnan(result.best_auc) ? ordered_json() : ordered_json(result.best_auc);
  run.set_seed(o.config.seed);
  run.add_artifact(ck_path);
  run.add_artifact(hist_path);
  run.write(dir);
  std::cerr << "best validation auc " << result.best_auc << " at epoch " << result.best_epoch << "; wrote "
            << ck_path.string() << "\n";
  return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalOptions {
  std::vector<std::string> datasets;
  std::string sweep;
  std::string checkpoint;
  std::string label = "gnn";
  bool baseline = false;
  double top_k = asym::kDefaultTopKFraction;
  std::string out;
  unsigned jobs = 1;
};

asym::EvalReport evaluate_dataset(const asym::Scorer& scorer, const fs::path& dataset, double fraction,
                                  unsigned jobs) {
  asym::DatasetReader reader(dataset);
  std::vector<asym::InstanceEval> records;
  std::vector<asym::EpidemicInstance> chunk;
  auto flush = [&] {
    if (chunk.empty()) return;
    auto part = asym::evaluate(scorer, chunk, fraction, jobs);
    for (auto& r : part.instances) records.push_back(r);
    chunk.clear();
  };
  while (auto rec = reader.next()) {
    chunk.push_back(std::move(rec->instance));
    if (chunk.size() >= 4 * std::max(1u, jobs)) flush();
  }
  flush();
  for (std::size_t i = 0; i < records.size(); ++i) records[i].instance = i;
  return asym::aggregate(std::move(records), fraction);
}

ordered_json dataset_echo(const fs::path& dataset) {
  const auto m = asym::read_manifest(dataset);
  ordered_json j = m.json.at("config");
  j["path"] = dataset.string();
  j["sha256"] = m.sha256;
  return j;
}

int cmd_eval(const EvalOptions& o, const std::vector<std::string>& argv) {
  RunManifest run("eval", argv);
  if (o.checkpoint.empty() && !o.baseline) {
    throw CLI::ValidationError("eval", "nothing to evaluate: pass --checkpoint and/or --baseline");
  }
  std::vector<fs::path> datasets(o.datasets.begin(), o.datasets.end());
  if (!o.sweep.empty()) {
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(o.sweep)) {
      if (entry.is_directory() && fs::exists(entry.path() / asym::kManifestFile)) found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    if (found.empty()) throw asym::FormatError("no dataset directories under " + o.sweep);
    datasets.insert(datasets.end(), found.begin(), found.end());
  }
  if (datasets.empty()) throw CLI::ValidationError("eval", "pass --dataset or --sweep");

  std::vector<std::pair<std::string, asym::Scorer>> methods;
  if (!o.checkpoint.empty()) {
    const auto ck = asym::load_checkpoint(o.checkpoint);
    methods.emplace_back(o.label, asym::model_scorer(ck.model));
    run.config()["checkpoint"] = {{"path", o.checkpoint}, {"sha256", asym::sha256_file(o.checkpoint)}};
  }
  if (o.baseline) methods.emplace_back("baseline", asym::baseline_scorer());

  const auto dir = resolve_out(o.out, "eval");
  ensure_dir(dir);
  const unsigned jobs = resolve_jobs(o.jobs);
  std::ostringstream summary;
  summary << "dataset,model,n,theta,method,instances,auc_mean,auc_std,top_k_mean,top_k_std,undefined_auc\n";
  ordered_json evaluated = ordered_json::array();
  std::set<std::string> labels_used;
  for (const auto& ds : datasets) {
    const auto echo = dataset_echo(ds);
    std::string label = ds.filename().string();
    if (label.empty()) label = ds.parent_path().filename().string();
    if (!labels_used.insert(label).second) {
      throw CLI::ValidationError("eval", "two datasets share the directory name '" + label + "'");
    }
    evaluated.push_back(echo);
    for (const auto& [method, scorer] : methods) {
      const auto report = evaluate_dataset(scorer, ds, o.top_k, jobs);
      const auto csv_path = dir / (label + "." + method + ".csv");
      const auto json_path = dir / (label + "." + method + ".json");
      std::ostringstream csv;
      asym::write_eval_csv(report, csv);
      write_text(csv_path, csv.str());
      auto agg = asym::aggregate_json(report, method, echo);
      agg["instances_csv"] = csv_path.filename().string();
      write_text(json_path, agg.dump(2) + "\n");
      run.add_artifact(csv_path);
      run.add_artifact(json_path);
      summary << label << ',' << echo.at("model").get<std::string>() << ',' << echo.at("n").get<std::size_t>()
              << ',' << asym::format_real(echo.at("theta").get<double>()) << ',' << method << ','
              << report.instances.size() << ',' << asym::format_real(report.auc.mean) << ','
              << asym::format_real(report.auc.std) << ',' << asym::format_real(report.top_k_precision.mean)
              << ',' << asym::format_real(report.top_k_precision.std) << ',' << report.undefined_auc << '\n';
      std::cerr << label << " " << method << ": auc " << report.auc.mean << " +- " << report.auc.std
                << ", top-k " << report.top_k_precision.mean << " +- " << report.top_k_precision.std << "\n";
    }
  }
  const auto summary_path = dir / "summary.csv";
  write_text(summary_path, summary.str());
  run.add_artifact(summary_path);
  run.config()["datasets"] = evaluated;
  run.config()["top_k_fraction"] = o.top_k;
  run.write(dir);
  return 0;
}

// ---- features ---------------------------------------------------------------

struct FeaturesOptions {
  std::string dataset;
  std::size_t index = 0;
  bool raw = false;
  std::string out;
};

int cmd_features(const FeaturesOptions& o, const std::vector<std::string>& argv) {
  RunManifest run("features", argv);
  asym::DatasetReader reader(o.dataset);
  std::optional<asym::InstanceRecord> rec;
  while ((rec = reader.next()) && rec->index != o.index) {
  }
  if (!rec) throw CLI::ValidationError("features", "dataset has no instance " + std::to_string(o.index));
  const auto& inst = rec->instance;
  auto fm = asym::compute_features(*inst.graph, inst.observed);
  if (!o.raw) fm = asym::normalize_features(fm);
  const auto labels = asym::membership(inst.node_count(), inst.infected);

  std::ostringstream csv;
  csv << "node";
  for (auto name : asym::kFeatureNames) csv << ',' << name;
  csv << ",infected\n";
  for (Eigen::Index v = 0; v < fm.values.rows(); ++v) {
    csv << v;
    for (Eigen::Index c = 0; c < fm.values.cols(); ++c) csv << ',' << asym::format_real(fm.values(v, c));
    csv << ',' << int(labels[static_cast<std::size_t>(v)]) << '\n';
  }
  const auto dir = resolve_out(o.out, "features");
  ensure_dir(dir);
  const auto path = dir / ("features-" + std::to_string(o.index) + ".csv");
  write_text(path, csv.str());
  run.config()["dataset"] = {{"path", o.dataset}, {"sha256", reader.manifest().sha256}};
  run.config()["index"] = o.index;
  run.config()["normalized"] = !o.raw;
  run.add_artifact(path);
  run.write(dir);
  return 0;
}

// ---- report -----------------------------------------------------------------

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string out;
};

struct AggregateInput {
  std::string method;
  std::size_t n = 0;
  double theta = 0.0;
  std::string model;
  std::map<std::string, asym::MetricSummary> metrics;
};

AggregateInput read_aggregate(const fs::path& path, double& fraction, std::set<std::string>& metric_keys,
                              bool first) {
  std::ifstream in(path);
  if (!in) throw asym::FormatError("cannot open " + path.string());
  const auto j = nlohmann::json::parse(in);
  AggregateInput a;
  try {
    a.method = j.at("method").get<std::string>();
    const auto& d = j.at("dataset");
    a.n = d.at("n").get<std::size_t>();
    a.theta = d.at("theta").get<double>();
    a.model = d.at("model").get<std::string>();
    std::set<std::string> keys;
    for (const auto& [k, v] : j.at("metrics").items()) {
      a.metrics[k] = asym::summary_from_json(v);
      keys.insert(k);
    }
    const double f = j.at("top_k_fraction").get<double>();
    if (first) {
      metric_keys = keys;
      fraction = f;
    } else if (keys != metric_keys || f != fraction) {
      throw asym::FormatError(path.string() + ": metric set differs from the first input");
    }
    // The per-instance CSV must reproduce the aggregate exactly.
    if (j.contains("instances_csv")) {
      const auto csv_path = path.parent_path() / j.at("instances_csv").get<std::string>();
      std::ifstream csv(csv_path);
      if (!csv) throw asym::FormatError("cannot open " + csv_path.string());
      const auto again = asym::aggregate(asym::read_eval_csv(csv, csv_path.string()), f);
      const auto& auc = a.metrics.at("auc");
      const bool same_auc = again.auc.count == auc.count &&
                            (again.auc.count == 0 || (again.auc.mean == auc.mean && again.auc.std == auc.std));
      if (!same_auc || again.top_k_precision.mean != a.metrics.at("top_k_precision").mean) {
        throw asym::FormatError(csv_path.string() + ": per-instance rows do not reproduce " + path.string());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw asym::FormatError(path.string() + ": " + e.what());
  }
  return a;
}

std::string cell(const asym::MetricSummary& s) {
  if (s.count == 0) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << s.mean << " ± " << s.std;
  return os.str();
}

int cmd_report(const ReportOptions& o, const std::vector<std::string>& argv) {
  RunManifest run("report", argv);
  if (o.inputs.empty()) throw CLI::ValidationError("report", "no --input aggregates given");
  double fraction = 0.0;
  std::set<std::string> metric_keys;
  std::vector<AggregateInput> inputs;
  for (std::size_t i = 0; i < o.inputs.size(); ++i) {
    inputs.push_back(read_aggregate(o.inputs[i], fraction, metric_keys, i == 0));
  }

  std::vector<std::string> methods;
  for (const auto& a : inputs) {
    if (std::find(methods.begin(), methods.end(), a.method) == methods.end()) methods.push_back(a.method);
  }
  // Rows: (model, n descending, theta ascending, metric); columns: methods.
  using RowKey = std::tuple<std::string, std::size_t, double>;
  std::map<RowKey, std::map<std::string, const AggregateInput*>> rows;
  for (const auto& a : inputs) {
    auto& slot = rows[{a.model, a.n, a.theta}][a.method];
    if (slot) {
      throw asym::FormatError("two inputs for method " + a.method + " on " + a.model + "/" +
                              std::to_string(a.n) + "/theta=" + asym::format_real(a.theta));
    }
    slot = &a;
  }
  std::vector<RowKey> order;
  for (const auto& [k, _] : rows) order.push_back(k);
  std::stable_sort(order.begin(), order.end(), [](const RowKey& x, const RowKey& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) < std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) > std::get<1>(y);
    return std::get<2>(x) < std::get<2>(y);
  });

  std::ostringstream csv, md;
  csv << "model,n,theta_eval,metric";
  md << "| model | nodes | θ_eval | metric |";
  for (const auto& m : methods) {
    csv << ',' << m << "_mean," << m << "_std";
    md << ' ' << m << " |";
  }
  csv << '\n';
  md << "\n|---|---|---|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) md << "---|";
  md << '\n';
  for (const auto& key : order) {
    for (const auto& metric : metric_keys) {
      const auto& [model, n, theta] = key;
      csv << model << ',' << n << ',' << asym::format_real(theta) << ',' << metric;
      md << "| " << model << " | " << n << " | " << theta << " | " << metric << " |";
      for (const auto& m : methods) {
        const auto it = rows[key].find(m);
        if (it == rows[key].end()) {
          csv << ",,";
          md << " |";
          continue;
        }
        const auto& s = it->second->metrics.at(metric);
        csv << ',' << (s.count ? asym::format_real(s.mean) : "") << ',' << (s.count ? asym::format_real(s.std) : "");
        md << ' ' << cell(s) << " |";
      }
      csv << '\n';
      md << '\n';
    }
  }

  const auto dir = resolve_out(o.out, "report");
  ensure_dir(dir);
  write_text(dir / "table.csv", csv.str());
  write_text(dir / "table.md", md.str());
  run.config()["inputs"] = o.inputs;
  run.config()["top_k_fraction"] = fraction;
  run.add_artifact(dir / "table.csv");
  run.add_artifact(dir / "table.md");
  run.write(dir);
  std::cout << md.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Asymptomatic-node detection in partially observed SI epidemics"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Generate an epidemic snapshot dataset");
  g->add_option("--model", gen.model, "Network model")->required()->check(CLI::IsMember({"ba", "ws"}));
  g->add_option("--nodes", gen.nodes, "Nodes per network")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--instances", gen.instances, "Number of instances")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--theta", gen.theta, "Observation probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output dataset directory")->required();
  g->add_option("--m", gen.m, "BA edges per arriving node")->capture_default_str();
  g->add_option("--k", gen.k, "WS ring degree (even)")->capture_default_str();
  g->add_option("--p", gen.p, "WS rewiring probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  g->add_option("--stop-fraction", gen.stop_fraction, "Infected fraction at the snapshot")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  g->add_option("--betas", gen.betas, "Infection probabilities drawn uniformly per instance")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  g->add_option("--overshoot", gen.overshoot, "Crossing-step policy")
      ->check(CLI::IsMember({"trim", "keep"}))->capture_default_str();
  g->add_option("--jobs", gen.jobs, "Worker threads (0 = all cores)")->capture_default_str();

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train the GCN on one or more datasets");
  t->add_option("--dataset", tr.datasets, "Training dataset directory (repeatable)")->required()
      ->check(CLI::ExistingDirectory);
  t->add_option("--out", tr.out, "Output directory");
  t->add_option("--epochs", tr.config.epochs, "Training epochs")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--lr", tr.config.lr, "Adam learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--hidden", tr.config.hidden, "Hidden layer width")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--batch", tr.config.batch_size, "Graphs per batch")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--val-fraction", tr.config.validation_fraction, "Share of instances held out for selection")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  t->add_option("--val-every", tr.config.validation_every, "Epochs between validations")
      ->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--seed", tr.config.seed, "Training seed")->capture_default_str();
  t->add_option("--jobs", tr.jobs, "Threads for feature extraction (0 = all cores)")->capture_default_str();
  t->add_flag("--quiet", tr.quiet, "Suppress progress output");

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint and/or the observed-betweenness baseline");
  e->add_option("--dataset", ev.datasets, "Test dataset directory (repeatable)")->check(CLI::ExistingDirectory);
  e->add_option("--sweep", ev.sweep, "Evaluate every dataset directory under this root")
      ->check(CLI::ExistingDirectory);
  e->add_option("--checkpoint", ev.checkpoint, "Model checkpoint")->check(CLI::ExistingFile);
  e->add_option("--label", ev.label, "Method name for the checkpoint")->capture_default_str();
  e->add_flag("--baseline", ev.baseline, "Also score with observed betweenness");
  e->add_option("--top-k", ev.top_k, "Top-k fraction of the evaluation pool")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  e->add_option("--out", ev.out, "Output directory");
  e->add_option("--jobs", ev.jobs, "Worker threads (0 = all cores)")->capture_default_str();

  FeaturesOptions fo;
  auto* f = app.add_subcommand("features", "Export one instance's feature matrix as CSV");
  f->add_option("--dataset", fo.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  f->add_option("--index", fo.index, "Instance index")->capture_default_str();
  f->add_flag("--raw", fo.raw, "Skip per-instance z-scoring");
  f->add_option("--out", fo.out, "Output directory");

  ReportOptions rp;
  auto* r = app.add_subcommand("report", "Join aggregate JSON files into a comparison table");
  r->add_option("--input", rp.inputs, "Aggregate JSON written by eval (repeatable)")->check(CLI::ExistingFile);
  r->add_option("--out", rp.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) return cmd_generate(gen, args);
    if (t->parsed()) return cmd_train(tr, args);
    if (e->parsed()) return cmd_eval(ev, args);
    if (f->parsed()) return cmd_features(fo, args);
    if (r->parsed()) return cmd_report(rp, args);
  } catch (const CLI::Error& err) {
    return app.exit(err);
  } catch (const asym::ParameterError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
