#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "asym/epidemic.hpp"
#include "asym/error.hpp"
#include "asym/hash.hpp"
#include "asym/rng.hpp"

// On-disk layout of a dataset directory:
//
//   manifest.json    config echo, record count and SHA-256 of the records file
//   instances.jsonl  one JSON object per line, in instance order
//
// Record fields, in order: schema, index, seed, model, n, theta, params,
// stop_fraction, overshoot, source, beta, t_h, edges, infected, observed.
// `edges` is the canonical edge list flattened as [u0, v0, u1, v1, ...] with
// u < v; `infected` and `observed` are ascending node ids.

namespace asym {

inline constexpr int kDatasetSchema = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kInstancesFile = "instances.jsonl";

struct DatasetConfig {
  InstanceSpec spec;
  std::size_t instance_count = 1;
  std::uint64_t master_seed = 0;
};

inline void validate(const DatasetConfig& cfg) {
  if (cfg.instance_count < 1) throw ParameterError("dataset: instance_count must be >= 1");
  const auto& s = cfg.spec;
  if (!(s.theta >= 0.0 && s.theta <= 1.0)) throw ParameterError("dataset: theta must lie in [0, 1]");
  if (!(s.stop_fraction > 0.0 && s.stop_fraction <= 1.0)) {
    throw ParameterError("dataset: stop_fraction must lie in (0, 1]");
  }
  if (s.beta_choices.empty()) throw ParameterError("dataset: beta_choices is empty");
  for (double b : s.beta_choices) {
    if (!(b >= 0.0 && b <= 1.0)) throw ParameterError("dataset: beta choices must lie in [0, 1]");
  }
  if (s.model == NetworkModel::kBarabasiAlbert) {
    validate(BarabasiAlbertParams{.n = s.n, .m = s.ba_m});
  } else {
    validate(WattsStrogatzParams{.n = s.n, .k = s.ws_k, .p = s.ws_p});
  }
}

inline std::uint64_t instance_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, SeedRole::kInstance, index);
}

inline nlohmann::ordered_json generator_params_json(const InstanceSpec& s) {
  nlohmann::ordered_json p;
  if (s.model == NetworkModel::kBarabasiAlbert) {
    p["m"] = s.ba_m;
  } else {
    p["k"] = s.ws_k;
    p["p"] = s.ws_p;
  }
  return p;
}

inline nlohmann::ordered_json config_json(const DatasetConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = to_string(cfg.spec.model);
  j["n"] = cfg.spec.n;
  j["instance_count"] = cfg.instance_count;
  j["theta"] = cfg.spec.theta;
  j["params"] = generator_params_json(cfg.spec);
  j["beta_choices"] = cfg.spec.beta_choices;
  j["stop_fraction"] = cfg.spec.stop_fraction;
  j["overshoot"] = to_string(cfg.spec.overshoot);
  j["master_seed"] = cfg.master_seed;
  return j;
}

inline DatasetConfig config_from_json(const nlohmann::json& j) {
  DatasetConfig cfg;
  cfg.spec.model = parse_network_model(j.at("model").get<std::string>());
  cfg.spec.n = j.at("n").get<std::size_t>();
  cfg.instance_count = j.at("instance_count").get<std::size_t>();
  cfg.spec.theta = j.at("theta").get<double>();
  const auto& p = j.at("params");
  if (cfg.spec.model == NetworkModel::kBarabasiAlbert) {
    cfg.spec.ba_m = p.at("m").get<std::size_t>();
  } else {
    cfg.spec.ws_k = p.at("k").get<std::size_t>();
    cfg.spec.ws_p = p.at("p").get<double>();
  }
  cfg.spec.beta_choices = j.at("beta_choices").get<std::vector<double>>();
  cfg.spec.stop_fraction = j.at("stop_fraction").get<double>();
  cfg.spec.overshoot = parse_overshoot(j.at("overshoot").get<std::string>());
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  return cfg;
}

struct InstanceRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  EpidemicInstance instance;
};

inline std::string encode_record(const InstanceRecord& rec, const InstanceSpec& spec) {
  const auto& inst = rec.instance;
  nlohmann::ordered_json j;
  j["schema"] = kDatasetSchema;
  j["index"] = rec.index;
  j["seed"] = rec.seed;
  j["model"] = to_string(spec.model);
  j["n"] = inst.node_count();
  j["theta"] = inst.theta;
  j["params"] = generator_params_json(spec);
  j["stop_fraction"] = spec.stop_fraction;
  j["overshoot"] = to_string(spec.overshoot);
  j["source"] = inst.source;
  j["beta"] = inst.beta;
  j["t_h"] = inst.t_h;
  std::vector<NodeId> flat;
  flat.reserve(2 * inst.graph->edge_count());
  for (const auto& [u, v] : inst.graph->edges()) {
    flat.push_back(u);
    flat.push_back(v);
  }
  j["edges"] = flat;
  j["infected"] = inst.infected;
  j["observed"] = inst.observed;
  return j.dump();
}

inline InstanceRecord decode_record(const std::string& line, double stop_fraction) {
  const auto j = nlohmann::json::parse(line);
  if (!j.is_object()) throw FormatError("record is not a JSON object");
  const int schema = j.at("schema").get<int>();
  if (schema != kDatasetSchema) {
    throw FormatError("record schema " + std::to_string(schema) + " is not supported (expected " +
                      std::to_string(kDatasetSchema) + ")");
  }
  InstanceRecord rec;
  rec.index = j.at("index").get<std::size_t>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  const auto n = j.at("n").get<std::size_t>();
  const auto flat = j.at("edges").get<std::vector<NodeId>>();
  if (flat.size() % 2 != 0) throw FormatError("edge list has odd length");
  std::vector<Edge> edges;
  edges.reserve(flat.size() / 2);
  for (std::size_t i = 0; i < flat.size(); i += 2) edges.emplace_back(flat[i], flat[i + 1]);
  try {
    rec.instance.graph = std::make_shared<const Graph>(Graph::from_edges(n, edges));
  } catch (const ParameterError& e) {
    throw FormatError(e.what());
  }
  rec.instance.source = j.at("source").get<NodeId>();
  rec.instance.beta = j.at("beta").get<double>();
  rec.instance.t_h = j.at("t_h").get<std::uint32_t>();
  rec.instance.theta = j.at("theta").get<double>();
  rec.instance.infected = j.at("infected").get<std::vector<NodeId>>();
  rec.instance.observed = j.at("observed").get<std::vector<NodeId>>();
  validate(rec.instance, stop_fraction);
  return rec;
}

struct DatasetManifest {
  DatasetConfig config;
  std::size_t records = 0;
  std::string sha256;
  nlohmann::ordered_json json;
};

inline InstanceRecord generate_record(const DatasetConfig& cfg, std::size_t index) {
  const std::uint64_t seed = instance_seed(cfg.master_seed, index);
  return {index, seed, generate_instance(cfg.spec, seed)};
}

// Writes cfg.instance_count records plus the manifest into `dir` (created if
// needed). Instances are generated in parallel blocks when jobs > 1 and always
// written in index order, so the output bytes do not depend on jobs.
inline DatasetManifest generate_dataset(const DatasetConfig& cfg,
                                        const std::filesystem::path& dir, unsigned jobs = 1) {
  validate(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create dataset directory " + dir.string() + ": " + ec.message());
  const auto records_path = dir / kInstancesFile;
  std::ofstream out(records_path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + records_path.string() + " for writing");

  jobs = std::max(1u, jobs);
  const std::size_t block = jobs;
  std::vector<std::string> lines(block);
  for (std::size_t start = 0; start < cfg.instance_count; start += block) {
    const std::size_t stop = std::min(start + block, cfg.instance_count);
    auto make = [&](std::size_t i) { lines[i - start] = encode_record(generate_record(cfg, i), cfg.spec); };
    if (jobs == 1) {
      make(start);
    } else {
      std::vector<std::thread> threads;
      std::vector<std::exception_ptr> errors(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        threads.emplace_back([&, i] {
          try {
            make(i);
          } catch (...) {
            errors[i - start] = std::current_exception();
          }
        });
      }
      for (auto& t : threads) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (std::size_t i = start; i < stop; ++i) out << lines[i - start] << '\n';
    if (!out) throw FormatError("write failed for " + records_path.string());
  }
  out.close();
  if (!out) throw FormatError("write failed for " + records_path.string());

  DatasetManifest m;
  m.config = cfg;
  m.records = cfg.instance_count;
  m.sha256 = sha256_file(records_path.string());
  m.json["format"] = "asym-dataset";
  m.json["schema"] = kDatasetSchema;
  m.json["config"] = config_json(cfg);
  m.json["files"] = nlohmann::ordered_json::array(
      {{{"name", kInstancesFile}, {"records", m.records}, {"sha256", m.sha256}}});

  const auto manifest_path = dir / kManifestFile;
  std::ofstream mf(manifest_path, std::ios::binary | std::ios::trunc);
  if (!mf) throw FormatError("cannot open " + manifest_path.string() + " for writing");
  mf << m.json.dump(2) << '\n';
  if (!mf) throw FormatError("write failed for " + manifest_path.string());
  return m;
}

inline DatasetManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestFile;
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format").get<std::string>() != "asym-dataset") {
      throw FormatError(path.string() + ": not a dataset manifest");
    }
    const int schema = j.at("schema").get<int>();
    if (schema != kDatasetSchema) {
      throw FormatError(path.string() + ": schema " + std::to_string(schema) +
                        " is not supported (expected " + std::to_string(kDatasetSchema) + ")");
    }
    m.config = config_from_json(j.at("config"));
    const auto& file = j.at("files").at(0);
    m.records = file.at("records").get<std::size_t>();
    m.sha256 = file.at("sha256").get<std::string>();
    m.json = nlohmann::ordered_json::parse(j.dump());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return m;
}

// Streams records one line at a time; memory use is bounded by the largest
// record. Every record is validated on load. Reaching end of file before the
// manifest's record count is an error.
class DatasetReader {
 public:
  explicit DatasetReader(const std::filesystem::path& dir)
      : manifest_(read_manifest(dir)), path_((dir / kInstancesFile).string()), in_(path_, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path_);
  }

  const DatasetManifest& manifest() const { return manifest_; }

  std::optional<InstanceRecord> next() {
    std::string line;
    if (!std::getline(in_, line)) {
      if (count_ != manifest_.records) {
        throw FormatError(path_ + ": truncated after " + std::to_string(count_) + " of " +
                          std::to_string(manifest_.records) + " records");
      }
      return std::nullopt;
    }
    ++line_no_;
    const std::string where = path_ + ":" + std::to_string(line_no_);
    if (in_.eof()) throw FormatError(where + ": record is not newline-terminated (truncated file?)");
    if (count_ >= manifest_.records) throw FormatError(where + ": more records than the manifest lists");
    InstanceRecord rec;
    try {
      rec = decode_record(line, manifest_.config.spec.stop_fraction);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (rec.index != count_) {
      throw FormatError(where + ": expected record index " + std::to_string(count_));
    }
    ++count_;
    return rec;
  }

 private:
  DatasetManifest manifest_;
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::size_t count_ = 0;
};

inline std::vector<EpidemicInstance> read_dataset(const std::filesystem::path& dir) {
  DatasetReader reader(dir);
  std::vector<EpidemicInstance> out;
  out.reserve(reader.manifest().records);
  while (auto rec = reader.next()) out.push_back(std::move(rec->instance));
  return out;
}

/// Recomputes the records file hash and compares it with the manifest.
inline bool verify_dataset(const std::filesystem::path& dir) {
  const auto m = read_manifest(dir);
  return sha256_file((dir / kInstancesFile).string()) == m.sha256;
}

}  // namespace asym
