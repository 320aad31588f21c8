#pragma once

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "asym/epidemic.hpp"
#include "asym/error.hpp"
#include "asym/metrics.hpp"
#include "asym/pipeline.hpp"

namespace asym {

inline constexpr double kDefaultTopKFraction = 0.01;

struct InstanceEval {
  std::size_t instance = 0;
  std::optional<double> auc;  // nullopt: single-class pool
  double top_k_precision = 0.0;
  std::size_t pool_size = 0;
  std::size_t k = 0;
  std::size_t positives = 0;
};

struct MetricSummary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = std::numeric_limits<double>::quiet_NaN();  // population
  std::size_t count = 0;
};

struct EvalReport {
  std::vector<InstanceEval> instances;
  MetricSummary auc;
  MetricSummary top_k_precision;
  std::size_t undefined_auc = 0;
  double top_k_fraction = kDefaultTopKFraction;
};

inline MetricSummary summarize(std::span<const double> xs) {
  MetricSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(xs.size()));
  return s;
}

/// Aggregates per-instance records. Undefined AUCs are counted, not averaged.
inline EvalReport aggregate(std::vector<InstanceEval> records, double fraction) {
  EvalReport r;
  r.top_k_fraction = fraction;
  std::vector<double> aucs, precisions;
  for (const auto& rec : records) {
    if (rec.auc) {
      aucs.push_back(*rec.auc);
    } else {
      ++r.undefined_auc;
    }
    precisions.push_back(rec.top_k_precision);
  }
  r.auc = summarize(aucs);
  r.top_k_precision = summarize(precisions);
  r.instances = std::move(records);
  return r;
}

inline InstanceEval evaluate_scores(std::span<const double> scores, const EpidemicInstance& inst,
                                    std::size_t index, double fraction = kDefaultTopKFraction) {
  if (scores.size() != inst.node_count()) {
    throw ParameterError("evaluate: score vector length does not match node count");
  }
  const auto labels = membership(inst.node_count(), inst.infected);
  const auto pool = inst.pool();
  InstanceEval e;
  e.instance = index;
  e.pool_size = pool.size();
  e.k = top_k_count(pool.size(), fraction);
  for (NodeId v : pool) e.positives += labels[v] ? 1 : 0;
  e.auc = auc(scores, labels, pool);
  e.top_k_precision = top_k_precision(scores, labels, pool, fraction);
  return e;
}

// Scores every instance and aggregates. With jobs > 1 instances are split
// across threads; results are stored by index so the report does not depend
// on the thread count. The scorer must be safe to call concurrently.
inline EvalReport evaluate(const Scorer& scorer, std::span<const EpidemicInstance> dataset,
                           double fraction = kDefaultTopKFraction, unsigned jobs = 1) {
  if (dataset.empty()) throw ParameterError("evaluate: empty dataset");
  std::vector<InstanceEval> records(dataset.size());
  auto work = [&](std::size_t i) {
    const auto scores = scorer(dataset[i]);
    records[i] = evaluate_scores(scores, dataset[i], i, fraction);
  };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < dataset.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < dataset.size(); i = next++) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return aggregate(std::move(records), fraction);
}

// ---- Serialization -------------------------------------------------------
//
// Per-instance CSV columns (stable):
//   instance,auc,top_k_precision,pool_size,k,positives
// Undefined AUCs are written as NA. Reals use 17 significant digits so a
// re-read reproduces them exactly.

inline constexpr std::string_view kEvalCsvHeader = "instance,auc,top_k_precision,pool_size,k,positives";

inline std::string format_real(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline void write_eval_csv(const EvalReport& report, std::ostream& out) {
  out << kEvalCsvHeader << '\n';
  for (const auto& r : report.instances) {
    out << r.instance << ',' << (r.auc ? format_real(*r.auc) : "NA") << ','
        << format_real(r.top_k_precision) << ',' << r.pool_size << ',' << r.k << ','
        << r.positives << '\n';
  }
}

inline std::vector<InstanceEval> read_eval_csv(std::istream& in, const std::string& name = "<csv>") {
  std::string line;
  if (!std::getline(in, line) || line != kEvalCsvHeader) {
    throw FormatError(name + ": missing or unexpected evaluation CSV header");
  }
  std::vector<InstanceEval> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 6) {
      throw FormatError(name + ":" + std::to_string(line_no) + ": expected 6 columns");
    }
    try {
      InstanceEval r;
      r.instance = std::stoull(cells[0]);
      if (cells[1] != "NA") r.auc = std::stod(cells[1]);
      r.top_k_precision = std::stod(cells[2]);
      r.pool_size = std::stoull(cells[3]);
      r.k = std::stoull(cells[4]);
      r.positives = std::stoull(cells[5]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw FormatError(name + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

inline nlohmann::ordered_json summary_json(const MetricSummary& s) {
  nlohmann::ordered_json j;
  j["mean"] = std::isnan(s.mean) ? nlohmann::ordered_json() : nlohmann::ordered_json(s.mean);
  j["std"] = std::isnan(s.std) ? nlohmann::ordered_json() : nlohmann::ordered_json(s.std);
  j["count"] = s.count;
  return j;
}

inline MetricSummary summary_from_json(const nlohmann::json& j) {
  MetricSummary s;
  if (!j.at("mean").is_null()) s.mean = j.at("mean").get<double>();
  if (!j.at("std").is_null()) s.std = j.at("std").get<double>();
  s.count = j.at("count").get<std::size_t>();
  return s;
}

// Aggregate block: {"method", "dataset", "top_k_fraction", "instances",
// "undefined_auc", "metrics": {"auc": {...}, "top_k_precision": {...}}}.
inline nlohmann::ordered_json aggregate_json(const EvalReport& report, const std::string& method,
                                             const nlohmann::ordered_json& dataset) {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["dataset"] = dataset;
  j["top_k_fraction"] = report.top_k_fraction;
  j["instances"] = report.instances.size();
  j["undefined_auc"] = report.undefined_auc;
  j["metrics"]["auc"] = summary_json(report.auc);
  j["metrics"]["top_k_precision"] = summary_json(report.top_k_precision);
  return j;
}

}  // namespace asym
