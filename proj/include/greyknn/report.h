#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greyknn/engine.h"

namespace greyknn {

/// One (method, rate, seed) cell of a benchmark sweep.
struct RunRecord {
  std::string method;
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> rmse;
  std::optional<double> classification_accuracy;
  std::optional<double> no_imputation_accuracy;
  std::size_t iterations = 0;
  std::size_t chosen_k = 0;
  bool converged = true;
  std::size_t pool_fallbacks = 0;
  double wall_time_ms = 0.0;
  std::optional<std::string> error;  ///< set when the cell failed; metrics are then absent
};

struct BenchmarkReport {
  std::map<std::string, std::string> meta;  ///< free-form scenario description, sorted by key
  std::vector<RunRecord> runs;
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation; zero for a single value
  std::size_t n = 0;
};

Summary summarize(const std::vector<double>& values);

/// JSON report, version 1:
///
///     { "report_version": 1, "meta": {...},
///       "runs": { method: { rate: { seed: { "rmse", "classification_accuracy", ... } } } },
///       "aggregate": { method: { rate: { "rmse": {"mean", "stddev", "n"}, ... } } },
///       "failures": [ { "method", "rate", "seed", "error" } ] }
///
/// Rates are keyed by their shortest decimal form and numbers use shortest round-trip formatting,
/// so equal inputs always give byte-identical text.
std::string write_report(const BenchmarkReport& report);

/// One row per run with a fixed header.
std::string write_report_csv(const BenchmarkReport& report);

/// JSON of a single imputation run: method, k, weights, per-iteration trace, convergence.
std::string imputation_trace_json(const ImputationResult& result);

}  // namespace greyknn
