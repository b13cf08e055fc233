#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "greyknn/engine.h"
#include "greyknn/report.h"

namespace greyknn {

enum class ScenarioSource { cubes, mvn, file };
enum class Mechanism { mcar, mar };

/// A method x rate x seed sweep, stored as `key = value` lines:
///
///     name = cubes-mcar
///     source = cubes            # cubes | mvn | file
///     data = iris.csv           # file source only, relative to the spec file
///     schema = iris.cfg         # optional; inferred from the CSV when absent
///     mechanism = mcar          # mcar | mar
///     targets = x1              # columns receiving missingness
///     predictors = x1, x2       # MAR only
///     coefficient = 1.0         # MAR slope on every predictor
///     methods = meanmode, iknn, miknn, gknn, fwgknn, cgknn
///     rates = 0.1, 0.2
///     seeds = 1-10              # list items may be inclusive ranges
///     master_seed = 0
///     k = 5                     # optional; chosen by cross-validation when absent
///     k_grid = 1, 3, 5, 7, 9, 11, 13, 15
///     epsilon = 1e-4
///     max_iter = 50
///     rho = 0.5
///     folds = 10                # classification cross-validation
///     classify = true
///     timing = true
struct BenchmarkSpec {
  std::string name = "benchmark";
  ScenarioSource source = ScenarioSource::cubes;
  std::string data_path;
  std::string schema_path;
  Mechanism mechanism = Mechanism::mcar;
  std::vector<std::string> targets;
  std::vector<std::string> predictors;
  double mar_coefficient = 1.0;
  std::vector<Method> methods;
  std::vector<double> rates;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
  ImputeConfig impute;  ///< method field ignored
  std::size_t cv_folds = 10;
  bool classify = true;
  /// Wall-clock times are the only nondeterministic report field; off records zeros.
  bool record_timing = true;

  void check() const;
};

/// Relative data and schema paths are resolved against `base_dir`.
BenchmarkSpec parse_benchmark_spec(std::string_view text, const std::string& base_dir = "");

struct Scenario {
  Dataset truth;
  std::vector<std::size_t> targets;
  std::vector<std::size_t> predictors;
};

/// Ground truth for one seed, with target and predictor columns resolved.
Scenario load_scenario(const BenchmarkSpec& spec, std::uint64_t data_seed);

/// Missingness for one (scenario, rate) pair.
Dataset inject_missingness(const BenchmarkSpec& spec, const Scenario& scenario, double rate, std::uint64_t seed);

/// Seed streams: data = derive(master, seed), mask = derive(data, rate index + 1).
std::uint64_t data_seed_for(const BenchmarkSpec& spec, std::uint64_t seed);
std::uint64_t mask_seed_for(std::uint64_t data_seed, std::size_t rate_index);

/// Runs every cell; failures are recorded in the report rather than aborting the sweep.
/// The report is identical for any `jobs` value.
BenchmarkReport run_benchmark(const BenchmarkSpec& spec, std::size_t jobs = 1);

}  // namespace greyknn
