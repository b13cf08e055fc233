#include "greyknn/benchmark.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <set>

#include "greyknn/error.h"
#include "greyknn/eval.h"
#include "greyknn/io.h"
#include "greyknn/parallel.h"
#include "greyknn/rng.h"
#include "greyknn/synth.h"

namespace greyknn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto item = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

DataError spec_error(std::size_t line, const std::string& message) {
  return DataError(ErrorKind::parse_error, "benchmark spec line " + std::to_string(line) + ": " + message);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw spec_error(line, "expected a number, got '" + std::string(text) + "'");
  return value;
}

bool parse_bool(std::string_view text, std::size_t line) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw spec_error(line, "expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::uint64_t> parse_seeds(std::string_view value, std::size_t line) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(value)) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_number<std::uint64_t>(item, line));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>(trim(std::string_view(item).substr(0, dash)), line);
    const auto hi = parse_number<std::uint64_t>(trim(std::string_view(item).substr(dash + 1)), line);
    if (hi < lo) throw spec_error(line, "seed range '" + item + "' is reversed");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

std::vector<std::size_t> resolve_columns(const Schema& schema, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& name : names) {
    const auto j = schema.feature_index(name);
    if (!j) throw DataError(ErrorKind::schema_error, "benchmark column '" + name + "' is not in the dataset");
    out.push_back(*j);
  }
  return out;
}

std::vector<std::size_t> all_except(std::size_t p, const std::vector<std::size_t>& excluded) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < p; ++j) {
    if (std::find(excluded.begin(), excluded.end(), j) == excluded.end()) out.push_back(j);
  }
  return out;
}

}  // namespace

void BenchmarkSpec::check() const {
  impute.check();
  if (methods.empty()) throw DataError(ErrorKind::invalid_argument, "benchmark lists no methods");
  if (rates.empty()) throw DataError(ErrorKind::invalid_argument, "benchmark lists no missing rates");
  if (seeds.empty()) throw DataError(ErrorKind::invalid_argument, "benchmark lists no seeds");
  for (double r : rates) {
    if (!(r > 0.0 && r < 1.0)) throw DataError(ErrorKind::invalid_argument, "missing rates must lie in (0, 1)");
  }
  if (source == ScenarioSource::file && data_path.empty()) {
    throw DataError(ErrorKind::invalid_argument, "file source needs a data path");
  }
  if (cv_folds < 2) throw DataError(ErrorKind::invalid_argument, "classification folds must be at least 2");
}

BenchmarkSpec parse_benchmark_spec(std::string_view text, const std::string& base_dir) {
  BenchmarkSpec spec;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw spec_error(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "name") {
      spec.name = std::string(value);
    } else if (key == "source") {
      if (value == "cubes") spec.source = ScenarioSource::cubes;
      else if (value == "mvn") spec.source = ScenarioSource::mvn;
      else if (value == "file") spec.source = ScenarioSource::file;
      else throw spec_error(line_no, "source must be cubes, mvn or file");
    } else if (key == "data") {
      spec.data_path = resolve(base_dir, std::string(value));
    } else if (key == "schema") {
      spec.schema_path = resolve(base_dir, std::string(value));
    } else if (key == "mechanism") {
      if (value == "mcar") spec.mechanism = Mechanism::mcar;
      else if (value == "mar") spec.mechanism = Mechanism::mar;
      else throw spec_error(line_no, "mechanism must be mcar or mar");
    } else if (key == "targets") {
      spec.targets = split_list(value);
    } else if (key == "predictors") {
      spec.predictors = split_list(value);
    } else if (key == "coefficient") {
      spec.mar_coefficient = parse_number<double>(value, line_no);
    } else if (key == "methods") {
      spec.methods.clear();
      for (const auto& item : split_list(value)) {
        const auto m = parse_method(item);
        if (!m) throw spec_error(line_no, "unknown method '" + item + "'");
        spec.methods.push_back(*m);
      }
    } else if (key == "rates") {
      spec.rates.clear();
      for (const auto& item : split_list(value)) spec.rates.push_back(parse_number<double>(item, line_no));
    } else if (key == "seeds") {
      spec.seeds = parse_seeds(value, line_no);
    } else if (key == "master_seed") {
      spec.master_seed = parse_number<std::uint64_t>(value, line_no);
    } else if (key == "k") {
      spec.impute.k = parse_number<std::size_t>(value, line_no);
    } else if (key == "k_grid") {
      spec.impute.k_grid.clear();
      for (const auto& item : split_list(value)) spec.impute.k_grid.push_back(parse_number<std::size_t>(item, line_no));
    } else if (key == "epsilon") {
      spec.impute.epsilon = parse_number<double>(value, line_no);
    } else if (key == "max_iter") {
      spec.impute.max_iter = parse_number<std::size_t>(value, line_no);
    } else if (key == "rho") {
      spec.impute.grey.rho = parse_number<double>(value, line_no);
    } else if (key == "folds") {
      spec.cv_folds = parse_number<std::size_t>(value, line_no);
    } else if (key == "classify") {
      spec.classify = parse_bool(value, line_no);
    } else if (key == "timing") {
      spec.record_timing = parse_bool(value, line_no);
    } else {
      throw spec_error(line_no, "unknown key '" + key + "'");
    }
  }
  spec.check();
  return spec;
}

Scenario load_scenario(const BenchmarkSpec& spec, std::uint64_t data_seed) {
  Scenario s;
  switch (spec.source) {
    case ScenarioSource::cubes:
      s.truth = gen_cubes(data_seed);
      break;
    case ScenarioSource::mvn:
      s.truth = gen_mvn_mar(data_seed).dataset;
      break;
    case ScenarioSource::file: {
      const std::string csv = read_file(spec.data_path);
      const SchemaConfig config =
          spec.schema_path.empty() ? infer_schema_config(csv) : parse_schema_config(read_file(spec.schema_path));
      s.truth = read_csv(csv, config);
      break;
    }
  }
  const Schema& schema = s.truth.schema();
  const std::size_t p = s.truth.cols();
  s.predictors = resolve_columns(schema, spec.predictors);
  s.targets = resolve_columns(schema, spec.targets);
  if (s.targets.empty()) {
    switch (spec.source) {
      case ScenarioSource::cubes: s.targets = {0}; break;
      case ScenarioSource::mvn: s.targets = {3, 4}; break;
      case ScenarioSource::file:
        s.targets = spec.mechanism == Mechanism::mar ? all_except(p, s.predictors.empty() ? std::vector<std::size_t>{0}
                                                                                           : s.predictors)
                                                     : all_except(p, {});
        break;
    }
  }
  if (spec.mechanism == Mechanism::mar && s.predictors.empty()) {
    s.predictors = spec.source == ScenarioSource::mvn ? std::vector<std::size_t>{0, 1, 2} : all_except(p, s.targets);
  }
  return s;
}

Dataset inject_missingness(const BenchmarkSpec& spec, const Scenario& scenario, double rate, std::uint64_t seed) {
  if (spec.mechanism == Mechanism::mcar) return inject_mcar(scenario.truth, scenario.targets, rate, seed);
  const MarSpec mar = MarSpec::calibrated(scenario.targets, scenario.predictors, rate, spec.mar_coefficient);
  return inject_mar(scenario.truth, mar, seed).dataset;
}

std::uint64_t data_seed_for(const BenchmarkSpec& spec, std::uint64_t seed) { return derive_seed(spec.master_seed, seed); }

std::uint64_t mask_seed_for(std::uint64_t data_seed, std::size_t rate_index) {
  return derive_seed(data_seed, rate_index + 1);
}

BenchmarkReport run_benchmark(const BenchmarkSpec& spec, std::size_t jobs) {
  spec.check();
  BenchmarkReport report;
  report.meta["name"] = spec.name;
  report.meta["source"] = spec.source == ScenarioSource::cubes ? "cubes"
                          : spec.source == ScenarioSource::mvn ? "mvn"
                                                               : "file";
  if (spec.source == ScenarioSource::file) report.meta["data"] = std::filesystem::path(spec.data_path).filename().string();
  report.meta["mechanism"] = spec.mechanism == Mechanism::mcar ? "mcar" : "mar";
  report.meta["master_seed"] = std::to_string(spec.master_seed);

  struct Group {
    std::uint64_t seed = 0;
    double rate = 0.0;
    std::uint64_t mask_seed = 0;
    std::optional<Scenario> scenario;
    Dataset injected;
    std::optional<double> baseline;
    std::optional<std::string> error;
  };
  std::vector<Group> groups;
  for (auto seed : spec.seeds) {
    for (std::size_t r = 0; r < spec.rates.size(); ++r) {
      Group g;
      g.seed = seed;
      g.rate = spec.rates[r];
      g.mask_seed = mask_seed_for(data_seed_for(spec, seed), r);
      groups.push_back(std::move(g));
    }
  }
  parallel_for(groups.size(), jobs, [&](std::size_t gi) {
    Group& g = groups[gi];
    try {
      g.scenario = load_scenario(spec, data_seed_for(spec, g.seed));
      g.injected = inject_missingness(spec, *g.scenario, g.rate, g.mask_seed);
      if (spec.classify) {
        g.baseline = kfold_cv(g.injected, spec.cv_folds, g.mask_seed, complete_case_classifier).mean_accuracy;
      }
    } catch (const std::exception& e) {
      g.error = e.what();
    }
  });

  const std::size_t cells = groups.size() * spec.methods.size();
  report.runs.resize(cells);
  parallel_for(cells, jobs, [&](std::size_t c) {
    const Group& g = groups[c / spec.methods.size()];
    const Method method = spec.methods[c % spec.methods.size()];
    RunRecord& rec = report.runs[c];
    rec.method = std::string(method_name(method));
    rec.rate = g.rate;
    rec.seed = g.seed;
    rec.no_imputation_accuracy = g.baseline;
    if (g.error) {
      rec.error = *g.error;
      return;
    }
    try {
      ImputeConfig config = spec.impute;
      config.method = method;
      config.seed = g.mask_seed;
      config.threads = 1;
      const auto start = std::chrono::steady_clock::now();
      const ImputationResult result = run_impute(g.injected, config);
      const auto stop = std::chrono::steady_clock::now();
      if (spec.record_timing) rec.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      rec.iterations = result.iterations;
      rec.chosen_k = result.chosen_k;
      rec.converged = result.converged;
      rec.pool_fallbacks = result.pool_fallbacks;
      const auto mask = injected_cells(g.scenario->truth, g.injected);
      if (!mask.empty()) rec.rmse = rmse(g.scenario->truth, result.completed, mask);
      if (spec.classify) {
        rec.classification_accuracy = kfold_cv(result.completed, spec.cv_folds, g.mask_seed).mean_accuracy;
      }
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  });

  // Stable ordering: method, then rate, then seed in spec order.
  std::vector<RunRecord> ordered;
  ordered.reserve(cells);
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    for (std::size_t r = 0; r < spec.rates.size(); ++r) {
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
        ordered.push_back(report.runs[(s * spec.rates.size() + r) * spec.methods.size() + m]);
      }
    }
  }
  report.runs = std::move(ordered);
  return report;
}

}  // namespace greyknn
