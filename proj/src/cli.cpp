#include "greyknn/cli.h"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "greyknn/benchmark.h"
#include "greyknn/engine.h"
#include "greyknn/error.h"
#include "greyknn/eval.h"
#include "greyknn/io.h"
#include "greyknn/parallel.h"
#include "greyknn/relevance.h"
#include "greyknn/report.h"
#include "greyknn/synth.h"

#ifndef GREYKNN_VERSION
#define GREYKNN_VERSION "dev"
#endif

namespace greyknn {

namespace {

using json = nlohmann::ordered_json;

/// Usage problems detected after CLI11 parsing (exit 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What a subcommand did, for the manifest.
struct Run {
  std::string command;
  std::vector<std::string> argv;  ///< fully resolved, replayable
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  json config = json::object();
};

std::string join(const std::vector<std::string>& items, const std::string& sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

template <typename T>
std::string join_numbers(const std::vector<T>& items) {
  std::vector<std::string> parts;
  for (const auto& v : items) {
    if constexpr (std::is_floating_point_v<T>) parts.push_back(format_double(v));
    else parts.push_back(std::to_string(v));
  }
  return join(parts);
}

std::string method_list() {
  std::vector<std::string> names;
  for (auto m : all_methods()) {
    std::string n(method_name(m));
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    names.push_back(n);
  }
  return join(names, ", ");
}

Method require_method(const std::string& text) {
  const auto m = parse_method(text);
  if (!m) throw UsageError("unknown method '" + text + "'; valid methods: " + method_list());
  return *m;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  if (p.has_extension()) p.replace_extension();
  return p.string() + suffix;
}

/// Reads a CSV with an explicit schema or, failing that, an inferred one written next to `inferred_out`.
Dataset load_dataset(const std::string& csv_path, const std::string& schema_path,
                     const std::optional<std::string>& class_column, const std::string& inferred_out, Run& run,
                     SchemaConfig* used = nullptr) {
  const std::string csv = read_file(csv_path);
  run.inputs.push_back(csv_path);
  SchemaConfig config;
  if (!schema_path.empty()) {
    config = parse_schema_config(read_file(schema_path));
    run.inputs.push_back(schema_path);
  } else {
    config = infer_schema_config(csv, class_column);
    write_file(inferred_out, format_schema_config(config));
    run.outputs.push_back(inferred_out);
  }
  if (used) *used = config;
  return read_csv(csv, config);
}

void write_output(Run& run, const std::string& path, std::string_view contents) {
  write_file(path, contents);
  run.outputs.push_back(path);
}

json digest_list(const std::vector<std::string>& paths) {
  json out = json::array();
  for (const auto& p : paths) {
    json e = json::object();
    e["path"] = p;
    e["sha256"] = sha256_hex(read_file(p));
    out.push_back(e);
  }
  return out;
}

void write_manifest(const Run& run, const std::string& path) {
  json m = json::object();
  m["tool"] = "greyknn";
  m["version"] = GREYKNN_VERSION;
  m["command"] = run.command;
  m["argv"] = run.argv;
  m["seed"] = run.seed ? json(*run.seed) : json(nullptr);
  m["config"] = run.config;
  m["inputs"] = digest_list(run.inputs);
  m["outputs"] = digest_list(run.outputs);
  write_file(path, m.dump(2) + "\n");
}

json mi_report(const Dataset& data, const ParzenSettings& parzen) {
  const bool labelled = data.has_labels();
  const Dataset filled = initial_impute(normalize(data).first, labelled);
  json out = json::object();
  out["report_version"] = 1;
  out["rows"] = data.rows();
  out["initial_fill"] = data.complete() ? "none" : (labelled ? "class mean/mode" : "column mean/mode");
  std::vector<MIEstimate> mi;
  if (labelled) mi = class_relevance(filled, parzen);
  const WeightVector feature = feature_feature_weights(filled);
  std::optional<WeightVector> lambda;
  if (labelled) lambda = class_weights(mi);
  json features = json::array();
  for (std::size_t j = 0; j < data.cols(); ++j) {
    json f = json::object();
    f["name"] = data.schema().features[j].name;
    f["kind"] = data.schema().features[j].kind.is_continuous() ? "continuous" : "categorical";
    if (labelled) {
      f["mi_bits"] = mi[j].mi;
      f["estimator"] = mi[j].estimator == MIEstimator::parzen ? "parzen" : "histogram";
      f["class_weight"] = lambda->lambda[j];
    }
    f["feature_weight"] = feature.lambda[j];
    features.push_back(f);
  }
  out["features"] = features;
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Iterative kNN imputation with grey relational distances and mutual-information weights", "greyknn"};
  app.set_version_flag("--version", GREYKNN_VERSION);
  app.require_subcommand(1);

  std::string manifest_path;
  Run run;

  // impute
  auto* impute = app.add_subcommand("impute", "Impute missing cells of a CSV file");
  std::string imp_input, imp_schema, imp_class, imp_method = "cgknn", imp_output = "imputed.csv", imp_trace;
  std::string imp_test, imp_test_output;
  std::optional<std::size_t> imp_k;
  std::vector<std::size_t> imp_grid = ImputeConfig{}.k_grid;
  double imp_rho = 0.5, imp_eps = 1e-4;
  std::size_t imp_max_iter = 50, imp_folds = 10, imp_threads = default_thread_count();
  std::uint64_t imp_seed = 0;
  bool imp_literal = false;
  impute->add_option("input", imp_input, "Input CSV")->required()->check(CLI::ExistingFile);
  impute->add_option("--schema", imp_schema, "Schema config; inferred and written next to the output when absent");
  impute->add_option("--class", imp_class, "Class column used when inferring the schema");
  impute->add_option("--method", imp_method, "meanmode, iknn, miknn, gknn, fwgknn or cgknn");
  impute->add_option("--k", imp_k, "Neighbour count; chosen by cross-validation when absent");
  impute->add_option("--k-grid", imp_grid, "Candidate k values for cross-validation")->delimiter(',');
  impute->add_option("--rho", imp_rho, "Grey distinguishing coefficient");
  impute->add_option("--epsilon", imp_eps, "Convergence threshold on the normalised scale");
  impute->add_option("--max-iter", imp_max_iter, "Iteration cap");
  impute->add_option("--folds", imp_folds, "Cross-validation folds for choosing k");
  impute->add_option("--seed", imp_seed, "Seed for fold assignment");
  impute->add_option("--threads", imp_threads, "Worker threads (default from GREYKNN_THREADS)");
  impute->add_flag("--eq11-literal", imp_literal, "Scale the weighted mean by 1/k as printed in the original formula");
  impute->add_option("-o,--output", imp_output, "Imputed CSV");
  impute->add_option("--trace", imp_trace, "Per-iteration trace JSON (default: <output>.trace.json)");
  impute->add_option("--test", imp_test, "Unlabelled test CSV imputed against the completed training matrix")
      ->check(CLI::ExistingFile);
  impute->add_option("--test-output", imp_test_output, "Imputed test CSV (default: <test>.imputed.csv)");
  impute->add_option("--manifest", manifest_path, "Run manifest (default: <output>.manifest.json)");

  // mi
  auto* mi = app.add_subcommand("mi", "Per-feature mutual information with the class and relevance weights");
  std::string mi_input, mi_schema, mi_class, mi_output = "mi.json";
  double mi_scale = 1.0;
  mi->add_option("input", mi_input, "Input CSV")->required()->check(CLI::ExistingFile);
  mi->add_option("--schema", mi_schema, "Schema config");
  mi->add_option("--class", mi_class, "Class column used when inferring the schema");
  mi->add_option("--bandwidth-scale", mi_scale, "Multiplier on the Parzen window width");
  mi->add_option("-o,--output", mi_output, "MI JSON");
  mi->add_option("--manifest", manifest_path, "Run manifest");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth->require_subcommand(1);
  std::uint64_t syn_seed = 0;
  std::string syn_output, syn_schema;
  auto* cubes = synth->add_subcommand("cubes", "Four cubes in three dimensions plus 20 noise columns");
  auto* mvn = synth->add_subcommand("mvn", "Four Gaussian classes in five dimensions");
  for (auto* sub : {cubes, mvn}) {
    sub->add_option("--seed", syn_seed, "Generator seed");
    sub->add_option("-o,--output", syn_output, "Output CSV")->required();
    sub->add_option("--schema-output", syn_schema, "Schema config (default: <output>.cfg)");
    sub->add_option("--manifest", manifest_path, "Run manifest");
  }

  // inject
  auto* inject = app.add_subcommand("inject", "Inject missing cells");
  inject->require_subcommand(1);
  std::string inj_input, inj_schema, inj_class, inj_output;
  std::vector<std::string> inj_columns, inj_predictors;
  double inj_rate = 0.1, inj_coef = 1.0;
  std::uint64_t inj_seed = 0;
  auto* mcar = inject->add_subcommand("mcar", "Missing completely at random");
  auto* mar = inject->add_subcommand("mar", "Missing at random through a logistic model on predictor columns");
  for (auto* sub : {mcar, mar}) {
    sub->add_option("input", inj_input, "Input CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--schema", inj_schema, "Schema config");
    sub->add_option("--class", inj_class, "Class column used when inferring the schema");
    sub->add_option("--columns", inj_columns, "Target columns (default: every feature, or every non-predictor)")
        ->delimiter(',');
    sub->add_option("--rate", inj_rate, "Missing rate per target column");
    sub->add_option("--seed", inj_seed, "Seed");
    sub->add_option("-o,--output", inj_output, "Output CSV")->required();
    sub->add_option("--manifest", manifest_path, "Run manifest");
  }
  mar->add_option("--predictors", inj_predictors, "Always-observed predictor columns")->required()->delimiter(',');
  mar->add_option("--coefficient", inj_coef, "Logistic slope on every predictor");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Run a method x rate x seed sweep");
  std::string bench_spec, bench_output = "report.json", bench_csv;
  std::size_t bench_jobs = default_thread_count();
  bool bench_no_timing = false;
  bench->add_option("spec", bench_spec, "Benchmark spec file")->required()->check(CLI::ExistingFile);
  bench->add_option("-o,--output", bench_output, "Report JSON");
  bench->add_option("--csv", bench_csv, "Flat CSV export of the report");
  bench->add_option("--jobs", bench_jobs, "Parallel benchmark cells");
  bench->add_flag("--no-timing", bench_no_timing, "Record zero wall times so reports are byte-comparable");
  bench->add_option("--manifest", manifest_path, "Run manifest");

  // eval
  auto* evalc = app.add_subcommand("eval", "Score an imputed file against the ground truth");
  std::string ev_truth, ev_imputed, ev_mask, ev_schema, ev_class, ev_output = "metrics.json";
  std::size_t ev_folds = 10;
  std::uint64_t ev_seed = 0;
  evalc->add_option("truth", ev_truth, "Complete ground-truth CSV")->required()->check(CLI::ExistingFile);
  evalc->add_option("imputed", ev_imputed, "Imputed CSV")->required()->check(CLI::ExistingFile);
  evalc->add_option("--mask", ev_mask, "CSV with the injected missing cells")->required()->check(CLI::ExistingFile);
  evalc->add_option("--schema", ev_schema, "Schema config");
  evalc->add_option("--class", ev_class, "Class column used when inferring the schema");
  evalc->add_option("--folds", ev_folds, "Classification cross-validation folds");
  evalc->add_option("--seed", ev_seed, "Fold seed");
  evalc->add_option("-o,--output", ev_output, "Metrics JSON");
  evalc->add_option("--manifest", manifest_path, "Run manifest");

  // infer
  auto* infer = app.add_subcommand("infer", "Infer a schema config from a CSV file");
  std::string inf_input, inf_class, inf_output;
  infer->add_option("input", inf_input, "Input CSV")->required()->check(CLI::ExistingFile);
  infer->add_option("--class", inf_class, "Class column (default: last column)");
  infer->add_option("-o,--output", inf_output, "Schema config")->required();

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string replay_manifest;
  replay->add_option("manifest", replay_manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto opt_class = [](const std::string& s) { return s.empty() ? std::optional<std::string>() : s; };

  try {
    if (*impute) {
      ImputeConfig config;
      config.method = require_method(imp_method);
      config.k = imp_k;
      config.k_grid = imp_grid;
      config.grey.rho = imp_rho;
      config.epsilon = imp_eps;
      config.max_iter = imp_max_iter;
      config.cv_folds = imp_folds;
      config.seed = imp_seed;
      config.threads = imp_threads;
      config.eq11_literal = imp_literal;
      config.check();
      if (imp_trace.empty()) imp_trace = with_suffix(imp_output, ".trace.json");
      if (manifest_path.empty()) manifest_path = with_suffix(imp_output, ".manifest.json");
      if (!imp_test.empty() && imp_test_output.empty()) imp_test_output = with_suffix(imp_test, ".imputed.csv");

      run.command = "impute";
      run.seed = imp_seed;
      run.argv = {"impute", imp_input};
      if (!imp_schema.empty()) run.argv.insert(run.argv.end(), {"--schema", imp_schema});
      if (!imp_class.empty()) run.argv.insert(run.argv.end(), {"--class", imp_class});
      run.argv.insert(run.argv.end(), {"--method", imp_method});
      if (imp_k) run.argv.insert(run.argv.end(), {"--k", std::to_string(*imp_k)});
      run.argv.insert(run.argv.end(),
                      {"--k-grid", join_numbers(imp_grid), "--rho", format_double(imp_rho), "--epsilon",
                       format_double(imp_eps), "--max-iter", std::to_string(imp_max_iter), "--folds",
                       std::to_string(imp_folds), "--seed", std::to_string(imp_seed)});
      if (imp_literal) run.argv.push_back("--eq11-literal");
      run.argv.insert(run.argv.end(), {"--output", imp_output, "--trace", imp_trace});
      if (!imp_test.empty()) run.argv.insert(run.argv.end(), {"--test", imp_test, "--test-output", imp_test_output});
      run.argv.insert(run.argv.end(), {"--manifest", manifest_path});

      SchemaConfig schema_config;
      const Dataset data = load_dataset(imp_input, imp_schema, opt_class(imp_class),
                                        with_suffix(imp_output, ".schema.cfg"), run, &schema_config);
      const ImputationResult result = run_impute(data, config);
      write_output(run, imp_output, write_csv(result.completed, schema_config.missing_tokens));
      write_output(run, imp_trace, imputation_trace_json(result));
      if (!result.converged) {
        std::cerr << "greyknn: warning: no convergence after " << result.iterations << " iterations\n";
      }
      if (result.pool_fallbacks > 0) {
        std::cerr << "greyknn: note: " << result.pool_fallbacks
                  << " rows used the whole dataset because their class was smaller than k + 1\n";
      }
      if (!imp_test.empty()) {
        SchemaConfig test_config = schema_config;
        test_config.class_column.reset();
        const std::string test_csv = read_file(imp_test);
        run.inputs.push_back(imp_test);
        const Dataset test = read_csv(test_csv, test_config);
        const Dataset done = impute_test(result, data, test, config);
        write_output(run, imp_test_output, write_csv(done, schema_config.missing_tokens));
      }
      run.config["method"] = std::string(method_name(config.method));
      run.config["chosen_k"] = result.chosen_k;
      run.config["iterations"] = result.iterations;
      run.config["converged"] = result.converged;
    } else if (*mi) {
      if (manifest_path.empty()) manifest_path = with_suffix(mi_output, ".manifest.json");
      run.command = "mi";
      run.argv = {"mi", mi_input};
      if (!mi_schema.empty()) run.argv.insert(run.argv.end(), {"--schema", mi_schema});
      if (!mi_class.empty()) run.argv.insert(run.argv.end(), {"--class", mi_class});
      run.argv.insert(run.argv.end(),
                      {"--bandwidth-scale", format_double(mi_scale), "--output", mi_output, "--manifest", manifest_path});
      const Dataset data = load_dataset(mi_input, mi_schema, opt_class(mi_class),
                                        with_suffix(mi_output, ".schema.cfg"), run);
      ParzenSettings parzen;
      parzen.bandwidth_scale = mi_scale;
      write_output(run, mi_output, mi_report(data, parzen).dump(2) + "\n");
    } else if (*synth) {
      const bool is_cubes = static_cast<bool>(*cubes);
      if (syn_schema.empty()) syn_schema = with_suffix(syn_output, ".cfg");
      if (manifest_path.empty()) manifest_path = with_suffix(syn_output, ".manifest.json");
      run.command = is_cubes ? "synth cubes" : "synth mvn";
      run.seed = syn_seed;
      run.argv = {"synth", is_cubes ? "cubes" : "mvn", "--seed", std::to_string(syn_seed), "--output", syn_output,
                  "--schema-output", syn_schema, "--manifest", manifest_path};
      Dataset data;
      if (is_cubes) {
        data = gen_cubes(syn_seed);
      } else {
        const MvnScenario s = gen_mvn_mar(syn_seed);
        data = s.dataset;
        run.config["mar_targets"] = {"x4", "x5"};
        run.config["mar_predictors"] = {"x1", "x2", "x3"};
      }
      write_output(run, syn_output, write_csv(data));
      write_output(run, syn_schema, format_schema_config(schema_config_from(data.schema())));
    } else if (*inject) {
      const bool is_mcar = static_cast<bool>(*mcar);
      if (manifest_path.empty()) manifest_path = with_suffix(inj_output, ".manifest.json");
      run.command = is_mcar ? "inject mcar" : "inject mar";
      run.seed = inj_seed;
      SchemaConfig schema_config;
      const Dataset data = load_dataset(inj_input, inj_schema, opt_class(inj_class),
                                        with_suffix(inj_output, ".schema.cfg"), run, &schema_config);
      auto columns_of = [&](const std::vector<std::string>& names) {
        std::vector<std::size_t> out;
        for (const auto& n : names) {
          const auto j = data.schema().feature_index(n);
          if (!j) throw UsageError("unknown column '" + n + "'");
          out.push_back(*j);
        }
        return out;
      };
      const auto predictors = columns_of(inj_predictors);
      std::vector<std::size_t> targets = columns_of(inj_columns);
      if (targets.empty()) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
          if (std::find(predictors.begin(), predictors.end(), j) == predictors.end()) targets.push_back(j);
        }
      }
      std::vector<std::string> target_names;
      for (auto j : targets) target_names.push_back(data.schema().features[j].name);
      run.argv = {"inject", is_mcar ? "mcar" : "mar", inj_input};
      if (!inj_schema.empty()) run.argv.insert(run.argv.end(), {"--schema", inj_schema});
      if (!inj_class.empty()) run.argv.insert(run.argv.end(), {"--class", inj_class});
      run.argv.insert(run.argv.end(), {"--columns", join(target_names), "--rate", format_double(inj_rate), "--seed",
                                       std::to_string(inj_seed)});
      if (!is_mcar) {
        run.argv.insert(run.argv.end(),
                        {"--predictors", join(inj_predictors), "--coefficient", format_double(inj_coef)});
      }
      run.argv.insert(run.argv.end(), {"--output", inj_output, "--manifest", manifest_path});
      Dataset out;
      if (is_mcar) {
        out = inject_mcar(data, targets, inj_rate, inj_seed);
      } else {
        const MarResult r = inject_mar(data, MarSpec::calibrated(targets, predictors, inj_rate, inj_coef), inj_seed);
        out = r.dataset;
        run.config["intercepts"] = r.intercepts;
      }
      write_output(run, inj_output, write_csv(out, schema_config.missing_tokens));
    } else if (*bench) {
      if (manifest_path.empty()) manifest_path = with_suffix(bench_output, ".manifest.json");
      run.command = "benchmark";
      run.argv = {"benchmark", bench_spec, "--output", bench_output};
      if (!bench_csv.empty()) run.argv.insert(run.argv.end(), {"--csv", bench_csv});
      run.argv.insert(run.argv.end(), {"--jobs", std::to_string(bench_jobs)});
      if (bench_no_timing) run.argv.push_back("--no-timing");
      run.argv.insert(run.argv.end(), {"--manifest", manifest_path});
      run.inputs.push_back(bench_spec);
      const std::string base = std::filesystem::path(bench_spec).parent_path().string();
      BenchmarkSpec spec = parse_benchmark_spec(read_file(bench_spec), base);
      if (bench_no_timing) spec.record_timing = false;
      if (!spec.data_path.empty()) run.inputs.push_back(spec.data_path);
      if (!spec.schema_path.empty()) run.inputs.push_back(spec.schema_path);
      run.seed = spec.master_seed;
      const BenchmarkReport report = run_benchmark(spec, bench_jobs);
      write_output(run, bench_output, write_report(report));
      if (!bench_csv.empty()) write_output(run, bench_csv, write_report_csv(report));
      std::size_t failed = 0;
      for (const auto& r : report.runs) failed += r.error ? 1 : 0;
      if (failed) std::cerr << "greyknn: " << failed << " benchmark cells failed; see the report\n";
    } else if (*evalc) {
      if (manifest_path.empty()) manifest_path = with_suffix(ev_output, ".manifest.json");
      run.command = "eval";
      run.seed = ev_seed;
      run.argv = {"eval", ev_truth, ev_imputed, "--mask", ev_mask};
      if (!ev_schema.empty()) run.argv.insert(run.argv.end(), {"--schema", ev_schema});
      if (!ev_class.empty()) run.argv.insert(run.argv.end(), {"--class", ev_class});
      run.argv.insert(run.argv.end(), {"--folds", std::to_string(ev_folds), "--seed", std::to_string(ev_seed),
                                       "--output", ev_output, "--manifest", manifest_path});
      SchemaConfig schema_config;
      const Dataset truth = load_dataset(ev_truth, ev_schema, opt_class(ev_class),
                                         with_suffix(ev_output, ".schema.cfg"), run, &schema_config);
      const Dataset imputed = read_csv(read_file(ev_imputed), schema_config);
      const Dataset masked = read_csv(read_file(ev_mask), schema_config);
      run.inputs.push_back(ev_imputed);
      run.inputs.push_back(ev_mask);
      const auto cells = injected_cells(truth, masked);
      json m = json::object();
      m["report_version"] = 1;
      m["masked_cells"] = cells.size();
      m["rmse"] = rmse(truth, imputed, cells);
      if (imputed.has_labels()) {
        m["classification_accuracy"] = kfold_cv(imputed, ev_folds, ev_seed).mean_accuracy;
        m["no_imputation_accuracy"] = kfold_cv(masked, ev_folds, ev_seed, complete_case_classifier).mean_accuracy;
      }
      write_output(run, ev_output, m.dump(2) + "\n");
    } else if (*infer) {
      const SchemaConfig config = infer_schema_config(read_file(inf_input), opt_class(inf_class));
      write_file(inf_output, format_schema_config(config));
      return 0;
    } else if (*replay) {
      const json m = json::parse(read_file(replay_manifest));
      for (const auto& in : m.at("inputs")) {
        const std::string path = in.at("path").get<std::string>();
        if (sha256_hex(read_file(path)) != in.at("sha256").get<std::string>()) {
          throw DataError(ErrorKind::invalid_argument, "input '" + path + "' changed since the manifest was written");
        }
      }
      return run_cli(m.at("argv").get<std::vector<std::string>>());
    }
    write_manifest(run, manifest_path);
  } catch (const UsageError& e) {
    std::cerr << "greyknn: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "greyknn: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "greyknn: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "greyknn: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace greyknn
