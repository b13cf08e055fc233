#include "greyknn/report.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "greyknn/io.h"

namespace greyknn {

namespace {

using json = nlohmann::ordered_json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct Series {
  std::vector<double> rmse, accuracy, baseline, iterations, k, wall;
};

json summary_json(const std::vector<double>& values) {
  const Summary s = summarize(values);
  json out = json::object();
  out["mean"] = s.n ? json(s.mean) : json(nullptr);
  out["stddev"] = s.n ? json(s.stddev) : json(nullptr);
  out["n"] = s.n;
  return out;
}

}  // namespace

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
  }
  return s;
}

std::string write_report(const BenchmarkReport& report) {
  json root = json::object();
  root["report_version"] = 1;
  json meta = json::object();
  for (const auto& [key, value] : report.meta) meta[key] = value;
  root["meta"] = meta;

  json runs = json::object();
  json failures = json::array();
  // ordered_json keeps insertion order; aggregate follows the same order as runs.
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, Series>>>> series;
  auto series_for = [&](const std::string& method, const std::string& rate) -> Series& {
    auto m = std::find_if(series.begin(), series.end(), [&](const auto& e) { return e.first == method; });
    if (m == series.end()) {
      series.push_back({method, {}});
      m = std::prev(series.end());
    }
    auto r = std::find_if(m->second.begin(), m->second.end(), [&](const auto& e) { return e.first == rate; });
    if (r == m->second.end()) {
      m->second.push_back({rate, {}});
      r = std::prev(m->second.end());
    }
    return r->second;
  };

  for (const auto& run : report.runs) {
    const std::string rate = format_double(run.rate);
    const std::string seed = std::to_string(run.seed);
    if (!runs.contains(run.method)) runs[run.method] = json::object();
    if (!runs[run.method].contains(rate)) runs[run.method][rate] = json::object();
    json entry = json::object();
    entry["rmse"] = optional_number(run.rmse);
    entry["classification_accuracy"] = optional_number(run.classification_accuracy);
    entry["no_imputation_accuracy"] = optional_number(run.no_imputation_accuracy);
    entry["iterations"] = run.iterations;
    entry["chosen_k"] = run.chosen_k;
    entry["converged"] = run.converged;
    entry["pool_fallbacks"] = run.pool_fallbacks;
    entry["wall_time_ms"] = run.wall_time_ms;
    if (run.error) {
      entry["error"] = *run.error;
      json f = json::object();
      f["method"] = run.method;
      f["rate"] = run.rate;
      f["seed"] = run.seed;
      f["error"] = *run.error;
      failures.push_back(f);
    }
    runs[run.method][rate][seed] = entry;

    Series& s = series_for(run.method, rate);
    if (run.error) continue;
    if (run.rmse) s.rmse.push_back(*run.rmse);
    if (run.classification_accuracy) s.accuracy.push_back(*run.classification_accuracy);
    if (run.no_imputation_accuracy) s.baseline.push_back(*run.no_imputation_accuracy);
    s.iterations.push_back(static_cast<double>(run.iterations));
    s.k.push_back(static_cast<double>(run.chosen_k));
    s.wall.push_back(run.wall_time_ms);
  }
  root["runs"] = runs;

  json aggregate = json::object();
  for (const auto& [method, rates] : series) {
    json by_rate = json::object();
    for (const auto& [rate, s] : rates) {
      json a = json::object();
      a["rmse"] = summary_json(s.rmse);
      a["classification_accuracy"] = summary_json(s.accuracy);
      a["no_imputation_accuracy"] = summary_json(s.baseline);
      a["iterations"] = summary_json(s.iterations);
      a["chosen_k"] = summary_json(s.k);
      a["wall_time_ms"] = summary_json(s.wall);
      by_rate[rate] = a;
    }
    aggregate[method] = by_rate;
  }
  root["aggregate"] = aggregate;
  root["failures"] = failures;
  return root.dump(2) + "\n";
}

std::string write_report_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "method,rate,seed,rmse,classification_accuracy,no_imputation_accuracy,iterations,chosen_k,converged,"
         "pool_fallbacks,wall_time_ms,error\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : report.runs) {
    std::string error = r.error.value_or("");
    for (auto& c : error) {
      if (c == '"' || c == ',' || c == '\n') c = ' ';
    }
    out << r.method << ',' << format_double(r.rate) << ',' << r.seed << ',' << opt(r.rmse) << ','
        << opt(r.classification_accuracy) << ',' << opt(r.no_imputation_accuracy) << ',' << r.iterations << ','
        << r.chosen_k << ',' << (r.converged ? "true" : "false") << ',' << r.pool_fallbacks << ','
        << format_double(r.wall_time_ms) << ',' << error << '\n';
  }
  return out.str();
}

std::string imputation_trace_json(const ImputationResult& result) {
  json root = json::object();
  root["report_version"] = 1;
  root["method"] = std::string(method_name(result.method));
  root["chosen_k"] = result.chosen_k;
  root["iterations"] = result.iterations;
  root["converged"] = result.converged;
  root["pool_fallbacks"] = result.pool_fallbacks;
  json weights = nullptr;
  if (result.weights_used) {
    weights = json::object();
    const auto& features = result.completed.schema().features;
    for (std::size_t j = 0; j < result.weights_used->size(); ++j) {
      weights[features[j].name] = result.weights_used->lambda[j];
    }
  }
  root["weights"] = weights;
  root["trace"] = result.trace;
  return root.dump(2) + "\n";
}

}  // namespace greyknn
