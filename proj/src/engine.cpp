#include "greyknn/engine.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "greyknn/error.h"
#include "greyknn/folds.h"
#include "greyknn/parallel.h"

namespace greyknn {

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool distance_less(double da, std::size_t ra, double db, std::size_t rb) {
  return da < db || (da == db && ra < rb);
}

// Per-column fill value from the observed cells of `rows`; nullopt when none is observed.
std::optional<Cell> column_fill(const Dataset& data, std::size_t col, std::span<const std::size_t> rows) {
  const FeatureKind& kind = data.schema().features[col].kind;
  if (kind.is_continuous()) {
    double sum = 0.0;
    std::size_t count = 0;
    for (auto i : rows) {
      const Cell& c = data.cell(i, col);
      if (c.is_number()) {
        sum += c.number();
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return Cell::number(sum / static_cast<double>(count));
  }
  std::vector<std::size_t> counts(kind.level_count(), 0);
  std::size_t seen = 0;
  for (auto i : rows) {
    const Cell& c = data.cell(i, col);
    if (c.is_category()) {
      ++counts[c.category()];
      ++seen;
    }
  }
  if (seen == 0) return std::nullopt;
  const auto best = std::max_element(counts.begin(), counts.end());  // first maximum: lowest level
  return Cell::category(static_cast<std::size_t>(best - counts.begin()));
}

std::vector<Cell> global_fill(const Dataset& data) {
  std::vector<std::size_t> all(data.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<Cell> fill(data.cols());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    auto value = column_fill(data, j, all);
    if (!value && data.rows() > 0) {
      throw DataError(ErrorKind::empty_input,
                      "column '" + data.schema().features[j].name + "' has no observed values to impute from");
    }
    if (value) fill[j] = *value;
  }
  return fill;
}

double cell_change(const Cell& a, const Cell& b) {
  if (a.is_number() && b.is_number()) return std::abs(a.number() - b.number());
  return a == b ? 0.0 : 1.0;
}

void require_same_features(const Dataset& a, const Dataset& b) {
  if (a.schema().features != b.schema().features) {
    throw DataError(ErrorKind::schema_mismatch, "test schema does not match the training schema");
  }
}

// Neighbour values of one column, read from the pool.
Cell estimate_cell(const NeighborSet& neighbors, const Dataset& pool, std::size_t col, Estimator estimator,
                   bool eq11_literal) {
  const FeatureKind& kind = pool.schema().features[col].kind;
  if (kind.is_continuous()) {
    std::vector<double> values;
    values.reserve(neighbors.size());
    for (const auto& nb : neighbors) values.push_back(pool.cell(nb.row, col).number());
    return Cell::number(impute_numeric_cell(neighbors, values, estimator, eq11_literal));
  }
  std::vector<std::size_t> values;
  values.reserve(neighbors.size());
  for (const auto& nb : neighbors) values.push_back(pool.cell(nb.row, col).category());
  return Cell::category(impute_categorical_cell(neighbors, values, kind.level_count(), estimator));
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::mean_mode: return "MeanMode";
    case Method::iknn: return "IKNN";
    case Method::miknn: return "MIKNN";
    case Method::gknn: return "GKNN";
    case Method::fwgknn: return "FWGKNN";
    case Method::cgknn: return "CGKNN";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  static const std::map<std::string, Method> names{
      {"meanmode", Method::mean_mode}, {"mean-mode", Method::mean_mode}, {"mean", Method::mean_mode},
      {"iknn", Method::iknn},          {"miknn", Method::miknn},         {"mi-knn", Method::miknn},
      {"gknn", Method::gknn},          {"fwgknn", Method::fwgknn},       {"cgknn", Method::cgknn},
  };
  const auto it = names.find(lowercase(text));
  if (it == names.end()) return std::nullopt;
  return it->second;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::mean_mode, Method::iknn,   Method::miknn,
                                           Method::gknn,      Method::fwgknn, Method::cgknn};
  return methods;
}

void ImputeConfig::check() const {
  grey.check();
  if (!(epsilon > 0.0)) throw DataError(ErrorKind::invalid_argument, "epsilon must be positive");
  if (max_iter == 0) throw DataError(ErrorKind::invalid_argument, "max_iter must be positive");
  if (k && *k == 0) throw DataError(ErrorKind::invalid_argument, "k must be positive");
  if (!k) {
    if (k_grid.empty()) throw DataError(ErrorKind::invalid_argument, "k grid is empty");
    for (auto v : k_grid) {
      if (v == 0) throw DataError(ErrorKind::invalid_argument, "k grid values must be positive");
    }
  }
  if (cv_folds < 2) throw DataError(ErrorKind::invalid_argument, "cross-validation needs at least two folds");
}

std::vector<double> Metric::distances(std::span<const Cell> query, const Dataset& pool,
                                      std::span<const std::size_t> candidates) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  const Schema& schema = pool.schema();
  if (kind == DistanceKind::heom) {
    for (auto c : candidates) out.push_back(heom(query, pool.row(c), schema, ranges, weights));
    return out;
  }
  const DeltaBounds bounds = delta_bounds(query, pool, candidates);
  for (auto c : candidates) {
    out.push_back(std::max(0.0, grey_distance(grg(query, pool.row(c), schema, bounds, grey, weights))));
  }
  return out;
}

NeighborSet select_nearest(std::span<const std::size_t> candidates, std::span<const double> distances, std::size_t k) {
  if (candidates.size() < k || k == 0) {
    throw DataError(ErrorKind::insufficient_candidates, "need " + std::to_string(k) + " neighbours but only " +
                                                            std::to_string(candidates.size()) + " candidates");
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    return distance_less(distances[a], candidates[a], distances[b], candidates[b]);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), less);
  NeighborSet out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({candidates[order[i]], distances[order[i]]});
  return out;
}

NeighborSet nearest_neighbors(std::span<const Cell> query, const Dataset& pool,
                              std::span<const std::size_t> candidates, const Metric& metric, std::size_t k) {
  if (candidates.size() < k) {
    throw DataError(ErrorKind::insufficient_candidates, "need " + std::to_string(k) + " neighbours but only " +
                                                            std::to_string(candidates.size()) + " candidates");
  }
  return select_nearest(candidates, metric.distances(query, pool, candidates), k);
}

double impute_numeric_cell(const NeighborSet& neighbors, std::span<const double> values, Estimator estimator,
                           bool eq11_literal) {
  if (neighbors.empty() || values.size() != neighbors.size()) {
    throw DataError(ErrorKind::invalid_argument, "numeric estimate needs one value per neighbour");
  }
  const double k = static_cast<double>(neighbors.size());
  if (estimator == Estimator::plain) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / k;
  }
  // Inverse-square weights blow up at distance zero; their limit is the mean of the exact matches.
  double exact_sum = 0.0;
  std::size_t exact = 0;
  for (std::size_t l = 0; l < neighbors.size(); ++l) {
    if (neighbors[l].distance == 0.0) {
      exact_sum += values[l];
      ++exact;
    }
  }
  if (exact > 0) return exact_sum / static_cast<double>(exact);

  double total = 0.0, weighted = 0.0;
  for (std::size_t l = 0; l < neighbors.size(); ++l) {
    const double d = neighbors[l].distance;
    const double w = 1.0 / (d * d);
    total += w;
    weighted += w * values[l];
  }
  return eq11_literal ? weighted / (k * total) : weighted / total;
}

std::size_t impute_categorical_cell(const NeighborSet& neighbors, std::span<const std::size_t> values,
                                    std::size_t level_count, Estimator estimator) {
  if (neighbors.empty() || values.size() != neighbors.size()) {
    throw DataError(ErrorKind::invalid_argument, "categorical estimate needs one value per neighbour");
  }
  std::vector<double> score(level_count, 0.0);
  const double nearest = neighbors.front().distance;
  const double farthest = neighbors.back().distance;
  const bool exact_match = estimator == Estimator::weighted && nearest == 0.0;
  for (std::size_t l = 0; l < neighbors.size(); ++l) {
    if (values[l] >= level_count) throw DataError(ErrorKind::invalid_argument, "neighbour category out of range");
    double alpha = 1.0;
    if (exact_match) {
      alpha = neighbors[l].distance == 0.0 ? 1.0 : 0.0;
    } else if (estimator == Estimator::weighted && farthest != nearest) {
      alpha = (farthest - neighbors[l].distance) / (farthest - nearest);
    }
    score[values[l]] += alpha;
  }
  const double best = *std::max_element(score.begin(), score.end());
  for (std::size_t l = 0; l < neighbors.size(); ++l) {
    if (score[values[l]] == best) return values[l];
  }
  return static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
}

Dataset initial_impute(const Dataset& dataset, bool per_class) {
  Dataset out = dataset;
  if (dataset.complete()) return out;
  const std::vector<Cell> fallback = global_fill(dataset);
  std::vector<std::vector<std::size_t>> groups;
  if (per_class) {
    groups = partition_rows_by_class(dataset);
  } else {
    groups.emplace_back(dataset.rows());
    std::iota(groups.back().begin(), groups.back().end(), std::size_t{0});
  }
  for (const auto& rows : groups) {
    if (rows.empty()) continue;
    for (std::size_t j = 0; j < dataset.cols(); ++j) {
      const bool any_missing =
          std::any_of(rows.begin(), rows.end(), [&](std::size_t i) { return dataset.cell(i, j).is_missing(); });
      if (!any_missing) continue;
      const Cell fill = per_class ? column_fill(dataset, j, rows).value_or(fallback[j]) : fallback[j];
      for (auto i : rows) {
        if (dataset.cell(i, j).is_missing()) out.set(i, j, fill);
      }
    }
  }
  return out;
}

MethodTraits method_traits(const ImputeConfig& config) {
  using W = MethodTraits::Weights;
  MethodTraits t;
  switch (config.method) {
    case Method::mean_mode:
      t.iterative = false;
      t.needs_labels = false;
      break;
    case Method::iknn:
      t.needs_labels = false;
      break;
    case Method::miknn:
      t.weights = W::class_relevance;
      break;
    case Method::gknn:
      t.distance = DistanceKind::grey;
      t.per_class = true;
      t.estimator = config.weighted_grey_estimator ? Estimator::weighted : Estimator::plain;
      break;
    case Method::fwgknn:
      t.distance = DistanceKind::grey;
      t.weights = W::feature_relevance;
      break;
    case Method::cgknn:
      t.distance = DistanceKind::grey;
      t.per_class = true;
      t.weights = W::class_relevance;
      break;
  }
  return t;
}

KSelection select_k(const Dataset& complete, const Metric& metric, std::span<const std::size_t> grid,
                    std::size_t folds, std::uint64_t seed) {
  const std::size_t n = complete.rows();
  if (n < 4) throw DataError(ErrorKind::too_few_rows, "k selection needs at least 4 rows, got " + std::to_string(n));
  if (!complete.complete()) throw DataError(ErrorKind::invalid_argument, "k selection needs a complete matrix");
  const Labels& labels = complete.labels();
  const std::size_t m = complete.class_count();

  KSelection out;
  out.folds = std::min(effective_fold_count(labels, m, folds), n);
  const auto fold_of = stratified_folds(labels, m, out.folds, seed);
  std::vector<std::vector<std::size_t>> members(out.folds);
  for (std::size_t i = 0; i < n; ++i) members[fold_of[i]].push_back(i);

  std::size_t smallest_train = n;
  for (const auto& f : members) smallest_train = std::min(smallest_train, n - f.size());
  for (auto k : grid) {
    if (k >= 1 && k <= smallest_train) out.grid.push_back(k);
  }
  if (out.grid.empty()) throw DataError(ErrorKind::too_few_rows, "no grid value of k fits the training folds");
  const std::size_t k_max = *std::max_element(out.grid.begin(), out.grid.end());

  std::vector<double> error_sum(out.grid.size(), 0.0);
  std::size_t used_folds = 0;
  for (std::size_t f = 0; f < out.folds; ++f) {
    if (members[f].empty()) continue;
    ++used_folds;
    std::vector<std::size_t> train;
    train.reserve(n - members[f].size());
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) train.push_back(i);
    }
    std::vector<std::size_t> wrong(out.grid.size(), 0);
    for (auto q : members[f]) {
      const NeighborSet nbrs = nearest_neighbors(complete.row(q), complete, train, metric, k_max);
      for (std::size_t g = 0; g < out.grid.size(); ++g) {
        const NeighborSet head(nbrs.begin(), nbrs.begin() + static_cast<std::ptrdiff_t>(out.grid[g]));
        std::vector<std::size_t> votes;
        for (const auto& nb : head) votes.push_back(labels[nb.row]);
        if (impute_categorical_cell(head, votes, m, Estimator::plain) != labels[q]) ++wrong[g];
      }
    }
    for (std::size_t g = 0; g < out.grid.size(); ++g) {
      error_sum[g] += static_cast<double>(wrong[g]) / static_cast<double>(members[f].size());
    }
  }
  out.errors.resize(out.grid.size());
  std::size_t best = 0;
  for (std::size_t g = 0; g < out.grid.size(); ++g) {
    out.errors[g] = error_sum[g] / static_cast<double>(used_folds);
    if (out.errors[g] < out.errors[best] || (out.errors[g] == out.errors[best] && out.grid[g] < out.grid[best])) {
      best = g;
    }
  }
  out.k = out.grid[best];
  return out;
}

PreparedRun prepare_run(const Dataset& dataset, const ImputeConfig& config) {
  config.check();
  PreparedRun run;
  run.traits = method_traits(config);
  run.input = dataset;
  if (run.traits.needs_labels && !dataset.has_labels()) {
    throw DataError(ErrorKind::invalid_argument,
                    std::string(method_name(config.method)) + " needs class labels");
  }
  if (run.traits.iterative && !config.k && !dataset.has_labels()) {
    throw DataError(ErrorKind::invalid_argument, "choosing k by cross-validation needs class labels; pass k");
  }
  auto [normalized, ranges] = normalize(dataset);
  run.normalized = std::move(normalized);
  run.ranges = std::move(ranges);
  run.initial = initial_impute(run.normalized, run.traits.per_class);
  if (!run.traits.iterative) return run;

  const std::size_t p = dataset.cols();
  switch (run.traits.weights) {
    case MethodTraits::Weights::none:
      break;
    case MethodTraits::Weights::class_relevance:
      run.weights = class_weights(class_relevance(run.initial, config.parzen));
      break;
    case MethodTraits::Weights::feature_relevance:
      run.weights = feature_feature_weights(run.initial);
      break;
  }
  if (config.force_uniform_weights && run.traits.weights != MethodTraits::Weights::none) {
    run.weights = WeightVector::uniform(p);
  }
  run.metric.kind = run.traits.distance;
  run.metric.grey = config.grey;
  run.metric.ranges = compute_ranges(run.normalized);
  if (run.weights) run.metric.weights = run.weights->lambda;

  if (config.k) {
    run.k = *config.k;
  } else {
    run.selection = select_k(run.initial, run.metric, config.k_grid, config.cv_folds, config.seed);
    run.k = run.selection->k;
  }

  const std::size_t n = dataset.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (run.normalized.cell(i, j).is_missing()) {
        run.incomplete_rows.push_back(i);
        break;
      }
    }
  }
  if (!run.incomplete_rows.empty() && n < run.k + 1) {
    throw DataError(ErrorKind::insufficient_candidates,
                    "k = " + std::to_string(run.k) + " needs at least " + std::to_string(run.k + 1) + " rows");
  }
  std::vector<std::vector<std::size_t>> classes;
  if (run.traits.per_class) classes = partition_rows_by_class(dataset);
  for (auto i : run.incomplete_rows) {
    std::vector<std::size_t> pool;
    if (run.traits.per_class && classes[dataset.label(i)].size() >= run.k + 1) {
      for (auto r : classes[dataset.label(i)]) {
        if (r != i) pool.push_back(r);
      }
    } else {
      if (run.traits.per_class) ++run.pool_fallbacks;
      for (std::size_t r = 0; r < n; ++r) {
        if (r != i) pool.push_back(r);
      }
    }
    run.pools.push_back(std::move(pool));
  }
  return run;
}

Step iterate_once(const PreparedRun& run, const Dataset& current, const ImputeConfig& config) {
  Step step;
  step.next = current;
  const std::size_t count = run.incomplete_rows.size();
  step.neighbors.resize(count);
  std::vector<double> change(count, 0.0);
  parallel_for(count, config.threads, [&](std::size_t r) {
    const std::size_t i = run.incomplete_rows[r];
    const auto query = config.query_uses_fill ? current.row(i) : run.normalized.row(i);
    step.neighbors[r] = nearest_neighbors(query, current, run.pools[r], run.metric, run.k);
    for (std::size_t j = 0; j < current.cols(); ++j) {
      if (!run.normalized.cell(i, j).is_missing()) continue;
      const Cell estimate = estimate_cell(step.neighbors[r], current, j, run.traits.estimator, config.eq11_literal);
      change[r] = std::max(change[r], cell_change(estimate, current.cell(i, j)));
      step.next.set(i, j, estimate);
    }
  });
  for (double c : change) step.max_change = std::max(step.max_change, c);
  return step;
}

ImputationResult run_impute(const Dataset& dataset, const ImputeConfig& config) {
  config.check();
  ImputationResult result;
  result.method = config.method;
  if (dataset.complete()) {
    result.completed = dataset;
    result.chosen_k = config.k.value_or(0);
    result.ranges = compute_ranges(dataset);
    return result;
  }
  const PreparedRun run = prepare_run(dataset, config);
  result.ranges = run.ranges;
  result.metric = run.metric;
  result.weights_used = run.weights;
  result.chosen_k = run.k;
  result.pool_fallbacks = run.pool_fallbacks;

  Dataset current = run.initial;
  if (run.traits.iterative) {
    result.converged = false;
    for (std::size_t t = 0; t < config.max_iter; ++t) {
      Step step = iterate_once(run, current, config);
      current = std::move(step.next);
      result.trace.push_back(step.max_change);
      if (step.max_change < config.epsilon) {
        result.converged = true;
        break;
      }
    }
    result.iterations = result.trace.size();
  }
  result.completed = denormalize(current, run.ranges);
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    for (std::size_t j = 0; j < dataset.cols(); ++j) {
      if (!dataset.cell(i, j).is_missing()) result.completed.set(i, j, dataset.cell(i, j));
    }
  }
  return result;
}

Dataset impute_test(const ImputationResult& train, const Dataset& training, const Dataset& test,
                    const ImputeConfig& config) {
  require_same_features(training, test);
  require_same_features(train.completed, test);
  Dataset out = test;
  if (test.rows() == 0 || test.complete()) return out;
  const MethodTraits traits = method_traits(config);

  if (!traits.iterative || train.chosen_k == 0) {
    const std::vector<Cell> fill = global_fill(training);
    for (std::size_t i = 0; i < test.rows(); ++i) {
      for (std::size_t j = 0; j < test.cols(); ++j) {
        if (test.cell(i, j).is_missing()) out.set(i, j, fill[j]);
      }
    }
    return out;
  }

  const Dataset pool = apply_normalization(train.completed, train.ranges);
  const Dataset queries = apply_normalization(test, train.ranges);
  if (pool.rows() < train.chosen_k) {
    throw DataError(ErrorKind::insufficient_candidates, "training matrix has fewer rows than k");
  }
  std::vector<std::size_t> candidates(pool.rows());
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  Dataset imputed = queries;
  std::vector<std::size_t> incomplete;
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    for (std::size_t j = 0; j < queries.cols(); ++j) {
      if (queries.cell(i, j).is_missing()) {
        incomplete.push_back(i);
        break;
      }
    }
  }
  parallel_for(incomplete.size(), config.threads, [&](std::size_t r) {
    const std::size_t i = incomplete[r];
    const NeighborSet nbrs = nearest_neighbors(queries.row(i), pool, candidates, train.metric, train.chosen_k);
    for (std::size_t j = 0; j < queries.cols(); ++j) {
      if (queries.cell(i, j).is_missing()) {
        imputed.set(i, j, estimate_cell(nbrs, pool, j, traits.estimator, config.eq11_literal));
      }
    }
  });
  const Dataset restored = denormalize(imputed, train.ranges);
  for (auto i : incomplete) {
    for (std::size_t j = 0; j < test.cols(); ++j) {
      if (test.cell(i, j).is_missing()) out.set(i, j, restored.cell(i, j));
    }
  }
  return out;
}

}  // namespace greyknn
