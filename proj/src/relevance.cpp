#include "greyknn/relevance.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "greyknn/error.h"

namespace greyknn {

namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

std::vector<double> class_counts(std::span<const std::size_t> labels, std::size_t class_count) {
  std::vector<double> counts(class_count, 0.0);
  for (auto y : labels) {
    if (y >= class_count) throw DataError(ErrorKind::invalid_argument, "class label out of range");
    counts[y] += 1.0;
  }
  return counts;
}

double sample_sd(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

double ContingencyTable::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

double entropy_discrete(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw DataError(ErrorKind::empty_input, "entropy of an empty histogram");
  double h = 0.0;
  for (double c : counts) h -= plogp(c / total);
  return std::max(0.0, h);
}

double conditional_entropy_discrete(const ContingencyTable& joint) {
  const double total = joint.total();
  if (!(total > 0.0)) throw DataError(ErrorKind::empty_input, "conditional entropy of an empty table");
  double h = 0.0;
  for (std::size_t r = 0; r < joint.rows; ++r) {
    double row_total = 0.0;
    for (std::size_t c = 0; c < joint.cols; ++c) row_total += joint.at(r, c);
    if (row_total == 0.0) continue;
    for (std::size_t c = 0; c < joint.cols; ++c) {
      const double n_xy = joint.at(r, c);
      if (n_xy > 0.0) h -= (n_xy / total) * std::log2(n_xy / row_total);
    }
  }
  return std::max(0.0, h);
}

double silverman_bandwidth(std::span<const double> values, const ParzenSettings& settings) {
  if (values.size() < 2) throw DataError(ErrorKind::too_few_rows, "bandwidth needs at least two observations");
  const double n = static_cast<double>(values.size());
  const double h = settings.bandwidth_scale * 1.06 * sample_sd(values) * std::pow(n, -0.2);
  return std::max(h, settings.min_bandwidth);
}

double parzen_conditional_entropy(std::span<const double> feature, std::span<const std::size_t> labels,
                                  std::size_t class_count, const ParzenSettings& settings) {
  if (feature.size() != labels.size()) throw DataError(ErrorKind::length_mismatch, "feature and labels differ in length");
  const std::size_t n = feature.size();
  const auto counts = class_counts(labels, class_count);
  if (std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1) return 0.0;

  const double h = silverman_bandwidth(feature, settings);
  const double inv_two_h2 = 1.0 / (2.0 * h * h);
  std::vector<double> per_class(class_count);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(per_class.begin(), per_class.end(), 0.0);
    for (std::size_t l = 0; l < n; ++l) {
      const double u = feature[i] - feature[l];
      double k;
      if (settings.window == ParzenWindow::gaussian) {
        k = std::exp(-u * u * inv_two_h2);
      } else {
        k = std::abs(u) <= h ? 1.0 : 0.0;
      }
      per_class[labels[l]] += k;
    }
    // The l = i term keeps the density strictly positive, so the posterior is well defined.
    const double density = std::accumulate(per_class.begin(), per_class.end(), 0.0);
    for (double mass : per_class) sum -= plogp(mass / density);
  }
  return std::max(0.0, sum / static_cast<double>(n));
}

MIEstimate mutual_information(const Dataset& dataset, std::size_t column, const ParzenSettings& settings) {
  const Labels& labels = dataset.labels();
  const FeatureKind& kind = dataset.schema().features.at(column).kind;
  const std::size_t n = dataset.rows();
  const std::size_t m = dataset.class_count();
  if (n == 0) throw DataError(ErrorKind::empty_input, "mutual information of an empty column");
  for (std::size_t i = 0; i < n; ++i) {
    if (dataset.cell(i, column).is_missing()) {
      throw DataError(ErrorKind::invalid_argument,
                      "mutual information needs a complete column; '" + dataset.schema().features[column].name +
                          "' has missing cells");
    }
  }
  const double h_y = entropy_discrete(class_counts(labels, m));

  if (kind.is_categorical()) {
    ContingencyTable table{kind.level_count(), m, std::vector<double>(kind.level_count() * m, 0.0)};
    for (std::size_t i = 0; i < n; ++i) table.counts[dataset.cell(i, column).category() * m + labels[i]] += 1.0;
    return {std::max(0.0, h_y - conditional_entropy_discrete(table)), MIEstimator::histogram};
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = dataset.cell(i, column).number();
  const double h_y_x = parzen_conditional_entropy(values, labels, m, settings);
  return {std::max(0.0, h_y - h_y_x), MIEstimator::parzen};
}

std::vector<MIEstimate> class_relevance(const Dataset& dataset, const ParzenSettings& settings) {
  std::vector<MIEstimate> out;
  out.reserve(dataset.cols());
  for (std::size_t j = 0; j < dataset.cols(); ++j) out.push_back(mutual_information(dataset, j, settings));
  return out;
}

WeightVector class_weights(std::span<const MIEstimate> mi) {
  if (mi.empty()) throw DataError(ErrorKind::empty_input, "class weights need at least one feature");
  double total = 0.0;
  for (const auto& e : mi) total += std::max(0.0, e.mi);
  if (!(total > 0.0)) return WeightVector::uniform(mi.size());
  WeightVector w;
  w.lambda.reserve(mi.size());
  for (const auto& e : mi) w.lambda.push_back(std::max(0.0, e.mi) / total);
  return w;
}

double discrete_mutual_information(std::span<const std::size_t> a, std::size_t a_levels, std::span<const std::size_t> b,
                                   std::size_t b_levels) {
  if (a.size() != b.size()) throw DataError(ErrorKind::length_mismatch, "codings differ in length");
  if (a.empty()) throw DataError(ErrorKind::empty_input, "mutual information of empty codings");
  std::vector<double> joint(a_levels * b_levels, 0.0), pa(a_levels, 0.0), pb(b_levels, 0.0);
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[a[i] * b_levels + b[i]] += 1.0 / n;
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
  }
  double mi = 0.0;
  for (std::size_t x = 0; x < a_levels; ++x) {
    for (std::size_t y = 0; y < b_levels; ++y) {
      const double pxy = joint[x * b_levels + y];
      if (pxy > 0.0) mi += pxy * std::log2(pxy / (pa[x] * pb[y]));
    }
  }
  return std::max(0.0, mi);
}

std::vector<std::size_t> discretize_column(const Dataset& dataset, std::size_t column, std::size_t& levels,
                                           std::size_t bins) {
  const std::size_t n = dataset.rows();
  const FeatureKind& kind = dataset.schema().features.at(column).kind;
  std::vector<std::size_t> codes(n);
  if (kind.is_categorical()) {
    levels = kind.level_count();
    for (std::size_t i = 0; i < n; ++i) codes[i] = dataset.cell(i, column).category();
    return codes;
  }
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = dataset.cell(i, column).number();
  std::vector<double> values = sorted;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (std::size_t b = 1; b < bins; ++b) edges.push_back(sorted[b * n / bins]);
  levels = bins;
  for (std::size_t i = 0; i < n; ++i) {
    codes[i] = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), values[i]) - edges.begin());
  }
  return codes;
}

WeightVector feature_feature_weights(const Dataset& dataset) {
  const std::size_t p = dataset.cols();
  if (p == 0) throw DataError(ErrorKind::empty_input, "feature weights need at least one feature");
  if (!dataset.complete()) throw DataError(ErrorKind::invalid_argument, "feature weights need a complete dataset");
  if (p == 1) return WeightVector{{1.0}};
  if (dataset.rows() == 0) return WeightVector::uniform(p);

  std::vector<std::vector<std::size_t>> codes(p);
  std::vector<std::size_t> levels(p);
  for (std::size_t j = 0; j < p; ++j) codes[j] = discretize_column(dataset, j, levels[j]);

  std::vector<double> mean_mi(p, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      const double mi = discrete_mutual_information(codes[a], levels[a], codes[b], levels[b]);
      mean_mi[a] += mi;
      mean_mi[b] += mi;
    }
  }
  std::vector<MIEstimate> as_estimates;
  for (double total : mean_mi) as_estimates.push_back({total / static_cast<double>(p - 1), MIEstimator::histogram});
  return class_weights(as_estimates);
}

}  // namespace greyknn
