#include "greyknn/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "greyknn/error.h"
#include "greyknn/folds.h"

namespace greyknn {

std::vector<CellPosition> injected_cells(const Dataset& truth, const Dataset& injected) {
  if (truth.rows() != injected.rows() || truth.cols() != injected.cols()) {
    throw DataError(ErrorKind::schema_mismatch, "datasets differ in shape");
  }
  std::vector<CellPosition> out;
  for (std::size_t i = 0; i < truth.rows(); ++i) {
    for (std::size_t j = 0; j < truth.cols(); ++j) {
      if (!truth.cell(i, j).is_missing() && injected.cell(i, j).is_missing()) out.push_back({i, j});
    }
  }
  return out;
}

double rmse(const Dataset& truth, const Dataset& imputed, std::span<const CellPosition> mask,
            const RangeTable& ranges) {
  if (mask.empty()) throw DataError(ErrorKind::empty_mask, "no masked cells to score");
  if (truth.schema().features != imputed.schema().features) {
    throw DataError(ErrorKind::schema_mismatch, "truth and imputed schemas differ");
  }
  double sum = 0.0;
  for (const auto& [i, j] : mask) {
    const Cell& e = truth.cell(i, j);
    const Cell& f = imputed.cell(i, j);
    if (e.is_missing() || f.is_missing()) {
      throw DataError(ErrorKind::invalid_argument,
                      "masked cell (" + std::to_string(i) + ", " + std::to_string(j) + ") is missing");
    }
    double err = 0.0;
    if (e.is_number()) {
      const double span = ranges.at(j) ? ranges[j]->span() : 1.0;
      err = (e.number() - f.number()) / span;
    } else {
      err = e == f ? 0.0 : 1.0;
    }
    sum += err * err;
  }
  return std::sqrt(sum / static_cast<double>(mask.size()));
}

double rmse(const Dataset& truth, const Dataset& imputed, std::span<const CellPosition> mask) {
  return rmse(truth, imputed, mask, compute_ranges(truth));
}

NaiveBayesModel nb_fit(const Dataset& dataset) {
  if (!dataset.complete()) throw DataError(ErrorKind::invalid_argument, "naive Bayes needs complete rows");
  const Labels& labels = dataset.labels();
  const std::size_t m = dataset.class_count();
  const std::size_t p = dataset.cols();
  const auto& features = dataset.schema().features;

  NaiveBayesModel model;
  model.schema = dataset.schema();
  std::vector<std::vector<std::size_t>> rows(m);
  for (std::size_t i = 0; i < labels.size(); ++i) rows.at(labels[i]).push_back(i);
  if (labels.empty()) throw DataError(ErrorKind::empty_input, "naive Bayes needs at least one row");

  model.priors.assign(m, 0.0);
  model.gaussians.assign(m, std::vector<NaiveBayesModel::Gaussian>(p));
  model.level_probs.assign(m, std::vector<std::vector<double>>(p));
  for (std::size_t y = 0; y < m; ++y) {
    const auto& members = rows[y];
    if (members.size() == 1) {
      throw DataError(ErrorKind::degenerate_class,
                      "class '" + dataset.schema().class_levels[y] + "' has a single training row");
    }
    model.priors[y] = static_cast<double>(members.size()) / static_cast<double>(labels.size());
    const double count = static_cast<double>(members.size());
    for (std::size_t j = 0; j < p; ++j) {
      if (features[j].kind.is_continuous()) {
        if (members.empty()) continue;
        double mean = 0.0;
        for (auto i : members) mean += dataset.cell(i, j).number();
        mean /= count;
        double var = 0.0;
        for (auto i : members) {
          const double d = dataset.cell(i, j).number() - mean;
          var += d * d;
        }
        model.gaussians[y][j] = {mean, std::max(var / count, NaiveBayesModel::variance_floor)};
      } else {
        const std::size_t levels = features[j].kind.level_count();
        std::vector<double> freq(levels, 1.0);
        for (auto i : members) freq[dataset.cell(i, j).category()] += 1.0;
        for (auto& f : freq) f /= count + static_cast<double>(levels);
        model.level_probs[y][j] = std::move(freq);
      }
    }
  }
  return model;
}

std::vector<double> nb_log_posterior(const NaiveBayesModel& model, std::span<const Cell> row) {
  const auto& features = model.schema.features;
  if (row.size() != features.size()) throw DataError(ErrorKind::length_mismatch, "row width differs from the model");
  std::vector<double> out(model.priors.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t y = 0; y < model.priors.size(); ++y) {
    if (model.priors[y] <= 0.0) continue;
    double lp = std::log(model.priors[y]);
    for (std::size_t j = 0; j < features.size(); ++j) {
      const Cell& c = row[j];
      if (c.is_missing()) throw DataError(ErrorKind::invalid_argument, "naive Bayes prediction needs a complete row");
      if (features[j].kind.is_continuous()) {
        const auto& g = model.gaussians[y][j];
        const double d = c.number() - g.mean;
        lp += -0.5 * std::log(2.0 * std::numbers::pi * g.variance) - d * d / (2.0 * g.variance);
      } else {
        lp += std::log(model.level_probs[y][j].at(c.category()));
      }
    }
    out[y] = lp;
  }
  return out;
}

std::size_t nb_predict(const NaiveBayesModel& model, std::span<const Cell> row) {
  const auto lp = nb_log_posterior(model, row);
  return static_cast<std::size_t>(std::max_element(lp.begin(), lp.end()) - lp.begin());
}

double classification_accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size()) {
    throw DataError(ErrorKind::length_mismatch, "prediction and truth lengths differ");
  }
  if (truth.empty()) throw DataError(ErrorKind::empty_input, "accuracy of an empty prediction");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<std::size_t> naive_bayes_classifier(const Dataset& train, const Dataset& test) {
  const NaiveBayesModel model = nb_fit(train);
  std::vector<std::size_t> out;
  out.reserve(test.rows());
  for (std::size_t i = 0; i < test.rows(); ++i) out.push_back(nb_predict(model, test.row(i)));
  return out;
}

std::vector<std::size_t> complete_case_classifier(const Dataset& train, const Dataset& test) {
  std::vector<std::size_t> complete_rows;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const auto r = train.row(i);
    if (std::none_of(r.begin(), r.end(), [](const Cell& c) { return c.is_missing(); })) complete_rows.push_back(i);
  }
  const NaiveBayesModel model = nb_fit(train.select_rows(complete_rows));

  std::vector<Cell> fill(train.cols());
  for (std::size_t j = 0; j < train.cols(); ++j) {
    const FeatureKind& kind = train.schema().features[j].kind;
    if (kind.is_continuous()) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < train.rows(); ++i) {
        if (train.cell(i, j).is_number()) {
          sum += train.cell(i, j).number();
          ++count;
        }
      }
      fill[j] = Cell::number(count ? sum / static_cast<double>(count) : 0.0);
    } else {
      std::vector<std::size_t> counts(kind.level_count(), 0);
      for (std::size_t i = 0; i < train.rows(); ++i) {
        if (train.cell(i, j).is_category()) ++counts[train.cell(i, j).category()];
      }
      fill[j] = Cell::category(static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin()));
    }
  }
  std::vector<std::size_t> out;
  out.reserve(test.rows());
  std::vector<Cell> row(test.cols());
  for (std::size_t i = 0; i < test.rows(); ++i) {
    for (std::size_t j = 0; j < test.cols(); ++j) row[j] = test.cell(i, j).is_missing() ? fill[j] : test.cell(i, j);
    out.push_back(nb_predict(model, row));
  }
  return out;
}

CvResult kfold_cv(const Dataset& dataset, std::size_t folds, std::uint64_t seed, const Classifier& classifier) {
  const std::size_t n = dataset.rows();
  if (n < 2) throw DataError(ErrorKind::too_few_rows, "cross-validation needs at least two rows");
  const Labels& labels = dataset.labels();
  CvResult out;
  out.folds = std::min(effective_fold_count(labels, dataset.class_count(), folds), n);
  const auto fold_of = stratified_folds(labels, dataset.class_count(), out.folds, seed);
  for (std::size_t f = 0; f < out.folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(i);
    if (test.empty()) continue;
    const Dataset test_set = dataset.select_rows(test);
    const auto predicted = classifier(dataset.select_rows(train), test_set);
    out.fold_accuracy.push_back(classification_accuracy(predicted, test_set.labels()));
  }
  double total = 0.0;
  for (double a : out.fold_accuracy) total += a;
  out.mean_accuracy = total / static_cast<double>(out.fold_accuracy.size());
  return out;
}

}  // namespace greyknn
