#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "greyknn/dataset.h"

namespace greyknn {

struct CellPosition {
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const CellPosition&) const = default;
};

/// Cells observed in `truth` but missing in `injected`, row-major.
std::vector<CellPosition> injected_cells(const Dataset& truth, const Dataset& injected);

/// Root mean squared error over `mask` on the normalised scale given by `ranges`.
/// Continuous errors are divided by the column span; a categorical cell contributes 0 or 1.
/// Throws DataError(empty_mask) when the mask is empty.
double rmse(const Dataset& truth, const Dataset& imputed, std::span<const CellPosition> mask,
            const RangeTable& ranges);
/// Same, with ranges taken from the observed cells of `truth`.
double rmse(const Dataset& truth, const Dataset& imputed, std::span<const CellPosition> mask);

struct NaiveBayesModel {
  struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;
  };
  Schema schema;
  std::vector<double> priors;                                ///< zero for classes without rows
  std::vector<std::vector<Gaussian>> gaussians;              ///< [class][feature], continuous features only
  std::vector<std::vector<std::vector<double>>> level_probs;  ///< [class][feature][level], Laplace smoothed

  static constexpr double variance_floor = 1e-9;
};

/// Fits on a complete labelled dataset. Throws DataError(degenerate_class) when a class has exactly one row.
NaiveBayesModel nb_fit(const Dataset& dataset);
/// Highest log posterior; ties go to the lower class index. The row must be complete.
std::size_t nb_predict(const NaiveBayesModel& model, std::span<const Cell> row);
std::vector<double> nb_log_posterior(const NaiveBayesModel& model, std::span<const Cell> row);

double classification_accuracy(std::span<const std::size_t> predicted, std::span<const std::size_t> truth);

/// Predicts a label for every row of `test` after training on `train`.
using Classifier = std::function<std::vector<std::size_t>(const Dataset& train, const Dataset& test)>;

/// Naive Bayes on the training rows as given; both sides must be complete.
std::vector<std::size_t> naive_bayes_classifier(const Dataset& train, const Dataset& test);

/// Naive Bayes fitted on complete training rows only; missing test cells take the training mean or mode.
std::vector<std::size_t> complete_case_classifier(const Dataset& train, const Dataset& test);

struct CvResult {
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;
  std::size_t folds = 0;
};

/// Stratified k-fold cross-validation; folds are reduced to the smallest class size (never below 2).
CvResult kfold_cv(const Dataset& dataset, std::size_t folds, std::uint64_t seed,
                  const Classifier& classifier = naive_bayes_classifier);

}  // namespace greyknn
