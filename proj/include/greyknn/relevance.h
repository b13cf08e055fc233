#pragma once

#include <span>
#include <vector>

#include "greyknn/dataset.h"
#include "greyknn/distance.h"

namespace greyknn {

enum class MIEstimator { histogram, parzen };

struct MIEstimate {
  double mi = 0.0;  ///< bits, clamped at zero
  MIEstimator estimator = MIEstimator::histogram;
};

enum class ParzenWindow { gaussian, rectangular };

struct ParzenSettings {
  ParzenWindow window = ParzenWindow::gaussian;
  /// Multiplier on the Silverman width 1.06 * sd * n^(-1/5).
  double bandwidth_scale = 1.0;
  double min_bandwidth = 1e-6;
};

/// Row-major contingency table: rows are feature values, columns are classes.
struct ContingencyTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> counts;

  double at(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }
  double total() const;
};

/// Shannon entropy in bits with 0 log 0 = 0. Throws DataError(empty_input) on a zero total.
double entropy_discrete(std::span<const double> counts);

/// Plug-in H(Y|X) in bits from a feature x class table.
double conditional_entropy_discrete(const ContingencyTable& joint);

double silverman_bandwidth(std::span<const double> values, const ParzenSettings& settings = {});

/// H(Y|X) for a continuous X: class posteriors from Parzen density estimates, averaged over the sample.
double parzen_conditional_entropy(std::span<const double> feature, std::span<const std::size_t> labels,
                                  std::size_t class_count, const ParzenSettings& settings = {});

/// I(X;Y) = max(0, H(Y) - H(Y|X)). The column must be complete.
MIEstimate mutual_information(const Dataset& dataset, std::size_t column, const ParzenSettings& settings = {});

std::vector<MIEstimate> class_relevance(const Dataset& dataset, const ParzenSettings& settings = {});

/// lambda_j = I_j / sum I; uniform when every I_j is zero.
WeightVector class_weights(std::span<const MIEstimate> mi);

/// Plug-in MI of two discrete codings.
double discrete_mutual_information(std::span<const std::size_t> a, std::size_t a_levels,
                                   std::span<const std::size_t> b, std::size_t b_levels);

/// Level codes of a complete column: category indices, or 10 equal-frequency bins for continuous data.
std::vector<std::size_t> discretize_column(const Dataset& dataset, std::size_t column, std::size_t& levels,
                                           std::size_t bins = 10);

/// Weight for feature j is the mean MI between j and every other feature, normalised to the simplex.
WeightVector feature_feature_weights(const Dataset& dataset);

}  // namespace greyknn
