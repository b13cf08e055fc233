#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "greyknn/dataset.h"
#include "greyknn/rng.h"

namespace greyknn {

/// Logistic missingness model: target t goes missing with probability
/// sigmoid(intercept_t + sum_q coefficients[t][q] * x_{predictor q}).
struct MarSpec {
  std::vector<std::size_t> targets;
  std::vector<std::size_t> predictors;
  std::vector<std::vector<double>> coefficients;
  std::vector<double> intercepts;
  /// When set, intercepts are recalibrated so each target column reaches this marginal rate.
  std::optional<double> target_rate;

  /// All coefficients equal to `coefficient`, intercepts calibrated to `rate`.
  static MarSpec calibrated(std::vector<std::size_t> targets, std::vector<std::size_t> predictors, double rate,
                            double coefficient = 1.0);

  /// Throws DataError on overlapping, out-of-range or mis-sized fields.
  void check(std::size_t columns) const;
};

struct MvnScenario {
  Dataset dataset;
  MarSpec mar;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
};

inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

/// Four axis-aligned cubes of half-side 0.10, two per class, 100 uniform points each,
/// plus 20 U[-1, 1] noise columns: 400 x 23, classes "1" and "2".
Dataset gen_cubes(std::uint64_t seed);

/// Random correlation matrix from the vine construction with partial correlations uniform on (-1, 1).
Eigen::MatrixXd vine_correlation(std::size_t dim, CounterRng& rng);

/// Four Gaussian classes of 100 rows in five dimensions; features 1-3 are always-observed
/// predictors and features 4-5 the MAR targets of the returned spec (calibrated to 10%).
MvnScenario gen_mvn_mar(std::uint64_t seed);

/// Each targeted cell goes missing independently with probability `rate`.
Dataset inject_mcar(const Dataset& dataset, std::span<const std::size_t> columns, double rate, std::uint64_t seed);

struct MarResult {
  Dataset dataset;
  std::vector<double> intercepts;  ///< as applied, after any calibration
};

MarResult inject_mar(const Dataset& dataset, const MarSpec& spec, std::uint64_t seed);

}  // namespace greyknn
