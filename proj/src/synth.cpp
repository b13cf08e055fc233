#include "greyknn/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

#include "greyknn/error.h"

namespace greyknn {

namespace {

Schema numbered_schema(std::size_t features, std::size_t classes) {
  Schema schema;
  for (std::size_t j = 0; j < features; ++j) {
    schema.features.push_back({"x" + std::to_string(j + 1), FeatureKind::continuous()});
  }
  schema.class_column = "class";
  for (std::size_t y = 0; y < classes; ++y) schema.class_levels.push_back(std::to_string(y + 1));
  return schema;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

Dataset gen_cubes(std::uint64_t seed) {
  constexpr std::array<std::array<double, 3>, 4> centers{{
      {0.0, 0.0, 0.0},
      {-0.2, -0.4, 0.4},
      {-0.6, -0.6, 0.5},
      {0.4, -0.2, -0.2},
  }};
  constexpr std::size_t per_cube = 100;
  constexpr std::size_t noise = 20;
  constexpr double half_side = 0.10;
  const std::size_t p = 3 + noise;

  CounterRng rng(seed, /*stream=*/0xC0BE5);
  std::vector<Cell> cells;
  cells.reserve(centers.size() * per_cube * p);
  Labels labels;
  for (std::size_t cube = 0; cube < centers.size(); ++cube) {
    for (std::size_t i = 0; i < per_cube; ++i) {
      for (double c : centers[cube]) cells.push_back(Cell::number(rng.uniform(c - half_side, c + half_side)));
      for (std::size_t k = 0; k < noise; ++k) cells.push_back(Cell::number(rng.uniform(-1.0, 1.0)));
      labels.push_back(cube < 2 ? 0 : 1);
    }
  }
  const std::size_t n = labels.size();
  return Dataset(numbered_schema(p, 2), n, std::move(cells), std::move(labels));
}

Eigen::MatrixXd vine_correlation(std::size_t dim, CounterRng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index k = 0; k + 1 < d; ++k) {
    for (Eigen::Index i = k + 1; i < d; ++i) {
      partial(k, i) = rng.uniform(-1.0, 1.0);
      double r = partial(k, i);
      // Convert the partial correlation to a raw correlation by walking back down the vine.
      for (Eigen::Index l = k - 1; l >= 0; --l) {
        r = r * std::sqrt((1.0 - partial(l, i) * partial(l, i)) * (1.0 - partial(l, k) * partial(l, k))) +
            partial(l, i) * partial(l, k);
      }
      corr(k, i) = r;
      corr(i, k) = r;
    }
  }
  return corr;
}

MvnScenario gen_mvn_mar(std::uint64_t seed) {
  constexpr std::size_t classes = 4;
  constexpr std::size_t per_class = 100;
  constexpr std::size_t dim = 5;

  CounterRng rng(seed, /*stream=*/0x3A5);
  MvnScenario out;
  std::vector<Cell> cells;
  cells.reserve(classes * per_class * dim);
  Labels labels;
  for (std::size_t y = 0; y < classes; ++y) {
    Eigen::VectorXd mean(dim);
    for (std::size_t j = 0; j < dim; ++j) mean(static_cast<Eigen::Index>(j)) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd cov = vine_correlation(dim, rng);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw DataError(ErrorKind::invalid_argument, "sampled covariance is not positive definite");
    }
    const Eigen::MatrixXd chol = llt.matrixL();
    for (std::size_t i = 0; i < per_class; ++i) {
      Eigen::VectorXd z(dim);
      for (std::size_t j = 0; j < dim; ++j) z(static_cast<Eigen::Index>(j)) = rng.normal();
      const Eigen::VectorXd x = mean + chol * z;
      for (std::size_t j = 0; j < dim; ++j) cells.push_back(Cell::number(x(static_cast<Eigen::Index>(j))));
      labels.push_back(y);
    }
    out.means.push_back(std::move(mean));
    out.covariances.push_back(std::move(cov));
  }
  const std::size_t n = labels.size();
  out.dataset = Dataset(numbered_schema(dim, classes), n, std::move(cells), std::move(labels));
  out.mar = MarSpec::calibrated({3, 4}, {0, 1, 2}, 0.10);
  return out;
}

Dataset inject_mcar(const Dataset& dataset, std::span<const std::size_t> columns, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw DataError(ErrorKind::invalid_argument, "MCAR rate must lie in [0, 1)");
  for (auto j : columns) {
    if (j >= dataset.cols()) throw DataError(ErrorKind::invalid_argument, "MCAR column out of range");
  }
  CounterRng rng(seed, /*stream=*/0x3CA2);
  Dataset out = dataset;
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    for (auto j : columns) {
      // Draw for every targeted cell so the pattern does not depend on existing missingness.
      const double u = rng.uniform();
      if (u < rate) out.set(i, j, Cell::missing());
    }
  }
  return out;
}

MarSpec MarSpec::calibrated(std::vector<std::size_t> targets, std::vector<std::size_t> predictors, double rate,
                            double coefficient) {
  MarSpec spec;
  spec.coefficients.assign(targets.size(), std::vector<double>(predictors.size(), coefficient));
  spec.intercepts.assign(targets.size(), 0.0);
  spec.targets = std::move(targets);
  spec.predictors = std::move(predictors);
  spec.target_rate = rate;
  return spec;
}

void MarSpec::check(std::size_t columns) const {
  std::set<std::size_t> pred(predictors.begin(), predictors.end());
  for (auto t : targets) {
    if (t >= columns) throw DataError(ErrorKind::invalid_argument, "MAR target column out of range");
    if (pred.count(t)) throw DataError(ErrorKind::invalid_argument, "MAR targets and predictors overlap");
  }
  for (auto q : predictors) {
    if (q >= columns) throw DataError(ErrorKind::invalid_argument, "MAR predictor column out of range");
  }
  if (coefficients.size() != targets.size() || intercepts.size() != targets.size()) {
    throw DataError(ErrorKind::invalid_argument, "MAR coefficients or intercepts do not match the target count");
  }
  for (const auto& row : coefficients) {
    if (row.size() != predictors.size()) {
      throw DataError(ErrorKind::invalid_argument, "MAR coefficient row does not match the predictor count");
    }
  }
  if (target_rate && !(*target_rate > 0.0 && *target_rate < 1.0)) {
    throw DataError(ErrorKind::invalid_argument, "MAR target rate must lie in (0, 1)");
  }
}

MarResult inject_mar(const Dataset& dataset, const MarSpec& spec, std::uint64_t seed) {
  spec.check(dataset.cols());
  const std::size_t n = dataset.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (auto q : spec.predictors) {
      if (!dataset.cell(i, q).is_number()) {
        throw DataError(ErrorKind::predictor_missing, "MAR predictor '" + dataset.schema().features[q].name +
                                                          "' is not an observed number at row " + std::to_string(i));
      }
    }
  }

  MarResult result{dataset, spec.intercepts};
  for (std::size_t t = 0; t < spec.targets.size(); ++t) {
    const std::size_t column = spec.targets[t];
    CounterRng rng(seed, /*stream=*/0x3A20 + t);
    std::vector<double> linear(n), draws(n);
    double reach = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (std::size_t q = 0; q < spec.predictors.size(); ++q) {
        eta += spec.coefficients[t][q] * dataset.cell(i, spec.predictors[q]).number();
      }
      linear[i] = eta;
      draws[i] = rng.uniform();
      reach = std::max(reach, std::abs(eta));
    }

    auto count_missing = [&](double intercept) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (dataset.cell(i, column).is_missing() || draws[i] < sigmoid(intercept + linear[i])) ++count;
      }
      return count;
    };

    double intercept = spec.intercepts[t];
    if (spec.target_rate && n > 0) {
      // The missing count is nondecreasing in the intercept, so bisection converges.
      const double rate = *spec.target_rate;
      // Aim for the nearest whole cell count, never looser than half a percentage point.
      const double tolerance = std::min(0.005, 0.5 / static_cast<double>(n) + 1e-12);
      double lo = logit(rate) - reach - 40.0;
      double hi = logit(rate) + reach + 40.0;
      intercept = 0.5 * (lo + hi);
      for (int iter = 0; iter < 200; ++iter) {
        intercept = 0.5 * (lo + hi);
        const double empirical = static_cast<double>(count_missing(intercept)) / static_cast<double>(n);
        if (std::abs(empirical - rate) <= tolerance) break;
        if (empirical < rate) lo = intercept; else hi = intercept;
      }
    }
    result.intercepts[t] = intercept;
    for (std::size_t i = 0; i < n; ++i) {
      if (draws[i] < sigmoid(intercept + linear[i])) result.dataset.set(i, column, Cell::missing());
    }
  }
  return result;
}

}  // namespace greyknn
