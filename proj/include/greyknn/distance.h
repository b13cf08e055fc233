#pragma once

#include <span>
#include <vector>

#include "greyknn/dataset.h"

namespace greyknn {

/// Per-feature relevance weights on the probability simplex.
struct WeightVector {
  std::vector<double> lambda;

  static WeightVector uniform(std::size_t p);
  std::size_t size() const noexcept { return lambda.size(); }
  /// Nonnegative entries summing to one within `tolerance`.
  bool is_simplex(double tolerance = 1e-12) const;

  bool operator==(const WeightVector&) const = default;
};

/// Smallest and largest |query_k - candidate_k| over a candidate set.
struct DeltaBounds {
  double delta_min = 0.0;
  double delta_max = 1.0;

  bool operator==(const DeltaBounds&) const = default;
};

struct GreyParams {
  double rho = 0.5;

  /// Throws DataError(invalid_argument) unless 0 <= rho <= 1.
  void check() const;
};

/// HEOM per-feature term: 1 when either side is missing, 0/1 overlap for categories,
/// |a - b| / range for continuous values (clamped to 1).
double feature_distance(const Cell& a, const Cell& b, const FeatureKind& kind, const std::optional<Range>& range);

/// sqrt(sum_j lambda_j d_j^2); an empty weight span means lambda_j = 1.
double heom(std::span<const Cell> a, std::span<const Cell> b, const Schema& schema, const RangeTable& ranges,
            std::span<const double> weights = {});

/// Bounds over continuous features where both the query and the candidate are observed.
/// Returns the (0, 1) sentinel when no such pair exists.
DeltaBounds delta_bounds(std::span<const Cell> query, const Dataset& pool, std::span<const std::size_t> candidates);
DeltaBounds delta_bounds(std::size_t query, std::span<const std::size_t> candidates, const Dataset& dataset);

/// Grey relational coefficient of one feature.
double grc(const Cell& a, const Cell& b, const FeatureKind& kind, const DeltaBounds& bounds, const GreyParams& params);

/// Grey relational grade: sum_j lambda_j GRC_j. An empty weight span means lambda_j = 1/p.
double grg(std::span<const Cell> a, std::span<const Cell> b, const Schema& schema, const DeltaBounds& bounds,
           const GreyParams& params, std::span<const double> weights = {});

inline double grey_distance(double grade) noexcept { return 1.0 - grade; }

}  // namespace greyknn
