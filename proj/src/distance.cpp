#include "greyknn/distance.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greyknn/error.h"

namespace greyknn {

WeightVector WeightVector::uniform(std::size_t p) {
  return WeightVector{std::vector<double>(p, p ? 1.0 / static_cast<double>(p) : 0.0)};
}

bool WeightVector::is_simplex(double tolerance) const {
  if (lambda.empty()) return false;
  double sum = 0.0;
  for (double w : lambda) {
    if (!(w >= 0.0) || !std::isfinite(w)) return false;
    sum += w;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

void GreyParams::check() const {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw DataError(ErrorKind::invalid_argument, "rho must lie in [0, 1]");
  }
}

double feature_distance(const Cell& a, const Cell& b, const FeatureKind& kind, const std::optional<Range>& range) {
  if (a.is_missing() || b.is_missing()) return 1.0;
  if (kind.is_categorical()) return a.category() == b.category() ? 0.0 : 1.0;
  const double span = range ? range->span() : 1.0;
  return std::min(1.0, std::abs(a.number() - b.number()) / span);
}

double heom(std::span<const Cell> a, std::span<const Cell> b, const Schema& schema, const RangeTable& ranges,
            std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = feature_distance(a[j], b[j], schema.features[j].kind, ranges[j]);
    sum += (weights.empty() ? 1.0 : weights[j]) * d * d;
  }
  return std::sqrt(sum);
}

DeltaBounds delta_bounds(std::span<const Cell> query, const Dataset& pool, std::span<const std::size_t> candidates) {
  const auto& features = pool.schema().features;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t c : candidates) {
    const auto other = pool.row(c);
    for (std::size_t k = 0; k < query.size(); ++k) {
      if (!features[k].kind.is_continuous() || !query[k].is_number() || !other[k].is_number()) continue;
      const double diff = std::abs(query[k].number() - other[k].number());
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
  }
  if (hi < lo) return DeltaBounds{0.0, 1.0};
  return DeltaBounds{lo, hi};
}

DeltaBounds delta_bounds(std::size_t query, std::span<const std::size_t> candidates, const Dataset& dataset) {
  return delta_bounds(dataset.row(query), dataset, candidates);
}

double grc(const Cell& a, const Cell& b, const FeatureKind& kind, const DeltaBounds& bounds, const GreyParams& params) {
  if (a.is_missing() || b.is_missing()) return 0.0;
  if (kind.is_categorical()) return a.category() == b.category() ? 1.0 : 0.0;
  if (bounds.delta_max == 0.0) return 1.0;
  const double diff = std::abs(a.number() - b.number());
  const double denom = diff + params.rho * bounds.delta_max;
  // rho = 0 with a zero difference: the pair is as close as any in the set.
  if (denom == 0.0) return 1.0;
  return std::min(1.0, (bounds.delta_min + params.rho * bounds.delta_max) / denom);
}

double grg(std::span<const Cell> a, std::span<const Cell> b, const Schema& schema, const DeltaBounds& bounds,
           const GreyParams& params, std::span<const double> weights) {
  const double uniform = a.empty() ? 0.0 : 1.0 / static_cast<double>(a.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    sum += (weights.empty() ? uniform : weights[j]) * grc(a[j], b[j], schema.features[j].kind, bounds, params);
  }
  return sum;
}

}  // namespace greyknn
