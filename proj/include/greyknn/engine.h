#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greyknn/dataset.h"
#include "greyknn/distance.h"
#include "greyknn/relevance.h"

namespace greyknn {

enum class Method { mean_mode, iknn, miknn, gknn, fwgknn, cgknn };

std::string_view method_name(Method method);
/// Case-insensitive; accepts "meanmode", "mean-mode", "iknn", "miknn", "mi-knn", "gknn", "fwgknn", "cgknn".
std::optional<Method> parse_method(std::string_view text);
const std::vector<Method>& all_methods();

struct ImputeConfig {
  Method method = Method::cgknn;
  std::optional<std::size_t> k;  ///< absent: chosen by cross-validation over k_grid
  std::vector<std::size_t> k_grid{1, 3, 5, 7, 9, 11, 13, 15};
  GreyParams grey;
  double epsilon = 1e-4;
  std::size_t max_iter = 50;
  std::uint64_t seed = 0;
  std::size_t cv_folds = 10;
  ParzenSettings parzen;

  /// Numeric estimate (1/(k W)) sum w v instead of the normalised weighted mean.
  bool eq11_literal = false;
  /// Replace the method's relevance weights with 1/p each.
  bool force_uniform_weights = false;
  /// GKNN only: use inverse-square grey distance weights instead of the plain mean/mode.
  bool weighted_grey_estimator = false;
  /// Compare the query row through its current filled values instead of leaving its own missing cells missing.
  bool query_uses_fill = false;

  std::size_t threads = 1;

  void check() const;
};

enum class DistanceKind { heom, grey };

/// A method's distance: weighted (or unweighted) HEOM, or one minus the grey relational grade.
struct Metric {
  DistanceKind kind = DistanceKind::heom;
  std::vector<double> weights;  ///< empty: HEOM weight 1, grey weight 1/p
  RangeTable ranges;            ///< ranges of the normalised data, used by HEOM
  GreyParams grey;

  /// Distance from `query` to each candidate row of `pool`. Grey bounds are taken over the candidate set.
  std::vector<double> distances(std::span<const Cell> query, const Dataset& pool,
                                std::span<const std::size_t> candidates) const;
};

struct Neighbor {
  std::size_t row = 0;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Ascending by distance, ties by ascending row index.
using NeighborSet = std::vector<Neighbor>;

/// Rows of `candidates` receiving the k smallest `distances` (aligned with candidates).
NeighborSet select_nearest(std::span<const std::size_t> candidates, std::span<const double> distances, std::size_t k);

/// Throws DataError(insufficient_candidates) when fewer than k candidates are supplied.
NeighborSet nearest_neighbors(std::span<const Cell> query, const Dataset& pool,
                              std::span<const std::size_t> candidates, const Metric& metric, std::size_t k);

enum class Estimator { weighted, plain };

/// Inverse-square distance weighted mean (or plain mean). Zero-distance neighbours take over when present.
double impute_numeric_cell(const NeighborSet& neighbors, std::span<const double> values,
                           Estimator estimator = Estimator::weighted, bool eq11_literal = false);

/// Weighted vote with alpha_l = (d_k - d_l) / (d_k - d_1), or a plain majority vote.
/// Ties go to the nearest neighbour's category among the tied ones, then to the lowest level index.
std::size_t impute_categorical_cell(const NeighborSet& neighbors, std::span<const std::size_t> values,
                                    std::size_t level_count, Estimator estimator = Estimator::weighted);

/// Missing continuous cells take the observed mean, categorical cells the mode (lowest level on ties).
/// With per_class set, statistics come from the row's class, falling back to the whole column.
Dataset initial_impute(const Dataset& dataset, bool per_class);

struct MethodTraits {
  bool iterative = true;
  DistanceKind distance = DistanceKind::heom;
  bool per_class = false;
  enum class Weights { none, class_relevance, feature_relevance } weights = Weights::none;
  Estimator estimator = Estimator::weighted;
  bool needs_labels = true;
};

MethodTraits method_traits(const ImputeConfig& config);

struct KSelection {
  std::size_t k = 1;
  std::vector<std::size_t> grid;  ///< grid values actually evaluated
  std::vector<double> errors;     ///< mean misclassification per grid value
  std::size_t folds = 0;
};

/// Stratified cross-validation of a k-nearest-neighbour classifier on a complete labelled matrix.
KSelection select_k(const Dataset& complete, const Metric& metric, std::span<const std::size_t> grid,
                    std::size_t folds, std::uint64_t seed);

/// Everything fixed before the iterations start.
struct PreparedRun {
  MethodTraits traits;
  Dataset input;         ///< original scale, as given
  RangeTable ranges;     ///< original-scale ranges used for normalisation
  Dataset normalized;    ///< input on the normalised scale, still with missing cells
  Dataset initial;       ///< normalised first fill
  Metric metric;
  std::optional<WeightVector> weights;
  std::optional<KSelection> selection;
  std::size_t k = 0;
  std::vector<std::size_t> incomplete_rows;
  std::vector<std::vector<std::size_t>> pools;  ///< candidate rows per incomplete row
  std::size_t pool_fallbacks = 0;               ///< incomplete rows that had to use every row
};

PreparedRun prepare_run(const Dataset& dataset, const ImputeConfig& config);

struct Step {
  Dataset next;
  double max_change = 0.0;
  std::vector<NeighborSet> neighbors;  ///< aligned with PreparedRun::incomplete_rows
};

/// One update of every missing cell from `current` (Jacobi: all reads come from `current`).
Step iterate_once(const PreparedRun& run, const Dataset& current, const ImputeConfig& config);

struct ImputationResult {
  Method method = Method::cgknn;
  Dataset completed;
  std::vector<double> trace;
  std::size_t iterations = 0;
  std::size_t chosen_k = 0;
  std::optional<WeightVector> weights_used;
  bool converged = true;
  std::size_t pool_fallbacks = 0;
  RangeTable ranges;
  Metric metric;
};

ImputationResult run_impute(const Dataset& dataset, const ImputeConfig& config);

/// Single pass over the test rows against the completed training matrix, all training rows as candidates.
Dataset impute_test(const ImputationResult& train, const Dataset& training, const Dataset& test,
                    const ImputeConfig& config);

}  // namespace greyknn
