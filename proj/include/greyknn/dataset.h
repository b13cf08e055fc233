#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace greyknn {

/// Either continuous or categorical with an ordered, duplicate-free level list.
class FeatureKind {
 public:
  static FeatureKind continuous();
  static FeatureKind categorical(std::vector<std::string> levels);

  bool is_categorical() const noexcept { return categorical_; }
  bool is_continuous() const noexcept { return !categorical_; }
  const std::vector<std::string>& levels() const noexcept { return levels_; }
  std::size_t level_count() const noexcept { return levels_.size(); }
  std::optional<std::size_t> level_index(std::string_view level) const;

  bool operator==(const FeatureKind&) const = default;

 private:
  FeatureKind(bool categorical, std::vector<std::string> levels)
      : categorical_(categorical), levels_(std::move(levels)) {}

  bool categorical_;
  std::vector<std::string> levels_;
};

struct Feature {
  std::string name;
  FeatureKind kind;

  bool operator==(const Feature&) const = default;
};

struct Schema {
  std::vector<Feature> features;
  std::optional<std::string> class_column;
  std::vector<std::string> class_levels;

  std::size_t feature_count() const noexcept { return features.size(); }
  std::optional<std::size_t> feature_index(std::string_view name) const;
  std::optional<std::size_t> class_index(std::string_view level) const;

  /// Throws DataError(schema_error) when names collide or the class column is also a feature.
  void check() const;

  bool operator==(const Schema&) const = default;
};

/// Tagged cell value: a categorical level index, a finite number, or missing.
class Cell {
 public:
  constexpr Cell() noexcept = default;

  static constexpr Cell missing() noexcept { return Cell(); }
  static constexpr Cell category(std::size_t index) noexcept {
    return Cell(Tag::category, static_cast<double>(index));
  }
  static constexpr Cell number(double value) noexcept { return Cell(Tag::number, value); }

  constexpr bool is_missing() const noexcept { return tag_ == Tag::missing; }
  constexpr bool is_category() const noexcept { return tag_ == Tag::category; }
  constexpr bool is_number() const noexcept { return tag_ == Tag::number; }

  std::size_t category() const noexcept { return static_cast<std::size_t>(value_); }
  constexpr double number() const noexcept { return value_; }

  /// Level index for categories, the value for numbers; meaningless for missing cells.
  constexpr double scalar() const noexcept { return value_; }

  constexpr bool operator==(const Cell& other) const noexcept {
    return tag_ == other.tag_ && (tag_ == Tag::missing || value_ == other.value_);
  }

 private:
  enum class Tag : std::uint8_t { missing, category, number };

  constexpr Cell(Tag tag, double value) noexcept : tag_(tag), value_(value) {}

  Tag tag_ = Tag::missing;
  double value_ = 0.0;
};

/// Observed range of one continuous column.
struct Range {
  double min = 0.0;
  double max = 0.0;

  /// Denominator for range normalisation; a constant column uses 1.
  double span() const noexcept { return max > min ? max - min : 1.0; }

  bool operator==(const Range&) const = default;
};

/// One entry per column; empty for categorical columns and columns with nothing observed.
using RangeTable = std::vector<std::optional<Range>>;

using Labels = std::vector<std::size_t>;

/// n x p matrix of cells with the missingness mask D and optional class labels Y.
class Dataset {
 public:
  Dataset() = default;
  /// All cells start missing.
  Dataset(Schema schema, std::size_t rows);
  /// Mask is derived from the cells.
  Dataset(Schema schema, std::size_t rows, std::vector<Cell> cells,
          std::optional<Labels> labels = std::nullopt);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return schema_.feature_count(); }

  const Cell& cell(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }
  std::span<const Cell> row(std::size_t row) const {
    return {cells_.data() + row * cols(), cols()};
  }
  std::span<const Cell> cells() const noexcept { return cells_; }

  /// Sets the cell and keeps the mask consistent.
  void set(std::size_t row, std::size_t col, Cell value);
  /// Writes the mask bit alone; only validate() notices any inconsistency this creates.
  void set_mask_bit(std::size_t row, std::size_t col, bool observed);
  bool observed(std::size_t row, std::size_t col) const { return mask_[row * cols() + col] != 0; }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const Labels& labels() const;
  std::size_t label(std::size_t row) const { return labels().at(row); }
  void set_labels(std::optional<Labels> labels) { labels_ = std::move(labels); }
  std::size_t class_count() const noexcept { return schema_.class_levels.size(); }

  std::size_t missing_count() const noexcept;
  bool complete() const noexcept { return missing_count() == 0; }

  Dataset select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  Schema schema_;
  std::size_t rows_ = 0;
  std::vector<Cell> cells_;
  std::vector<std::uint8_t> mask_;
  std::optional<Labels> labels_;
};

struct Violation {
  enum class Kind { mask_mismatch, category_out_of_range, non_finite, kind_mismatch, label_out_of_range };
  Kind kind;
  std::size_t row;
  std::size_t col;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<double> missing_rates;

  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const Dataset& dataset);

/// Min/max over observed cells of each continuous column.
RangeTable compute_ranges(const Dataset& dataset);

/// Maps observed continuous values x to (max - x) / (max - min); constant columns map to 0.
std::pair<Dataset, RangeTable> normalize(const Dataset& dataset);

/// Applies a previously computed range table to another dataset with the same schema.
Dataset apply_normalization(const Dataset& dataset, const RangeTable& ranges);

Dataset denormalize(const Dataset& dataset, const RangeTable& ranges);

double normalize_value(double x, const Range& range) noexcept;
double denormalize_value(double x, const Range& range) noexcept;

/// Row indices per declared class level, in row order. Levels without rows yield empty lists.
std::vector<std::vector<std::size_t>> partition_rows_by_class(const Dataset& dataset);

/// One dataset per class level. Throws DataError(empty_class) if a level has no rows.
std::vector<Dataset> split_by_class(const Dataset& dataset);

/// Stacks datasets with identical schemas.
Dataset concat_rows(std::span<const Dataset> parts);

}  // namespace greyknn
