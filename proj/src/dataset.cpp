#include "greyknn/dataset.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "greyknn/error.h"

namespace greyknn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::unknown_level: return "UnknownLevel";
    case ErrorKind::ragged_row: return "RaggedRow";
    case ErrorKind::schema_error: return "SchemaError";
    case ErrorKind::schema_mismatch: return "SchemaMismatch";
    case ErrorKind::empty_class: return "EmptyClass";
    case ErrorKind::empty_input: return "EmptyInput";
    case ErrorKind::too_few_rows: return "TooFewRows";
    case ErrorKind::insufficient_candidates: return "InsufficientCandidates";
    case ErrorKind::empty_mask: return "EmptyMask";
    case ErrorKind::degenerate_class: return "DegenerateClass";
    case ErrorKind::length_mismatch: return "LengthMismatch";
    case ErrorKind::predictor_missing: return "PredictorMissing";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

FeatureKind FeatureKind::continuous() { return FeatureKind(false, {}); }

FeatureKind FeatureKind::categorical(std::vector<std::string> levels) {
  if (levels.empty()) throw DataError(ErrorKind::schema_error, "categorical feature needs at least one level");
  std::set<std::string> seen;
  for (const auto& level : levels) {
    if (!seen.insert(level).second) {
      throw DataError(ErrorKind::schema_error, "duplicate categorical level '" + level + "'");
    }
  }
  return FeatureKind(true, std::move(levels));
}

std::optional<std::size_t> FeatureKind::level_index(std::string_view level) const {
  auto it = std::find(levels_.begin(), levels_.end(), level);
  if (it == levels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - levels_.begin());
}

std::optional<std::size_t> Schema::feature_index(std::string_view name) const {
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (features[j].name == name) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> Schema::class_index(std::string_view level) const {
  auto it = std::find(class_levels.begin(), class_levels.end(), level);
  if (it == class_levels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - class_levels.begin());
}

void Schema::check() const {
  std::set<std::string> names;
  for (const auto& f : features) {
    if (!names.insert(f.name).second) {
      throw DataError(ErrorKind::schema_error, "duplicate feature name '" + f.name + "'");
    }
  }
  if (class_column && names.count(*class_column)) {
    throw DataError(ErrorKind::schema_error, "class column '" + *class_column + "' is also a feature");
  }
  std::set<std::string> levels(class_levels.begin(), class_levels.end());
  if (levels.size() != class_levels.size()) {
    throw DataError(ErrorKind::schema_error, "duplicate class level");
  }
}

Dataset::Dataset(Schema schema, std::size_t rows)
    : schema_(std::move(schema)),
      rows_(rows),
      cells_(rows * schema_.feature_count()),
      mask_(rows * schema_.feature_count(), 0) {}

Dataset::Dataset(Schema schema, std::size_t rows, std::vector<Cell> cells, std::optional<Labels> labels)
    : schema_(std::move(schema)), rows_(rows), cells_(std::move(cells)), labels_(std::move(labels)) {
  if (cells_.size() != rows_ * schema_.feature_count()) {
    throw DataError(ErrorKind::length_mismatch, "cell count does not match rows x features");
  }
  if (labels_ && labels_->size() != rows_) {
    throw DataError(ErrorKind::length_mismatch, "label count does not match row count");
  }
  mask_.resize(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) mask_[i] = cells_[i].is_missing() ? 0 : 1;
}

void Dataset::set(std::size_t row, std::size_t col, Cell value) {
  const std::size_t at = row * cols() + col;
  cells_[at] = value;
  mask_[at] = value.is_missing() ? 0 : 1;
}

void Dataset::set_mask_bit(std::size_t row, std::size_t col, bool observed) {
  mask_[row * cols() + col] = observed ? 1 : 0;
}

const Labels& Dataset::labels() const {
  if (!labels_) throw DataError(ErrorKind::invalid_argument, "dataset has no class labels");
  return *labels_;
}

std::size_t Dataset::missing_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
  Dataset out(schema_, indices.size());
  const std::size_t p = cols();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t src = indices[r];
    std::copy_n(cells_.begin() + static_cast<std::ptrdiff_t>(src * p), p,
                out.cells_.begin() + static_cast<std::ptrdiff_t>(r * p));
    std::copy_n(mask_.begin() + static_cast<std::ptrdiff_t>(src * p), p,
                out.mask_.begin() + static_cast<std::ptrdiff_t>(r * p));
  }
  if (labels_) {
    Labels picked;
    picked.reserve(indices.size());
    for (auto src : indices) picked.push_back((*labels_)[src]);
    out.labels_ = std::move(picked);
  }
  return out;
}

ValidationReport validate(const Dataset& dataset) {
  ValidationReport report;
  const auto& features = dataset.schema().features;
  const std::size_t n = dataset.rows();
  const std::size_t p = dataset.cols();
  std::vector<std::size_t> missing(p, 0);
  auto flag = [&](Violation::Kind kind, std::size_t i, std::size_t j, std::string msg) {
    report.violations.push_back({kind, i, j, std::move(msg)});
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const Cell& c = dataset.cell(i, j);
      const bool bit = dataset.observed(i, j);
      const std::string where = "row " + std::to_string(i) + ", column '" + features[j].name + "'";
      if (c.is_missing()) ++missing[j];
      if (c.is_missing() == bit) {
        flag(Violation::Kind::mask_mismatch, i, j, "mask bit disagrees with cell at " + where);
      }
      if (c.is_missing()) continue;
      if (features[j].kind.is_categorical()) {
        if (!c.is_category()) {
          flag(Violation::Kind::kind_mismatch, i, j, "numeric value in categorical " + where);
        } else if (c.category() >= features[j].kind.level_count()) {
          flag(Violation::Kind::category_out_of_range, i, j, "level index out of range at " + where);
        }
      } else {
        if (!c.is_number()) {
          flag(Violation::Kind::kind_mismatch, i, j, "category in continuous " + where);
        } else if (!std::isfinite(c.number())) {
          flag(Violation::Kind::non_finite, i, j, "non-finite value at " + where);
        }
      }
    }
    if (dataset.has_labels() && dataset.label(i) >= dataset.class_count()) {
      flag(Violation::Kind::label_out_of_range, i, p, "class label out of range at row " + std::to_string(i));
    }
  }
  report.missing_rates.resize(p, 0.0);
  if (n > 0) {
    for (std::size_t j = 0; j < p; ++j) {
      report.missing_rates[j] = static_cast<double>(missing[j]) / static_cast<double>(n);
    }
  }
  return report;
}

RangeTable compute_ranges(const Dataset& dataset) {
  RangeTable ranges(dataset.cols());
  for (std::size_t j = 0; j < dataset.cols(); ++j) {
    if (!dataset.schema().features[j].kind.is_continuous()) continue;
    for (std::size_t i = 0; i < dataset.rows(); ++i) {
      const Cell& c = dataset.cell(i, j);
      if (!c.is_number()) continue;
      if (!ranges[j]) {
        ranges[j] = Range{c.number(), c.number()};
      } else {
        ranges[j]->min = std::min(ranges[j]->min, c.number());
        ranges[j]->max = std::max(ranges[j]->max, c.number());
      }
    }
  }
  return ranges;
}

double normalize_value(double x, const Range& range) noexcept {
  if (!(range.max > range.min)) return 0.0;
  return (range.max - x) / (range.max - range.min);
}

double denormalize_value(double x, const Range& range) noexcept {
  if (!(range.max > range.min)) return range.max;
  return range.max - x * (range.max - range.min);
}

namespace {

template <typename F>
Dataset map_continuous(const Dataset& dataset, const RangeTable& ranges, F&& f) {
  if (ranges.size() != dataset.cols()) {
    throw DataError(ErrorKind::length_mismatch, "range table width does not match dataset");
  }
  Dataset out = dataset;
  for (std::size_t j = 0; j < dataset.cols(); ++j) {
    if (!ranges[j]) continue;
    for (std::size_t i = 0; i < dataset.rows(); ++i) {
      const Cell& c = dataset.cell(i, j);
      if (c.is_number()) out.set(i, j, Cell::number(f(c.number(), *ranges[j])));
    }
  }
  return out;
}

}  // namespace

Dataset apply_normalization(const Dataset& dataset, const RangeTable& ranges) {
  return map_continuous(dataset, ranges, normalize_value);
}

std::pair<Dataset, RangeTable> normalize(const Dataset& dataset) {
  RangeTable ranges = compute_ranges(dataset);
  for (std::size_t j = 0; j < dataset.cols(); ++j) {
    if (dataset.schema().features[j].kind.is_continuous() && !ranges[j] && dataset.rows() > 0) {
      throw DataError(ErrorKind::empty_input,
                      "continuous column '" + dataset.schema().features[j].name + "' has no observed values");
    }
  }
  Dataset out = apply_normalization(dataset, ranges);
  return {std::move(out), std::move(ranges)};
}

Dataset denormalize(const Dataset& dataset, const RangeTable& ranges) {
  return map_continuous(dataset, ranges, denormalize_value);
}

std::vector<std::vector<std::size_t>> partition_rows_by_class(const Dataset& dataset) {
  const Labels& labels = dataset.labels();
  std::vector<std::vector<std::size_t>> parts(dataset.class_count());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= parts.size()) {
      throw DataError(ErrorKind::invalid_argument, "class label out of range at row " + std::to_string(i));
    }
    parts[labels[i]].push_back(i);
  }
  return parts;
}

std::vector<Dataset> split_by_class(const Dataset& dataset) {
  auto parts = partition_rows_by_class(dataset);
  std::vector<Dataset> out;
  out.reserve(parts.size());
  for (std::size_t y = 0; y < parts.size(); ++y) {
    if (parts[y].empty()) {
      throw DataError(ErrorKind::empty_class, "class '" + dataset.schema().class_levels[y] + "' has no rows");
    }
    out.push_back(dataset.select_rows(parts[y]));
  }
  return out;
}

Dataset concat_rows(std::span<const Dataset> parts) {
  if (parts.empty()) return {};
  const Schema& schema = parts.front().schema();
  std::size_t total = 0;
  bool labelled = true;
  for (const auto& part : parts) {
    if (!(part.schema() == schema)) throw DataError(ErrorKind::schema_mismatch, "cannot stack different schemas");
    total += part.rows();
    labelled = labelled && part.has_labels();
  }
  std::vector<Cell> cells;
  cells.reserve(total * schema.feature_count());
  Labels labels;
  for (const auto& part : parts) {
    cells.insert(cells.end(), part.cells().begin(), part.cells().end());
    if (labelled) labels.insert(labels.end(), part.labels().begin(), part.labels().end());
  }
  return Dataset(schema, total, std::move(cells), labelled ? std::optional<Labels>(std::move(labels)) : std::nullopt);
}

}  // namespace greyknn
