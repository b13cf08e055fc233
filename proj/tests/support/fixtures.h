#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "greyknn/dataset.h"
#include "greyknn/rng.h"

namespace fixtures {

using greyknn::Cell;
using greyknn::Dataset;
using greyknn::Feature;
using greyknn::FeatureKind;
using greyknn::Schema;

inline Schema numeric_schema(std::size_t p, std::size_t classes = 2) {
  Schema s;
  for (std::size_t j = 0; j < p; ++j) s.features.push_back({"x" + std::to_string(j + 1), FeatureKind::continuous()});
  if (classes > 0) {
    s.class_column = "class";
    for (std::size_t c = 0; c < classes; ++c) s.class_levels.push_back("c" + std::to_string(c));
  }
  return s;
}

/// Rows of optional numbers; nullopt becomes a missing cell.
inline Dataset numeric(const std::vector<std::vector<std::optional<double>>>& rows,
                       std::optional<greyknn::Labels> labels = std::nullopt, std::size_t classes = 2) {
  const std::size_t p = rows.empty() ? 0 : rows.front().size();
  std::vector<Cell> cells;
  for (const auto& r : rows) {
    for (const auto& v : r) cells.push_back(v ? Cell::number(*v) : Cell::missing());
  }
  return Dataset(numeric_schema(p, labels ? classes : 0), rows.size(), std::move(cells), std::move(labels));
}

/// Random labelled mixed dataset: each column is categorical with probability one half.
inline Dataset random_mixed(greyknn::CounterRng& rng, std::size_t n, std::size_t p, double missing_rate,
                            std::size_t classes = 2) {
  Schema s;
  for (std::size_t j = 0; j < p; ++j) {
    if (rng.uniform() < 0.5) {
      const std::size_t levels = 2 + rng.below(3);
      std::vector<std::string> names;
      for (std::size_t l = 0; l < levels; ++l) names.push_back("v" + std::to_string(l));
      s.features.push_back({"f" + std::to_string(j), FeatureKind::categorical(names)});
    } else {
      s.features.push_back({"f" + std::to_string(j), FeatureKind::continuous()});
    }
  }
  s.class_column = "y";
  for (std::size_t c = 0; c < classes; ++c) s.class_levels.push_back("y" + std::to_string(c));

  Dataset d(s, n);
  greyknn::Labels labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i < classes ? i : static_cast<std::size_t>(rng.below(classes));
    for (std::size_t j = 0; j < p; ++j) {
      const auto& kind = s.features[j].kind;
      // Rounded values make exact distance ties common.
      const Cell v = kind.is_categorical() ? Cell::category(rng.below(kind.level_count()))
                                           : Cell::number(static_cast<double>(rng.below(8)) * 0.25 - 1.0);
      d.set(i, j, v);
    }
  }
  d.set_labels(labels);
  // First two rows stay complete so every column keeps an observed value.
  for (std::size_t i = 2; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (rng.uniform() < missing_rate) d.set(i, j, Cell::missing());
    }
  }
  return d;
}

}  // namespace fixtures
