#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greyknn/dataset.h"

namespace greyknn {

struct ColumnDecl {
  std::string name;
  bool categorical = false;
  /// Explicit level list; empty means levels are collected in first-appearance order.
  std::vector<std::string> levels;
};

/// Declarative description of a CSV file, stored as line-oriented `key = value` text:
///
///     # comment
///     missing = NA, "", ?
///     column = sepal_length : continuous
///     column = colour : categorical : red, green, blue
///     class = species
///     class_levels = setosa, versicolor, virginica
///
/// List items are comma separated and trimmed; `""` denotes the empty string.
struct SchemaConfig {
  std::vector<ColumnDecl> columns;
  std::optional<std::string> class_column;
  std::vector<std::string> class_levels;
  std::vector<std::string> missing_tokens = default_missing_tokens();

  static std::vector<std::string> default_missing_tokens() { return {"NA", "", "?"}; }
};

SchemaConfig parse_schema_config(std::string_view text);
std::string format_schema_config(const SchemaConfig& config);

/// Config that reproduces `schema` exactly, level order included.
SchemaConfig schema_config_from(const Schema& schema,
                                std::vector<std::string> missing_tokens = SchemaConfig::default_missing_tokens());

/// Columns whose observed fields all parse as finite reals are continuous, the rest categorical.
/// Without an explicit class column the last header column is used.
SchemaConfig infer_schema_config(std::string_view csv, std::optional<std::string> class_column = std::nullopt,
                                 std::vector<std::string> missing_tokens = SchemaConfig::default_missing_tokens());

Dataset read_csv(std::string_view csv, const SchemaConfig& config);

/// Missing cells are written as the first token of `missing_tokens`. Labels, when present,
/// go in a trailing column named after the schema's class column.
std::string write_csv(const Dataset& dataset,
                      const std::vector<std::string>& missing_tokens = SchemaConfig::default_missing_tokens());

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace greyknn
