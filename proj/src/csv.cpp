#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "greyknn/error.h"
#include "greyknn/io.h"

namespace greyknn {

namespace {

struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180 tokenizer: quoted fields may contain separators, doubled quotes and newlines.
std::vector<Record> tokenize(std::string_view text) {
  std::vector<Record> records;
  Record current;
  std::string field;
  std::size_t line = 1;
  current.line = line;
  bool in_quotes = false;
  bool field_started = false;
  bool any = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(current));
    current = Record{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || !field.empty()) {
          throw DataError(ErrorKind::parse_error, "line " + std::to_string(line) + ": stray quote inside field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        current.line = line;
        any = false;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError(ErrorKind::parse_error, "unterminated quoted field");
  if (any) end_record();
  return records;
}

bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view s) {
  if (!needs_quotes(s)) {
    out.append(s);
    return;
  }
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

bool is_missing_token(const std::string& field, const std::vector<std::string>& tokens) {
  return std::find(tokens.begin(), tokens.end(), field) != tokens.end();
}

std::string locate(std::size_t line, const std::string& column) {
  return "line " + std::to_string(line) + ", column '" + column + "'";
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

Dataset read_csv(std::string_view csv, const SchemaConfig& config) {
  auto records = tokenize(csv);
  if (records.empty()) throw DataError(ErrorKind::parse_error, "missing header row");
  const auto& header = records.front().fields;

  std::map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!position.emplace(header[c], c).second) {
      throw DataError(ErrorKind::parse_error, "duplicate header column '" + header[c] + "'");
    }
  }
  auto column_of = [&](const std::string& name) {
    auto it = position.find(name);
    if (it == position.end()) throw DataError(ErrorKind::schema_error, "column '" + name + "' not in CSV header");
    return it->second;
  };

  const std::size_t p = config.columns.size();
  std::vector<std::size_t> source(p);
  for (std::size_t j = 0; j < p; ++j) source[j] = column_of(config.columns[j].name);
  std::optional<std::size_t> class_source;
  if (config.class_column) class_source = column_of(*config.class_column);

  // Collected levels per categorical column (explicit lists are fixed).
  std::vector<std::vector<std::string>> levels(p);
  for (std::size_t j = 0; j < p; ++j) levels[j] = config.columns[j].levels;
  std::vector<std::string> class_levels = config.class_levels;

  const std::size_t n = records.size() - 1;
  std::vector<Cell> cells(n * p);
  Labels labels;
  if (class_source) labels.reserve(n);

  auto level_of = [](std::vector<std::string>& known, const std::string& value, bool fixed) -> std::optional<std::size_t> {
    auto it = std::find(known.begin(), known.end(), value);
    if (it != known.end()) return static_cast<std::size_t>(it - known.begin());
    if (fixed) return std::nullopt;
    known.push_back(value);
    return known.size() - 1;
  };

  for (std::size_t r = 0; r < n; ++r) {
    const Record& rec = records[r + 1];
    if (rec.fields.size() != header.size()) {
      throw DataError(ErrorKind::ragged_row, "line " + std::to_string(rec.line) + ": expected " +
                                                 std::to_string(header.size()) + " fields, found " +
                                                 std::to_string(rec.fields.size()));
    }
    for (std::size_t j = 0; j < p; ++j) {
      const auto& decl = config.columns[j];
      const std::string& field = rec.fields[source[j]];
      if (is_missing_token(field, config.missing_tokens)) continue;
      if (decl.categorical) {
        auto idx = level_of(levels[j], field, !decl.levels.empty());
        if (!idx) {
          throw DataError(ErrorKind::unknown_level,
                          locate(rec.line, decl.name) + ": level '" + field + "' not in declared list");
        }
        cells[r * p + j] = Cell::category(*idx);
      } else {
        auto value = parse_real(field);
        if (!value) {
          throw DataError(ErrorKind::parse_error, locate(rec.line, decl.name) + ": '" + field + "' is not a finite number");
        }
        cells[r * p + j] = Cell::number(*value);
      }
    }
    if (class_source) {
      const std::string& field = rec.fields[*class_source];
      if (is_missing_token(field, config.missing_tokens)) {
        throw DataError(ErrorKind::parse_error, locate(rec.line, *config.class_column) + ": class label is missing");
      }
      auto idx = level_of(class_levels, field, !config.class_levels.empty());
      if (!idx) {
        throw DataError(ErrorKind::unknown_level,
                        locate(rec.line, *config.class_column) + ": class '" + field + "' not in declared list");
      }
      labels.push_back(*idx);
    }
  }

  Schema schema;
  for (std::size_t j = 0; j < p; ++j) {
    const auto& decl = config.columns[j];
    if (decl.categorical) {
      if (levels[j].empty()) {
        throw DataError(ErrorKind::schema_error, "categorical column '" + decl.name + "' has no observed levels");
      }
      schema.features.push_back({decl.name, FeatureKind::categorical(levels[j])});
    } else {
      schema.features.push_back({decl.name, FeatureKind::continuous()});
    }
  }
  schema.class_column = config.class_column;
  schema.class_levels = std::move(class_levels);
  schema.check();
  return Dataset(std::move(schema), n, std::move(cells),
                 class_source ? std::optional<Labels>(std::move(labels)) : std::nullopt);
}

std::string write_csv(const Dataset& dataset, const std::vector<std::string>& missing_tokens) {
  const std::string missing = missing_tokens.empty() ? std::string() : missing_tokens.front();
  const auto& schema = dataset.schema();
  const bool with_labels = dataset.has_labels();
  std::string out;
  for (std::size_t j = 0; j < schema.features.size(); ++j) {
    if (j) out.push_back(',');
    append_field(out, schema.features[j].name);
  }
  if (with_labels) {
    if (!schema.features.empty()) out.push_back(',');
    append_field(out, schema.class_column.value_or("class"));
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    for (std::size_t j = 0; j < schema.features.size(); ++j) {
      if (j) out.push_back(',');
      const Cell& c = dataset.cell(i, j);
      if (c.is_missing()) {
        append_field(out, missing);
      } else if (c.is_category()) {
        append_field(out, schema.features[j].kind.levels().at(c.category()));
      } else {
        out += format_double(c.number());
      }
    }
    if (with_labels) {
      if (!schema.features.empty()) out.push_back(',');
      append_field(out, schema.class_levels.at(dataset.label(i)));
    }
    out.push_back('\n');
  }
  return out;
}

SchemaConfig infer_schema_config(std::string_view csv, std::optional<std::string> class_column,
                                 std::vector<std::string> missing_tokens) {
  auto records = tokenize(csv);
  if (records.empty()) throw DataError(ErrorKind::parse_error, "missing header row");
  const auto& header = records.front().fields;
  if (header.empty()) throw DataError(ErrorKind::parse_error, "empty header row");
  SchemaConfig config;
  config.missing_tokens = std::move(missing_tokens);
  config.class_column = class_column ? *class_column : header.back();
  if (std::find(header.begin(), header.end(), *config.class_column) == header.end()) {
    throw DataError(ErrorKind::schema_error, "class column '" + *config.class_column + "' not in CSV header");
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == *config.class_column) continue;
    bool numeric = true;
    for (std::size_t r = 1; r < records.size() && numeric; ++r) {
      const auto& rec = records[r];
      if (rec.fields.size() != header.size()) {
        throw DataError(ErrorKind::ragged_row, "line " + std::to_string(rec.line) + ": wrong field count");
      }
      const std::string& field = rec.fields[c];
      if (is_missing_token(field, config.missing_tokens)) continue;
      numeric = parse_real(field).has_value();
    }
    config.columns.push_back({header[c], !numeric, {}});
  }
  return config;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(ErrorKind::invalid_argument, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(ErrorKind::invalid_argument, "cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError(ErrorKind::invalid_argument, "failed writing '" + path + "'");
}

}  // namespace greyknn
