#include <sstream>

#include "greyknn/error.h"
#include "greyknn/io.h"

namespace greyknn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    const std::string_view item = trim(s.substr(start, at == std::string_view::npos ? s.npos : at - start));
    items.emplace_back(item == "\"\"" ? std::string_view() : item);
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return items;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i].empty() ? std::string("\"\"") : items[i];
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError(ErrorKind::schema_error, "schema line " + std::to_string(line) + ": " + what);
}

}  // namespace

SchemaConfig parse_schema_config(std::string_view text) {
  SchemaConfig config;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view content = trim(raw);
    if (content.empty() || content.front() == '#') continue;
    const std::size_t eq = content.find('=');
    if (eq == std::string_view::npos) fail(line, "expected 'key = value'");
    const std::string key(trim(content.substr(0, eq)));
    const std::string_view value = trim(content.substr(eq + 1));

    if (key == "column") {
      auto parts = split_list(value, ':');
      if (parts.size() < 2 || parts.size() > 3 || parts[0].empty()) {
        fail(line, "expected 'column = name : kind [: levels]'");
      }
      ColumnDecl decl{parts[0], false, {}};
      if (parts[1] == "categorical") {
        decl.categorical = true;
        if (parts.size() == 3) decl.levels = split_list(parts[2]);
      } else if (parts[1] == "continuous") {
        if (parts.size() == 3) fail(line, "continuous column cannot declare levels");
      } else {
        fail(line, "unknown column kind '" + parts[1] + "'");
      }
      config.columns.push_back(std::move(decl));
    } else if (key == "class") {
      if (value.empty()) fail(line, "class column name is empty");
      config.class_column = std::string(value);
    } else if (key == "class_levels") {
      config.class_levels = split_list(value);
    } else if (key == "missing") {
      config.missing_tokens = split_list(value);
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  if (config.columns.empty()) throw DataError(ErrorKind::schema_error, "schema declares no columns");
  return config;
}

std::string format_schema_config(const SchemaConfig& config) {
  std::string out;
  out += "missing = " + join_list(config.missing_tokens) + "\n";
  for (const auto& c : config.columns) {
    out += "column = " + c.name + " : " + (c.categorical ? "categorical" : "continuous");
    if (!c.levels.empty()) out += " : " + join_list(c.levels);
    out += "\n";
  }
  if (config.class_column) out += "class = " + *config.class_column + "\n";
  if (!config.class_levels.empty()) out += "class_levels = " + join_list(config.class_levels) + "\n";
  return out;
}

SchemaConfig schema_config_from(const Schema& schema, std::vector<std::string> missing_tokens) {
  SchemaConfig config;
  config.missing_tokens = std::move(missing_tokens);
  for (const auto& f : schema.features) {
    config.columns.push_back({f.name, f.kind.is_categorical(), f.kind.levels()});
  }
  config.class_column = schema.class_column;
  config.class_levels = schema.class_levels;
  return config;
}

}  // namespace greyknn
