#include <doctest.h>

#include <json.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "greyknn/error.h"
#include "greyknn/io.h"
#include "greyknn/report.h"
#include "greyknn/rng.h"
#include "support/fixtures.h"

using namespace greyknn;

namespace {

SchemaConfig abc_config() {
  SchemaConfig c;
  c.columns = {{"a", false, {}}, {"b", true, {}}};
  c.class_column = "class";
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.kind();
  }
  FAIL("no DataError raised");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_CASE("read_csv parses a typed row and its label") {
  const Dataset d = read_csv("a,b,class\n1.5,red,yes\n", abc_config());
  REQUIRE(d.rows() == 1);
  REQUIRE(d.cols() == 2);
  CHECK(d.cell(0, 0) == Cell::number(1.5));
  CHECK(d.cell(0, 1) == Cell::category(0));
  CHECK(d.schema().features[1].kind.levels() == std::vector<std::string>{"red"});
  CHECK(d.schema().class_levels == std::vector<std::string>{"yes"});
  CHECK(d.label(0) == 0);
}

TEST_CASE("read_csv turns missing tokens into missing cells") {
  const Dataset d = read_csv("a,b,class\n?,red,yes\nNA,,no\n", abc_config());
  CHECK(d.cell(0, 0).is_missing());
  CHECK_FALSE(d.observed(0, 0));
  CHECK(d.cell(1, 0).is_missing());
  CHECK(d.cell(1, 1).is_missing());
  CHECK(validate(d).ok());
}

TEST_CASE("missing tokens match exactly before numeric parsing") {
  SchemaConfig c = abc_config();
  c.missing_tokens = {"-1"};
  const Dataset d = read_csv("a,b,class\n-1,red,yes\n-1.0,?,no\n", c);
  CHECK(d.cell(0, 0).is_missing());
  CHECK(d.cell(1, 0) == Cell::number(-1.0));
  CHECK(d.cell(1, 1) == Cell::category(1));
}

TEST_CASE("read_csv errors are typed") {
  CHECK(kind_of([] { read_csv("a,b,class\n1,red\n", abc_config()); }) == ErrorKind::ragged_row);
  CHECK(kind_of([] { read_csv("a,b,class\nabc,red,yes\n", abc_config()); }) == ErrorKind::parse_error);
  SchemaConfig c = abc_config();
  c.columns[1].levels = {"red", "blue"};
  CHECK(kind_of([&] { read_csv("a,b,class\n1,green,yes\n", c); }) == ErrorKind::unknown_level);
  CHECK(kind_of([] { read_csv("x,b,class\n1,red,yes\n", abc_config()); }) == ErrorKind::schema_error);
}

TEST_CASE("parse errors name the row and column") {
  try {
    read_csv("a,b,class\n1,red,yes\nzz,red,yes\n", abc_config());
    FAIL("expected a parse error");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("'a'") != std::string::npos);
    CHECK(what.find('3') != std::string::npos);
  }
}

TEST_CASE("quoted fields may hold commas and quotes") {
  const Dataset d = read_csv("a,b,class\n1,\"x, \"\"y\"\"\",yes\n", abc_config());
  CHECK(d.schema().features[1].kind.levels()[0] == "x, \"y\"");
  const Dataset back = read_csv(write_csv(d), abc_config());
  CHECK(back.schema().features[1].kind.levels()[0] == "x, \"y\"");
}

TEST_CASE("write_csv of a single number") {
  Schema s;
  s.features.push_back({"col", FeatureKind::continuous()});
  Dataset d(s, 1, {Cell::number(2.5)});
  CHECK(write_csv(d) == "col\n2.5\n");
}

TEST_CASE("write_csv emits the first missing token") {
  Schema s;
  s.features.push_back({"col", FeatureKind::continuous()});
  Dataset d(s, 1, {Cell::missing()});
  CHECK(write_csv(d) == "col\nNA\n");
  CHECK(write_csv(d, {"?"}) == "col\n?\n");
}

TEST_CASE("write_csv and read_csv round-trip a random mixed dataset") {
  CounterRng rng(5);
  Dataset d = fixtures::random_mixed(rng, 50, 5, 0.0, 3);
  // Give continuous columns awkward values to exercise shortest round-trip formatting.
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (d.schema().features[j].kind.is_continuous()) d.set(i, j, Cell::number(rng.normal() * 1e3 / 7.0));
    }
  }
  const SchemaConfig config = schema_config_from(d.schema());
  const Dataset back = read_csv(write_csv(d), config);
  CHECK(back == d);
}

TEST_CASE("schema config text round-trips") {
  const char* text =
      "# iris-like\n"
      "missing = NA, \"\", ?\n"
      "column = sepal_length : continuous\n"
      "column = colour : categorical : red, green, blue\n"
      "class = species\n"
      "class_levels = setosa, versicolor\n";
  const SchemaConfig c = parse_schema_config(text);
  REQUIRE(c.columns.size() == 2);
  CHECK(c.columns[1].categorical);
  CHECK(c.columns[1].levels == std::vector<std::string>{"red", "green", "blue"});
  CHECK(c.class_column == std::optional<std::string>("species"));
  CHECK(c.missing_tokens == std::vector<std::string>{"NA", "", "?"});
  const SchemaConfig again = parse_schema_config(format_schema_config(c));
  CHECK(again.columns.size() == 2);
  CHECK(again.columns[1].levels == c.columns[1].levels);
  CHECK(again.class_levels == c.class_levels);
  CHECK(again.missing_tokens == c.missing_tokens);
}

TEST_CASE("schema inference types columns by their observed fields") {
  const SchemaConfig c = infer_schema_config("a,b,y\n1,x,p\n?,2,q\n3.5,z,p\n");
  REQUIRE(c.columns.size() == 2);
  CHECK_FALSE(c.columns[0].categorical);
  CHECK(c.columns[1].categorical);
  CHECK(c.class_column == std::optional<std::string>("y"));
}

TEST_CASE("voting-style file keeps its share of unknown tokens") {
  // 435 rows of 15 yes/no votes; 4.14% of cells replaced by '?'.
  CounterRng rng(4140);
  std::string csv;
  for (int j = 0; j < 15; ++j) csv += "v" + std::to_string(j) + ",";
  csv += "party\n";
  std::size_t unknown = 0;
  const std::size_t target = static_cast<std::size_t>(std::llround(435 * 15 * 0.0414));
  std::vector<bool> hole(435 * 15, false);
  for (std::size_t placed = 0; placed < target;) {
    const auto at = rng.below(435 * 15);
    if (!hole[at]) {
      hole[at] = true;
      ++placed;
    }
  }
  for (std::size_t i = 0; i < 435; ++i) {
    for (std::size_t j = 0; j < 15; ++j) {
      if (hole[i * 15 + j]) {
        csv += "?,";
        ++unknown;
      } else {
        csv += rng.uniform() < 0.5 ? "y," : "n,";
      }
    }
    csv += rng.uniform() < 0.6 ? "democrat\n" : "republican\n";
  }
  const SchemaConfig config = infer_schema_config(csv, "party");
  for (const auto& col : config.columns) CHECK(col.categorical);
  const Dataset d = read_csv(csv, config);
  CHECK(d.rows() == 435);
  CHECK(d.cols() == 15);
  const auto report = validate(d);
  CHECK(report.ok());
  double total = 0;
  for (double r : report.missing_rates) total += r;
  CHECK(total / 15.0 == doctest::Approx(static_cast<double>(unknown) / (435.0 * 15.0)).epsilon(1e-12));
  CHECK(total / 15.0 == doctest::Approx(0.0414).epsilon(0.01));
}

TEST_CASE("format_double gives the shortest round-trip text") {
  CHECK(format_double(0.1283) == "0.1283");
  CHECK(format_double(2.5) == "2.5");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CounterRng rng(17);
  for (int t = 0; t < 1000; ++t) {
    const double x = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("empty report has empty mappings") {
  const auto j = nlohmann::json::parse(write_report({}));
  CHECK(j["report_version"] == 1);
  CHECK(j["runs"].empty());
  CHECK(j["aggregate"].empty());
  CHECK(j["failures"].empty());
}

TEST_CASE("report keeps the exact rmse of a run") {
  BenchmarkReport r;
  RunRecord rec;
  rec.method = "CGKNN";
  rec.rate = 0.1;
  rec.seed = 1;
  rec.rmse = 0.1283;
  r.runs.push_back(rec);
  const std::string text = write_report(r);
  CHECK(text.find("\"rmse\": 0.1283") != std::string::npos);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["runs"]["CGKNN"]["0.1"]["1"]["rmse"].get<double>() == 0.1283);
  for (const char* key : {"rmse", "classification_accuracy", "iterations", "chosen_k", "wall_time_ms"}) {
    CHECK(j["runs"]["CGKNN"]["0.1"]["1"].contains(key));
  }
}

TEST_CASE("report aggregates seeds with mean and sample deviation") {
  BenchmarkReport r;
  for (std::uint64_t s : {1, 2}) {
    RunRecord rec;
    rec.method = "GKNN";
    rec.rate = 0.2;
    rec.seed = s;
    rec.rmse = s == 1 ? 0.1 : 0.3;
    r.runs.push_back(rec);
  }
  RunRecord bad;
  bad.method = "GKNN";
  bad.rate = 0.2;
  bad.seed = 3;
  bad.error = "too_few_rows: nope";
  r.runs.push_back(bad);
  const auto j = nlohmann::json::parse(write_report(r));
  CHECK(j["runs"]["GKNN"]["0.2"].size() == 3);
  const auto& agg = j["aggregate"]["GKNN"]["0.2"]["rmse"];
  CHECK(agg["mean"].get<double>() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(agg["stddev"].get<double>() == doctest::Approx(std::sqrt(0.02)).epsilon(1e-15));
  CHECK(agg["n"] == 2);
  REQUIRE(j["failures"].size() == 1);
  CHECK(j["failures"][0]["seed"] == 3);

  const std::string csv = write_report_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("summarize of one value has zero spread") {
  const Summary s = summarize({0.5});
  CHECK(s.mean == 0.5);
  CHECK(s.stddev == 0.0);
  CHECK(s.n == 1);
}
