#include <doctest.h>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "greyknn/benchmark.h"
#include "greyknn/cli.h"
#include "greyknn/io.h"

using namespace greyknn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("greyknn_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

/// Runs the CLI with stderr captured.
int cli(const std::vector<std::string>& args, std::string* err = nullptr) {
  std::ostringstream capture;
  auto* old = std::cerr.rdbuf(capture.rdbuf());
  const int code = run_cli(args);
  std::cerr.rdbuf(old);
  if (err) *err = capture.str();
  return code;
}

const char* small_spec =
    "name = small\n"
    "source = cubes\n"
    "mechanism = mcar\n"
    "targets = x1\n"
    "methods = meanmode, iknn, cgknn\n"
    "rates = 0.1\n"
    "seeds = 1-2\n"
    "k = 5\n"
    "folds = 5\n"
    "timing = false\n";

}  // namespace

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("synth, inject, impute and eval chain with byte-identical reruns") {
  TempDir dir("chain");
  REQUIRE(cli({"synth", "cubes", "--seed", "3", "-o", dir / "truth.csv"}) == 0);
  CHECK(fs::exists(dir / "truth.cfg"));
  CHECK(fs::exists(dir / "truth.manifest.json"));
  REQUIRE(cli({"inject", "mcar", dir / "truth.csv", "--schema", dir / "truth.cfg", "--columns", "x1", "--rate", "0.1",
               "--seed", "4", "-o", dir / "holes.csv"}) == 0);

  const std::vector<std::string> impute{"impute", dir / "holes.csv", "--schema", dir / "truth.cfg", "--method",
                                        "cgknn", "--seed", "7", "-o", dir / "a.csv"};
  REQUIRE(cli(impute) == 0);
  CHECK(fs::exists(dir / "a.manifest.json"));
  CHECK(fs::exists(dir / "a.trace.json"));
  const std::string first = read_file(dir / "a.csv");
  REQUIRE(cli(impute) == 0);
  CHECK(read_file(dir / "a.csv") == first);

  const auto manifest = nlohmann::json::parse(read_file(dir / "a.manifest.json"));
  CHECK(manifest["command"] == "impute");
  CHECK(manifest["seed"] == 7);
  CHECK(manifest.contains("version"));
  CHECK(manifest["config"]["method"] == "CGKNN");
  CHECK(manifest["inputs"].size() >= 2);
  CHECK(manifest["outputs"].size() >= 2);

  fs::remove(dir / "a.csv");
  REQUIRE(cli({"replay", dir / "a.manifest.json"}) == 0);
  CHECK(read_file(dir / "a.csv") == first);

  REQUIRE(cli({"eval", dir / "truth.csv", dir / "a.csv", "--mask", dir / "holes.csv", "--schema", dir / "truth.cfg",
               "-o", dir / "m.json"}) == 0);
  const auto metrics = nlohmann::json::parse(read_file(dir / "m.json"));
  CHECK(metrics["rmse"].get<double>() >= 0.0);
  CHECK(metrics["rmse"].get<double>() < 0.3);
  CHECK(metrics["classification_accuracy"].get<double>() > 0.5);
}

TEST_CASE("replay refuses changed inputs") {
  TempDir dir("replay");
  REQUIRE(cli({"synth", "mvn", "--seed", "1", "-o", dir / "d.csv"}) == 0);
  REQUIRE(cli({"inject", "mar", dir / "d.csv", "--schema", dir / "d.cfg", "--predictors", "x1,x2,x3", "--rate", "0.1",
               "-o", dir / "h.csv"}) == 0);
  REQUIRE(cli({"impute", dir / "h.csv", "--schema", dir / "d.cfg", "--method", "gknn", "--k", "3", "-o",
               dir / "i.csv"}) == 0);
  write_file(dir / "h.csv", read_file(dir / "d.csv"));
  std::string err;
  CHECK(cli({"replay", dir / "i.manifest.json"}, &err) == 2);
  CHECK(err.find("changed") != std::string::npos);
}

TEST_CASE("unknown method is a usage error listing valid names") {
  TempDir dir("method");
  REQUIRE(cli({"synth", "cubes", "-o", dir / "c.csv"}) == 0);
  std::string err;
  CHECK(cli({"impute", dir / "c.csv", "--method", "bogus", "-o", dir / "o.csv"}, &err) == 1);
  for (const char* m : {"meanmode", "iknn", "miknn", "gknn", "fwgknn", "cgknn"}) {
    CHECK(err.find(m) != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "o.csv"));
}

TEST_CASE("usage and data errors map to exit codes") {
  TempDir dir("codes");
  CHECK(cli({}) == 1);
  CHECK(cli({"impute"}) == 1);
  CHECK(cli({"impute", dir / "absent.csv"}) == 1);
  write_file(dir / "bad.csv", "a,b,y\n1,2,p\n1,2\n");
  std::string err;
  CHECK(cli({"impute", dir / "bad.csv", "--method", "iknn", "--k", "1", "-o", dir / "o.csv"}, &err) == 2);
  CHECK(err.find("RaggedRow") != std::string::npos);
}

TEST_CASE("missing schema is inferred and written next to the output") {
  TempDir dir("infer");
  write_file(dir / "d.csv", "a,b,y\n1,x,p\n?,x,q\n3,z,p\n4,z,q\n5,x,p\n");
  const std::string before = read_file(dir / "d.csv");
  REQUIRE(cli({"impute", dir / "d.csv", "--method", "iknn", "--k", "2", "-o", dir / "o.csv"}) == 0);
  CHECK(fs::exists(dir / "o.schema.cfg"));
  CHECK(read_file(dir / "d.csv") == before);
  CHECK(read_file(dir / "o.csv").find('?') == std::string::npos);
  REQUIRE(cli({"infer", dir / "d.csv", "-o", dir / "s.cfg"}) == 0);
  CHECK(parse_schema_config(read_file(dir / "s.cfg")).columns.size() == 2);
}

TEST_CASE("mi command reports weights on the simplex") {
  TempDir dir("mi");
  REQUIRE(cli({"synth", "cubes", "--seed", "2", "-o", dir / "c.csv"}) == 0);
  REQUIRE(cli({"mi", dir / "c.csv", "--schema", dir / "c.cfg", "-o", dir / "mi.json"}) == 0);
  const auto j = nlohmann::json::parse(read_file(dir / "mi.json"));
  double sum = 0;
  for (const auto& f : j["features"]) {
    CHECK(f["mi_bits"].get<double>() >= 0.0);
    sum += f["class_weight"].get<double>();
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("benchmark spec parsing") {
  const BenchmarkSpec s = parse_benchmark_spec(small_spec);
  CHECK(s.name == "small");
  CHECK(s.methods.size() == 3);
  CHECK(s.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(s.impute.k == std::optional<std::size_t>(5));
  CHECK_FALSE(s.record_timing);
  CHECK_THROWS(parse_benchmark_spec("rates = 1.5\nmethods = iknn\nseeds = 1\n"));
  CHECK_THROWS(parse_benchmark_spec("colour = red\n"));
}

TEST_CASE("benchmark report is identical for serial and parallel sweeps") {
  const BenchmarkSpec spec = parse_benchmark_spec(small_spec);
  const std::string serial = write_report(run_benchmark(spec, 1));
  const std::string parallel = write_report(run_benchmark(spec, 4));
  CHECK(serial == parallel);
  const auto j = nlohmann::json::parse(serial);
  CHECK(j["runs"]["CGKNN"]["0.1"].size() == 2);
  CHECK(j["failures"].empty());
  CHECK(j["runs"]["CGKNN"]["0.1"]["1"]["wall_time_ms"] == 0);
  const double mm = j["aggregate"]["MeanMode"]["0.1"]["rmse"]["mean"].get<double>();
  const double cg = j["aggregate"]["CGKNN"]["0.1"]["rmse"]["mean"].get<double>();
  CHECK(cg < mm);
}

TEST_CASE("benchmark command writes report, csv and manifest") {
  TempDir dir("bench");
  write_file(dir / "s.spec", small_spec);
  REQUIRE(cli({"benchmark", dir / "s.spec", "-o", dir / "r.json", "--csv", dir / "r.csv", "--jobs", "2",
               "--no-timing"}) == 0);
  const std::string first = read_file(dir / "r.json");
  CHECK(fs::exists(dir / "r.csv"));
  CHECK(fs::exists(dir / "r.manifest.json"));
  REQUIRE(cli({"replay", dir / "r.manifest.json"}) == 0);
  CHECK(read_file(dir / "r.json") == first);
}
