#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hte/cli.hpp"
#include "hte/data.hpp"
#include "hte/simlab.hpp"
#include "schema_check.hpp"

using namespace hte;
using nlohmann::json;

namespace {

const char* kSchemaPath = SCHEMA_PATH;

std::string tmp(const std::string& name) { return "/tmp/hte_cli_" + name; }

void make_data(const std::string& path, int setting, int n,
               std::uint64_t seed) {
  DgpConfig cfg;
  cfg.setting = setting;
  cfg.n = n;
  cfg.seed = seed;
  write_csv(simulate(cfg), path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("test-quant command writes a schema-conforming report") {
  const auto data = tmp("quant.csv");
  make_data(data, 2, 400, 11);
  RunConfig cfg;
  cfg.data_path = data;
  cfg.modifiers = {"x3"};
  cfg.bootstrap = 120;
  cfg.seed = 3;
  cfg.out = tmp("quant.json");
  CHECK(cmd_test_quant(cfg) == 0);
  const json j = read_json(cfg.out);
  const json schema = schema_check::load_schema(kSchemaPath);
  schema_check::check_against(schema, "quant", j);
  CHECK(j["config"]["data"] == data);
  CHECK(j["n"] == 400);
}

TEST_CASE("test-qual command echoes its configuration") {
  const auto data = tmp("qual.csv");
  make_data(data, 4, 400, 12);
  RunConfig cfg;
  cfg.data_path = data;
  cfg.modifiers = {"x3"};
  cfg.bootstrap = 120;
  cfg.delta = 0.0;
  cfg.alpha = 0.05;
  cfg.seed = 21;
  cfg.out = tmp("qual.json");
  CHECK(cmd_test_qual(cfg) == 0);
  const json j = read_json(cfg.out);
  const json schema = schema_check::load_schema(kSchemaPath);
  schema_check::check_against(schema, "qual", j);
  CHECK(j["delta"] == 0.0);
  CHECK(j["alpha"] == 0.05);
  CHECK(j["seed"] == 21);
  CHECK(j["bootstrap_draws"] == 120);
}

TEST_CASE("missing modifier column exits with code 2") {
  const auto data = tmp("missing.csv");
  make_data(data, 1, 100, 13);
  RunConfig cfg;
  cfg.data_path = data;
  cfg.modifiers = {"x9"};
  cfg.out = tmp("missing.json");
  std::remove(cfg.out.c_str());
  CHECK(cmd_test_quant(cfg) == 2);
  std::ifstream probe(cfg.out);
  CHECK_FALSE(probe.good());  // no report written
}

TEST_CASE("bad data path and bad class name exit with code 2") {
  RunConfig cfg;
  cfg.data_path = "/nonexistent/file.csv";
  cfg.modifiers = {"x1"};
  CHECK(cmd_test_quant(cfg) == 2);

  const auto data = tmp("badclass.csv");
  make_data(data, 1, 80, 14);
  cfg.data_path = data;
  cfg.class_name = "wavelet";
  CHECK(cmd_test_qual(cfg) == 2);
}

TEST_CASE("simulate command writes csv and json study reports") {
  RunConfig cfg;
  cfg.settings = {1};
  cfg.ns = {100};
  cfg.methods = {"quant_monotone"};
  cfg.reps = 3;
  cfg.bootstrap = 30;
  cfg.seed = 5;
  cfg.threads = 1;
  cfg.out = tmp("study");
  CHECK(cmd_simulate(cfg) == 0);

  std::ifstream csv(cfg.out + ".csv");
  REQUIRE(csv.good());
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "method,setting,n,R,failures,proportion,mcse,seconds");
  CHECK(row.find("quant_monotone,1,100,3,") == 0);

  const json j = read_json(cfg.out + ".json");
  const json schema = schema_check::load_schema(kSchemaPath);
  schema_check::check_against(schema, "study", j);
}

TEST_CASE("simulate rejects invalid settings with exit 2") {
  RunConfig cfg;
  cfg.settings = {9};
  cfg.ns = {50};
  cfg.methods = {"quant_monotone"};
  cfg.reps = 1;
  cfg.out = tmp("badstudy");
  CHECK(cmd_simulate(cfg) == 2);
}

TEST_CASE("curve command emits a 200-row plot-ready csv") {
  const auto data = tmp("curve.csv");
  make_data(data, 2, 2000, 15);
  RunConfig cfg;
  cfg.data_path = data;
  cfg.modifiers = {"x3"};
  cfg.out = tmp("curve_out.csv");
  CHECK(cmd_curve(cfg) == 0);

  std::ifstream in(cfg.out);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,fit,lower,upper");
  int rows = 0;
  double max_low_region = -1e300, min_high_region = 1e300;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ss(line);
    double x, fit, lo, hi;
    char c;
    ss >> x >> c >> fit >> c >> lo >> c >> hi;
    CHECK(lo <= fit);
    CHECK(hi >= fit);
    if (x < 0.4) max_low_region = std::max(max_low_region, fit);
    if (x > 0.8) min_high_region = std::min(min_high_region, fit);
  }
  CHECK(rows == 200);
  // monotone-ramp design: the fitted curve rises past the kink
  CHECK(max_low_region < min_high_region);
}

TEST_CASE("curve requires a scalar modifier") {
  const auto data = tmp("curve2.csv");
  make_data(data, 1, 200, 16);
  RunConfig cfg;
  cfg.data_path = data;
  cfg.modifiers = {"x1", "x3"};
  CHECK(cmd_curve(cfg) == 2);
}

TEST_CASE("curve on constant pseudo-outcomes is flat with positive width") {
  // constant y, known balanced propensity: psi is exactly constant
  const int n = 150;
  Sample sm;
  sm.x.resize(n, 1);
  sm.a.resize(n);
  sm.y.resize(n);
  sm.s = {0};
  for (int i = 0; i < n; ++i) {
    sm.x(i, 0) = static_cast<double>(i) / n;
    sm.a[i] = i % 2;
    sm.y[i] = 4.0;
  }
  const auto data = tmp("flat.csv");
  write_csv(sm, data);
  RunConfig cfg;
  cfg.data_path = data;
  cfg.modifiers = {"x1"};
  cfg.outcome = "linear";
  cfg.propensity = "known";
  cfg.propensity_value = 0.5;
  cfg.out = tmp("flat_out.csv");
  CHECK(cmd_curve(cfg) == 0);
  std::ifstream in(cfg.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    double x, fit, lo, hi;
    char c;
    ss >> x >> c >> fit >> c >> lo >> c >> hi;
    CHECK(std::abs(fit) < 1e-8);
    CHECK(hi - lo > 0.0);
  }
}

TEST_CASE("config json round-trips and applies") {
  RunConfig cfg;
  cfg.alpha = 0.11;
  cfg.lambda = 1.25;
  cfg.modifiers = {"x2"};
  cfg.methods = {"qual_range"};
  const json j = cfg.to_json();
  RunConfig back;
  back.apply_json(j);
  CHECK(back.alpha == 0.11);
  CHECK(back.lambda == 1.25);
  CHECK(back.modifiers == std::vector<std::string>{"x2"});
  CHECK(back.methods == std::vector<std::string>{"qual_range"});

  // partial config only overrides what it names
  RunConfig partial;
  partial.apply_json(json{{"alpha", 0.2}});
  CHECK(partial.alpha == 0.2);
  CHECK(partial.bootstrap == -1);  // per-command default stays unresolved

  const auto path = tmp("config.json");
  std::ofstream out(path);
  out << j.dump();
  out.close();
  const RunConfig loaded = load_config_file(path);
  CHECK(loaded.alpha == 0.11);
}
