#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evbma/commands.hpp"
#include "evbma/csv.hpp"

using namespace evbma;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.push_back("");
    rows.push_back(std::move(row));
  }
  return rows;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "config.json";
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

const char* kSmallCustom = R"({
  "designs": [{
    "id": "c1",
    "model": "custom",
    "T": [12],
    "environment": {
      "arms": 2,
      "covariates": 1,
      "cells": [
        {"arm": 0, "covariate": 0, "dist": "gaussian", "mean": 1.0, "sd": 1.0},
        {"arm": 1, "covariate": 0, "dist": "gaussian", "mean": 1.3, "sd": 1.0}
      ]
    },
    "sources": [
      {"name": "diffuse",
       "priors": [
         {"arm": 0, "covariate": 0, "mean": 1.0,
          "schedule": {"kind": "constant", "nu0": 1.0}, "diffuse_cap": 1.0},
         {"arm": 1, "covariate": 0, "mean": 1.3,
          "schedule": {"kind": "constant", "nu0": 1.0}, "diffuse_cap": 1.0}
       ]},
      {"name": "anchor",
       "priors": [
         {"arm": 0, "covariate": 0, "mean": 1.0,
          "schedule": {"kind": "fixed_at_design", "rate": 1.0}},
         {"arm": 1, "covariate": 0, "mean": 1.3,
          "schedule": {"kind": "fixed_at_design", "rate": 1.0}}
       ]}
    ]
  }],
  "replications": 6,
  "base_seed": 99
})";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EVBMA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("doubles survive the round trip through csv text") {
  for (double x : {0.1, 1.0 / 3.0, 3.141592653589793, 1e300, 5e-324, -2.5, 0.0, 1.3}) {
    const std::string s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("csv writer emits rows with empty cells for absent values") {
  const fs::path dir = scratch_dir("writer");
  const fs::path path = dir / "t.csv";
  {
    CsvWriter w(path.string());
    w.field("a").field("b").field("c");
    w.end_row();
    w.field(std::int64_t{7}).field(std::optional<double>{}).field(0.5);
    w.end_row();
  }
  CHECK(read_file(path) == "a,b,c\n7,,0.5\n");
  CHECK_THROWS(CsvWriter((dir / "missing" / "t.csv").string()));
}

TEST_CASE("simulate writes a full output set and reruns byte-identically") {
  const fs::path dir = scratch_dir("simulate");
  const fs::path cfg = write_config(dir, kSmallCustom);

  CommandOptions a;
  a.out_dir = (dir / "a").string();
  cmd_simulate(cfg.string(), a);

  for (const char* name : {"summary.csv", "summary_alpha.csv", "results_c1_T12.csv",
                           "manifest.json"})
    CHECK(fs::exists(dir / "a" / name));

  const auto summary = read_csv(dir / "a" / "summary.csv");
  REQUIRE(summary.size() == 5);  // header + 2 cells x {bma, standard}
  CHECK(summary[0][0] == "design");
  CHECK(summary[1][0] == "c1");
  CHECK(summary[1][6] == "bma");
  CHECK(summary[2][6] == "standard");
  CHECK(summary[1][7] == "6");
  CHECK(summary[1][14] != "");   // bma rows carry the acceleration factor
  CHECK(summary[2][14] == "");   // standard rows do not

  const auto alpha = read_csv(dir / "a" / "summary_alpha.csv");
  REQUIRE(alpha.size() == 5);  // header + 2 cells x 2 sources
  CHECK(alpha[1][6] == "diffuse");
  CHECK(alpha[1][7] == "diffuse");
  CHECK(alpha[2][6] == "anchor");
  CHECK(alpha[2][7] == "unbiased");

  const auto results = read_csv(dir / "a" / "results_c1_T12.csv");
  REQUIRE(results.size() == 13);  // header + 6 reps x 2 cells
  CHECK(results[0][7] == "alpha_diffuse");
  CHECK(results[1][3] == "6");

  const std::string manifest = read_file(dir / "a" / "manifest.json");
  CHECK(manifest.find("\"command\": \"simulate\"") != std::string::npos);
  CHECK(manifest.find("\"base_seed\": 99") != std::string::npos);

  CommandOptions b = a;
  b.out_dir = (dir / "b").string();
  cmd_simulate(cfg.string(), b);
  CommandOptions c = a;
  c.out_dir = (dir / "c").string();
  c.parallelism = 2;
  cmd_simulate(cfg.string(), c);
  for (const char* name : {"summary.csv", "summary_alpha.csv", "results_c1_T12.csv"}) {
    CHECK(read_file(dir / "a" / name) == read_file(dir / "b" / name));
    CHECK(read_file(dir / "a" / name) == read_file(dir / "c" / name));
  }
}

TEST_CASE("reproduce table1 emits one weight row per source") {
  const fs::path dir = scratch_dir("reproduce");
  CommandOptions opt;
  opt.out_dir = (dir / "t").string();
  opt.replications = 5;
  cmd_reproduce("table1", opt);

  const auto rows = read_csv(dir / "t" / "table1_alpha.csv");
  // 15 (e, T) points per model; two sources for m1/m2, three for m3
  REQUIRE(rows.size() == 1 + 15 * 2 + 15 * 2 + 15 * 3);
  CHECK(rows[0] == std::vector<std::string>{"model", "e", "T", "source", "role", "mean_alpha"});
  CHECK(rows[1][0] == "model1");
  CHECK(rows[1][1] == "0.5");
  CHECK(rows[1][2] == "50");
  CHECK(rows[1][3] == "diffuse");
  CHECK(rows[1][4] == "diffuse");
  CHECK(!fs::exists(dir / "t" / "scaled_errors.csv"));

  const std::string manifest = read_file(dir / "t" / "manifest.json");
  CHECK(manifest.find("\"suite\": \"table1\"") != std::string::npos);

  CHECK_THROWS_AS(cmd_reproduce("tables", opt), ConfigError);
}

TEST_CASE("reproduce figures emits error summaries and box data") {
  const fs::path dir = scratch_dir("figures");
  CommandOptions opt;
  opt.out_dir = (dir / "f").string();
  opt.replications = 3;
  cmd_reproduce("figures", opt);

  CHECK(!fs::exists(dir / "f" / "table1_alpha.csv"));
  const auto rows = read_csv(dir / "f" / "scaled_errors.csv");
  REQUIRE(rows.size() == 1 + 45 * 2);  // every point: bma + standard
  CHECK(rows[0][4] == "estimator");
  for (const char* model : {"model1", "model2", "model3"}) {
    const auto box = read_csv(dir / "f" / "figure_data" / (std::string(model) + "_box.csv"));
    REQUIRE(box.size() == 1 + 15 * 2);
    CHECK(box[0][9] == "whisker_low");
    // whiskers stay inside the data range
    for (std::size_t r = 1; r < box.size(); ++r) {
      const double low = std::strtod(box[r][9].c_str(), nullptr);
      const double high = std::strtod(box[r][10].c_str(), nullptr);
      const double mn = std::strtod(box[r][11].c_str(), nullptr);
      const double mx = std::strtod(box[r][12].c_str(), nullptr);
      CHECK(low >= mn);
      CHECK(high <= mx);
      CHECK(low <= high);
    }
  }
}

TEST_CASE("divergence diagnostics cover every design entry") {
  const fs::path dir = scratch_dir("divergence");
  const fs::path cfg = write_config(dir, R"({
    "designs": [
      {"id": "bench", "model": "model1", "e": [1.0], "T": [50]},
      {"id": "bandit", "model": "model1", "e": [1.0], "T": [50],
       "policy": {"kind": "epsilon_greedy", "epsilon0": 1.0, "kappa": 0.5}}
    ],
    "diagnostics": {"horizon": 400}
  })");
  CommandOptions opt;
  opt.out_dir = (dir / "out").string();
  cmd_diagnose("divergence", cfg.string(), opt);

  const auto rows = read_csv(dir / "out" / "diagnostics.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "divergence");
  CHECK(rows[1][1] == "bench");
  CHECK(rows[1][11] == "400");
  CHECK(rows[1][14] == "true");  // alternating explores every arm forever
  CHECK(rows[2][1] == "bandit");
  CHECK(rows[2][14] == "true");
  CHECK(std::strtod(rows[2][12].c_str(), nullptr) > 0.0);
}

TEST_CASE("pac diagnostics accept direct and design-derived speedups") {
  const fs::path dir = scratch_dir("pac");
  const fs::path cfg = write_config(dir, R"({
    "designs": [{"id": "m1", "model": "model1", "e": [1.0], "T": [50]}],
    "diagnostics": {"pac": [
      {"epsilon": 0.1, "acceleration": 1.0},
      {"epsilon": 0.1, "design": "m1"}
    ]}
  })");
  CommandOptions opt;
  opt.out_dir = (dir / "out").string();
  cmd_diagnose("pac", cfg.string(), opt);

  const auto rows = read_csv(dir / "out" / "diagnostics.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "pac");
  CHECK(rows[1][17] == "231");
  // the design-derived acceleration halves the requirement: 1/(1+c) with c=1
  CHECK(rows[2][1] == "m1");
  CHECK(rows[2][16] == "0.5");
  CHECK(rows[2][17] == "116");
}

TEST_CASE("pac derivation fails loudly without unbiased sources") {
  const fs::path dir = scratch_dir("pac_empty");
  const fs::path cfg = write_config(dir, R"({
    "designs": [{"id": "m2", "model": "model2", "e": [1.0], "T": [50]}],
    "diagnostics": {"pac": [{"epsilon": 0.1, "design": "m2"}]}
  })");
  CommandOptions opt;
  opt.out_dir = (dir / "out").string();
  try {
    cmd_diagnose("pac", cfg.string(), opt);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("no unbiased sources") != std::string::npos);
  }
}

TEST_CASE("decay diagnostics fit the biased-source weight against precision") {
  const fs::path dir = scratch_dir("decay");
  const fs::path cfg = write_config(dir, R"({
    "designs": [{"id": "m2", "model": "model2", "e": [1.0], "T": [10, 20, 30, 40, 50]}],
    "replications": 150
  })");
  CommandOptions opt;
  opt.out_dir = (dir / "out").string();
  cmd_diagnose("decay", cfg.string(), opt);

  const auto rows = read_csv(dir / "out" / "diagnostics.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "decay");
  CHECK(rows[1][5] == "biased");
  CHECK(rows[1][6] == "nu_bias_sq");
  CHECK(std::strtod(rows[1][7].c_str(), nullptr) < 0.0);
  CHECK(std::strtod(rows[1][9].c_str(), nullptr) > 0.5);
  CHECK(rows[1][10] == "5");
}

TEST_CASE("rate diagnostics regress both estimators on log sample size") {
  const fs::path dir = scratch_dir("rates");
  const fs::path cfg = write_config(dir, R"({
    "designs": [{"id": "m1", "model": "model1", "e": [1.0], "T": [50, 100, 250]}],
    "replications": 150
  })");
  CommandOptions opt;
  opt.out_dir = (dir / "out").string();
  cmd_diagnose("rates", cfg.string(), opt);

  const auto rows = read_csv(dir / "out" / "diagnostics.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][4] == "bma");
  CHECK(rows[2][4] == "standard");
  CHECK(rows[1][6] == "log_n");
  const double std_slope = std::strtod(rows[2][7].c_str(), nullptr);
  CHECK(std_slope < -0.2);
  CHECK(std_slope > -0.8);

  const fs::path short_cfg = write_config(scratch_dir("rates_short"), R"({
    "designs": [{"id": "m1", "model": "model1", "e": [1.0], "T": [50, 100]}]
  })");
  CHECK_THROWS_AS(cmd_diagnose("rates", short_cfg.string(), opt), ConfigError);
}

TEST_CASE("command overrides validate their arguments") {
  RunConfig cfg = parse_config(R"({"designs":[{"id":"a","model":"model1","e":[1.0],"T":[50]}]})");
  CommandOptions opt;
  opt.out_dir = "elsewhere";
  opt.parallelism = 3;
  opt.seed = 7;
  opt.replications = 12;
  apply_overrides(cfg, opt);
  CHECK(cfg.output_dir == "elsewhere");
  CHECK(cfg.parallelism == 3);
  CHECK(cfg.base_seed == 7);
  CHECK(cfg.replications == 12);
  opt.parallelism = 0;
  CHECK_THROWS_AS(apply_overrides(cfg, opt), ConfigError);
  opt.parallelism = 1;
  opt.replications = 0;
  CHECK_THROWS_AS(apply_overrides(cfg, opt), ConfigError);
}

TEST_CASE("the installed binary wires commands to exit codes") {
  const fs::path dir = scratch_dir("binary");
  const fs::path good = write_config(dir, kSmallCustom);
  const fs::path bad = dir / "bad.json";
  {
    std::ofstream out(bad, std::ios::binary);
    out << R"({"designs":[{"id":"a","model":"model1","e":[0.0],"T":[50]}]})";
  }

  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("validate-config --config " + good.string()) == 0);
  CHECK(run_cli("validate-config --config " + bad.string()) == 1);
  CHECK(run_cli("validate-config --config no_such_file.json") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("simulate") == 1);  // --config is required
  CHECK(run_cli("diagnose rates") == 1);
  CHECK(run_cli("reproduce nonsense --out " + (dir / "x").string()) == 1);

  const fs::path out = dir / "run";
  CHECK(run_cli("simulate --config " + good.string() + " --out " + out.string() +
                " --reps 4 --parallelism 2 --seed 5") == 0);
  CHECK(fs::exists(out / "summary.csv"));
  const std::string manifest = read_file(out / "manifest.json");
  CHECK(manifest.find("\"replications\": 4") != std::string::npos);
  CHECK(manifest.find("\"base_seed\": 5") != std::string::npos);
}
