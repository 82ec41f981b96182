#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include "lrmc/harness.hpp"

using namespace lrmc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lrmc_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

// All regular files under a directory, as relative path -> contents.
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), root).string()] = slurp(entry.path());
    }
  }
  return out;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n1 = {20};
  cfg.n2 = {16};
  cfg.r = {2};
  cfg.kappa = {2.0};
  cfg.p = {0.9};
  cfg.seeds = {1, 2};
  cfg.solver.max_iters = 500;
  cfg.solver.record_every = 100;
  return cfg;
}

}  // namespace

TEST_CASE("minimal config gets defaults and round-trips through serialization") {
  const ExperimentConfig cfg = parse_config_text(
      "# one cell, one seed\n"
      "n1 = 30\n"
      "n2 = 25\n"
      "r = 2\n"
      "kappa = 1.5\n"
      "p = 0.5\n"
      "seeds = 7\n");
  CHECK(cfg.n1 == std::vector<Index>{30});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{7});
  CHECK(cfg.variant == "vanilla");
  CHECK(cfg.solver.max_iters == 50000);
  CHECK(cfg.solver.record_every == 50);
  CHECK(cfg.solver.eta == 0.0);
  CHECK(cfg.success_tol == 1e-4);
  CHECK(cfg.loo_cap == 400);
  CHECK_FALSE(cfg.loo_enabled);

  const ExperimentConfig again = parse_config_text(cfg.serialize());
  CHECK(again == cfg);
}

TEST_CASE("invalid values are reported by key, all at once") {
  try {
    parse_config_text("p = 1.5\nkappa = 0.5\nmystery = 3\n");
    FAIL("expected validation failure");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("p:") != std::string::npos);
    CHECK(msg.find("kappa:") != std::string::npos);
    CHECK(msg.find("mystery") != std::string::npos);
  }
}

TEST_CASE("list syntax, comments and duplicate detection") {
  const ExperimentConfig cfg = parse_config_text(
      "n1 = [20, 24]   # two widths\n"
      "n2 = [16]\n"
      "r = [2]\n"
      "kappa = [1.5, 2]\n"
      "p = [0.5, 0.9]\n"
      "seeds = [1, 2, 3]\n");
  CHECK(cfg.cell_count() == 8);
  CHECK(cfg.planned_runs() == 24);

  CHECK_THROWS_AS(parse_config_text("n1 = 10\nn1 = 20\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("n1 = [10\n"), std::invalid_argument);
}

TEST_CASE("variant multiplies the planned run count") {
  ExperimentConfig cfg = small_config();
  cfg.variant = "both";
  CHECK(cfg.planned_runs() == 4);  // 1 cell x 2 seeds x 2 variants
}

TEST_CASE("cells expand in deterministic nested order") {
  ExperimentConfig cfg = small_config();
  cfg.n1 = {10, 20};
  cfg.p = {0.5, 0.9};
  const std::vector<Cell> cells = expand_cells(cfg);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].n1 == 10);
  CHECK(cells[0].p == 0.5);
  CHECK(cells[1].n1 == 10);
  CHECK(cells[1].p == 0.9);
  CHECK(cells[2].n1 == 20);
  CHECK(cells[3].index == 3);
}

TEST_CASE("output_dir default honors the environment variable") {
  setenv("LRMC_OUT_DIR", "/tmp/lrmc_env_out", 1);
  const ExperimentConfig cfg = parse_config_text("n1 = 10\nn2 = 10\nr = 1\np = 0.5\n");
  CHECK(cfg.output_dir == "/tmp/lrmc_env_out");
  unsetenv("LRMC_OUT_DIR");
  const ExperimentConfig plain = parse_config_text("n1 = 10\nn2 = 10\nr = 1\np = 0.5\n");
  CHECK(plain.output_dir == "out");
}

TEST_CASE("fully observed cell always succeeds") {
  ExperimentConfig cfg = small_config();
  cfg.p = {1.0};
  const auto results = run_sweep(cfg);
  REQUIRE(results.size() == 1);
  CHECK(results[0].variants[0].success_rate == 1.0);
}

TEST_CASE("a cell below the information limit never succeeds") {
  ExperimentConfig cfg = small_config();
  cfg.n1 = {40};
  cfg.n2 = {40};
  cfg.r = {4};
  cfg.p = {0.1};  // ~160 observations < r(n1+n2-r) = 304 degrees of freedom
  cfg.seeds = {1, 2, 3};
  cfg.solver.max_iters = 4000;
  const auto results = run_sweep(cfg);
  CHECK(results[0].variants[0].success_rate == 0.0);
  for (const auto& outcome : results[0].variants[0].outcomes) {
    CHECK(outcome.final_err > 1e-4);
  }
}

TEST_CASE("sweep reports are deterministic, byte for byte, across runs and thread counts") {
  ExperimentConfig cfg = small_config();
  cfg.p = {0.6, 0.9};
  cfg.loo_enabled = true;
  cfg.loo_cap = 50;
  cfg.hessian_check = true;

  const fs::path dir1 = fresh_dir("det1");
  const fs::path dir2 = fresh_dir("det2");
  cfg.threads = 1;
  emit_report(run_sweep(cfg), cfg, dir1);
  cfg.threads = 2;
  emit_report(run_sweep(cfg), cfg, dir2);

  const auto tree1 = tree_bytes(dir1);
  const auto tree2 = tree_bytes(dir2);
  REQUIRE(tree1.size() == tree2.size());
  CHECK(tree1.count("sweep.csv") == 1);
  CHECK(tree1.count("summary.txt") == 1);
  CHECK(tree1.count("diagnostics/checks.csv") == 1);
  bool has_loo = false;
  for (const auto& [name, bytes] : tree1) {
    INFO(name);
    CHECK(tree2.at(name) == bytes);
    if (name.find("_loo") != std::string::npos) has_loo = true;
  }
  CHECK(has_loo);

  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("sweep.csv matches the documented schema fixture") {
  std::ifstream fixture(fs::path(TEST_DATA_DIR) / "sweep_schema.txt");
  REQUIRE(fixture.good());
  std::string single_header, both_header;
  std::getline(fixture, single_header);
  std::getline(fixture, both_header);

  ExperimentConfig cfg = small_config();
  const fs::path dir = fresh_dir("schema");
  emit_report(run_sweep(cfg), cfg, dir);
  CHECK(first_line(dir / "sweep.csv") == single_header);
  {
    const std::string bytes = slurp(dir / "sweep.csv");
    // header + one row for the single cell
    CHECK(std::count(bytes.begin(), bytes.end(), '\n') == 2);
  }

  cfg.variant = "both";
  const fs::path dir_both = fresh_dir("schema_both");
  emit_report(run_sweep(cfg), cfg, dir_both);
  CHECK(first_line(dir_both / "sweep.csv") == both_header);

  fs::remove_all(dir);
  fs::remove_all(dir_both);
}

TEST_CASE("a diverging run is recorded as a failure without aborting the sweep") {
  ExperimentConfig cfg = small_config();
  cfg.solver.eta = 1e6;  // absurd step size
  cfg.solver.plateau_stop = false;
  const auto results = run_sweep(cfg);
  REQUIRE(results.size() == 1);
  const auto& vr = results[0].variants[0];
  CHECK(vr.success_rate == 0.0);
  for (const auto& outcome : vr.outcomes) {
    CHECK(outcome.failed);
    CHECK(outcome.note == "diverged");
    CHECK(std::isinf(outcome.final_err));
  }
  // The report still writes cleanly.
  const fs::path dir = fresh_dir("diverge");
  emit_report(results, cfg, dir);
  CHECK(slurp(dir / "sweep.csv").find("inf") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("success rate is monotone across the sampling-rate sweep") {
  ExperimentConfig cfg;
  cfg.n1 = {150};
  cfg.n2 = {130};
  cfg.r = {3};
  cfg.kappa = {2.0};
  cfg.p = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6};
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  cfg.solver.max_iters = 20000;
  cfg.threads = 2;
  const auto results = run_sweep(cfg);

  std::vector<double> rates;
  for (const auto& result : results) rates.push_back(result.variants[0].success_rate);
  REQUIRE(rates.size() == 12);
  CHECK(rates.front() == 0.0);
  CHECK(rates.back() == 1.0);

  int inversions = 0;
  double worst_drop = 0.0;
  double running_max = rates.front();
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (rates[i] < running_max - 1e-12) {
      ++inversions;
      worst_drop = std::max(worst_drop, running_max - rates[i]);
    }
    running_max = std::max(running_max, rates[i]);
  }
  CHECK(inversions <= 1);
  CHECK(worst_drop <= 0.1 + 1e-12);
}
