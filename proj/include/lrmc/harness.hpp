#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lrmc/diagnostics.hpp"
#include "lrmc/leaveoneout.hpp"
#include "lrmc/solver.hpp"

namespace lrmc {

/// Seeded experiment grid over (n1, n2, r, kappa, p) plus solver settings.
/// Parsed from a flat key = value text file; lists use [a, b, c] syntax.
struct ExperimentConfig {
  std::vector<Index> n1{120};
  std::vector<Index> n2{100};
  std::vector<Index> r{3};
  std::vector<double> kappa{2.0};
  std::vector<double> p{0.4};
  std::vector<std::uint64_t> seeds{1};
  SolverConfig solver;
  std::string variant = "vanilla";  // vanilla | projected | both
  double success_tol = 1e-4;        // relative recovery error defining success
  bool loo_enabled = false;
  long loo_cap = 400;               // run the ensemble only when n1+n2 <= loo_cap
  bool hessian_check = false;
  std::string output_dir = "out";
  int threads = 1;

  long cell_count() const;
  long planned_runs() const;  // cells x seeds x variants
  std::vector<Variant> variants() const;
  /// Full key = value form with defaults materialized; parses back to *this.
  /// Without runtime keys, the execution-resource settings (threads,
  /// output_dir) are omitted, leaving only the experiment definition.
  std::string serialize(bool include_runtime_keys = true) const;
  std::vector<std::string> validation_errors() const;
  void validate() const;  // throws listing every offending key

  bool operator==(const ExperimentConfig&) const = default;
};

/// One grid cell in deterministic enumeration order (n1, n2, r, kappa, p nested
/// in that order).
struct Cell {
  long index = 0;
  Index n1 = 0, n2 = 0, r = 0;
  double kappa = 1.0, p = 1.0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool success = false;
  bool failed = false;  // exception or divergence, recorded without aborting the sweep
  std::string note;
  double final_err = 0.0;
  long iters_to_threshold = -1;
  long iterations = 0;
  std::vector<TrajectoryRecord> records;
  std::vector<LooDiagnostics> loo;
};

struct VariantResult {
  Variant variant = Variant::Vanilla;
  double success_rate = 0.0;
  double mean_iters = 0.0;      // over successful seeds; nan when none succeeded
  double mean_final_err = 0.0;  // over all seeds
  std::vector<SeedOutcome> outcomes;
};

struct SweepResult {
  Cell cell;
  std::vector<VariantResult> variants;
  std::vector<CheckSummary> checks;  // populated when hessian_check is enabled
};

/// Parses and validates the key = value config format documented in the README.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

std::vector<Cell> expand_cells(const ExperimentConfig& cfg);

/// Sub-generator key for one (seed, cell) pair; re-partitioning the grid across
/// workers cannot change any run's randomness.
std::uint64_t run_stream(std::uint64_t seed, long cell_index, std::uint64_t purpose);

/// Executes every (cell, seed, variant) run on a bounded worker pool. Failures
/// of individual runs are recorded in their SeedOutcome; the sweep always
/// completes. Results are deterministic for any thread count.
std::vector<SweepResult> run_sweep(const ExperimentConfig& cfg);

/// Writes sweep.csv, trajectories/*.csv, diagnostics/*.csv and summary.txt
/// under output_dir. All bytes are deterministic functions of the results.
void emit_report(const std::vector<SweepResult>& results, const ExperimentConfig& cfg,
                 const std::filesystem::path& output_dir);

}  // namespace lrmc
