// Command-line front end: `run` executes a config-driven sweep, `check` runs
// the analytical diagnostics suite, `demo` walks through a single annotated
// completion run.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "lrmc/csv.hpp"
#include "lrmc/diagnostics.hpp"
#include "lrmc/harness.hpp"
#include "lrmc/linalg.hpp"
#include "lrmc/metrics.hpp"
#include "lrmc/rng.hpp"

namespace {

using namespace lrmc;

std::string default_out() {
  const char* env = std::getenv("LRMC_OUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("out");
}

int cmd_run(const std::string& config_path, const std::string& out_override, bool dry_run,
            int threads_override) {
  ExperimentConfig cfg = parse_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (threads_override > 0) cfg.threads = threads_override;

  if (dry_run) {
    std::cout << "cells: " << cfg.cell_count() << "\n"
              << "seeds: " << cfg.seeds.size() << "\n"
              << "variants: " << cfg.variants().size() << "\n"
              << "planned runs: " << cfg.planned_runs() << "\n"
              << "output dir: " << cfg.output_dir << "\n";
    return 0;
  }

  const auto results = run_sweep(cfg);
  emit_report(results, cfg, cfg.output_dir);
  std::cout << "wrote " << cfg.output_dir << "/sweep.csv (" << results.size() << " cells, "
            << cfg.planned_runs() << " runs)\n";
  return 0;
}

// Second central difference of the objective along a direction, the oracle the
// Hessian quadratic form is checked against.
double hessian_second_difference(const FactorPair& point, const FactorPair& dir,
                                 const Matrix& observed, const SamplingMask& mask, double h) {
  const FactorPair plus{point.X + h * dir.X, point.Y + h * dir.Y};
  const FactorPair minus{point.X - h * dir.X, point.Y - h * dir.Y};
  return (objective(plus, observed, mask) - 2.0 * objective(point, observed, mask) +
          objective(minus, observed, mask)) /
         (h * h);
}

int cmd_check(const std::string& out_dir, std::uint64_t seed) {
  std::vector<CheckSummary> summaries;

  {  // analytic gradient vs central differences
    const GroundTruth gt = generate_ground_truth(24, 18, 2, 2.0, derive_stream(seed, 11));
    const SamplingMask mask = sample_mask(24, 18, 0.5, derive_stream(seed, 12));
    const Matrix observed = project_omega(gt.matrix(), mask);
    Rng rng(derive_stream(seed, 13));
    const FactorPair point{rng.gaussian_matrix(24, 2), rng.gaussian_matrix(18, 2)};
    const auto report = gradient_fd_check(point, observed, mask, 20, 1e-5, derive_stream(seed, 14));
    summaries.push_back({"gradient_fd", "n1=24;n2=18;r=2;p=0.5;directions=20;h=1e-05",
                         report.max_relative_error, report.max_relative_error <= 1e-6});
  }

  {  // Hessian quadratic form vs second central differences
    const GroundTruth gt = generate_ground_truth(20, 16, 2, 2.0, derive_stream(seed, 21));
    const SamplingMask mask = sample_mask(20, 16, 0.6, derive_stream(seed, 22));
    const Matrix M = gt.matrix();
    const Matrix observed = project_omega(M, mask);
    Rng rng(derive_stream(seed, 23));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const FactorPair point{gt.U + 0.1 * rng.gaussian_matrix(20, 2),
                             gt.V + 0.1 * rng.gaussian_matrix(16, 2)};
      FactorPair dir{rng.gaussian_matrix(20, 2), rng.gaussian_matrix(16, 2)};
      const double nrm = std::sqrt(dir.X.squaredNorm() + dir.Y.squaredNorm());
      dir.X /= nrm;
      dir.Y /= nrm;
      const double form = hessian_quadratic_form(point, dir, M, mask);
      const double fd = hessian_second_difference(point, dir, observed, mask, 1e-4);
      worst = std::max(worst, std::abs(fd - form) / std::max(std::abs(form), 1e-10));
    }
    summaries.push_back({"hessian_fd", "n1=20;n2=16;r=2;p=0.6;samples=20;h=0.0001", worst,
                         worst <= 1e-5});
  }

  {  // Hessian bracketing on the reference instance
    const GroundTruth gt = generate_ground_truth(150, 130, 2, 2.0, derive_stream(seed, 31));
    const SamplingMask mask = sample_mask(150, 130, 0.6, derive_stream(seed, 32));
    const auto hb = hessian_bounds_check(gt, mask, 200, 1.0, derive_stream(seed, 33));
    summaries.push_back({"hessian_bounds", "n1=150;n2=130;r=2;kappa=2;p=0.6;samples=200",
                         hb.fraction, hb.fraction >= 0.95});
  }

  {  // sqrt(n p) scaling of the centered mask norm
    std::vector<double> log_n, log_gap;
    for (Index n : {50, 100, 200, 400}) {
      for (std::uint64_t s = 0; s < 5; ++s) {
        const SamplingMask mask = sample_mask(n, n, 0.3, derive_stream(seed, 41 + s) + n);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_gap.push_back(std::log(spectral_gap(mask)));
      }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(log_n.size());
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sx += log_n[i];
      sy += log_gap[i];
      sxx += log_n[i] * log_n[i];
      sxy += log_n[i] * log_gap[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    summaries.push_back({"spectral_gap_law", "n=50..400;p=0.3;seeds=5", slope,
                         slope >= 0.4 && slope <= 0.6});
  }

  {  // deviation operator bound
    int holds = 0;
    const int trials = 100;
    for (int i = 0; i < trials; ++i) {
      const std::uint64_t s = derive_stream(seed, 500 + i);
      const SamplingMask mask = sample_mask(60, 60, 0.3, derive_stream(s, 1));
      Rng rng(derive_stream(s, 2));
      const Matrix A = rng.gaussian_matrix(60, 3), B = rng.gaussian_matrix(60, 3);
      const Matrix C = rng.gaussian_matrix(60, 3), D = rng.gaussian_matrix(60, 3);
      const double dev = std::abs(sampling_deviation(A, C, B, D, mask));
      const double gap = spectral_gap(mask);
      const double bound = gap / mask.p *
                           std::min(two_inf_norm(A) * B.norm(), A.norm() * two_inf_norm(B)) *
                           std::min(two_inf_norm(C) * D.norm(), C.norm() * two_inf_norm(D));
      if (dev <= bound * (1.0 + 1e-9)) ++holds;
    }
    summaries.push_back({"deviation_bound", "n=60x60;p=0.3;trials=100",
                         static_cast<double>(holds), holds == trials});
  }

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(std::filesystem::path(out_dir) / "checks.csv");
  csv << kCheckCsvHeader << "\n";
  bool all_pass = true;
  std::cout << kCheckCsvHeader << "\n";
  for (const auto& summary : summaries) {
    const std::string line = check_csv_line(summary);
    std::cout << line << "\n";
    csv << line << "\n";
    all_pass = all_pass && summary.pass;
  }
  std::cout << (all_pass ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
  return all_pass ? 0 : 1;
}

int cmd_demo(const std::string& config_path, const std::string& out_dir) {
  Index n1 = 120, n2 = 100, r = 3;
  double kappa = 2.0, p = 0.4;
  std::uint64_t seed = 1;
  SolverConfig sc;
  if (!config_path.empty()) {
    const ExperimentConfig cfg = parse_config(config_path);
    n1 = cfg.n1.front();
    n2 = cfg.n2.front();
    r = cfg.r.front();
    kappa = cfg.kappa.front();
    p = cfg.p.front();
    seed = cfg.seeds.front();
    sc = cfg.solver;
    sc.recovery_stop_tol = cfg.success_tol;
  } else {
    sc.recovery_stop_tol = 1e-4;
  }

  std::cout << "instance: " << n1 << "x" << n2 << ", rank " << r << ", kappa " << kappa
            << ", sampling rate " << p << ", seed " << seed << "\n";
  const GroundTruth gt = generate_ground_truth(n1, n2, r, kappa, derive_stream(seed, 1));
  const SamplingMask mask = sample_mask(n1, n2, p, derive_stream(seed, 2));
  std::cout << "realized mu " << format_double(gt.mu) << ", kappa " << format_double(gt.kappa)
            << ", observed " << mask.observed.size() << " of " << n1 * n2 << " entries ("
            << format_double(mask.empirical_rate()) << ")\n";

  const RunResult result = run(gt, mask, sc, Variant::Vanilla);
  std::cout << "step size " << format_double(result.eta) << " (from init spectrum "
            << format_double(result.init_sigma1) << " .. " << format_double(result.init_sigma_r)
            << "), contraction bound rho " << format_double(result.rho) << "\n";
  std::cout << "iter  objective  aligned_frob_err\n";
  for (std::size_t i = 0; i < result.records.size();
       i += std::max<std::size_t>(1, result.records.size() / 10)) {
    const auto& rec = result.records[i];
    std::cout << rec.iter << "  " << format_double(rec.objective) << "  "
              << format_double(rec.frob_err) << "\n";
  }
  std::cout << "finished after " << result.iterations << " iterations, relative recovery error "
            << format_double(result.final_recovery_err) << "\n";

  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "demo_trajectory.csv";
  std::ofstream csv(path);
  csv << kTrajectoryCsvHeader << "\n";
  for (const auto& rec : result.records) {
    csv << rec.iter << "," << format_double(rec.objective) << "," << format_double(rec.frob_err)
        << "," << format_double(rec.spec_err) << "," << format_double(rec.two_inf_err) << ","
        << format_double(rec.balance_gap) << "\n";
  }
  std::cout << "trajectory written to " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-rank matrix completion via factorized gradient descent"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool dry_run = false;
  int threads = 0;
  std::uint64_t check_seed = 7;

  auto* run_cmd = app.add_subcommand("run", "execute a config-driven experiment sweep");
  run_cmd->add_option("--config", config_path, "experiment config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
  run_cmd->add_flag("--dry-run", dry_run, "report planned runs and exit");
  run_cmd->add_option("--threads", threads, "worker threads (overrides config)");

  auto* check_cmd = app.add_subcommand("check", "run the analytical diagnostics suite");
  check_cmd->add_option("--out", out_dir, "output directory");
  check_cmd->add_option("--seed", check_seed, "base seed for the checks");

  auto* demo_cmd = app.add_subcommand("demo", "single annotated completion run");
  demo_cmd->add_option("--config", config_path, "optional config (first cell/seed is used)");
  demo_cmd->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return cmd_run(config_path, out_dir, dry_run, threads);
    }
    if (check_cmd->parsed()) {
      return cmd_check(out_dir.empty() ? default_out() : out_dir, check_seed);
    }
    return cmd_demo(config_path, out_dir.empty() ? default_out() : out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
