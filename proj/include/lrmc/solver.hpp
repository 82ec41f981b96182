#pragma once

#include <limits>
#include <vector>

#include "lrmc/factors.hpp"
#include "lrmc/problem.hpp"

namespace lrmc {

enum class Variant { Vanilla, Projected };

struct SolverConfig {
  /// Step size; 0 means "derive from the initialization spectrum" as
  /// sigma_r / (200 sigma_1^2), the upper end of the admissible range.
  double eta = 0.0;
  long max_iters = 50000;
  /// Benchmark-mode stop: aligned stacked Frobenius error / sqrt(sigma_r) <= stop_tol,
  /// checked at record points. 0 disables.
  double stop_tol = 1e-7;
  long record_every = 50;
  /// Recovery stop: ||X Y^T - M||_F / ||M||_F <= recovery_stop_tol, checked at
  /// record points. 0 disables.
  double recovery_stop_tol = 0.0;
  /// Truth-free stop: relative objective change below 1e-12 over a 100-iteration
  /// window. Fires only once the iteration is effectively stationary.
  bool plateau_stop = true;
  /// Derive the step size from the oracle spectrum instead of the observable
  /// initialization spectrum.
  bool use_oracle_spectrum = false;
  /// Slack on the oracle l_{2,inf} radii of the projected variant: row radius
  /// (1 + slack) * ||U||_{2,inf} for X and likewise for Y. The default 1.0
  /// reproduces the factor-2 radius convention of projected baselines; the
  /// spectral initialization transient overshoots the oracle radius by up to
  /// ~50% at desk scale, so slacks below ~0.6 make the projection active early.
  double projection_slack = 1.0;
  /// Keep the per-iteration objective values in the result.
  bool keep_objective_history = false;

  bool operator==(const SolverConfig&) const = default;

  void validate() const {
    if (eta < 0.0) throw std::invalid_argument("SolverConfig: eta must be >= 0");
    if (max_iters < 0) throw std::invalid_argument("SolverConfig: max_iters must be >= 0");
    if (stop_tol < 0.0) throw std::invalid_argument("SolverConfig: stop_tol must be >= 0");
    if (record_every < 1) throw std::invalid_argument("SolverConfig: record_every must be >= 1");
    if (recovery_stop_tol < 0.0) {
      throw std::invalid_argument("SolverConfig: recovery_stop_tol must be >= 0");
    }
    if (projection_slack < 0.0) {
      throw std::invalid_argument("SolverConfig: projection_slack must be >= 0");
    }
  }
};

/// Per-iteration metrics of one run. The error columns are the aligned
/// stacked errors against the ground-truth factors.
struct TrajectoryRecord {
  long iter = 0;
  double objective = 0.0;
  double frob_err = 0.0;
  double spec_err = 0.0;
  double two_inf_err = 0.0;
  double balance_gap = 0.0;
};

/// CSV header for trajectory streams.
inline constexpr const char* kTrajectoryCsvHeader =
    "iter,objective,frob_err,spec_err,two_inf_err,balance_gap";

struct RunResult {
  std::vector<TrajectoryRecord> records;
  FactorPair final_factors;
  long iterations = 0;            // number of gradient steps taken
  double eta = 0.0;               // step size actually used
  double rho = 1.0;               // 1 - 0.05 * eta * sigma_r(M)
  double final_recovery_err = std::numeric_limits<double>::quiet_NaN();
  bool recovered = false;         // recovery_stop_tol reached
  long iters_to_recovery = -1;    // first record iteration meeting recovery_stop_tol
  bool diverged = false;          // non-finite iterates or objective encountered
  bool plateaued = false;
  double init_sigma1 = 0.0;       // leading value of the initialization spectrum
  double init_sigma_r = 0.0;
  std::vector<double> objective_history;  // filled when keep_objective_history
};

/// Observed-entry misfit plus balance regularizer:
/// (1/2p) ||P_Omega(X Y^T) - observed_M||_F^2 + (1/8) ||X^T X - Y^T Y||_F^2.
/// observed_M must already have unobserved entries zeroed.
double objective(const FactorPair& fp, const Matrix& observed_M, const SamplingMask& mask);

/// Gradient of the objective:
///   d/dX = (1/p) P_Omega(X Y^T - M) Y + (1/2) X (X^T X - Y^T Y)
///   d/dY = (1/p) [P_Omega(X Y^T - M)]^T X + (1/2) Y (Y^T Y - X^T X)
FactorPair gradient(const FactorPair& fp, const Matrix& observed_M, const SamplingMask& mask);

/// Factor pair from the top-r SVD of (1/p) * observed_M with square-root
/// splitting of the spectrum, so X0^T X0 = Y0^T Y0 = Sigma0.
FactorPair spectral_init(const Matrix& observed_M, const SamplingMask& mask, Index r);

/// spectral_init together with the initialization spectrum Sigma0.
struct SpectralInit {
  FactorPair factors;
  Vector singulars;
};
SpectralInit spectral_init_full(const Matrix& observed_M, const SamplingMask& mask, Index r);

/// One plain gradient step with step size eta.
FactorPair gd_step(const FactorPair& fp, const Matrix& observed_M, const SamplingMask& mask,
                   double eta);

/// Admissible step-size range (eta_lo, eta_hi) = (sigma_r/(1000 sigma_1^2),
/// sigma_r/(200 sigma_1^2)); the harness defaults to eta_hi.
std::pair<double, double> default_step_size(double sigma1, double sigmar);

/// Gradient step followed by row-wise l2 clipping of X to radius_X and of Y to
/// radius_Y. Rows already inside their ball are untouched; an infinite radius
/// disables the projection for that factor.
FactorPair projected_gd_step(const FactorPair& fp, const Matrix& observed_M,
                             const SamplingMask& mask, double eta, double radius_X,
                             double radius_Y);

/// Full benchmark run: spectral initialization, then up to cfg.max_iters steps
/// of the requested variant, with metrics recorded every cfg.record_every
/// iterations and at the final iterate. The solver consumes only P_Omega(M);
/// the ground truth enters through the recorded metrics and stop rules.
RunResult run(const GroundTruth& gt, const SamplingMask& mask, const SolverConfig& cfg,
              Variant variant);

}  // namespace lrmc
