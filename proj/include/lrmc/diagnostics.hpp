#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrmc/factors.hpp"
#include "lrmc/problem.hpp"

namespace lrmc {

/// One sampled evaluation of the Hessian quadratic form against the
/// sigma_r/5 and 5*sigma_1 brackets.
struct HessianSample {
  double quad_form = 0.0;
  double direction_norm_sq = 0.0;  // ||D_X||_F^2 + ||D_Y||_F^2
  bool lower_ok = false;
  bool upper_ok = false;
};

struct HessianBoundsResult {
  double fraction = 0.0;  // fraction of samples inside both brackets
  std::vector<HessianSample> samples;
};

/// Quadratic form of the objective's Hessian at (X, Y) applied to the
/// direction (D_X, D_Y):
///   (2/p) <P_Omega(X Y^T - M), P_Omega(D_X D_Y^T)>
/// + (1/p) ||P_Omega(D_X Y^T + X D_Y^T)||_F^2
/// + (1/2) <X^T X - Y^T Y, D_X^T D_X - D_Y^T D_Y>
/// + (1/4) ||D_X^T X + X^T D_X - Y^T D_Y - D_Y^T Y||_F^2.
/// gt_M is the full true matrix (this is a truth-aware diagnostic).
double hessian_quadratic_form(const FactorPair& point, const FactorPair& direction,
                              const Matrix& gt_M, const SamplingMask& mask);

/// Samples (point, direction) pairs and reports the fraction on which
///   sigma_r/5 * ||D||_F^2 <= form <= 5*sigma_1 * ||D||_F^2.
/// Points are Gaussian perturbations of the truth rescaled into the
/// l_{2,inf} ball of radius neighborhood_scale * sqrt(sigma_1)/(500 kappa
/// sqrt(n1+n2)). Directions take the structured shape S1 * R - S2 where both
/// stacked pairs are Gaussian perturbations of the truth rescaled into the
/// spectral ball of radius sqrt(sigma_1)/(500 kappa) and R is the Procrustes
/// alignment of S1 with S2. A fraction (not an assertion) is returned because
/// the bracketing is a high-probability statement over the mask.
HessianBoundsResult hessian_bounds_check(const GroundTruth& gt, const SamplingMask& mask,
                                         int n_samples, double neighborhood_scale,
                                         std::uint64_t seed);

/// Empirical-minus-population deviation of sampled inner products:
///   (1/p) <P_Omega(A C^T), P_Omega(B D^T)> - <A C^T, B D^T>.
/// A, B have n1 rows; C, D have n2 rows.
double sampling_deviation(const Matrix& A, const Matrix& C, const Matrix& B, const Matrix& D,
                          const SamplingMask& mask);

/// Spectral norm of the centered 0/1 mask matrix, ||Omega - p J||.
double spectral_gap(const SamplingMask& mask);

struct GradientFdReport {
  double max_relative_error = 0.0;  // |fd - <grad, d>| / max(|<grad, d>|, 1e-10)
  double max_abs_discrepancy = 0.0;
};

/// Central-difference check of the analytic gradient along n_directions random
/// unit directions (unit stacked Frobenius norm): fd = (f(w+hd) - f(w-hd)) / 2h.
GradientFdReport gradient_fd_check(const FactorPair& fp, const Matrix& observed_M,
                                   const SamplingMask& mask, int n_directions, double h,
                                   std::uint64_t seed);

/// One-line structured summary of a diagnostic check for the harness CSVs.
struct CheckSummary {
  std::string name;
  std::string params;  // "key=value;key=value"
  double statistic = 0.0;
  bool pass = false;
};

inline constexpr const char* kCheckCsvHeader = "name,params,statistic,pass";

std::string check_csv_line(const CheckSummary& summary);

}  // namespace lrmc
