#include "lrmc/diagnostics.hpp"

#include <cmath>

#include "lrmc/csv.hpp"
#include "lrmc/linalg.hpp"
#include "lrmc/rng.hpp"
#include "lrmc/solver.hpp"

namespace lrmc {

namespace {

Matrix masked(const Matrix& A, const SamplingMask& mask) {
  return mask.view.select(A, Matrix::Zero(A.rows(), A.cols()));
}

}  // namespace

double hessian_quadratic_form(const FactorPair& point, const FactorPair& direction,
                              const Matrix& gt_M, const SamplingMask& mask) {
  require_consistent(point, "hessian_quadratic_form(point)");
  require_consistent(direction, "hessian_quadratic_form(direction)");
  if (point.X.rows() != direction.X.rows() || point.Y.rows() != direction.Y.rows() ||
      point.rank() != direction.rank()) {
    throw std::invalid_argument("hessian_quadratic_form: point/direction shape mismatch");
  }
  if (gt_M.rows() != mask.n1 || gt_M.cols() != mask.n2 || point.X.rows() != mask.n1 ||
      point.Y.rows() != mask.n2) {
    throw std::invalid_argument("hessian_quadratic_form: shapes do not match mask");
  }

  const Matrix& X = point.X;
  const Matrix& Y = point.Y;
  const Matrix& DX = direction.X;
  const Matrix& DY = direction.Y;
  const double p = mask.p;

  const Matrix residual_omega = masked(X * Y.transpose() - gt_M, mask);
  const Matrix cross = masked(DX * DY.transpose(), mask);
  const Matrix mixed = masked(DX * Y.transpose() + X * DY.transpose(), mask);
  const Matrix gram_gap = X.transpose() * X - Y.transpose() * Y;
  const Matrix dir_gap = DX.transpose() * DX - DY.transpose() * DY;
  const Matrix sym = DX.transpose() * X + X.transpose() * DX - Y.transpose() * DY -
                     DY.transpose() * Y;

  return 2.0 / p * residual_omega.cwiseProduct(cross).sum() +
         mixed.squaredNorm() / p +
         0.5 * gram_gap.cwiseProduct(dir_gap).sum() +
         0.25 * sym.squaredNorm();
}

namespace {

// Gaussian stacked perturbation rescaled to a target l_{2,inf} norm.
FactorPair perturb_two_inf(const GroundTruth& gt, Rng& rng, double target) {
  Matrix G = rng.gaussian_matrix(gt.n1 + gt.n2, gt.r);
  const double nrm = two_inf_norm(G);
  if (nrm > 0.0 && target > 0.0) {
    G *= target / nrm;
  } else {
    G.setZero();
  }
  return {gt.U + G.topRows(gt.n1), gt.V + G.bottomRows(gt.n2)};
}

// Gaussian stacked perturbation rescaled to a target spectral norm.
FactorPair perturb_spectral(const GroundTruth& gt, Rng& rng, double target) {
  Matrix G = rng.gaussian_matrix(gt.n1 + gt.n2, gt.r);
  Eigen::JacobiSVD<Matrix> svd(G);
  const double nrm = svd.singularValues()(0);
  if (nrm > 0.0 && target > 0.0) {
    G *= target / nrm;
  } else {
    G.setZero();
  }
  return {gt.U + G.topRows(gt.n1), gt.V + G.bottomRows(gt.n2)};
}

}  // namespace

HessianBoundsResult hessian_bounds_check(const GroundTruth& gt, const SamplingMask& mask,
                                         int n_samples, double neighborhood_scale,
                                         std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("hessian_bounds_check: n_samples must be >= 1");
  if (neighborhood_scale < 0.0 || neighborhood_scale > 1.0) {
    throw std::invalid_argument("hessian_bounds_check: neighborhood_scale must be in [0, 1]");
  }
  const Matrix M = gt.matrix();
  const double sigma1 = gt.sigma1();
  const double sigma_r = gt.sigma_r();
  const double point_radius =
      neighborhood_scale * std::sqrt(sigma1) /
      (500.0 * gt.kappa * std::sqrt(static_cast<double>(gt.n1 + gt.n2)));
  const double pair_radius = std::sqrt(sigma1) / (500.0 * gt.kappa);

  Rng rng(derive_stream(seed, 0x4E55ULL));
  HessianBoundsResult out;
  out.samples.reserve(n_samples);
  int in_bounds = 0;
  for (int s = 0; s < n_samples; ++s) {
    const FactorPair point = perturb_two_inf(gt, rng, rng.uniform() * point_radius);
    const FactorPair pair1 = perturb_spectral(gt, rng, rng.uniform() * pair_radius);
    const FactorPair pair2 = perturb_spectral(gt, rng, rng.uniform() * pair_radius);
    const Matrix S1 = stacked(pair1);
    const Matrix S2 = stacked(pair2);
    const Matrix R = procrustes(S1, S2);
    const Matrix D = S1 * R - S2;

    FactorPair direction{D.topRows(gt.n1), D.bottomRows(gt.n2)};
    HessianSample sample;
    sample.direction_norm_sq = D.squaredNorm();
    sample.quad_form = hessian_quadratic_form(point, direction, M, mask);
    const double slack = 1e-12 * sigma1 * sample.direction_norm_sq;
    sample.lower_ok = sample.quad_form >= sigma_r / 5.0 * sample.direction_norm_sq - slack;
    sample.upper_ok = sample.quad_form <= 5.0 * sigma1 * sample.direction_norm_sq + slack;
    if (sample.lower_ok && sample.upper_ok) ++in_bounds;
    out.samples.push_back(sample);
  }
  out.fraction = static_cast<double>(in_bounds) / static_cast<double>(n_samples);
  return out;
}

double sampling_deviation(const Matrix& A, const Matrix& C, const Matrix& B, const Matrix& D,
                          const SamplingMask& mask) {
  if (A.rows() != mask.n1 || B.rows() != mask.n1 || C.rows() != mask.n2 ||
      D.rows() != mask.n2) {
    throw std::invalid_argument("sampling_deviation: factor row counts do not match mask");
  }
  if (A.cols() != C.cols() || B.cols() != D.cols()) {
    throw std::invalid_argument("sampling_deviation: inner dimensions do not match per pair");
  }
  const Matrix AC = A * C.transpose();
  const Matrix BD = B * D.transpose();
  // <P(AC), P(BD)> = <P(AC), BD> since the projector is a diagonal 0/1 weighting.
  const double empirical = masked(AC, mask).cwiseProduct(BD).sum() / mask.p;
  const double population = AC.cwiseProduct(BD).sum();
  return empirical - population;
}

double spectral_gap(const SamplingMask& mask) {
  Matrix centered = mask.view.cast<double>().matrix();
  centered.array() -= mask.p;
  return spectral_norm(centered);
}

GradientFdReport gradient_fd_check(const FactorPair& fp, const Matrix& observed_M,
                                   const SamplingMask& mask, int n_directions, double h,
                                   std::uint64_t seed) {
  if (!(h > 0.0)) throw std::invalid_argument("gradient_fd_check: h must be positive");
  if (n_directions < 1) {
    throw std::invalid_argument("gradient_fd_check: n_directions must be >= 1");
  }
  const FactorPair grad = gradient(fp, observed_M, mask);
  Rng rng(derive_stream(seed, 0xFDFDULL));
  GradientFdReport report;
  for (int k = 0; k < n_directions; ++k) {
    FactorPair dir{rng.gaussian_matrix(fp.X.rows(), fp.X.cols()),
                   rng.gaussian_matrix(fp.Y.rows(), fp.Y.cols())};
    const double nrm =
        std::sqrt(dir.X.squaredNorm() + dir.Y.squaredNorm());
    dir.X /= nrm;
    dir.Y /= nrm;

    const double analytic =
        grad.X.cwiseProduct(dir.X).sum() + grad.Y.cwiseProduct(dir.Y).sum();
    const FactorPair plus{fp.X + h * dir.X, fp.Y + h * dir.Y};
    const FactorPair minus{fp.X - h * dir.X, fp.Y - h * dir.Y};
    const double fd =
        (objective(plus, observed_M, mask) - objective(minus, observed_M, mask)) / (2.0 * h);

    const double discrepancy = std::abs(fd - analytic);
    report.max_abs_discrepancy = std::max(report.max_abs_discrepancy, discrepancy);
    report.max_relative_error =
        std::max(report.max_relative_error, discrepancy / std::max(std::abs(analytic), 1e-10));
  }
  return report;
}

std::string check_csv_line(const CheckSummary& summary) {
  return summary.name + "," + summary.params + "," + format_double(summary.statistic) + "," +
         (summary.pass ? "1" : "0");
}

}  // namespace lrmc
