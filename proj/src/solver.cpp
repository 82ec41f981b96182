#include "lrmc/solver.hpp"

#include <cmath>

#include "lrmc/linalg.hpp"
#include "lrmc/metrics.hpp"

namespace lrmc {

namespace {

void check_shapes(const FactorPair& fp, const Matrix& observed_M, const SamplingMask& mask,
                  const std::string& what) {
  require_consistent(fp, what);
  if (fp.X.rows() != mask.n1 || fp.Y.rows() != mask.n2) {
    throw std::invalid_argument(what + ": factor shapes do not match mask");
  }
  if (observed_M.rows() != mask.n1 || observed_M.cols() != mask.n2) {
    throw std::invalid_argument(what + ": observed matrix shape does not match mask");
  }
}

// Masked residual P_Omega(X Y^T - M); observed_M already carries the mask.
Matrix masked_residual(const FactorPair& fp, const Matrix& observed_M,
                       const SamplingMask& mask) {
  Matrix R = fp.X * fp.Y.transpose();
  R = mask.view.select(R, Matrix::Zero(R.rows(), R.cols()));
  R -= observed_M;
  return R;
}

FactorPair gradient_from_residual(const FactorPair& fp, const Matrix& residual, double p) {
  const Matrix gram_gap = fp.X.transpose() * fp.X - fp.Y.transpose() * fp.Y;
  FactorPair grad;
  grad.X = residual * fp.Y / p + 0.5 * fp.X * gram_gap;
  grad.Y = residual.transpose() * fp.X / p - 0.5 * fp.Y * gram_gap;
  return grad;
}

void clip_rows(Matrix& A, double radius) {
  if (!std::isfinite(radius)) return;
  for (Index i = 0; i < A.rows(); ++i) {
    const double nrm = A.row(i).norm();
    if (nrm > radius) A.row(i) *= radius / nrm;
  }
}

}  // namespace

double objective(const FactorPair& fp, const Matrix& observed_M, const SamplingMask& mask) {
  check_shapes(fp, observed_M, mask, "objective");
  const Matrix R = masked_residual(fp, observed_M, mask);
  const double balance = balance_gap(fp);
  return R.squaredNorm() / (2.0 * mask.p) + balance * balance / 8.0;
}

FactorPair gradient(const FactorPair& fp, const Matrix& observed_M, const SamplingMask& mask) {
  check_shapes(fp, observed_M, mask, "gradient");
  return gradient_from_residual(fp, masked_residual(fp, observed_M, mask), mask.p);
}

SpectralInit spectral_init_full(const Matrix& observed_M, const SamplingMask& mask, Index r) {
  if (observed_M.rows() != mask.n1 || observed_M.cols() != mask.n2) {
    throw std::invalid_argument("spectral_init: observed matrix shape does not match mask");
  }
  const Matrix M0 = observed_M / mask.p;
  const PartialSVD svd = top_r_svd(M0, r);
  const Vector root = svd.singulars.cwiseSqrt();
  SpectralInit init;
  init.factors.X = svd.left * root.asDiagonal();
  init.factors.Y = svd.right * root.asDiagonal();
  init.singulars = svd.singulars;
  return init;
}

FactorPair spectral_init(const Matrix& observed_M, const SamplingMask& mask, Index r) {
  return spectral_init_full(observed_M, mask, r).factors;
}

FactorPair gd_step(const FactorPair& fp, const Matrix& observed_M, const SamplingMask& mask,
                   double eta) {
  if (eta < 0.0) throw std::invalid_argument("gd_step: eta must be >= 0");
  const FactorPair grad = gradient(fp, observed_M, mask);
  return {fp.X - eta * grad.X, fp.Y - eta * grad.Y};
}

std::pair<double, double> default_step_size(double sigma1, double sigmar) {
  if (!(sigma1 >= sigmar) || !(sigmar > 0.0)) {
    throw std::invalid_argument("default_step_size: need sigma1 >= sigmar > 0");
  }
  const double denom = sigma1 * sigma1;
  return {sigmar / (1000.0 * denom), sigmar / (200.0 * denom)};
}

FactorPair projected_gd_step(const FactorPair& fp, const Matrix& observed_M,
                             const SamplingMask& mask, double eta, double radius_X,
                             double radius_Y) {
  if (!(radius_X > 0.0) || !(radius_Y > 0.0)) {
    throw std::invalid_argument("projected_gd_step: radii must be positive");
  }
  FactorPair next = gd_step(fp, observed_M, mask, eta);
  clip_rows(next.X, radius_X);
  clip_rows(next.Y, radius_Y);
  return next;
}

RunResult run(const GroundTruth& gt, const SamplingMask& mask, const SolverConfig& cfg,
              Variant variant) {
  cfg.validate();
  const Matrix M = gt.matrix();
  const Matrix observed = project_omega(M, mask);
  const double norm_M = M.norm();
  const double sqrt_sigma_r = std::sqrt(gt.sigma_r());

  RunResult result;
  SpectralInit init = spectral_init_full(observed, mask, gt.r);
  result.init_sigma1 = init.singulars(0);
  result.init_sigma_r = init.singulars(gt.r - 1);

  double eta = cfg.eta;
  if (eta == 0.0) {
    const double s1 = cfg.use_oracle_spectrum ? gt.sigma1() : result.init_sigma1;
    const double sr = cfg.use_oracle_spectrum ? gt.sigma_r() : result.init_sigma_r;
    eta = default_step_size(s1, sr).second;
  }
  result.eta = eta;
  result.rho = 1.0 - 0.05 * eta * gt.sigma_r();

  const double radius_X = (1.0 + cfg.projection_slack) * two_inf_norm(gt.U);
  const double radius_Y = (1.0 + cfg.projection_slack) * two_inf_norm(gt.V);

  FactorPair fp = std::move(init.factors);

  // Ring buffer of recent objective values for the plateau rule.
  constexpr long kPlateauWindow = 100;
  std::vector<double> recent(kPlateauWindow + 1,
                             std::numeric_limits<double>::quiet_NaN());

  long t = 0;
  while (true) {
    // Residual and Gram gap feed both the objective and the gradient.
    const Matrix residual = masked_residual(fp, observed, mask);
    const Matrix gram_gap = fp.X.transpose() * fp.X - fp.Y.transpose() * fp.Y;
    const double balance = gram_gap.norm();
    const double f = residual.squaredNorm() / (2.0 * mask.p) + balance * balance / 8.0;
    if (cfg.keep_objective_history) result.objective_history.push_back(f);

    bool stopping = false;
    if (!std::isfinite(f) || !fp.X.allFinite() || !fp.Y.allFinite()) {
      result.diverged = true;
      stopping = true;
    }
    if (cfg.plateau_stop && t >= kPlateauWindow) {
      const double f_old = recent[t % (kPlateauWindow + 1)];
      if (std::isfinite(f_old) && std::abs(f_old - f) <= 1e-12 * std::max(f_old, 1e-300)) {
        result.plateaued = true;
        stopping = true;
      }
    }
    recent[t % (kPlateauWindow + 1)] = f;
    if (t >= cfg.max_iters) stopping = true;

    if ((t % cfg.record_every == 0) || stopping) {
      const AlignedErrors err = result.diverged ? AlignedErrors{} : aligned_errors(fp, gt);
      TrajectoryRecord rec;
      rec.iter = t;
      rec.objective = f;
      rec.frob_err = err.frob;
      rec.spec_err = err.spec;
      rec.two_inf_err = err.two_inf;
      rec.balance_gap = balance;
      result.records.push_back(rec);

      if (!result.diverged) {
        const double recovery = (fp.product() - M).norm() / norm_M;
        if (cfg.recovery_stop_tol > 0.0 && recovery <= cfg.recovery_stop_tol) {
          if (!result.recovered) result.iters_to_recovery = t;
          result.recovered = true;
          stopping = true;
        }
        if (cfg.stop_tol > 0.0 && err.frob / sqrt_sigma_r <= cfg.stop_tol) {
          stopping = true;
        }
      }
    }

    if (stopping) break;

    // Same arithmetic as gd_step / projected_gd_step, sharing the residual.
    FactorPair next;
    next.X = fp.X - eta * (residual * fp.Y / mask.p + 0.5 * fp.X * gram_gap);
    next.Y = fp.Y - eta * (residual.transpose() * fp.X / mask.p - 0.5 * fp.Y * gram_gap);
    if (variant == Variant::Projected) {
      clip_rows(next.X, radius_X);
      clip_rows(next.Y, radius_Y);
    }
    fp = std::move(next);
    ++t;
  }

  result.iterations = t;
  result.final_factors = std::move(fp);
  if (!result.diverged) {
    result.final_recovery_err = (result.final_factors.product() - M).norm() / norm_M;
  } else {
    result.final_recovery_err = std::numeric_limits<double>::infinity();
  }
  return result;
}

}  // namespace lrmc
