#include "lrmc/leaveoneout.hpp"

#include <Eigen/SVD>
#include <thread>

#include "lrmc/linalg.hpp"
#include "lrmc/metrics.hpp"

namespace lrmc {

namespace {

// W(A) = (1/p) P over the mask with line l removed, plus the complete line l:
// everywhere the rescaled masked projection, except line l which is A's line.
Matrix apply_loo_weighting(const Matrix& A, const SamplingMask& mask, LooIndex l) {
  Matrix W = mask.view.select(A, Matrix::Zero(A.rows(), A.cols()));
  W /= mask.p;
  if (l.is_row(mask.n1)) {
    W.row(l.axis_index(mask.n1)) = A.row(l.axis_index(mask.n1));
  } else {
    W.col(l.axis_index(mask.n1)) = A.col(l.axis_index(mask.n1));
  }
  return W;
}

FactorPair loo_step_one(const FactorPair& fp, const Matrix& M, const SamplingMask& mask,
                        LooIndex l, double eta) {
  const Matrix D = fp.X * fp.Y.transpose() - M;
  const Matrix W = apply_loo_weighting(D, mask, l);
  const Matrix gram_gap = fp.X.transpose() * fp.X - fp.Y.transpose() * fp.Y;
  FactorPair next;
  next.X = fp.X - eta * (W * fp.Y + 0.5 * fp.X * gram_gap);
  next.Y = fp.Y - eta * (W.transpose() * fp.X - 0.5 * fp.Y * gram_gap);
  return next;
}

void check_m_shape(const Matrix& M, const SamplingMask& mask, const std::string& what) {
  if (M.rows() != mask.n1 || M.cols() != mask.n2) {
    throw std::invalid_argument(what + ": matrix shape does not match mask");
  }
}

}  // namespace

Matrix loo_matrix(const Matrix& M, const SamplingMask& mask, LooIndex l) {
  check_m_shape(M, mask, "loo_matrix");
  l.validate(mask.n1, mask.n2);
  return apply_loo_weighting(M, mask, l);
}

FactorPair loo_init(const Matrix& M, const SamplingMask& mask, LooIndex l, Index r) {
  const PartialSVD svd = top_r_svd(loo_matrix(M, mask, l), r);
  const Vector root = svd.singulars.cwiseSqrt();
  return {svd.left * root.asDiagonal(), svd.right * root.asDiagonal()};
}

LooEnsemble make_loo_ensemble(const Matrix& M, const SamplingMask& mask, Index r) {
  std::vector<int> labels(static_cast<std::size_t>(mask.n1 + mask.n2));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i) + 1;
  return make_loo_ensemble(M, mask, r, labels);
}

LooEnsemble make_loo_ensemble(const Matrix& M, const SamplingMask& mask, Index r,
                              const std::vector<int>& labels) {
  check_m_shape(M, mask, "make_loo_ensemble");
  LooEnsemble ensemble;
  ensemble.n1 = mask.n1;
  ensemble.n2 = mask.n2;
  ensemble.r = r;
  ensemble.t = 0;
  ensemble.labels.reserve(labels.size());
  ensemble.sequences.reserve(labels.size());
  for (int label : labels) {
    LooIndex idx{label};
    idx.validate(mask.n1, mask.n2);
    ensemble.labels.push_back(idx);
    ensemble.sequences.push_back(loo_init(M, mask, idx, r));
  }
  return ensemble;
}

LooEnsemble loo_step(const LooEnsemble& ensemble, const Matrix& M, const SamplingMask& mask,
                     double eta, int threads) {
  check_m_shape(M, mask, "loo_step");
  if (eta < 0.0) throw std::invalid_argument("loo_step: eta must be >= 0");
  LooEnsemble next;
  next.n1 = ensemble.n1;
  next.n2 = ensemble.n2;
  next.r = ensemble.r;
  next.t = ensemble.t + 1;
  next.labels = ensemble.labels;
  next.sequences.resize(ensemble.sequences.size());

  const std::size_t count = ensemble.sequences.size();
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      next.sequences[i] =
          loo_step_one(ensemble.sequences[i], M, mask, ensemble.labels[i], eta);
    }
  };

  const int used = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (used == 1) {
    work(0, count);
  } else {
    // Each worker owns a disjoint slot range; the merge is deterministic.
    std::vector<std::thread> pool;
    pool.reserve(used);
    const std::size_t chunk = (count + used - 1) / used;
    for (int w = 0; w < used; ++w) {
      const std::size_t begin = std::min(count, static_cast<std::size_t>(w) * chunk);
      const std::size_t end = std::min(count, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return next;
}

LooAlignments loo_alignments(const FactorPair& main, const LooEnsemble& ensemble,
                             const GroundTruth& gt) {
  const Matrix Z = vstack(gt.U, gt.V);
  LooAlignments out;
  const Matrix S_main = stacked(main);
  out.main_rotation = procrustes(S_main, Z);
  const Matrix aligned_main = S_main * out.main_rotation;
  out.loo_rotations.reserve(ensemble.sequences.size());
  out.pair_rotations.reserve(ensemble.sequences.size());
  for (const FactorPair& seq : ensemble.sequences) {
    const Matrix S = stacked(seq);
    out.loo_rotations.push_back(procrustes(S, Z));
    out.pair_rotations.push_back(procrustes(S, aligned_main));
  }
  return out;
}

LooDiagnostics loo_diagnostics(const FactorPair& main, const LooEnsemble& ensemble,
                               const GroundTruth& gt) {
  const Matrix Z = vstack(gt.U, gt.V);
  const Matrix S_main = stacked(main);
  const Matrix R = procrustes(S_main, Z);
  const Matrix aligned_main = S_main * R;
  const Matrix E_main = aligned_main - Z;

  LooDiagnostics d;
  d.t = ensemble.t;
  d.subset = !ensemble.full();
  Eigen::JacobiSVD<Matrix> svd(E_main);
  d.main_err_spec = svd.singularValues()(0);
  d.main_err_2inf = two_inf_norm(E_main);

  for (std::size_t i = 0; i < ensemble.sequences.size(); ++i) {
    const Matrix S = stacked(ensemble.sequences[i]);
    const Index row = static_cast<Index>(ensemble.labels[i].l) - 1;  // stacked row
    const Matrix R_l = procrustes(S, Z);
    const double row_err = (S.row(row) * R_l - Z.row(row)).norm();
    const Matrix T_l = procrustes(S, aligned_main);
    const double pair_dist = (aligned_main - S * T_l).norm();
    d.max_rowwise_err = std::max(d.max_rowwise_err, row_err);
    d.max_pair_dist_frob = std::max(d.max_pair_dist_frob, pair_dist);
  }
  return d;
}

LooRun run_with_loo(const GroundTruth& gt, const SamplingMask& mask, const SolverConfig& cfg,
                    int threads, const std::vector<int>& labels) {
  cfg.validate();
  const Matrix M = gt.matrix();
  const Matrix observed = project_omega(M, mask);
  const double norm_M = M.norm();
  const double sqrt_sigma_r = std::sqrt(gt.sigma_r());

  LooRun out;
  SpectralInit init = spectral_init_full(observed, mask, gt.r);
  out.main.init_sigma1 = init.singulars(0);
  out.main.init_sigma_r = init.singulars(gt.r - 1);

  double eta = cfg.eta;
  if (eta == 0.0) {
    const double s1 = cfg.use_oracle_spectrum ? gt.sigma1() : out.main.init_sigma1;
    const double sr = cfg.use_oracle_spectrum ? gt.sigma_r() : out.main.init_sigma_r;
    eta = default_step_size(s1, sr).second;
  }
  out.main.eta = eta;
  out.main.rho = 1.0 - 0.05 * eta * gt.sigma_r();

  FactorPair fp = std::move(init.factors);
  LooEnsemble ensemble = labels.empty() ? make_loo_ensemble(M, mask, gt.r)
                                        : make_loo_ensemble(M, mask, gt.r, labels);

  long t = 0;
  while (true) {
    bool stopping = t >= cfg.max_iters;
    if (!fp.X.allFinite() || !fp.Y.allFinite()) {
      out.main.diverged = true;
      stopping = true;
    }

    if ((t % cfg.record_every == 0) || stopping) {
      const double f = objective(fp, observed, mask);
      const AlignedErrors err = out.main.diverged ? AlignedErrors{} : aligned_errors(fp, gt);
      TrajectoryRecord rec;
      rec.iter = t;
      rec.objective = f;
      rec.frob_err = err.frob;
      rec.spec_err = err.spec;
      rec.two_inf_err = err.two_inf;
      rec.balance_gap = balance_gap(fp);
      out.main.records.push_back(rec);
      if (!out.main.diverged) {
        out.diagnostics.push_back(loo_diagnostics(fp, ensemble, gt));
        const double recovery = (fp.product() - M).norm() / norm_M;
        if (cfg.recovery_stop_tol > 0.0 && recovery <= cfg.recovery_stop_tol) {
          if (!out.main.recovered) out.main.iters_to_recovery = t;
          out.main.recovered = true;
          stopping = true;
        }
        if (cfg.stop_tol > 0.0 && err.frob / sqrt_sigma_r <= cfg.stop_tol) stopping = true;
      }
    }

    if (stopping) break;

    fp = gd_step(fp, observed, mask, eta);
    ensemble = loo_step(ensemble, M, mask, eta, threads);
    ++t;
  }

  out.main.iterations = t;
  out.main.final_factors = std::move(fp);
  out.main.final_recovery_err =
      out.main.diverged ? std::numeric_limits<double>::infinity()
                        : (out.main.final_factors.product() - M).norm() / norm_M;
  return out;
}

}  // namespace lrmc
