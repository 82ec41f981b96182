#pragma once

#include <vector>

#include "lrmc/factors.hpp"
#include "lrmc/problem.hpp"
#include "lrmc/solver.hpp"

namespace lrmc {

/// 1-based label of a leave-one-out sequence: rows are 1..n1, columns are
/// n1+1..n1+n2 (so label l > n1 refers to column l - n1).
struct LooIndex {
  int l = 1;

  bool is_row(Index n1) const { return l <= n1; }
  Axis axis(Index n1) const { return is_row(n1) ? Axis::Row : Axis::Column; }
  /// 0-based index along the axis.
  Index axis_index(Index n1) const { return is_row(n1) ? l - 1 : l - n1 - 1; }
  void validate(Index n1, Index n2) const {
    if (l < 1 || l > n1 + n2) {
      throw std::out_of_range("LooIndex: label " + std::to_string(l) + " not in [1, " +
                              std::to_string(n1 + n2) + "]");
    }
  }
};

/// The auxiliary factor trajectories, one per tracked row/column label, all at
/// a shared iteration counter. By default all n1+n2 labels are tracked; a
/// subset may be requested for cheaper diagnostics.
struct LooEnsemble {
  Index n1 = 0, n2 = 0, r = 0;
  long t = 0;
  std::vector<LooIndex> labels;
  std::vector<FactorPair> sequences;  // parallel to labels

  bool full() const { return static_cast<Index>(labels.size()) == n1 + n2; }
};

/// Observation surrogate of one leave-one-out sequence: agrees with
/// (1/p) P_Omega(M) everywhere except line l, which is the complete line of M.
Matrix loo_matrix(const Matrix& M, const SamplingMask& mask, LooIndex l);

/// Spectral initialization computed from loo_matrix instead of (1/p) P_Omega(M).
FactorPair loo_init(const Matrix& M, const SamplingMask& mask, LooIndex l, Index r);

/// Ensemble of loo_init pairs for every label (or for the given subset).
LooEnsemble make_loo_ensemble(const Matrix& M, const SamplingMask& mask, Index r);
LooEnsemble make_loo_ensemble(const Matrix& M, const SamplingMask& mask, Index r,
                              const std::vector<int>& labels);

/// Advances every tracked sequence by one gradient step of its own modified
/// objective, in which line l is treated as fully observed. The sequences are
/// mutually independent; `threads` > 1 advances them in parallel with a
/// deterministic merge (results are identical for any thread count).
LooEnsemble loo_step(const LooEnsemble& ensemble, const Matrix& M, const SamplingMask& mask,
                     double eta, int threads = 1);

/// Alignment matrices relating the main iterate, the auxiliary iterates and
/// the ground truth: main_rotation aligns the stacked main pair with [U; V],
/// loo_rotations[i] aligns stacked sequence i with [U; V], and
/// pair_rotations[i] aligns stacked sequence i with the aligned main pair.
struct LooAlignments {
  Matrix main_rotation;
  std::vector<Matrix> loo_rotations;
  std::vector<Matrix> pair_rotations;
};

LooAlignments loo_alignments(const FactorPair& main, const LooEnsemble& ensemble,
                             const GroundTruth& gt);

/// The four per-iteration diagnostics tracked by the induction argument:
/// spectral and l_{2,inf} errors of the aligned main pair, the worst aligned
/// row error of each sequence at its own row, and the largest Frobenius
/// distance between the aligned main pair and an aligned sequence.
struct LooDiagnostics {
  long t = 0;
  double main_err_spec = 0.0;
  double max_rowwise_err = 0.0;
  double max_pair_dist_frob = 0.0;
  double main_err_2inf = 0.0;
  bool subset = false;  // maxima taken over a tracked subset only
};

inline constexpr const char* kLooCsvHeader = "iter,spec_err,max_rowwise,max_pairdist,two_inf_err";

LooDiagnostics loo_diagnostics(const FactorPair& main, const LooEnsemble& ensemble,
                               const GroundTruth& gt);

/// Benchmark run with the leave-one-out ensemble advanced in lockstep with the
/// main vanilla sequence, diagnosing every cfg.record_every iterations.
struct LooRun {
  RunResult main;
  std::vector<LooDiagnostics> diagnostics;
};

LooRun run_with_loo(const GroundTruth& gt, const SamplingMask& mask, const SolverConfig& cfg,
                    int threads = 1, const std::vector<int>& labels = {});

}  // namespace lrmc
