#pragma once

#include "lrmc/matrix.hpp"

namespace lrmc {

/// Leading r singular triplets of a dense matrix.
/// left and right have orthonormal columns; singulars is nonincreasing.
struct PartialSVD {
  Matrix left;      // n x r
  Vector singulars; // length r, nonincreasing, >= 0
  Matrix right;     // m x r
};

struct SpectralNormEstimate {
  double value = 0.0;
  bool converged = true;
  int iterations = 0;
};

/// Top-r partial singular value decomposition via a full decomposition
/// truncated to r triplets (adequate and bit-stable at desk scale).
///
/// The sign of each left singular vector is fixed so that its
/// largest-magnitude entry is positive (first such entry on ties), which
/// makes repeated runs on identical input reproducible. When singular
/// values are equal the returned basis of the tied block is decided by the
/// underlying decomposition; only the spanned subspace is meaningful.
PartialSVD top_r_svd(const Matrix& A, Index r);

/// Power-iteration estimate of the largest singular value.
/// Deterministic (fixed internal start vector). Returns 0 for the zero
/// matrix. If the iteration cap is hit, `converged` is false and `value`
/// holds the best estimate so far. The internal stopping threshold is
/// rel_tol/10 on successive relative change, so for matrices with a
/// spectral gap the returned value is well within rel_tol of sigma_1.
SpectralNormEstimate spectral_norm_estimate(const Matrix& A, double rel_tol = 1e-8,
                                            int max_iterations = 10000);

/// Convenience wrapper returning only the estimate value.
double spectral_norm(const Matrix& A, double rel_tol = 1e-8);

/// Matrix sign function of a square matrix: U V^T from the SVD C = U L V^T.
/// Orthogonal even when C is singular (the minimizer set of the related
/// Procrustes problem is then non-unique; this returns one member).
Matrix sign_matrix(const Matrix& C);

/// Orthogonal Procrustes alignment: the orthogonal R minimizing ||A R - B||_F,
/// computed as sign_matrix(A^T B). A and B must be n x r with matching shapes.
Matrix procrustes(const Matrix& A, const Matrix& B);

}  // namespace lrmc
