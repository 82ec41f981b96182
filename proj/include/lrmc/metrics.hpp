#pragma once

#include "lrmc/factors.hpp"
#include "lrmc/linalg.hpp"
#include "lrmc/problem.hpp"

#include <Eigen/SVD>

namespace lrmc {

/// Errors of an iterate against the ground-truth factors after the optimal
/// orthogonal alignment of the stacked pair.
struct AlignedErrors {
  double frob = 0.0;
  double spec = 0.0;
  double two_inf = 0.0;
  Matrix rotation;  // the aligning r x r orthogonal matrix
};

inline AlignedErrors aligned_errors(const FactorPair& fp, const GroundTruth& gt) {
  const Matrix S = stacked(fp);
  const Matrix Z = vstack(gt.U, gt.V);
  AlignedErrors out;
  out.rotation = procrustes(S, Z);
  const Matrix E = S * out.rotation - Z;
  out.frob = E.norm();
  // Thin matrix: exact leading singular value is cheap.
  Eigen::JacobiSVD<Matrix> svd(E);
  out.spec = svd.singularValues()(0);
  out.two_inf = two_inf_norm(E);
  return out;
}

/// ||X Y^T - M||_F / ||M||_F.
inline double relative_recovery_error(const FactorPair& fp, const Matrix& M) {
  return (fp.product() - M).norm() / M.norm();
}

}  // namespace lrmc
