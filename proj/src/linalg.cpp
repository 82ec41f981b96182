#include "lrmc/linalg.hpp"

#include <Eigen/SVD>

#include "lrmc/rng.hpp"

namespace lrmc {

namespace {

// Flip triplet signs so each left vector's largest-magnitude entry is positive.
void fix_signs(Matrix& left, Matrix& right) {
  for (Index j = 0; j < left.cols(); ++j) {
    Index argmax = 0;
    left.col(j).cwiseAbs().maxCoeff(&argmax);
    if (left(argmax, j) < 0.0) {
      left.col(j) = -left.col(j);
      right.col(j) = -right.col(j);
    }
  }
}

}  // namespace

PartialSVD top_r_svd(const Matrix& A, Index r) {
  if (r < 1 || r > std::min(A.rows(), A.cols())) {
    throw std::invalid_argument("top_r_svd: rank " + std::to_string(r) +
                                " out of range for a " + std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()) + " matrix");
  }
  require_finite(A, "top_r_svd");

  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  PartialSVD out;
  out.left = svd.matrixU().leftCols(r);
  out.singulars = svd.singularValues().head(r);
  out.right = svd.matrixV().leftCols(r);
  fix_signs(out.left, out.right);
  return out;
}

SpectralNormEstimate spectral_norm_estimate(const Matrix& A, double rel_tol,
                                            int max_iterations) {
  if (rel_tol <= 0.0) throw std::invalid_argument("spectral_norm: rel_tol must be positive");
  require_finite(A, "spectral_norm");
  SpectralNormEstimate est;
  if (A.size() == 0 || A.norm() == 0.0) return est;  // zero matrix -> exactly 0

  // Fixed-seed random start vector; a deterministic pattern such as all-ones
  // can be orthogonal to the leading singular vector.
  Rng rng(0x9D2C5680u);
  Vector v = rng.gaussian_matrix(A.cols(), 1);
  v.normalize();

  const double threshold = rel_tol / 10.0;
  double sigma = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Vector w = A * v;
    const double sigma_new = w.norm();
    if (sigma_new == 0.0) {
      // v landed in the null space; restart from a fresh direction.
      v = rng.gaussian_matrix(A.cols(), 1);
      v.normalize();
      continue;
    }
    v = A.transpose() * w;
    v /= v.norm();
    est.iterations = it;
    if (std::abs(sigma_new - sigma) <= threshold * sigma_new) {
      est.value = sigma_new;
      est.converged = true;
      return est;
    }
    sigma = sigma_new;
  }
  est.value = sigma;
  est.converged = false;
  return est;
}

double spectral_norm(const Matrix& A, double rel_tol) {
  return spectral_norm_estimate(A, rel_tol).value;
}

Matrix sign_matrix(const Matrix& C) {
  if (C.rows() != C.cols()) {
    throw std::invalid_argument("sign_matrix: matrix must be square");
  }
  require_finite(C, "sign_matrix");
  Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix procrustes(const Matrix& A, const Matrix& B) {
  require_same_shape(A, B, "procrustes");
  if (A.cols() < 1) throw std::invalid_argument("procrustes: need at least one column");
  return sign_matrix(A.transpose() * B);
}

}  // namespace lrmc
