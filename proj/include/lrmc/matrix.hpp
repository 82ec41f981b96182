#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lrmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline bool all_finite(const Matrix& A) { return A.allFinite(); }

/// Throws std::invalid_argument if A contains NaN or Inf.
inline void require_finite(const Matrix& A, const std::string& what) {
  if (!A.allFinite()) {
    throw std::invalid_argument(what + ": matrix contains non-finite entries");
  }
}

inline void require_same_shape(const Matrix& A, const Matrix& B, const std::string& what) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument(what + ": shape mismatch (" + std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()) + " vs " + std::to_string(B.rows()) +
                                "x" + std::to_string(B.cols()) + ")");
  }
}

/// Maximum row l2 norm, i.e. the l_{2,inf} norm of A.
inline double two_inf_norm(const Matrix& A) { return A.rowwise().norm().maxCoeff(); }

/// Vertical concatenation [top; bottom]; both blocks must have the same column count.
inline Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) {
    throw std::invalid_argument("vstack: column count mismatch");
  }
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

}  // namespace lrmc
