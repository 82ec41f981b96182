#pragma once

#include "lrmc/matrix.hpp"

namespace lrmc {

/// An (X, Y) iterate of the factorized problem, X n1 x r and Y n2 x r.
struct FactorPair {
  Matrix X;
  Matrix Y;

  Index n1() const { return X.rows(); }
  Index n2() const { return Y.rows(); }
  Index rank() const { return X.cols(); }
  Matrix product() const { return X * Y.transpose(); }
};

inline void require_consistent(const FactorPair& fp, const std::string& what) {
  if (fp.X.cols() != fp.Y.cols()) {
    throw std::invalid_argument(what + ": factor pair has inconsistent inner dimension");
  }
}

/// Vertical stack [X; Y], the (n1+n2) x r representation used by all metrics.
inline Matrix stacked(const FactorPair& fp) { return vstack(fp.X, fp.Y); }

/// ||X^T X - Y^T Y||_F, the balance gap of the pair.
inline double balance_gap(const FactorPair& fp) {
  return (fp.X.transpose() * fp.X - fp.Y.transpose() * fp.Y).norm();
}

}  // namespace lrmc
