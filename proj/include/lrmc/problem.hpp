#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "lrmc/matrix.hpp"

namespace lrmc {

/// Planted rank-r matrix M = U V^T with its factors and measured parameters.
/// U = Util * Sigma^{1/2} and V = Vtil * Sigma^{1/2} for orthonormal Util, Vtil,
/// so U^T U = V^T V = Sigma (the balanced factorization).
struct GroundTruth {
  Index n1 = 0, n2 = 0, r = 0;
  Matrix U;         // n1 x r
  Matrix V;         // n2 x r
  Vector singulars; // length r, nonincreasing, positive
  double mu = 1.0;    // realized subspace incoherence, max over the two factors
  double kappa = 1.0; // realized condition number singulars(0)/singulars(r-1)
  std::uint64_t seed = 0;

  Matrix matrix() const { return U * V.transpose(); }
  double sigma1() const { return singulars(0); }
  double sigma_r() const { return singulars(r - 1); }
};

/// I.i.d. Bernoulli(p) observation pattern over [0,n1) x [0,n2).
/// Keeps both a sorted index list (for iteration and serialization) and a
/// boolean view (for O(1) membership); the two stay consistent by construction.
struct SamplingMask {
  Index n1 = 0, n2 = 0;
  double p = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<Index, Index>> observed;  // sorted row-major, no duplicates
  BoolArray view;                                 // n1 x n2

  bool contains(Index i, Index j) const { return view(i, j); }
  double empirical_rate() const {
    return static_cast<double>(observed.size()) / (static_cast<double>(n1) * static_cast<double>(n2));
  }

  /// Builds a mask directly from an index list (e.g. an empty mask); the list
  /// is sorted and deduplicated, p is recorded as given.
  static SamplingMask from_indices(Index n1, Index n2, double p,
                                   std::vector<std::pair<Index, Index>> indices);
};

enum class Axis { Row, Column };
enum class RestrictMode { Exclude, Only };

/// Draws orthonormal factors from seeded Gaussian matrices, places a geometric
/// singular value profile from sigma_r = 1 up to sigma_1 = kappa and returns
/// the balanced factors together with the realized mu and kappa. With r = 1
/// the single singular value is kappa and the realized condition number is 1.
GroundTruth generate_ground_truth(Index n1, Index n2, Index r, double kappa,
                                  std::uint64_t seed);

/// Subspace incoherence (n/r) * max_i ||Q_{i,.}||_2^2 of an orthonormal basis Q.
/// Always in [1, n/r]. Throws if Q^T Q deviates from identity by more than 1e-8.
double incoherence(const Matrix& Q);

/// Ratio of extreme values of a nonincreasing positive sequence.
double condition_number(const Vector& singulars);

/// Each entry observed independently with probability p, deterministic in seed.
SamplingMask sample_mask(Index n1, Index n2, double p, std::uint64_t seed);

/// Entrywise observation projector: keeps observed entries, zeroes the rest.
Matrix project_omega(const Matrix& M, const SamplingMask& mask);

/// Masked projector restricted along one row or column: Exclude zeroes line l
/// of the masked projection, Only keeps just that line of it.
Matrix project_omega_restricted(const Matrix& M, const SamplingMask& mask, Axis axis,
                                Index l, RestrictMode mode);

/// Keeps row/column l of M in full (no sampling), zeroes everything else.
Matrix project_row_or_column(const Matrix& M, Axis axis, Index l);

// Structured-text (JSON) round-trip for experiment reproducibility.
void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);
void save_mask(const SamplingMask& mask, const std::filesystem::path& path);
SamplingMask load_mask(const std::filesystem::path& path);

}  // namespace lrmc
