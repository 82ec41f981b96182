#include "lrmc/problem.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "lrmc/rng.hpp"

namespace lrmc {

namespace {

void check_axis_index(const Matrix& M, Axis axis, Index l, const std::string& what) {
  const Index limit = (axis == Axis::Row) ? M.rows() : M.cols();
  if (l < 0 || l >= limit) {
    throw std::out_of_range(what + ": index " + std::to_string(l) + " out of range [0, " +
                            std::to_string(limit) + ")");
  }
}

Matrix orthonormal_gaussian(Index n, Index r, Rng& rng) {
  const Matrix G = rng.gaussian_matrix(n, r);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, r);
  return Q;
}

}  // namespace

SamplingMask SamplingMask::from_indices(Index n1, Index n2, double p,
                                        std::vector<std::pair<Index, Index>> indices) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("SamplingMask: dimensions must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("SamplingMask: p must be in (0,1]");
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  SamplingMask mask;
  mask.n1 = n1;
  mask.n2 = n2;
  mask.p = p;
  mask.view = BoolArray::Constant(n1, n2, false);
  for (const auto& [i, j] : indices) {
    if (i < 0 || i >= n1 || j < 0 || j >= n2) {
      throw std::out_of_range("SamplingMask: index pair out of range");
    }
    mask.view(i, j) = true;
  }
  mask.observed = std::move(indices);
  return mask;
}

GroundTruth generate_ground_truth(Index n1, Index n2, Index r, double kappa,
                                  std::uint64_t seed) {
  if (r < 1 || r > std::min(n1, n2)) {
    throw std::invalid_argument("generate_ground_truth: rank " + std::to_string(r) +
                                " out of range for " + std::to_string(n1) + "x" +
                                std::to_string(n2));
  }
  if (!(kappa >= 1.0)) {
    throw std::invalid_argument("generate_ground_truth: kappa must be >= 1");
  }

  Rng rng(derive_stream(seed, 0xA11CE5ULL));
  GroundTruth gt;
  gt.n1 = n1;
  gt.n2 = n2;
  gt.r = r;
  gt.seed = seed;

  const Matrix Util = orthonormal_gaussian(n1, r, rng);
  const Matrix Vtil = orthonormal_gaussian(n2, r, rng);

  gt.singulars = Vector(r);
  if (r == 1) {
    gt.singulars(0) = kappa;
  } else {
    // Geometric spacing: sigma_i = kappa^{(r-1-i)/(r-1)}, so sigma_0 = kappa
    // and sigma_{r-1} = 1.
    for (Index i = 0; i < r; ++i) {
      gt.singulars(i) = std::pow(kappa, static_cast<double>(r - 1 - i) / static_cast<double>(r - 1));
    }
  }

  const Vector root = gt.singulars.cwiseSqrt();
  gt.U = Util * root.asDiagonal();
  gt.V = Vtil * root.asDiagonal();
  gt.mu = std::max(incoherence(Util), incoherence(Vtil));
  gt.kappa = gt.singulars(0) / gt.singulars(r - 1);
  return gt;
}

double incoherence(const Matrix& Q) {
  const Index n = Q.rows();
  const Index r = Q.cols();
  if (r < 1 || n < r) throw std::invalid_argument("incoherence: need a tall n x r matrix");
  const double ortho_gap = (Q.transpose() * Q - Matrix::Identity(r, r)).norm();
  if (ortho_gap > 1e-8) {
    throw std::invalid_argument("incoherence: columns are not orthonormal (gap " +
                                std::to_string(ortho_gap) + ")");
  }
  const double max_row_sq = Q.rowwise().squaredNorm().maxCoeff();
  return (static_cast<double>(n) / static_cast<double>(r)) * max_row_sq;
}

double condition_number(const Vector& singulars) {
  if (singulars.size() < 1) throw std::invalid_argument("condition_number: empty input");
  for (Index i = 0; i < singulars.size(); ++i) {
    if (!(singulars(i) > 0.0)) {
      throw std::invalid_argument("condition_number: all values must be positive");
    }
    if (i > 0 && singulars(i) > singulars(i - 1)) {
      throw std::invalid_argument("condition_number: values must be nonincreasing");
    }
  }
  return singulars(0) / singulars(singulars.size() - 1);
}

SamplingMask sample_mask(Index n1, Index n2, double p, std::uint64_t seed) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("sample_mask: dimensions must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("sample_mask: p must be in (0,1]");
  SamplingMask mask;
  mask.n1 = n1;
  mask.n2 = n2;
  mask.p = p;
  mask.seed = seed;
  mask.view = BoolArray::Constant(n1, n2, false);
  Rng rng(derive_stream(seed, 0x03E6AULL));
  for (Index i = 0; i < n1; ++i) {
    for (Index j = 0; j < n2; ++j) {
      if (rng.uniform() < p) {
        mask.view(i, j) = true;
        mask.observed.emplace_back(i, j);
      }
    }
  }
  return mask;
}

Matrix project_omega(const Matrix& M, const SamplingMask& mask) {
  if (M.rows() != mask.n1 || M.cols() != mask.n2) {
    throw std::invalid_argument("project_omega: matrix shape does not match mask");
  }
  return mask.view.select(M, Matrix::Zero(M.rows(), M.cols()));
}

Matrix project_omega_restricted(const Matrix& M, const SamplingMask& mask, Axis axis,
                                Index l, RestrictMode mode) {
  check_axis_index(M, axis, l, "project_omega_restricted");
  Matrix P = project_omega(M, mask);
  if (mode == RestrictMode::Exclude) {
    if (axis == Axis::Row) {
      P.row(l).setZero();
    } else {
      P.col(l).setZero();
    }
    return P;
  }
  Matrix out = Matrix::Zero(M.rows(), M.cols());
  if (axis == Axis::Row) {
    out.row(l) = P.row(l);
  } else {
    out.col(l) = P.col(l);
  }
  return out;
}

Matrix project_row_or_column(const Matrix& M, Axis axis, Index l) {
  check_axis_index(M, axis, l, "project_row_or_column");
  Matrix out = Matrix::Zero(M.rows(), M.cols());
  if (axis == Axis::Row) {
    out.row(l) = M.row(l);
  } else {
    out.col(l) = M.col(l);
  }
  return out;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& A) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < A.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, Index rows, Index cols) {
  Matrix A(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) A(i, c) = j.at(i).at(c).get<double>();
  return A;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
  nlohmann::json j;
  j["n1"] = gt.n1;
  j["n2"] = gt.n2;
  j["r"] = gt.r;
  j["seed"] = gt.seed;
  j["mu"] = gt.mu;
  j["kappa"] = gt.kappa;
  j["singulars"] = std::vector<double>(gt.singulars.data(), gt.singulars.data() + gt.singulars.size());
  j["U"] = matrix_to_json(gt.U);
  j["V"] = matrix_to_json(gt.V);
  write_json(j, path);
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  const nlohmann::json j = read_json(path);
  GroundTruth gt;
  gt.n1 = j.at("n1").get<Index>();
  gt.n2 = j.at("n2").get<Index>();
  gt.r = j.at("r").get<Index>();
  gt.seed = j.at("seed").get<std::uint64_t>();
  gt.mu = j.at("mu").get<double>();
  gt.kappa = j.at("kappa").get<double>();
  const auto s = j.at("singulars").get<std::vector<double>>();
  gt.singulars = Eigen::Map<const Vector>(s.data(), static_cast<Index>(s.size()));
  gt.U = matrix_from_json(j.at("U"), gt.n1, gt.r);
  gt.V = matrix_from_json(j.at("V"), gt.n2, gt.r);
  require_finite(gt.U, "load_ground_truth(U)");
  require_finite(gt.V, "load_ground_truth(V)");
  return gt;
}

void save_mask(const SamplingMask& mask, const std::filesystem::path& path) {
  nlohmann::json j;
  j["n1"] = mask.n1;
  j["n2"] = mask.n2;
  j["p"] = mask.p;
  j["seed"] = mask.seed;
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& [i, c] : mask.observed) obs.push_back({i, c});
  j["observed"] = std::move(obs);
  write_json(j, path);
}

SamplingMask load_mask(const std::filesystem::path& path) {
  const nlohmann::json j = read_json(path);
  std::vector<std::pair<Index, Index>> indices;
  for (const auto& pair : j.at("observed")) {
    indices.emplace_back(pair.at(0).get<Index>(), pair.at(1).get<Index>());
  }
  SamplingMask mask = SamplingMask::from_indices(j.at("n1").get<Index>(), j.at("n2").get<Index>(),
                                                 j.at("p").get<double>(), std::move(indices));
  mask.seed = j.at("seed").get<std::uint64_t>();
  return mask;
}

}  // namespace lrmc
