// Python bindings for the core operations: problem construction, the
// factorized solver, leave-one-out diagnostics and the analytical checks.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lrmc/diagnostics.hpp"
#include "lrmc/harness.hpp"
#include "lrmc/leaveoneout.hpp"
#include "lrmc/linalg.hpp"
#include "lrmc/metrics.hpp"
#include "lrmc/solver.hpp"

namespace py = pybind11;
using namespace lrmc;

namespace {

SamplingMask mask_from_indices(Index n1, Index n2, double p,
                               const std::vector<std::pair<Index, Index>>& indices) {
  return SamplingMask::from_indices(n1, n2, p, indices);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Low-rank matrix completion via factorized gradient descent";

  py::class_<PartialSVD>(m, "PartialSVD")
      .def_readonly("left", &PartialSVD::left)
      .def_readonly("singulars", &PartialSVD::singulars)
      .def_readonly("right", &PartialSVD::right);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("n1", &GroundTruth::n1)
      .def_readonly("n2", &GroundTruth::n2)
      .def_readonly("r", &GroundTruth::r)
      .def_readonly("U", &GroundTruth::U)
      .def_readonly("V", &GroundTruth::V)
      .def_readonly("singulars", &GroundTruth::singulars)
      .def_readonly("mu", &GroundTruth::mu)
      .def_readonly("kappa", &GroundTruth::kappa)
      .def_readonly("seed", &GroundTruth::seed)
      .def("matrix", &GroundTruth::matrix);

  py::class_<SamplingMask>(m, "SamplingMask")
      .def_readonly("n1", &SamplingMask::n1)
      .def_readonly("n2", &SamplingMask::n2)
      .def_readonly("p", &SamplingMask::p)
      .def_readonly("seed", &SamplingMask::seed)
      .def_readonly("observed", &SamplingMask::observed)
      .def("contains", &SamplingMask::contains)
      .def("empirical_rate", &SamplingMask::empirical_rate)
      .def_static("from_indices", &mask_from_indices);

  py::class_<FactorPair>(m, "FactorPair")
      .def(py::init([](Matrix X, Matrix Y) { return FactorPair{std::move(X), std::move(Y)}; }))
      .def_readwrite("X", &FactorPair::X)
      .def_readwrite("Y", &FactorPair::Y)
      .def("product", &FactorPair::product);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("eta", &SolverConfig::eta)
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("stop_tol", &SolverConfig::stop_tol)
      .def_readwrite("record_every", &SolverConfig::record_every)
      .def_readwrite("recovery_stop_tol", &SolverConfig::recovery_stop_tol)
      .def_readwrite("plateau_stop", &SolverConfig::plateau_stop)
      .def_readwrite("use_oracle_spectrum", &SolverConfig::use_oracle_spectrum)
      .def_readwrite("projection_slack", &SolverConfig::projection_slack)
      .def_readwrite("keep_objective_history", &SolverConfig::keep_objective_history);

  py::enum_<Variant>(m, "Variant")
      .value("vanilla", Variant::Vanilla)
      .value("projected", Variant::Projected);

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("iter", &TrajectoryRecord::iter)
      .def_readonly("objective", &TrajectoryRecord::objective)
      .def_readonly("frob_err", &TrajectoryRecord::frob_err)
      .def_readonly("spec_err", &TrajectoryRecord::spec_err)
      .def_readonly("two_inf_err", &TrajectoryRecord::two_inf_err)
      .def_readonly("balance_gap", &TrajectoryRecord::balance_gap);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("records", &RunResult::records)
      .def_readonly("final_factors", &RunResult::final_factors)
      .def_readonly("iterations", &RunResult::iterations)
      .def_readonly("eta", &RunResult::eta)
      .def_readonly("rho", &RunResult::rho)
      .def_readonly("final_recovery_err", &RunResult::final_recovery_err)
      .def_readonly("recovered", &RunResult::recovered)
      .def_readonly("iters_to_recovery", &RunResult::iters_to_recovery)
      .def_readonly("diverged", &RunResult::diverged)
      .def_readonly("plateaued", &RunResult::plateaued)
      .def_readonly("objective_history", &RunResult::objective_history);

  py::class_<LooDiagnostics>(m, "LooDiagnostics")
      .def_readonly("t", &LooDiagnostics::t)
      .def_readonly("main_err_spec", &LooDiagnostics::main_err_spec)
      .def_readonly("max_rowwise_err", &LooDiagnostics::max_rowwise_err)
      .def_readonly("max_pair_dist_frob", &LooDiagnostics::max_pair_dist_frob)
      .def_readonly("main_err_2inf", &LooDiagnostics::main_err_2inf)
      .def_readonly("subset", &LooDiagnostics::subset);

  py::class_<LooRun>(m, "LooRun")
      .def_readonly("main", &LooRun::main)
      .def_readonly("diagnostics", &LooRun::diagnostics);

  py::class_<HessianBoundsResult>(m, "HessianBoundsResult")
      .def_readonly("fraction", &HessianBoundsResult::fraction);

  py::class_<GradientFdReport>(m, "GradientFdReport")
      .def_readonly("max_relative_error", &GradientFdReport::max_relative_error)
      .def_readonly("max_abs_discrepancy", &GradientFdReport::max_abs_discrepancy);

  // core linear algebra
  m.def("top_r_svd", &top_r_svd, py::arg("A"), py::arg("r"));
  m.def("spectral_norm", &spectral_norm, py::arg("A"), py::arg("rel_tol") = 1e-8);
  m.def("sign_matrix", &sign_matrix, py::arg("C"));
  m.def("procrustes", &procrustes, py::arg("A"), py::arg("B"));

  // problem construction
  m.def("generate_ground_truth", &generate_ground_truth, py::arg("n1"), py::arg("n2"),
        py::arg("r"), py::arg("kappa"), py::arg("seed"));
  m.def("incoherence", &incoherence, py::arg("Q"));
  m.def("condition_number", &condition_number, py::arg("singulars"));
  m.def("sample_mask", &sample_mask, py::arg("n1"), py::arg("n2"), py::arg("p"), py::arg("seed"));
  m.def("project_omega", &project_omega, py::arg("M"), py::arg("mask"));

  // solver
  m.def("objective", &objective, py::arg("fp"), py::arg("observed_M"), py::arg("mask"));
  m.def("gradient", &gradient, py::arg("fp"), py::arg("observed_M"), py::arg("mask"));
  m.def("spectral_init", &spectral_init, py::arg("observed_M"), py::arg("mask"), py::arg("r"));
  m.def("gd_step", &gd_step, py::arg("fp"), py::arg("observed_M"), py::arg("mask"),
        py::arg("eta"));
  m.def("default_step_size", &default_step_size, py::arg("sigma1"), py::arg("sigmar"));
  m.def("projected_gd_step", &projected_gd_step, py::arg("fp"), py::arg("observed_M"),
        py::arg("mask"), py::arg("eta"), py::arg("radius_X"), py::arg("radius_Y"));
  m.def("run", &run, py::arg("gt"), py::arg("mask"), py::arg("cfg"),
        py::arg("variant") = Variant::Vanilla,
        py::call_guard<py::gil_scoped_release>());

  // leave-one-out diagnostics
  m.def(
      "run_with_loo",
      [](const GroundTruth& gt, const SamplingMask& mask, const SolverConfig& cfg, int threads,
         const std::vector<int>& labels) { return run_with_loo(gt, mask, cfg, threads, labels); },
      py::arg("gt"), py::arg("mask"), py::arg("cfg"), py::arg("threads") = 1,
      py::arg("labels") = std::vector<int>{}, py::call_guard<py::gil_scoped_release>());
  m.def(
      "loo_matrix",
      [](const Matrix& M, const SamplingMask& mask, int label) {
        return loo_matrix(M, mask, LooIndex{label});
      },
      py::arg("M"), py::arg("mask"), py::arg("label"));

  // analytical diagnostics
  m.def("hessian_quadratic_form", &hessian_quadratic_form, py::arg("point"), py::arg("direction"),
        py::arg("gt_M"), py::arg("mask"));
  m.def("hessian_bounds_check", &hessian_bounds_check, py::arg("gt"), py::arg("mask"),
        py::arg("n_samples"), py::arg("neighborhood_scale"), py::arg("seed"));
  m.def("sampling_deviation", &sampling_deviation, py::arg("A"), py::arg("C"), py::arg("B"),
        py::arg("D"), py::arg("mask"));
  m.def("spectral_gap", &spectral_gap, py::arg("mask"));
  m.def("gradient_fd_check", &gradient_fd_check, py::arg("fp"), py::arg("observed_M"),
        py::arg("mask"), py::arg("n_directions"), py::arg("h"), py::arg("seed"));
}
