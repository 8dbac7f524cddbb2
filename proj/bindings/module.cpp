// Python bindings for the core sampling and optimization operations.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "samopt/harness.hpp"
#include "samopt/model.hpp"
#include "samopt/optimizer.hpp"
#include "samopt/problems.hpp"
#include "samopt/sampling.hpp"

namespace py = pybind11;
using namespace samopt;

namespace {

Matrix matrix_from_rows(const std::vector<Vector>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r > 0 ? static_cast<int>(rows.front().size()) : 0;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c)
      throw std::invalid_argument("matrix rows must have equal length");
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<Vector> matrix_to_rows(const Matrix& m) {
  std::vector<Vector> rows(m.rows(), Vector(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_samopt, m) {
  m.doc() = "Arnoldi sampling, reduced quadratic models, and the stochastic "
            "Arnoldi trust-region optimizer";

  // linear algebra kernels
  m.def("hadamard_apply", [](Vector x) { return hadamard_apply(std::move(x)); },
        py::arg("x"),
        "Apply the orthonormalized Sylvester-Hadamard transform (an involution).");
  m.def(
      "mgs_orthogonalize",
      [](const Vector& v, const std::vector<Vector>& basis) {
        const MgsResult r = mgs_orthogonalize(v, basis);
        return py::make_tuple(r.coeffs, r.residual_norm,
                              r.breakdown ? py::object(py::none())
                                          : py::cast(r.unit_residual));
      },
      py::arg("v"), py::arg("basis"),
      "Modified Gram-Schmidt projection of v against an orthonormal basis; "
      "returns (coeffs, residual_norm, unit_residual or None on breakdown).");
  m.def(
      "symmetric_eigendecomposition",
      [](const std::vector<Vector>& rows) {
        const SymmetricEigen e =
            symmetric_eigendecomposition(matrix_from_rows(rows));
        return py::make_tuple(e.eigenvalues, matrix_to_rows(e.eigenvectors));
      },
      py::arg("matrix"),
      "Eigenvalues (|.| descending) and eigenvector matrix rows of a "
      "symmetric matrix given as nested lists.");

  // problems and noise
  py::class_<Eval>(m, "Eval")
      .def_readonly("f", &Eval::f)
      .def_readonly("g", &Eval::g);

  py::class_<ObjectiveOracle, std::shared_ptr<ObjectiveOracle>>(
      m, "ObjectiveOracle")
      .def("eval", &ObjectiveOracle::eval, py::arg("x"))
      .def_property_readonly("dimension", &ObjectiveOracle::dimension)
      .def_property_readonly("eval_count", &ObjectiveOracle::eval_count);

  py::class_<SyntheticQuadratic, ObjectiveOracle,
             std::shared_ptr<SyntheticQuadratic>>(m, "SyntheticQuadratic")
      .def(py::init<int, double>(), py::arg("p"), py::arg("q"))
      .def("exact_hessian_eigenvalue",
           &SyntheticQuadratic::exact_hessian_eigenvalue, py::arg("i"));

  py::class_<ModifiedRosenbrock, ObjectiveOracle,
             std::shared_ptr<ModifiedRosenbrock>>(m, "ModifiedRosenbrock")
      .def(py::init<int>(), py::arg("n"));

  py::class_<CallbackOracle, ObjectiveOracle, std::shared_ptr<CallbackOracle>>(
      m, "CallbackOracle")
      .def(py::init([](int n, py::function fn) {
             return std::make_shared<CallbackOracle>(
                 n, [fn](const Vector& x) {
                   const py::tuple out = fn(x);
                   Eval e;
                   e.f = out[0].cast<double>();
                   e.g = out[1].cast<Vector>();
                   return e;
                 });
           }),
           py::arg("n"), py::arg("fn"),
           "Wrap a Python callable returning (f, gradient_list).");

  py::enum_<NoiseKind>(m, "NoiseKind")
      .value("none", NoiseKind::none)
      .value("gaussian", NoiseKind::gaussian);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init([](const std::string& kind, double rel_sigma_f,
                       double rel_sigma_g, double rel_bias_g,
                       std::uint64_t seed) {
             NoiseModel model;
             model.kind =
                 kind == "none" ? NoiseKind::none : NoiseKind::gaussian;
             model.rel_sigma_f = rel_sigma_f;
             model.rel_sigma_g = rel_sigma_g;
             model.rel_bias_g = rel_bias_g;
             model.seed = seed;
             return model;
           }),
           py::arg("kind") = "gaussian", py::arg("rel_sigma_f") = 0.0,
           py::arg("rel_sigma_g") = 0.0, py::arg("rel_bias_g") = 0.0,
           py::arg("seed") = 0)
      .def_readwrite("rel_sigma_f", &NoiseModel::rel_sigma_f)
      .def_readwrite("rel_sigma_g", &NoiseModel::rel_sigma_g)
      .def_readwrite("rel_bias_g", &NoiseModel::rel_bias_g);

  py::class_<CalibratedNoise>(m, "CalibratedNoise")
      .def_readonly("sigma_f", &CalibratedNoise::sigma_f)
      .def_readonly("sigma_g", &CalibratedNoise::sigma_g)
      .def_readonly("mu_g", &CalibratedNoise::mu_g);

  m.def("calibrate_noise", &calibrate_noise, py::arg("model"),
        py::arg("clean_oracle"), py::arg("x0"),
        "Freeze absolute noise scales against the clean objective at x0.");

  py::class_<NoisyOracle, ObjectiveOracle, std::shared_ptr<NoisyOracle>>(
      m, "NoisyOracle")
      .def(py::init<std::shared_ptr<ObjectiveOracle>, CalibratedNoise,
                    std::uint64_t>(),
           py::arg("clean"), py::arg("noise"), py::arg("seed"));

  m.def("initial_point_sin", &initial_point_sin, py::arg("n"));
  m.def("initial_point_alternating", &initial_point_alternating, py::arg("n"));

  // Arnoldi sampling
  py::class_<SampleSet>(m, "SampleSet")
      .def_readonly("X", &SampleSet::X)
      .def_readonly("F", &SampleSet::F)
      .def_readonly("G", &SampleSet::G)
      .def_readonly("alpha", &SampleSet::alpha)
      .def_readonly("m", &SampleSet::m);

  py::class_<SpectralEstimate>(m, "SpectralEstimate")
      .def_readonly("basis", &SpectralEstimate::basis)
      .def_readonly("eigenvalues", &SpectralEstimate::eigenvalues)
      .def_readonly("eigvecs", &SpectralEstimate::eigvecs)
      .def_readonly("m", &SpectralEstimate::m)
      .def_property_readonly("hessenberg",
                             [](const SpectralEstimate& s) {
                               return matrix_to_rows(s.hessenberg.h);
                             })
      .def_property_readonly("reduced_eigvecs",
                             [](const SpectralEstimate& s) {
                               return matrix_to_rows(s.reduced_eigvecs);
                             });

  py::class_<ArnoldiResult>(m, "ArnoldiResult")
      .def_readonly("samples", &ArnoldiResult::samples)
      .def_readonly("spectrum", &ArnoldiResult::spectrum);

  m.def("arnoldi_sample", &arnoldi_sample, py::arg("oracle"), py::arg("x0"),
        py::arg("f0"), py::arg("g0"), py::arg("m"), py::arg("alpha"),
        "Sample the oracle along adaptively chosen orthonormal directions and "
        "estimate Hessian eigenpairs.");
  m.def("eigenvalue_error", &eigenvalue_error, py::arg("estimate"),
        py::arg("exact"));
  m.def(
      "truncate_spectrum",
      [](const SpectralEstimate& spectrum, int r) {
        const TruncatedSpectrum t = truncate_spectrum(spectrum, r);
        return py::make_tuple(t.eigenvalues, t.eigvecs);
      },
      py::arg("spectrum"), py::arg("r"));

  // reduced quadratic models
  py::enum_<ModelVariant>(m, "ModelVariant")
      .value("step_average", ModelVariant::step_average)
      .value("directional", ModelVariant::directional);

  py::class_<ReducedQuadraticModel>(m, "ReducedQuadraticModel")
      .def_readonly("center", &ReducedQuadraticModel::center)
      .def_readonly("f_bar", &ReducedQuadraticModel::f_bar)
      .def_readonly("g_red", &ReducedQuadraticModel::g_red)
      .def_readonly("lambda_", &ReducedQuadraticModel::lambda)
      .def_readonly("V", &ReducedQuadraticModel::V)
      .def_readonly("variant", &ReducedQuadraticModel::variant);

  m.def("build_step_average", &build_step_average, py::arg("samples"),
        py::arg("lambda_r"), py::arg("V"));
  m.def(
      "build_directional",
      [](const SampleSet& samples, const Vector& lambda_r,
         const std::vector<Vector>& V,
         const std::vector<Vector>& reduced_eigvec_rows, double alpha) {
        return build_directional(samples, lambda_r, V,
                                 matrix_from_rows(reduced_eigvec_rows), alpha);
      },
      py::arg("samples"), py::arg("lambda_r"), py::arg("V"),
      py::arg("reduced_eigvecs"), py::arg("alpha"));

  py::class_<TrustRegionStep>(m, "TrustRegionStep")
      .def_readonly("y", &TrustRegionStep::y)
      .def_readonly("predicted_decrease", &TrustRegionStep::predicted_decrease)
      .def_readonly("on_boundary", &TrustRegionStep::on_boundary)
      .def_readonly("sigma", &TrustRegionStep::sigma);

  m.def("solve_trust_region_subproblem", &solve_trust_region_subproblem,
        py::arg("g_red"), py::arg("lambda_"), py::arg("delta"),
        "Minimize the diagonal reduced quadratic over the trust-region ball.");
  m.def("model_value", &model_value, py::arg("model"), py::arg("y"));
  m.def("apply_step", &apply_step, py::arg("model"), py::arg("y"));

  // optimizers
  py::class_<SamConfig>(m, "SamConfig")
      .def(py::init<>())
      .def_readwrite("r", &SamConfig::r)
      .def_readwrite("m", &SamConfig::m)
      .def_readwrite("alpha", &SamConfig::alpha)
      .def_readwrite("delta0", &SamConfig::delta0)
      .def_readwrite("delta_max", &SamConfig::delta_max)
      .def_readwrite("tau", &SamConfig::tau)
      .def_readwrite("max_iter", &SamConfig::max_iter)
      .def_readwrite("variant", &SamConfig::variant);

  py::class_<BfgsConfig>(m, "BfgsConfig")
      .def(py::init<>())
      .def_readwrite("max_evals", &BfgsConfig::max_evals)
      .def_readwrite("grad_tol", &BfgsConfig::grad_tol)
      .def_readwrite("c1", &BfgsConfig::c1)
      .def_readwrite("c2", &BfgsConfig::c2)
      .def_readwrite("max_line_search_evals",
                     &BfgsConfig::max_line_search_evals);

  py::class_<NelderMeadConfig>(m, "NelderMeadConfig")
      .def(py::init<>())
      .def_readwrite("max_evals", &NelderMeadConfig::max_evals)
      .def_readwrite("simplex_scale", &NelderMeadConfig::simplex_scale)
      .def_readwrite("size_tol", &NelderMeadConfig::size_tol);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iter", &IterationRecord::iter)
      .def_readonly("x", &IterationRecord::x)
      .def_readonly("f", &IterationRecord::f)
      .def_readonly("model_grad_norm", &IterationRecord::model_grad_norm)
      .def_readonly("trust_radius", &IterationRecord::trust_radius)
      .def_readonly("rho", &IterationRecord::rho)
      .def_readonly("step_norm", &IterationRecord::step_norm)
      .def_readonly("accepted", &IterationRecord::accepted)
      .def_readonly("evals", &IterationRecord::evals)
      .def_readonly("realized_m", &IterationRecord::realized_m);

  py::class_<OptimizationTrace>(m, "OptimizationTrace")
      .def_readonly("iterations", &OptimizationTrace::iterations)
      .def_readonly("final_point", &OptimizationTrace::final_point)
      .def_readonly("final_f", &OptimizationTrace::final_f)
      .def_readonly("total_evals", &OptimizationTrace::total_evals)
      .def_readonly("initial_evals", &OptimizationTrace::initial_evals)
      .def_property_readonly("reason", [](const OptimizationTrace& t) {
        return to_string(t.reason);
      });

  m.def("sam_optimize", &sam_optimize, py::arg("oracle"), py::arg("x0"),
        py::arg("config"),
        "Stochastic Arnoldi trust-region optimization loop.");
  m.def("bfgs_optimize", &bfgs_optimize, py::arg("oracle"), py::arg("x0"),
        py::arg("config"));
  m.def("nelder_mead_optimize", &nelder_mead_optimize, py::arg("oracle"),
        py::arg("x0"), py::arg("config"));

  // statistics helpers
  py::class_<SummaryStatistics>(m, "SummaryStatistics")
      .def_readonly("median", &SummaryStatistics::median)
      .def_readonly("quantile_025", &SummaryStatistics::quantile_025)
      .def_readonly("quantile_975", &SummaryStatistics::quantile_975)
      .def_readonly("count", &SummaryStatistics::count);

  m.def("summarize", &summarize, py::arg("values"));
  m.def("bootstrap_median_ci", &bootstrap_median_ci, py::arg("values"),
        py::arg("n_boot"), py::arg("seed"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("run"),
        py::arg("stream"));
}
