"""Smoke tests for the samopt Python bindings."""

import math

import pytest

import samopt


def test_hadamard_fixed_values_and_involution():
    assert samopt.hadamard_apply([5.0]) == [5.0]
    got = samopt.hadamard_apply([1.0, 2.0, 3.0, 4.0])
    assert got == pytest.approx([5.0, -1.0, -2.0, 0.0])
    back = samopt.hadamard_apply(got)
    assert back == pytest.approx([1.0, 2.0, 3.0, 4.0], abs=1e-12)
    with pytest.raises(ValueError):
        samopt.hadamard_apply([1.0, 2.0, 3.0])


def test_mgs_orthogonalize_and_breakdown():
    coeffs, residual, unit = samopt.mgs_orthogonalize([1.0, 1.0], [[1.0, 0.0]])
    assert coeffs == pytest.approx([1.0])
    assert residual == pytest.approx(1.0)
    assert unit == pytest.approx([0.0, 1.0])

    _, residual, unit = samopt.mgs_orthogonalize([1.0, 0.0], [[1.0, 0.0]])
    assert residual <= 1e-12
    assert unit is None


def test_symmetric_eigendecomposition():
    values, vectors = samopt.symmetric_eigendecomposition([[0.0, 1.0], [1.0, 0.0]])
    assert values == pytest.approx([1.0, -1.0])
    assert len(vectors) == 2


def test_quadratic_oracle_and_counter():
    quad = samopt.SyntheticQuadratic(p=2, q=1.0)
    assert quad.dimension == 4
    out = quad.eval([0.0, 0.0, 0.0, 0.0])
    assert out.f == 0.0
    assert quad.eval_count == 1
    assert quad.exact_hessian_eigenvalue(2) == pytest.approx(1.0)


def test_noisy_oracle_is_seed_deterministic():
    x0 = samopt.initial_point_sin(8)
    model = samopt.NoiseModel(kind="gaussian", rel_sigma_f=0.025, rel_sigma_g=0.025)

    def sample(seed):
        clean = samopt.SyntheticQuadratic(p=3, q=1.0)
        noise = samopt.calibrate_noise(model, clean, x0)
        noisy = samopt.NoisyOracle(clean, noise, seed)
        return noisy.eval(x0).f

    assert sample(7) == sample(7)
    assert sample(7) != sample(8)


def test_arnoldi_sampling_recovers_the_spectrum():
    quad = samopt.SyntheticQuadratic(p=4, q=2.0)
    x0 = samopt.initial_point_sin(16)
    e0 = quad.eval(x0)
    result = samopt.arnoldi_sample(quad, x0, e0.f, e0.g, m=16, alpha=1.0)
    assert result.samples.m == 16
    got = sorted(result.spectrum.eigenvalues, reverse=True)
    expected = [quad.exact_hessian_eigenvalue(i) for i in range(1, 17)]
    assert got == pytest.approx(expected, rel=1e-8)

    top_values, top_vectors = samopt.truncate_spectrum(result.spectrum, 4)
    assert len(top_values) == 4 and len(top_vectors) == 4
    assert samopt.eigenvalue_error(top_values[0], 2.0) <= 1e-8


def test_trust_region_subproblem_boundary():
    step = samopt.solve_trust_region_subproblem([1.0], [2.0], 0.1)
    assert step.y == pytest.approx([-0.1])
    assert step.on_boundary
    assert step.sigma == pytest.approx(8.0, rel=1e-8)


def test_sam_optimize_on_clean_quadratic():
    quad = samopt.SyntheticQuadratic(p=4, q=1.0)
    x0 = samopt.initial_point_sin(16)
    config = samopt.SamConfig()
    config.r = 16
    config.m = 16
    config.alpha = 1e-6
    config.delta0 = 1e8
    config.tau = 1e-6
    config.max_iter = 10
    trace = samopt.sam_optimize(quad, x0, config)
    assert trace.reason == "converged"
    assert math.sqrt(sum(v * v for v in trace.final_point)) <= 1e-5
    assert trace.total_evals == quad.eval_count


def test_bfgs_on_rosenbrock():
    rosen = samopt.ModifiedRosenbrock(2)
    config = samopt.BfgsConfig()
    config.max_evals = 1000
    config.grad_tol = 1e-8
    trace = samopt.bfgs_optimize(rosen, [-1.2, 1.0], config)
    assert trace.reason == "gradient_tolerance"
    assert trace.final_point == pytest.approx([1.0, 1.0], abs=1e-4)


def test_nelder_mead_on_sphere():
    sphere = samopt.SyntheticQuadratic(p=1, q=0.0)
    config = samopt.NelderMeadConfig()
    config.max_evals = 200
    trace = samopt.nelder_mead_optimize(sphere, [1.0, 1.0], config)
    assert trace.final_f <= 1e-6


def test_callback_oracle():
    def objective(x):
        return sum(v * v for v in x), [2.0 * v for v in x]

    oracle = samopt.CallbackOracle(3, objective)
    out = oracle.eval([1.0, 2.0, 3.0])
    assert out.f == pytest.approx(14.0)
    assert out.g == pytest.approx([2.0, 4.0, 6.0])


def test_summary_statistics():
    stats = samopt.summarize([3.0, 1.0, 2.0])
    assert stats.median == pytest.approx(2.0)
    assert stats.count == 3
    lo, hi = samopt.bootstrap_median_ci([float(i) for i in range(100)], 500, 1)
    assert lo <= 49.5 <= hi
