import math

import numpy as np
import pytest

from qrws.evaluators import ModelEvaluator, SimulatorEvaluator, as_evaluator
from qrws.optimize import (
    PHASE_BOUNDS,
    Bounds,
    DEConfig,
    SobolConfig,
    differential_evolution,
    maximize_probability,
    result_csv_row,
    sobol_multistart,
    sobol_points,
)
from qrws.surrogate import init_model
from qrws.walk import run

PI = math.pi


def quadratic(x):
    return -((x[0] - 1.0) ** 2 + (x[1] - 2.0) ** 2)


def quadratic_batch(xs):
    return -((xs[:, 0] - 1.0) ** 2 + (xs[:, 1] - 2.0) ** 2)


def test_bounds_validation():
    with pytest.raises(ValueError):
        Bounds((0.0,), (1.0, 2.0))
    with pytest.raises(ValueError):
        Bounds((1.0, 0.0), (1.0, 2.0))
    assert PHASE_BOUNDS.dim == 2


def test_de_quadratic():
    res = differential_evolution(quadratic, PHASE_BOUNDS, DEConfig(seed=1))
    np.testing.assert_allclose(res.x, [1.0, 2.0], atol=1e-4)
    assert abs(res.value) <= 1e-8
    assert res.evals == 30 * 201
    assert res.value == quadratic(res.x)


def test_de_vectorized_matches_pointwise():
    a = differential_evolution(quadratic, PHASE_BOUNDS, DEConfig(seed=3, generations=40))
    b = differential_evolution(quadratic_batch, PHASE_BOUNDS, DEConfig(seed=3, generations=40, vectorized=True))
    np.testing.assert_array_equal(a.x, b.x)
    assert a.value == b.value


def test_de_deterministic_and_monotone_in_budget():
    runs = [differential_evolution(quadratic, PHASE_BOUNDS, DEConfig(seed=5, generations=g)) for g in (10, 20, 40)]
    again = differential_evolution(quadratic, PHASE_BOUNDS, DEConfig(seed=5, generations=10))
    np.testing.assert_array_equal(runs[0].x, again.x)
    assert runs[0].value <= runs[1].value <= runs[2].value


def test_de_respects_bounds():
    bounds = Bounds((0.0, 0.0), (0.5, 0.5))
    res = differential_evolution(quadratic, bounds, DEConfig(seed=0, generations=50))
    assert np.all(res.x >= 0.0) and np.all(res.x <= 0.5)
    np.testing.assert_allclose(res.x, [0.5, 0.5], atol=1e-6)


def test_de_non_finite_treated_as_rejected():
    def f(x):
        return math.nan if x[0] > 3.0 else -abs(x[0] - 2.9) - abs(x[1] - 1.0)

    res = differential_evolution(f, PHASE_BOUNDS, DEConfig(seed=2, generations=100))
    assert math.isfinite(res.value)
    assert res.x[0] <= 3.0


def test_de_rejects_tiny_population():
    with pytest.raises(ValueError):
        differential_evolution(quadratic, PHASE_BOUNDS, DEConfig(population=3))


def test_sobol_quadratic():
    res = sobol_multistart(quadratic, PHASE_BOUNDS, SobolConfig(samples=64, top_k=2, seed=0))
    np.testing.assert_allclose(res.x, [1.0, 2.0], atol=1e-3)
    again = sobol_multistart(quadratic, PHASE_BOUNDS, SobolConfig(samples=64, top_k=2, seed=0))
    np.testing.assert_array_equal(res.x, again.x)
    assert res.value == quadratic(res.x)


def test_sobol_single_point_is_one_local_search():
    from scipy.optimize import minimize

    cfg = SobolConfig(samples=1, top_k=1, seed=4)
    res = sobol_multistart(quadratic, PHASE_BOUNDS, cfg)
    start = sobol_points(PHASE_BOUNDS, 1, 4)[0]
    ref = minimize(
        lambda x: -quadratic(np.clip(x, 0, 2 * PI)), start, method="Nelder-Mead",
        bounds=[(0, 2 * PI)] * 2, options={"xatol": cfg.xatol, "fatol": cfg.fatol, "maxiter": cfg.maxiter},
    )
    np.testing.assert_allclose(res.x, ref.x, atol=1e-12)


def test_sobol_points_in_bounds_and_seeded():
    b = Bounds((1.0, -1.0), (2.0, 1.0))
    pts = sobol_points(b, 100, 7)
    assert pts.shape == (100, 2)
    assert np.all(pts[:, 0] >= 1.0) and np.all(pts[:, 0] <= 2.0)
    np.testing.assert_array_equal(pts, sobol_points(b, 100, 7))
    assert not np.array_equal(pts, sobol_points(b, 100, 8))


def test_sobol_config_validation():
    with pytest.raises(ValueError):
        sobol_multistart(quadratic, PHASE_BOUNDS, SobolConfig(samples=2, top_k=3))
    with pytest.raises(ValueError):
        sobol_multistart(quadratic, PHASE_BOUNDS, SobolConfig(samples=2, top_k=0))


def test_sobol_monotone_in_samples():
    def bumpy(x):
        return math.sin(3 * x[0]) * math.cos(2 * x[1]) + 0.1 * x[0]

    for top_k in (1, 2):
        vals = [
            sobol_multistart(bumpy, PHASE_BOUNDS, SobolConfig(samples=s, top_k=top_k, seed=0)).value
            for s in (4, 8, 16, 32, 64, 128)
        ]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_maximize_simulator_one_qubit():
    res = maximize_probability("sim", 1, "de", DEConfig(seed=0, generations=60))
    assert res.value >= 0.499
    assert res.true_value == res.value
    assert res.extra == {"n": 1, "source": "sim"}


def test_maximize_simulator_two_qubit_beats_grover():
    res = maximize_probability(SimulatorEvaluator(2), 2, "sobol", SobolConfig(samples=256, top_k=4))
    assert res.value > 0.3906
    assert res.value == pytest.approx(run(2, *res.x).probability, abs=1e-12)


def test_maximize_model_reports_true_value():
    model = init_model(2, 2, 4, seed=0)
    res = maximize_probability(model, 2, "de", DEConfig(generations=5))
    assert res.extra["source"] == "dnn"
    assert res.true_value == pytest.approx(run(2, *res.x).probability, abs=1e-12)
    assert 0.0 < res.value < 1.0


def test_maximize_does_not_mutate_config():
    cfg = DEConfig(generations=2)
    maximize_probability("sim", 1, "de", cfg)
    assert cfg.vectorized is False


def test_maximize_rejects_unknown_method():
    with pytest.raises(ValueError):
        maximize_probability("sim", 1, "shgo")
    with pytest.raises(ValueError):
        as_evaluator("oracle", 2)


def test_evaluators_shape_and_values():
    ev = SimulatorEvaluator(2)
    out = ev(np.full((2, 3), PI), PI)
    assert out.shape == (2, 3)
    np.testing.assert_allclose(out, 0.390625, atol=1e-12)
    m3 = init_model(3, 1, 3)
    assert ModelEvaluator(m3, 4)(1.0, 2.0).shape == ()
    assert isinstance(as_evaluator(m3, 2), ModelEvaluator)


def test_result_csv_row():
    res = maximize_probability("sim", 1, "de", DEConfig(generations=3))
    fields = result_csv_row(res).split(",")
    assert fields[0] == "differential_evolution" and fields[1] == "1"
    assert float(fields[4]) == res.value and int(fields[5]) == res.evals
