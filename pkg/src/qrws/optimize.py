"""Derivative-free global maximization of the success probability.

Two independent routes: differential evolution (rand/1/bin) and a Sobol
low-discrepancy scan whose best points seed Nelder-Mead refinements.
Objectives are maximized.  With ``vectorized=True`` the objective receives a
``(k, d)`` array and returns ``k`` values; otherwise it is called per point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .evaluators import ModelEvaluator, SimulatorEvaluator, as_evaluator

__all__ = [
    "Bounds",
    "OptResult",
    "DEConfig",
    "SobolConfig",
    "differential_evolution",
    "sobol_multistart",
    "maximize_probability",
    "PHASE_BOUNDS",
]


@dataclass(frozen=True)
class Bounds:
    lo: tuple
    hi: tuple

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        if any(not a < b for a, b in zip(self.lo, self.hi)):
            raise ValueError("every dimension needs lo < hi")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.lo, dtype=float), np.asarray(self.hi, dtype=float)


PHASE_BOUNDS = Bounds((0.0, 0.0), (2.0 * math.pi, 2.0 * math.pi))


@dataclass
class OptResult:
    x: np.ndarray
    value: float
    evals: int
    method: str
    true_value: Optional[float] = None
    extra: dict = field(default_factory=dict)


@dataclass
class DEConfig:
    population: int = 30
    generations: int = 200
    F: float = 0.8
    CR: float = 0.9
    seed: int = 0
    vectorized: bool = False


@dataclass
class SobolConfig:
    samples: int = 1024
    top_k: int = 8
    seed: int = 0
    vectorized: bool = False
    xatol: float = 1e-9
    fatol: float = 1e-13
    maxiter: int = 2000


class _Counted:
    """Wraps an objective: batch interface, eval counting, non-finite -> -inf."""

    def __init__(self, fn: Callable, vectorized: bool):
        self.fn = fn
        self.vectorized = vectorized
        self.evals = 0

    def batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        self.evals += len(xs)
        if self.vectorized:
            vals = np.asarray(self.fn(xs), dtype=float).reshape(len(xs))
        else:
            vals = np.array([float(self.fn(x)) for x in xs])
        return np.where(np.isfinite(vals), vals, -np.inf)

    def one(self, x: np.ndarray) -> float:
        return float(self.batch(np.asarray(x, dtype=float)[None, :])[0])


def differential_evolution(objective: Callable, bounds: Bounds, config: Optional[DEConfig] = None) -> OptResult:
    """Classic DE/rand/1/bin with greedy one-to-one selection.

    Trials of a generation are built from the previous generation and evaluated
    together, so the random stream consumed per generation does not depend on
    the total generation budget.
    """
    cfg = config or DEConfig()
    if cfg.population < 4:
        raise ValueError("population must be >= 4 for rand/1 mutation")
    f = _Counted(objective, cfg.vectorized)
    rng = np.random.default_rng(cfg.seed)
    lo, hi = bounds.arrays()
    d = bounds.dim
    npop = cfg.population
    pop = lo + rng.random((npop, d)) * (hi - lo)
    fit = f.batch(pop)
    others = np.array([[j for j in range(npop) if j != i] for i in range(npop)])

    for _ in range(cfg.generations):
        picks = np.array([rng.choice(others[i], 3, replace=False) for i in range(npop)])
        r1, r2, r3 = picks.T
        mutant = pop[r1] + cfg.F * (pop[r2] - pop[r3])
        mutant = np.clip(mutant, lo, hi)
        cross = rng.random((npop, d)) < cfg.CR
        cross[np.arange(npop), rng.integers(0, d, npop)] = True
        trial = np.where(cross, mutant, pop)
        tfit = f.batch(trial)
        better = tfit >= fit
        pop[better] = trial[better]
        fit[better] = tfit[better]

    best = int(np.argmax(fit))
    return OptResult(pop[best].copy(), float(fit[best]), f.evals, "differential_evolution")


def sobol_points(bounds: Bounds, samples: int, seed: int) -> np.ndarray:
    lo, hi = bounds.arrays()
    sampler = qmc.Sobol(bounds.dim, scramble=True, seed=seed)
    with warnings.catch_warnings():
        # non-power-of-two sample counts are fine for a seeding scan
        warnings.simplefilter("ignore", UserWarning)
        u = sampler.random(samples)
    return qmc.scale(u, lo, hi)


def _nested_starts(vals: np.ndarray, top_k: int) -> np.ndarray:
    """Top-``top_k`` indices of every halving prefix (n, n//2, ..., 1) of the scan.

    The Sobol stream is prefix-stable, so doubling the sample budget only adds
    starts; the refined optimum therefore never gets worse with a doubled budget.
    """
    picked: list[int] = []
    size = len(vals)
    while size >= 1:
        for i in np.argsort(-vals[:size], kind="stable")[:top_k]:
            if int(i) not in picked:
                picked.append(int(i))
        size //= 2
    return np.array(sorted(picked, key=lambda i: (-vals[i], i)))


def sobol_multistart(objective: Callable, bounds: Bounds, config: Optional[SobolConfig] = None) -> OptResult:
    """Sobol scan, then bounded Nelder-Mead from the best scan points."""
    cfg = config or SobolConfig()
    if not cfg.samples >= cfg.top_k >= 1:
        raise ValueError("need samples >= top_k >= 1")
    f = _Counted(objective, cfg.vectorized)
    pts = sobol_points(bounds, cfg.samples, cfg.seed)
    vals = f.batch(pts)
    starts = _nested_starts(vals, cfg.top_k)
    lo, hi = bounds.arrays()
    best_x, best_v = pts[starts[0]].copy(), float(vals[starts[0]])
    for i in starts:
        res = minimize(
            lambda x: -f.one(np.clip(x, lo, hi)),
            pts[i],
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={"xatol": cfg.xatol, "fatol": cfg.fatol, "maxiter": cfg.maxiter},
        )
        x = np.clip(res.x, lo, hi)
        v = f.one(x)
        if v > best_v:
            best_x, best_v = x, v
    return OptResult(best_x, best_v, f.evals, "sobol", extra={"starts": len(starts)})


METHODS = {
    "de": "differential_evolution",
    "differential_evolution": "differential_evolution",
    "sobol": "sobol",
}


def maximize_probability(evaluator, n: int, method: str = "de", config=None) -> OptResult:
    """Maximize ``p`` over ``[0, 2 pi]^2`` for the simulator or a surrogate.

    Surrogate results carry ``true_value``: the simulated probability at the
    surrogate's argmax.
    """
    ev = as_evaluator(evaluator, n)
    key = METHODS.get(method)
    if key is None:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")

    def objective(xs):
        return ev(xs[:, 0], xs[:, 1])

    if key == "differential_evolution":
        cfg = replace(config or DEConfig(), vectorized=True)
        res = differential_evolution(objective, PHASE_BOUNDS, cfg)
    else:
        cfg = replace(config or SobolConfig(), vectorized=True)
        res = sobol_multistart(objective, PHASE_BOUNDS, cfg)
    if isinstance(ev, SimulatorEvaluator):
        res.true_value = res.value
    else:
        res.true_value = float(SimulatorEvaluator(n)(res.x[0], res.x[1]))
    res.extra["n"] = n
    res.extra["source"] = getattr(ev, "source", type(ev).__name__)
    return res


def result_csv_row(res: OptResult) -> str:
    """``method,n,phi,zeta,value,evals``"""
    return ",".join(
        [res.method, str(res.extra.get("n", "")), format(res.x[0], ".17g"), format(res.x[1], ".17g"),
         format(res.value, ".17g"), str(res.evals)]
    )
