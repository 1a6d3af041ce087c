"""Vectorized ``p(phi, zeta)`` evaluators backed by the simulator or a surrogate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .surrogate import MlpModel, predict_p
from .walk import k_iterations, run_batch


@dataclass(frozen=True)
class SimulatorEvaluator:
    n: int
    steps: Optional[int] = None
    marked: tuple = (0,)

    source = "sim"

    def __call__(self, phi, zeta) -> np.ndarray:
        phi, zeta = np.broadcast_arrays(np.asarray(phi, dtype=float), np.asarray(zeta, dtype=float))
        k = k_iterations(self.n) if self.steps is None else self.steps
        return run_batch(self.n, phi.ravel(), zeta.ravel(), k, self.marked).reshape(phi.shape)


@dataclass(frozen=True, eq=False)
class ModelEvaluator:
    model: MlpModel
    n: int

    source = "dnn"

    def __call__(self, phi, zeta) -> np.ndarray:
        n = self.n if self.model.input_dim == 3 else None
        return np.asarray(predict_p(self.model, phi, zeta, n), dtype=float)


def as_evaluator(evaluator, n: int):
    """Accept ``"sim"``/``"simulator"``, an :class:`MlpModel`, or any evaluator."""
    if isinstance(evaluator, str):
        if evaluator in ("sim", "simulator"):
            return SimulatorEvaluator(n)
        raise ValueError(f"unknown evaluator {evaluator!r}")
    if isinstance(evaluator, MlpModel):
        return ModelEvaluator(evaluator, n)
    return evaluator
