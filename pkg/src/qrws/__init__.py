"""Quantum random walk search on the hypercube with a generalized Householder coin.

The package simulates the walk exactly, sweeps the two coin phases, fits a
small neural surrogate to the sweeps, searches for the best phases and
characterizes the high-probability ridge in the phase plane.
"""

from .coin import CoinMatrix, CoinSpec, build_householder_coin, grover_coin, marking_coin
from .evaluators import ModelEvaluator, SimulatorEvaluator
from .optimize import DEConfig, SobolConfig, differential_evolution, maximize_probability, sobol_multistart
from .ridge import CurveSpec, extract_ridge, fit_alpha, profile, stability_width
from .surrogate import MlpModel, TrainConfig, init_model, load_model, predict_p, save_model, train
from .sweep import Dataset, generate, grid, load_csv, save_csv
from .walk import k_iterations, run, run_batch, scan_iterations

__version__ = "0.1.0"

__all__ = [
    "CoinMatrix",
    "CoinSpec",
    "build_householder_coin",
    "grover_coin",
    "marking_coin",
    "ModelEvaluator",
    "SimulatorEvaluator",
    "DEConfig",
    "SobolConfig",
    "differential_evolution",
    "maximize_probability",
    "sobol_multistart",
    "CurveSpec",
    "extract_ridge",
    "fit_alpha",
    "profile",
    "stability_width",
    "MlpModel",
    "TrainConfig",
    "init_model",
    "load_model",
    "predict_p",
    "save_model",
    "train",
    "Dataset",
    "generate",
    "grid",
    "load_csv",
    "save_csv",
    "k_iterations",
    "run",
    "run_batch",
    "scan_iterations",
]
