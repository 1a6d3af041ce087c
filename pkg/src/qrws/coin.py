"""Walk coins for the hypercube search.

The traversing coin is ``exp(i*zeta) * (I - (1 - exp(i*phi)) |chi><chi|)`` with
``|chi>`` the equal-weight superposition over the ``m`` coin directions.  Every
such coin has one value ``a`` on the diagonal and one value ``b`` off it.

Phases of matrix elements follow the ``a = |a| exp(-i * phase)`` convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CoinSpec",
    "CoinMatrix",
    "CoinElements",
    "build_householder_coin",
    "householder_elements",
    "grover_coin",
    "marking_coin",
    "coin_elements_analytic",
    "moduli_from_delta",
    "delta_from_moduli",
    "verify_unitary",
]


def _check_dimension(m: int) -> None:
    if not isinstance(m, (int, np.integer)) or m < 2 or (m & (m - 1)) != 0:
        raise ValueError(f"coin dimension must be a power of two >= 2, got {m!r}")


@dataclass(frozen=True)
class CoinSpec:
    phi: float
    zeta: float
    m: int

    def __post_init__(self) -> None:
        _check_dimension(self.m)
        if not (math.isfinite(self.phi) and math.isfinite(self.zeta)):
            raise ValueError("phi and zeta must be finite")

    @classmethod
    def for_qubits(cls, phi: float, zeta: float, n: int) -> "CoinSpec":
        return cls(phi, zeta, 2**n)


@dataclass(frozen=True, eq=False)
class CoinMatrix:
    """An ``m x m`` complex coin operator."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"coin must be square, got shape {e.shape}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class CoinElements:
    a_mod: float
    a_phase: float
    b_mod: float
    b_phase: float
    delta: float
    degenerate: bool = False


def householder_elements(phi, zeta, m: int):
    """Diagonal and off-diagonal entries ``(a', b')``; broadcasts over arrays."""
    g = np.exp(1j * np.asarray(zeta, dtype=float))
    h = (np.exp(1j * np.asarray(phi, dtype=float)) - 1.0) / m
    return g * (1.0 + h), g * h


def _circulant(a: complex, b: complex, m: int) -> np.ndarray:
    c = np.full((m, m), b, dtype=complex)
    np.fill_diagonal(c, a)
    return c


def build_householder_coin(spec: CoinSpec) -> CoinMatrix:
    """Generalized Householder reflection about ``|chi>`` times a global phase.

    Built as the literal operator ``e^{i zeta} (I - (1 - e^{i phi}) |chi><chi|)``
    so that the closed-form entries in :func:`householder_elements` remain an
    independent check.
    """
    m = spec.m
    chi = np.full(m, 1.0 / math.sqrt(m))
    refl = np.eye(m, dtype=complex) - (1.0 - np.exp(1j * spec.phi)) * np.outer(chi, chi)
    return CoinMatrix(np.exp(1j * spec.zeta) * refl)


def grover_coin(m: int) -> CoinMatrix:
    _check_dimension(m)
    return CoinMatrix(_circulant(-1.0 + 2.0 / m, 2.0 / m, m))


def marking_coin(m: int) -> CoinMatrix:
    _check_dimension(m)
    return CoinMatrix(-np.eye(m, dtype=complex))


def _wrap(angle: float) -> float:
    """Map to (-pi, pi]."""
    w = math.remainder(angle, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


def coin_elements_analytic(spec: CoinSpec) -> CoinElements:
    """Moduli and phases of the Householder coin entries in closed form.

    Moduli come from the trigonometric expressions in ``phi``; phases use the
    quadrant-correct ``atan2`` of the trigonometric real/imaginary parts so that
    ``a_mod * exp(-1j * a_phase)`` reproduces the diagonal entry (and likewise
    for ``b``).  At ``phi = 0 (mod 2 pi)`` the off-diagonal entry vanishes; its
    phase is reported as 0 with ``degenerate=True``.
    """
    phi, zeta, m = spec.phi, spec.zeta, spec.m
    cos_phi = math.cos(phi)
    a_mod = math.sqrt(max(2.0 + (m - 2) * m + 2.0 * (m - 1) * cos_phi, 0.0)) / m
    # 2|sin(phi/2)| avoids the cancellation in sqrt(2 - 2 cos(phi)) near phi = 0
    b_mod = 2.0 * abs(math.sin(phi / 2.0)) / m

    a_re = (m - 1) * math.cos(zeta) + math.cos(phi + zeta)
    a_im = (m - 1) * math.sin(zeta) + math.sin(phi + zeta)
    a_phase = _wrap(-math.atan2(a_im, a_re))

    degenerate = b_mod == 0.0
    if degenerate:
        b_mod, b_phase = 0.0, 0.0
    else:
        # b' = (2 sin(phi/2) / m) * exp(i (zeta + phi/2 + pi/2)); tan of that
        # argument is -cot(phi/2 + zeta), the sign of sin(phi/2) fixes the branch.
        arg_b = zeta + phi / 2.0 + math.pi / 2.0
        if math.sin(phi / 2.0) < 0.0:
            arg_b += math.pi
        b_phase = _wrap(-arg_b)
    return CoinElements(
        a_mod=a_mod,
        a_phase=a_phase,
        b_mod=b_mod,
        b_phase=b_phase,
        delta=_wrap(a_phase - b_phase),
        degenerate=degenerate,
    )


def moduli_from_delta(m: int, delta: float) -> tuple[float, float]:
    """Moduli ``(|a|, |b|)`` of a unitary circulant coin with phase gap ``delta``.

    Only defined for ``m > 2`` and ``cos(delta) <= 0``.
    """
    if m <= 2:
        raise ValueError("moduli_from_delta requires m > 2")
    c = math.cos(delta)
    if c > 1e-15:
        raise ValueError(f"cos(delta) must be <= 0, got {c:.3g}")
    c = min(c, 0.0)
    a_mod = (m - 2) / math.sqrt(2.0 + (m - 2) * m + 2.0 * (m - 1) * math.cos(2.0 * delta))
    b_mod = -2.0 * c / math.sqrt((m - 2) ** 2 + 4.0 * (m - 1) * c * c)
    return a_mod, b_mod


def delta_from_moduli(m: int, a_mod: float, b_mod: float) -> float:
    if a_mod <= 0.0 or b_mod <= 0.0:
        raise ValueError("moduli must be positive")
    x = -(m - 2) * b_mod / (2.0 * a_mod)
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"arccos argument {x:.6g} outside [-1, 1]")
    return math.acos(x)


def verify_unitary(matrix) -> float:
    """Largest entrywise deviation of ``C C^dagger`` from the identity."""
    c = np.asarray(matrix, dtype=complex)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("verify_unitary expects a square matrix")
    return float(np.max(np.abs(c @ c.conj().T - np.eye(c.shape[0]))))
