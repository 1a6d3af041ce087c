"""High-probability ridge ``zeta*(phi)``, sine-corrected curve fits and stability widths.

The central branch is the line ``zeta = -2 phi + 3 pi``.  It passes through the
Grover point ``(pi, pi)`` and is the reference for all unwrapping.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .evaluators import as_evaluator

__all__ = [
    "CurveSpec",
    "RidgePoint",
    "AlphaFit",
    "Profile",
    "central_branch",
    "curve_zeta",
    "extract_ridge",
    "fit_alpha",
    "profile",
    "stability_width",
    "save_profile_csv",
    "save_ridge_csv",
    "save_fit_csv",
]

TWO_PI = 2.0 * math.pi
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
KINDS = ("line32", "line33", "line34", "sine")


@dataclass(frozen=True)
class CurveSpec:
    """A ``zeta(phi)`` curve.

    ``line32``: ``-2 phi + pi + 2 k pi``; ``line33``: ``phi/2 + pi/2``;
    ``line34``: ``pi``; ``sine``: ``-2 phi + 3 pi + alpha sin(2 phi)``.
    """

    kind: str
    k: int = 1
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"curve kind must be one of {KINDS}, got {self.kind!r}")
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    @classmethod
    def line32(cls, k: int = 1) -> "CurveSpec":
        return cls("line32", k=k)

    @classmethod
    def line33(cls) -> "CurveSpec":
        return cls("line33")

    @classmethod
    def line34(cls) -> "CurveSpec":
        return cls("line34")

    @classmethod
    def sine(cls, alpha: float) -> "CurveSpec":
        return cls("sine", alpha=alpha)

    def unwrapped(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.kind == "line32":
            return -2.0 * phi + math.pi + 2.0 * self.k * math.pi
        if self.kind == "line33":
            return 0.5 * phi + 0.5 * math.pi
        if self.kind == "line34":
            return np.full_like(phi, math.pi)
        return -2.0 * phi + 3.0 * math.pi + self.alpha * np.sin(2.0 * phi)


@dataclass(frozen=True)
class RidgePoint:
    phi: float
    zeta_unwrapped: float
    p: float = math.nan


@dataclass(frozen=True)
class AlphaFit:
    alpha: float
    rms_residual: float
    points: int = 0


@dataclass(frozen=True, eq=False)
class Profile:
    phi: np.ndarray
    zeta: np.ndarray
    p: np.ndarray


def central_branch(phi):
    return -2.0 * np.asarray(phi, dtype=float) + 3.0 * math.pi


def _wrap(z):
    w = np.mod(z, TWO_PI)
    # mod can round up to exactly 2 pi for tiny negative inputs
    return np.where(w >= TWO_PI, 0.0, w)


def curve_zeta(spec: CurveSpec, phi):
    """Curve value wrapped into ``[0, 2 pi)``."""
    z = _wrap(spec.unwrapped(phi))
    return float(z) if np.ndim(z) == 0 else z


def extract_ridge(
    evaluator,
    n: int,
    grid_size: int = 201,
    *,
    scan_points: int = 256,
    half_width: float = math.pi / 2.0,
    tol: float = 1e-4,
) -> list[RidgePoint]:
    """For each ``phi`` on a uniform grid over ``[0, 2 pi]``, the ``zeta`` maximizing ``p``.

    The search is confined to ``half_width`` around the central branch: a coarse
    scan of ``scan_points`` offsets, then golden-section refinement of the best
    bracket down to ``tol`` radians.  All ``phi`` values are refined together.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be >= 8")
    ev = as_evaluator(evaluator, n)
    phis = np.linspace(0.0, TWO_PI, grid_size)
    center = central_branch(phis)
    offs = np.linspace(-half_width, half_width, scan_points)

    def p_at(phi, off):
        phi, off = np.broadcast_arrays(phi, off)
        z = _wrap(central_branch(phi) + off)
        return np.asarray(ev(phi.ravel(), z.ravel()), dtype=float).reshape(phi.shape)

    coarse = p_at(phis[:, None], offs[None, :])
    j = np.argmax(coarse, axis=1)
    best_off = offs[j]
    best_p = coarse[np.arange(grid_size), j]

    h = offs[1] - offs[0]
    a = np.maximum(best_off - h, -half_width)
    b = np.minimum(best_off + h, half_width)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = p_at(phis, c), p_at(phis, d)
    while np.max(b - a) > tol:
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _GOLDEN * (b - a)
        new_d = a + _GOLDEN * (b - a)
        # reuse the surviving interior point; evaluate only the new one
        probe = np.where(left, new_c, new_d)
        fp = p_at(phis, probe)
        fd, fc = np.where(left, fc, fp), np.where(left, fp, fd)
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
    mid = 0.5 * (a + b)
    fm = p_at(phis, mid)
    use = fm > best_p
    off = np.where(use, mid, best_off)
    p = np.where(use, fm, best_p)
    return [RidgePoint(float(f), float(z), float(q)) for f, z, q in zip(phis, center + off, p)]


def fit_alpha(ridge: Sequence[RidgePoint], min_fraction: float = 0.9) -> AlphaFit:
    """Least-squares ``alpha`` of ``zeta = -2 phi + 3 pi + alpha sin(2 phi)``.

    Only ridge points whose probability is at least ``min_fraction`` of the
    ridge maximum enter the fit; ``min_fraction=0`` (or points without ``p``)
    uses every point.  Points where ``sin(2 phi)`` vanishes carry no
    information and are skipped.
    """
    if len(ridge) < 3:
        raise ValueError("need at least 3 ridge points")
    phi = np.array([r.phi for r in ridge])
    z = np.array([r.zeta_unwrapped for r in ridge])
    p = np.array([r.p for r in ridge])
    keep = np.ones(len(ridge), dtype=bool)
    if min_fraction > 0.0 and np.all(np.isfinite(p)):
        keep = p >= min_fraction * p.max()
    s = np.sin(2.0 * phi)
    keep &= np.abs(s) >= 1e-6
    if not keep.any():
        raise ValueError("no ridge point with sin(2 phi) != 0 survives selection")
    r = z[keep] - central_branch(phi[keep])
    s = s[keep]
    alpha = float(np.dot(r, s) / np.dot(s, s))
    rms = float(np.sqrt(np.mean((r - alpha * s) ** 2)))
    return AlphaFit(alpha, rms, int(keep.sum()))


def profile(evaluator, spec: CurveSpec, n: int, grid_size: int = 201) -> Profile:
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    ev = as_evaluator(evaluator, n)
    phis = np.linspace(0.0, TWO_PI, grid_size)
    z = _wrap(spec.unwrapped(phis))
    p = np.asarray(ev(phis, z), dtype=float)
    return Profile(phis, z, p)


def stability_width(prof: Profile, fraction: float) -> float:
    """Length of the contiguous ``phi`` interval around the maximum with ``p >= fraction * p_max``.

    Interval ends are linearly interpolated between the grid samples that
    straddle the threshold; an interval reaching the grid edge stops there.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    x, p = np.asarray(prof.phi), np.asarray(prof.p)
    j = int(np.argmax(p))
    t = fraction * p[j]
    lo = j
    while lo > 0 and p[lo - 1] >= t:
        lo -= 1
    hi = j
    while hi < len(p) - 1 and p[hi + 1] >= t:
        hi += 1

    def cross(i_out: int, i_in: int) -> float:
        dp = p[i_in] - p[i_out]
        frac = (t - p[i_out]) / dp if dp > 0 else 0.0
        return x[i_out] + frac * (x[i_in] - x[i_out])

    left = x[lo] if lo == 0 else cross(lo - 1, lo)
    right = x[hi] if hi == len(p) - 1 else cross(hi + 1, hi)
    return float(right - left)


def _writer(path):
    fh = open(path, "w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def save_profile_csv(prof: Profile, path) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["phi", "zeta", "p"])
        for row in zip(prof.phi, prof.zeta, prof.p):
            w.writerow([format(v, ".17g") for v in row])


def save_ridge_csv(ridge: Sequence[RidgePoint], path) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["phi", "zeta_unwrapped", "p"])
        for r in ridge:
            w.writerow([format(r.phi, ".17g"), format(r.zeta_unwrapped, ".17g"), format(r.p, ".17g")])


def save_fit_csv(fit: AlphaFit, n: int, source: str, path) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["alpha", "rms_residual", "n", "source"])
        w.writerow([format(fit.alpha, ".17g"), format(fit.rms_residual, ".17g"), n, source])
