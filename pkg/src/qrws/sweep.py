"""Monte Carlo and regular-grid datasets of success probabilities.

Random samples are drawn from a counter-based Philox stream: record ``j`` uses
the Philox block at counter ``j`` under key ``seed``, so the dataset does not
depend on how records are split across workers.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .walk import k_iterations, period, run_batch

__all__ = [
    "GENERATOR_VERSION",
    "CSV_HEADER",
    "SweepRecord",
    "Dataset",
    "DatasetError",
    "uniform_angles",
    "generate",
    "grid",
    "save_csv",
    "load_csv",
    "dumps_csv",
]

GENERATOR_VERSION = "philox-1"
CSV_HEADER = ["phi", "zeta", "n", "p", "k_eq1", "k_best"]
TWO_PI = 2.0 * math.pi
MARKED = (0,)


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class SweepRecord:
    phi: float
    zeta: float
    n: int
    p: float
    k_eq1: int
    k_best: Optional[int] = None

    def validate(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise DatasetError(f"p={self.p!r} outside [0, 1]")
        if self.k_eq1 != k_iterations(self.n):
            raise DatasetError(f"k_eq1={self.k_eq1} but n={self.n} requires {k_iterations(self.n)}")
        if self.k_best is not None and not 0 <= self.k_best <= period(self.n):
            raise DatasetError(f"k_best={self.k_best} outside [0, {period(self.n)}]")


@dataclass
class Dataset:
    records: list[SweepRecord]
    n: Optional[int] = None
    seed: Optional[int] = None
    generator_version: str = GENERATOR_VERSION
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def samples(self) -> int:
        return len(self.records)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(phi, zeta, n, p)`` columns as float arrays."""
        a = np.array([(r.phi, r.zeta, r.n, r.p) for r in self.records], dtype=float).reshape(-1, 4)
        return a[:, 0], a[:, 1], a[:, 2], a[:, 3]

    @classmethod
    def concat(cls, parts: list["Dataset"]) -> "Dataset":
        recs = [r for d in parts for r in d.records]
        ns = {r.n for r in recs}
        return cls(recs, n=ns.pop() if len(ns) == 1 else None)


def uniform_angles(seed: int, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    """``(phi, zeta)`` in ``[0, 2 pi)`` for record indices ``start..stop-1``."""
    count = stop - start
    if count <= 0:
        return np.empty(0), np.empty(0)
    bg = np.random.Philox(key=seed, counter=start)
    raw = bg.random_raw(4 * count).reshape(count, 4)[:, :2]
    u = (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)
    return TWO_PI * u[:, 0], TWO_PI * u[:, 1]


def _evaluate(n: int, phis: np.ndarray, zetas: np.ndarray, with_k_best: bool):
    k = k_iterations(n)
    if not with_k_best:
        return run_batch(n, phis, zetas, k, MARKED), None
    hist = run_batch(n, phis, zetas, max(k, period(n)), MARKED, history=True)
    return hist[:, k], np.argmax(hist[:, : period(n) + 1], axis=1)


def _chunk_job(args):
    n, seed, start, stop, with_k_best = args
    phis, zetas = uniform_angles(seed, start, stop)
    p, kb = _evaluate(n, phis, zetas, with_k_best)
    return phis, zetas, p, kb


def _records(n, phis, zetas, p, kb) -> list[SweepRecord]:
    k = k_iterations(n)
    p = np.clip(p, 0.0, 1.0)
    return [
        SweepRecord(float(phis[j]), float(zetas[j]), n, float(p[j]), k, None if kb is None else int(kb[j]))
        for j in range(len(phis))
    ]


def generate(
    n: int,
    samples: int,
    seed: int = 0,
    workers: int = 1,
    *,
    with_k_best: bool = False,
    chunk: int = 4096,
) -> Dataset:
    """Sample ``(phi, zeta)`` uniformly and simulate each point at the optimal step count."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    jobs = [(n, seed, lo, min(samples, lo + chunk), with_k_best) for lo in range(0, samples, chunk)]
    if workers == 1 or len(jobs) == 1:
        results = [_chunk_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_chunk_job, jobs))
    recs: list[SweepRecord] = []
    for phis, zetas, p, kb in results:
        recs.extend(_records(n, phis, zetas, p, kb))
    return Dataset(recs, n=n, seed=seed)


def grid(n: int, resolution: int, *, with_k_best: bool = False) -> Dataset:
    """Regular grid on ``[0, 2 pi]^2``, zeta in the outer loop and phi inner."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    axis = TWO_PI * np.arange(resolution) / (resolution - 1)
    zetas, phis = np.meshgrid(axis, axis, indexing="ij")
    p, kb = _evaluate(n, phis.ravel(), zetas.ravel(), with_k_best)
    return Dataset(_records(n, phis.ravel(), zetas.ravel(), p, kb), n=n)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def dumps_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in dataset.records:
        w.writerow([_fmt(r.phi), _fmt(r.zeta), r.n, _fmt(r.p), r.k_eq1, "" if r.k_best is None else r.k_best])
    return buf.getvalue()


def save_csv(dataset: Dataset, path) -> None:
    Path(path).write_text(dumps_csv(dataset), encoding="utf-8", newline="")


def load_csv(path) -> Dataset:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatasetError(f"{path}: empty file")
        if header != CSV_HEADER:
            raise DatasetError(f"{path}:1: expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}")
        recs = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise DatasetError(f"{path}:{lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
            try:
                rec = SweepRecord(
                    float(row[0]), float(row[1]), int(row[2]), float(row[3]), int(row[4]),
                    int(row[5]) if row[5] != "" else None,
                )
                rec.validate()
            except (ValueError, DatasetError) as exc:
                raise DatasetError(f"{path}:{lineno}: {exc}") from None
            recs.append(rec)
    if not recs:
        raise DatasetError(f"{path}: no records")
    ns = {r.n for r in recs}
    return Dataset(recs, n=ns.pop() if len(ns) == 1 else None)


def default_workers() -> int:
    env = os.environ.get("QRWS_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
