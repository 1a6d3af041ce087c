"""State-vector simulation of the coined quantum walk search on a hypercube.

An ``n``-qubit coin has ``m = 2**n`` directions and the hypercube has ``2**m``
nodes.  Amplitudes are stored flat with index ``i * 2**m + x`` for coin
direction ``i`` and node ``x``; coin direction ``i`` flips bit ``i`` (LSB = 0)
of the node index.

One iteration applies the conditional coin (marking coin on marked nodes,
traversing coin elsewhere) followed by the shift.  The two oracle calls that
surround the coin in the circuit are folded into that conditional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .coin import CoinMatrix, CoinSpec, build_householder_coin, householder_elements, marking_coin

__all__ = [
    "MAX_QUBITS",
    "WalkState",
    "RunResult",
    "init_uniform",
    "k_iterations",
    "period",
    "is_marked",
    "apply_conditional_coin",
    "apply_shift",
    "step",
    "success_probability",
    "run",
    "scan_iterations",
    "run_batch",
    "build_full_operator",
]

# n = 4 means 16 * 65536 amplitudes (16 MiB); n = 5 would need 2**37 bytes.
MAX_QUBITS = 4


@dataclass(frozen=True, eq=False)
class WalkState:
    n: int
    amplitudes: np.ndarray
    marked: frozenset = field(default_factory=frozenset)

    @property
    def m(self) -> int:
        return 2**self.n

    @property
    def node_count(self) -> int:
        return 2**self.m

    def grid(self) -> np.ndarray:
        """Amplitudes viewed as an ``(m, 2**m)`` array (coin direction, node)."""
        return self.amplitudes.reshape(self.m, self.node_count)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def _with(self, grid: np.ndarray) -> "WalkState":
        return WalkState(self.n, grid.reshape(-1), self.marked)


@dataclass
class RunResult:
    probability: float
    steps: int
    history: Optional[np.ndarray] = None


def _check_size(n: int, max_qubits: Optional[int]) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"coin qubit count must be a positive integer, got {n!r}")
    cap = MAX_QUBITS if max_qubits is None else max_qubits
    if n > cap:
        raise MemoryError(
            f"n={n} needs {2**n * 2 ** (2**n)} amplitudes; the configured cap is n <= {cap}"
        )


def _check_marked(marked: Iterable[int], node_count: int) -> frozenset:
    ms = frozenset(int(x) for x in marked)
    if not ms:
        raise ValueError("the marked set must be nonempty")
    bad = [x for x in ms if not 0 <= x < node_count]
    if bad:
        raise ValueError(f"marked nodes {sorted(bad)} outside [0, {node_count})")
    return ms


def init_uniform(n: int, marked: Iterable[int], max_qubits: Optional[int] = None) -> WalkState:
    """Equal-weight superposition over all (direction, node) pairs."""
    _check_size(n, max_qubits)
    m = 2**n
    size = m * 2**m
    ms = _check_marked(marked, 2**m)
    return WalkState(n, np.full(size, 1.0 / math.sqrt(size), dtype=complex), ms)


def _ceil_guarded(x: float) -> int:
    nearest = round(x)
    if 0.0 <= nearest - x <= 1e-9:
        return int(nearest)
    return math.ceil(x)


def k_iterations(n: int) -> int:
    """Number of walk iterations ``ceil(pi/2 * sqrt(2**(m-1)))`` for ``m = 2**n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = 2**n
    return _ceil_guarded(math.pi / 2.0 * math.sqrt(2.0 ** (m - 1)))


def period(n: int) -> int:
    """Whole-step length of one oscillation period, ``ceil(pi * sqrt(2**(m-1)))``."""
    m = 2**n
    return _ceil_guarded(math.pi * math.sqrt(2.0 ** (m - 1)))


def is_marked(state: WalkState, x: int) -> bool:
    if not 0 <= x < state.node_count:
        raise ValueError(f"node {x} outside [0, {state.node_count})")
    return x in state.marked


def _marked_index(state: WalkState) -> np.ndarray:
    return np.fromiter(sorted(state.marked), dtype=np.intp)


def apply_conditional_coin(state: WalkState, c0: CoinMatrix, c1: CoinMatrix) -> WalkState:
    """Apply ``c1`` to the direction vector of marked nodes and ``c0`` elsewhere."""
    a0, a1 = np.asarray(c0), np.asarray(c1)
    if a0.shape != (state.m, state.m) or a1.shape != (state.m, state.m):
        raise ValueError(
            f"coin shapes {a0.shape}, {a1.shape} do not match dimension m={state.m}"
        )
    psi = state.grid()
    out = a0 @ psi
    idx = _marked_index(state)
    out[:, idx] = a1 @ psi[:, idx]
    return state._with(out)


def _shift_grid(psi: np.ndarray) -> np.ndarray:
    # psi[..., i, x] -> psi[..., i, x ^ (1 << i)]
    m, nodes = psi.shape[-2:]
    out = np.empty_like(psi)
    lead = psi.shape[:-2]
    for i in range(m):
        row = psi[..., i, :].reshape(*lead, nodes >> (i + 1), 2, 1 << i)
        out[..., i, :] = row[..., ::-1, :].reshape(*lead, nodes)
    return out


def apply_shift(state: WalkState) -> WalkState:
    return state._with(_shift_grid(state.grid()))


def step(state: WalkState, c0: CoinMatrix, c1: CoinMatrix) -> WalkState:
    """One walk iteration: conditional coin, then shift."""
    return apply_shift(apply_conditional_coin(state, c0, c1))


def success_probability(state: WalkState) -> float:
    col = state.grid()[:, _marked_index(state)]
    return float(np.sum(col.real**2 + col.imag**2))


def _coins(n: int, phi: float, zeta: float) -> tuple[CoinMatrix, CoinMatrix]:
    m = 2**n
    return build_householder_coin(CoinSpec(phi, zeta, m)), marking_coin(m)


def run(
    n: int,
    phi: float,
    zeta: float,
    marked: Iterable[int] = (0,),
    steps: Optional[int] = None,
    *,
    history: bool = False,
    max_qubits: Optional[int] = None,
) -> RunResult:
    """Success probability after ``steps`` iterations (default: :func:`k_iterations`)."""
    state = init_uniform(n, marked, max_qubits)
    k = k_iterations(n) if steps is None else int(steps)
    if k < 0:
        raise ValueError("steps must be >= 0")
    c0, c1 = _coins(n, phi, zeta)
    hist = [success_probability(state)] if history else None
    for _ in range(k):
        state = step(state, c0, c1)
        if hist is not None:
            hist.append(success_probability(state))
    p = hist[-1] if hist is not None else success_probability(state)
    return RunResult(p, k, None if hist is None else np.array(hist))


def scan_iterations(
    n: int, phi: float, zeta: float, marked: Iterable[int] = (0,), k_max: int = 1, **kw
) -> np.ndarray:
    """Success probability after 0, 1, ..., ``k_max`` iterations."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    return run(n, phi, zeta, marked, k_max, history=True, **kw).history


def _shift_permutation(m: int) -> np.ndarray:
    """Flat gather index: ``out[i * 2**m + x] = in[i * 2**m + (x ^ (1 << i))]``."""
    nodes = 2**m
    x = np.arange(nodes)
    return (np.arange(m)[:, None] * nodes + (x[None, :] ^ (1 << np.arange(m))[:, None])).ravel()


def run_batch(
    n: int,
    phis,
    zetas,
    steps: Optional[int] = None,
    marked: Iterable[int] = (0,),
    *,
    chunk: int = 1 << 16,
    history: bool = False,
    max_qubits: Optional[int] = None,
) -> np.ndarray:
    """Vectorized :func:`run` over many ``(phi, zeta)`` pairs.

    Uses the rank-one structure of the Householder coin, ``C v = e^{i zeta} v
    + b' * sum(v)``, instead of a dense coin product.  ``chunk`` bounds the
    number of amplitudes held at once (small chunks stay in cache).  Returns
    shape ``(len(phis),)``, or ``(len(phis), steps + 1)`` when ``history`` is set.
    """
    _check_size(n, max_qubits)
    m = 2**n
    nodes = 2**m
    ms = _check_marked(marked, nodes)
    idx = np.fromiter(sorted(ms), dtype=np.intp)
    k = k_iterations(n) if steps is None else int(steps)
    if k < 0:
        raise ValueError("steps must be >= 0")
    phis, zetas = np.broadcast_arrays(
        np.atleast_1d(np.asarray(phis, dtype=float)), np.atleast_1d(np.asarray(zetas, dtype=float))
    )
    phis, zetas = phis.ravel(), zetas.ravel()
    total = phis.size
    out = np.empty((total, k + 1)) if history else np.empty(total)
    per = max(1, chunk // (m * nodes))
    perm = _shift_permutation(m)
    amp0 = 1.0 / math.sqrt(m * nodes)

    def prob(p):
        sel = p[:, :, idx]
        return np.sum(sel.real**2 + sel.imag**2, axis=(1, 2))

    for lo in range(0, total, per):
        hi = min(total, lo + per)
        b = hi - lo
        _, bprime = householder_elements(phis[lo:hi], zetas[lo:hi], m)
        g = np.exp(1j * zetas[lo:hi])[:, None, None]
        h = bprime[:, None, None]
        psi = np.full((b, m, nodes), amp0, dtype=complex)
        buf = np.empty_like(psi)
        if history:
            out[lo:hi, 0] = prob(psi)
        for t in range(k):
            s = psi.sum(axis=1, keepdims=True)
            marked_amp = psi[:, :, idx]
            psi *= g
            s *= h
            psi += s
            psi[:, :, idx] = -marked_amp
            np.take(psi.reshape(b, -1), perm, axis=1, out=buf.reshape(b, -1))
            psi, buf = buf, psi
            if history:
                out[lo:hi, t + 1] = prob(psi)
        if not history:
            out[lo:hi] = prob(psi)
    return out


def build_full_operator(n: int, phi: float, zeta: float, marked: Iterable[int] = (0,)) -> np.ndarray:
    """Dense matrix of one iteration, built element by element (``n <= 2``)."""
    if n > 2:
        raise ValueError("build_full_operator is limited to n <= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    m = 2**n
    nodes = 2**m
    ms = _check_marked(marked, nodes)
    c0 = np.asarray(build_householder_coin(CoinSpec(phi, zeta, m)))
    c1 = -np.eye(m)
    dim = m * nodes
    coin = np.zeros((dim, dim), dtype=complex)
    for x in range(nodes):
        c = c1 if x in ms else c0
        for i in range(m):
            for j in range(m):
                coin[i * nodes + x, j * nodes + x] = c[i, j]
    shift = np.zeros((dim, dim))
    for i in range(m):
        for x in range(nodes):
            shift[i * nodes + (x ^ (1 << i)), i * nodes + x] = 1.0
    return shift @ coin
