"""Validated stochastic matrices and the basic quantities computed from them.

Matrices are stored row-stochastic and stationary distributions are left
fixed points ``pi P = pi``. For the symmetric chains used on the quantum-walk
path the row and column conventions coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    MatrixFormatError,
    NegativeEntry,
    NotErgodic,
    NotSquare,
    NotSymmetric,
    RowSumViolation,
)

ROW_SUM_TOL = 1e-12
ROW_SUM_REJECT = 1e-9
SYMMETRY_TOL = 1e-12
STATIONARY_RESIDUAL_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    entries: np.ndarray
    symmetric: bool
    ergodic: bool

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class Perturbation:
    """The additive noise ``E = Q - P`` with its spectral and row-sum norms."""

    entries: np.ndarray
    norm_l2: float
    norm_linf: float

    def __post_init__(self):
        rows = np.abs(self.entries.sum(axis=1))
        if rows.size and rows.max() > ROW_SUM_TOL:
            raise ValueError(f"perturbation rows must sum to 0 (max |row sum| = {rows.max():.3e})")

    @classmethod
    def from_matrix(cls, e) -> Perturbation:
        e = _frozen(e)
        l2, linf = norms(e)
        return cls(e, l2, linf)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    eigenvalues: np.ndarray
    gap: float


@dataclass(frozen=True, eq=False)
class Distribution:
    weights: np.ndarray

    def __post_init__(self):
        w = self.weights
        if w.ndim != 1:
            raise ValueError("distribution weights must be one-dimensional")
        if w.size and w.min() < 0.0:
            raise ValueError("distribution weights must be nonnegative")
        if abs(w.sum() - 1.0) > ROW_SUM_TOL:
            raise ValueError(f"distribution weights sum to {w.sum()!r}")

    @classmethod
    def of(cls, weights) -> Distribution:
        return cls(_frozen(weights))

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def _reaches_all(adj):
    n = adj.shape[0]
    level = np.full(n, -1, dtype=np.int64)
    level[0] = 0
    frontier = np.array([0])
    depth = 0
    while frontier.size:
        depth += 1
        nxt = adj[frontier].any(axis=0) & (level < 0)
        level[nxt] = depth
        frontier = np.flatnonzero(nxt)
    return level


def is_irreducible_aperiodic(support) -> bool:
    """Irreducibility by forward/backward BFS from state 0, period by gcd of level differences."""
    adj = np.asarray(support, dtype=bool)
    if adj.shape[0] == 0:
        return False
    level = _reaches_all(adj)
    if (level < 0).any() or (_reaches_all(adj.T) < 0).any():
        return False
    u, v = np.nonzero(adj)
    period = int(np.gcd.reduce(np.abs(level[u] + 1 - level[v])))
    return period == 1


def validate(raw) -> StochasticMatrix:
    """Check ``raw`` is a square row-stochastic matrix and set its structural flags.

    Rows within ``1e-9`` of unit sum are repaired to within ``1e-12``, through the
    diagonal when that keeps it nonnegative (this preserves symmetry), otherwise
    by rescaling the row.

    Raises:
        NotSquare: ``raw`` is not an n x n matrix.
        NegativeEntry: some entry is below zero.
        RowSumViolation: some row sum is off by more than ``1e-9``.
    """
    a = np.array(raw, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise MatrixFormatError("matrix contains non-finite values")
    neg = np.argwhere(a < 0.0)
    if neg.size:
        i, j = neg[0]
        raise NegativeEntry(int(i), int(j), float(a[i, j]))
    sums = a.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_REJECT)
    if bad.size:
        raise RowSumViolation(int(bad[0]), float(sums[bad[0]]))
    for i in np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL):
        fixed = a[i, i] + (1.0 - sums[i])
        if fixed >= 0.0:
            a[i, i] = fixed
        else:
            a[i] /= sums[i]
    symmetric = bool(np.abs(a - a.T).max() <= SYMMETRY_TOL)
    return StochasticMatrix(_frozen(a), symmetric, is_irreducible_aperiodic(a > 0.0))


def as_stochastic(p) -> StochasticMatrix:
    return p if isinstance(p, StochasticMatrix) else validate(p)


def uniform_chain(n: int) -> StochasticMatrix:
    return validate(np.full((n, n), 1.0 / n))


def stationary_distribution(p) -> Distribution:
    """Unique stationary distribution of an ergodic chain.

    Symmetric chains return the exact uniform vector. Otherwise power
    iteration from uniform; if the residual ``||pi P - pi||_1`` stays above
    ``1e-10`` the fixed point is solved directly with one balance equation
    replaced by normalization.
    """
    p = as_stochastic(p)
    if not p.ergodic:
        raise NotErgodic("chain is not irreducible and aperiodic; stationary distribution is not unique")
    n = p.n
    if p.symmetric:
        return Distribution.of(np.full(n, 1.0 / n))
    pi, _, res = _kernels.stationary_power(p.entries, np.full(n, 1.0 / n))
    if not res <= STATIONARY_RESIDUAL_TOL:
        a = p.entries.T - np.eye(n)
        a[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        pi = np.linalg.solve(a, b)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    return Distribution.of(pi)


def spectral_summary(p) -> SpectralSummary:
    p = as_stochastic(p)
    if not p.symmetric:
        raise NotSymmetric("spectral summary requires a symmetric chain")
    ev = _kernels.eigvalsh(p.entries)
    gap = 1.0 - ev[1] if ev.size > 1 else 1.0
    ev.setflags(write=False)
    return SpectralSummary(ev, float(gap))


def ergodicity_coefficient(p) -> float:
    """Dobrushin coefficient: the largest half-l1 distance between two rows."""
    p = p.entries if isinstance(p, StochasticMatrix) else np.asarray(p, dtype=np.float64)
    return _kernels.tau1(p)


def tv_distance(p, q) -> float:
    p = p.weights if isinstance(p, Distribution) else np.asarray(p, dtype=np.float64)
    q = q.weights if isinstance(q, Distribution) else np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionMismatch(f"distributions have shapes {p.shape} and {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())


def norms(e) -> tuple[float, float]:
    """Spectral norm (largest singular value) and max absolute row sum of ``e``."""
    e = np.asarray(e, dtype=np.float64)
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {e.shape}")
    l2 = _kernels.top_singular_value(e)
    linf = float(np.abs(e).sum(axis=1).max()) if e.size else 0.0
    return l2, linf


# -- matrix text format ------------------------------------------------------


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    try:
        n = int(lines[0])
    except ValueError:
        raise MatrixFormatError(f"first line must be the dimension, got {lines[0]!r}") from None
    if n < 1:
        raise MatrixFormatError(f"dimension must be positive, got {n}")
    rows = lines[1:]
    if len(rows) != n:
        raise MatrixFormatError(f"expected {n} rows, found {len(rows)}")
    out = np.empty((n, n))
    for i, row in enumerate(rows):
        fields = row.split()
        if len(fields) != n:
            raise MatrixFormatError(f"row {i} has {len(fields)} values, expected {n}")
        try:
            out[i] = [float(f) for f in fields]
        except ValueError as exc:
            raise MatrixFormatError(f"row {i}: {exc}") from None
    return out


def format_matrix(a, comment: str | None = None) -> str:
    a = np.asarray(a, dtype=np.float64)
    parts = []
    if comment:
        parts.extend(f"# {line}" for line in comment.splitlines())
    parts.append(str(a.shape[0]))
    parts.extend(" ".join(format(float(x), ".17g") for x in row) for row in a)
    return "\n".join(parts) + "\n"


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))


def write_matrix(path, a, comment: str | None = None) -> None:
    Path(path).write_text(format_matrix(a, comment), encoding="utf-8")
