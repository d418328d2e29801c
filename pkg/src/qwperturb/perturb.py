"""Perturbations ``E`` that keep ``Q = P + E`` a valid stochastic matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    CannotPreserveStochasticity,
    DimensionMismatch,
    InfeasibleTruncation,
    NotErgodic,
    NotSymmetric,
)
from .markov_core import Perturbation, StochasticMatrix, as_stochastic, validate

MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class NoiseSpec:
    """How to perturb an input chain: fixed-point truncation or random additive noise.

    Random noise is symmetric for symmetric chains and row-wise otherwise.
    """

    kind: str
    bits: int = 8
    magnitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("trunc", "rand"):
            raise ValueError(f"unknown noise kind {self.kind!r}; expected 'trunc' or 'rand'")
        if not 2 <= self.bits <= 52:
            raise ValueError(f"bits must lie in [2, 52], got {self.bits}")
        if not 0.0 <= self.magnitude <= 1.0:
            raise ValueError(f"magnitude must lie in [0, 1], got {self.magnitude}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def apply(self, p) -> tuple[StochasticMatrix, Perturbation]:
        if self.kind == "trunc":
            return truncate_precision(p, self.bits)
        p = as_stochastic(p)
        if p.symmetric:
            return random_perturbation(p, self.magnitude, self.seed)
        return random_row_perturbation(p, self.magnitude, self.seed)


def decompose(q, p) -> Perturbation:
    q = as_stochastic(q)
    p = as_stochastic(p)
    if q.n != p.n:
        raise DimensionMismatch(f"Q is {q.n}x{q.n} but P is {p.n}x{p.n}")
    return Perturbation.from_matrix(q.entries - p.entries)


def truncate_precision(p, bits: int) -> tuple[StochasticMatrix, Perturbation]:
    """Round couplings to multiples of ``2**-bits`` and repair the diagonal.

    The strict upper triangle is rounded (ties to even) and mirrored, then each
    diagonal entry absorbs whatever the row needs to sum to one.

    Raises:
        NotSymmetric: ``p`` is not symmetric.
        InfeasibleTruncation: rounding up pushed some diagonal entry below zero.
    """
    p = as_stochastic(p)
    if not p.symmetric:
        raise NotSymmetric("precision truncation is defined for symmetric chains")
    if not 2 <= bits <= 52:
        raise ValueError(f"bits must lie in [2, 52], got {bits}")
    scale = 2.0**bits
    upper = np.triu(np.round(p.entries * scale) / scale, k=1)
    q = upper + upper.T
    diag = 1.0 - q.sum(axis=1)
    if diag.min() < 0.0:
        i = int(np.argmin(diag))
        raise InfeasibleTruncation(
            f"row {i}: rounded couplings sum to {1.0 - diag[i]!r}, diagonal would be negative at {bits} bits"
        )
    q[np.diag_indices_from(q)] = diag
    qm = validate(q)
    return qm, decompose(qm, p)


def _zero_row_sum_symmetric(rng, n):
    g = rng.standard_normal((n, n))
    g = 0.5 * (g + g.T)
    rows = g.mean(axis=1, keepdims=True)
    # Double centering; one pass is exact for symmetric input.
    return g - rows - rows.T + g.mean()


def _zero_row_sum(rng, n):
    g = rng.standard_normal((n, n))
    return g - g.mean(axis=1, keepdims=True)


def _max_feasible_scale(p, d):
    neg = d < 0.0
    if not neg.any():
        return np.inf
    return float((p[neg] / -d[neg]).min())


def _rejection_sample(p, magnitude, seed, direction, max_attempts):
    n = p.n
    if magnitude == 0.0:
        return p, Perturbation.from_matrix(np.zeros((n, n)))
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        d = direction(rng, n)
        frob = float(np.sqrt(np.sum(d * d)))
        if frob == 0.0:
            break
        t_max = _max_feasible_scale(p.entries, d)
        # ||D||_2 <= ||D||_F, so this rejects without computing the spectral norm.
        if magnitude / frob > t_max:
            continue
        sigma = _kernels.top_singular_value(d)
        q = p.entries + d * (magnitude / sigma)
        if q.min() < 0.0:
            continue
        qm = validate(q)
        return qm, decompose(qm, p)
    raise CannotPreserveStochasticity(
        f"no perturbation of spectral norm {magnitude!r} keeps Q nonnegative after {max_attempts} attempts"
    )


def random_perturbation(p, magnitude: float, seed: int, max_attempts: int = MAX_ATTEMPTS):
    """Random symmetric zero-row-sum noise scaled to spectral norm ``magnitude``.

    Deterministic in ``seed``. Candidates that would make ``Q`` negative are
    rejected; there is no clipping, so ``||E||_2`` is exactly what was asked for.

    Returns:
        ``(Q, E)`` with ``Q = P + E`` validated.

    Raises:
        CannotPreserveStochasticity: every candidate within ``max_attempts`` was rejected.
    """
    p = as_stochastic(p)
    if not p.symmetric:
        raise NotSymmetric("random symmetric perturbation needs a symmetric chain")
    if not p.ergodic:
        raise NotErgodic("random symmetric perturbation needs an ergodic chain")
    if magnitude < 0.0:
        raise ValueError(f"magnitude must be nonnegative, got {magnitude}")
    return _rejection_sample(p, float(magnitude), seed, _zero_row_sum_symmetric, max_attempts)


def random_row_perturbation(p, magnitude: float, seed: int, max_attempts: int = MAX_ATTEMPTS):
    """Like :func:`random_perturbation` but for general (non-symmetric) chains.

    Noise rows are centered independently, so ``E`` has zero row sums but no symmetry.
    """
    p = as_stochastic(p)
    if magnitude < 0.0:
        raise ValueError(f"magnitude must be nonnegative, got {magnitude}")
    return _rejection_sample(p, float(magnitude), seed, _zero_row_sum, max_attempts)
