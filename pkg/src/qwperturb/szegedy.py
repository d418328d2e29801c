"""Szegedy quantization of a chain, marked-set partitions and absorption dynamics.

The edge space is ``C^n (x) C^n`` with basis ``|x, y>`` stored at index
``x * n + y``. The one-step walk is ``W = S (2 Pi_A - I)`` where
``Pi_A`` projects onto the states ``|x> (x) sum_y sqrt(P_xy) |y>`` and ``S``
swaps the two registers. ``S`` is itself a reflection, and ``W^2`` equals the
two-reflection form ``(2 Pi_B - I)(2 Pi_A - I)``. For each eigenvalue
``cos(theta)`` of the discriminant, ``W`` carries eigenphases ``+-theta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _kernels
from .errors import AllMarked, DimensionLimit, EmptyMarkedSet, SaturatedLeak
from .markov_core import StochasticMatrix, as_stochastic, validate

DEFAULT_MAX_DIM = 4096
SATURATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SzegedyWalk:
    n: int
    discriminant: np.ndarray
    amplitudes: np.ndarray

    @cached_property
    def swap_permutation(self) -> np.ndarray:
        n = self.n
        idx = np.arange(n * n)
        return (idx % n) * n + idx // n

    @cached_property
    def reflection_a(self) -> np.ndarray:
        n = self.n
        r = np.zeros((n * n, n * n))
        eye = np.eye(n)
        for x in range(n):
            a = self.amplitudes[x]
            r[x * n : (x + 1) * n, x * n : (x + 1) * n] = 2.0 * np.outer(a, a) - eye
        return r

    @cached_property
    def operator(self) -> np.ndarray:
        w = self.reflection_a[self.swap_permutation]
        w.setflags(write=False)
        return w

    def two_reflection_operator(self) -> np.ndarray:
        """``(2 Pi_B - I)(2 Pi_A - I)``, which equals ``W @ W``."""
        perm = self.swap_permutation
        r_a = self.reflection_a
        r_b = r_a[perm][:, perm]
        return r_b @ r_a

    def step(self, state):
        """Apply ``W`` to a length ``n**2`` state without forming the dense operator."""
        n = self.n
        psi = np.asarray(state).reshape(n, n)
        a = self.amplitudes
        reflected = 2.0 * a * (a * psi).sum(axis=1, keepdims=True) - psi
        return reflected.T.reshape(-1).copy()

    def eigenphases(self) -> np.ndarray:
        return np.sort(np.angle(np.linalg.eigvals(self.operator)))


def build_walk(p, max_dim: int = DEFAULT_MAX_DIM) -> SzegedyWalk:
    p = as_stochastic(p)
    if p.n * p.n > max_dim:
        raise DimensionLimit(f"walk dimension {p.n * p.n} exceeds the limit {max_dim}")
    amps = np.sqrt(p.entries)
    disc = np.sqrt(p.entries * p.entries.T)
    amps.setflags(write=False)
    disc.setflags(write=False)
    return SzegedyWalk(p.n, disc, amps)


def predicted_phases(discriminant, boundary_tol: float = 1e-12) -> np.ndarray:
    """``+-arccos(lambda)`` for every discriminant eigenvalue; ``lambda = +-1`` contributes one phase.

    The boundary test is on ``lambda``, not on the phase: arccos turns a rounding
    error of 1e-16 at ``lambda = 1`` into a phase of 1e-8.
    """
    phases = []
    for lam in _kernels.eigvalsh(discriminant):
        if 1.0 - abs(lam) <= boundary_tol:
            phases.append(0.0 if lam > 0 else np.pi)
        else:
            theta = float(np.arccos(lam))
            phases.extend((theta, -theta))
    return np.array(phases)


def _circular_distance(a, b):
    d = np.abs(a - b) % (2.0 * np.pi)
    return np.minimum(d, 2.0 * np.pi - d)


def spectral_correspondence(walk: SzegedyWalk) -> dict:
    """Match predicted phases to the walk spectrum one-to-one.

    Returns the worst matched distance and the worst distance of any unmatched
    eigenphase from the trivial set ``{0, pi}`` (the ``-S`` part of the walk).
    """
    actual = walk.eigenphases()
    predicted = predicted_phases(walk.discriminant)
    cost = _circular_distance(predicted[:, None], actual[None, :])
    rows, cols = linear_sum_assignment(cost)
    matched = float(cost[rows, cols].max()) if rows.size else 0.0
    rest = np.delete(actual, cols)
    trivial = np.minimum(_circular_distance(rest, 0.0), _circular_distance(rest, np.pi))
    return {
        "predicted": predicted,
        "eigenphases": actual,
        "max_matched_error": matched,
        "max_unmatched_error": float(trivial.max()) if trivial.size else 0.0,
    }


@dataclass(frozen=True, eq=False)
class MarkedPartition:
    """A chain reordered so marked states come last, with its four blocks.

    ``modified`` is the absorbing chain in row convention: unmarked rows keep
    their transitions, marked rows become identity rows. Its transpose is the
    column-convention form ``[[P1, 0], [P3, I]]``.
    """

    permutation: np.ndarray
    marked: tuple
    epsilon: float
    reordered: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray
    modified: StochasticMatrix

    @property
    def n(self) -> int:
        return self.reordered.shape[0]

    @property
    def unmarked_count(self) -> int:
        return self.p1.shape[0]


def mark(p, marked) -> MarkedPartition:
    p = as_stochastic(p)
    n = p.n
    m = sorted({int(i) for i in marked})
    if not m:
        raise EmptyMarkedSet("the marked set must be non-empty")
    if m[0] < 0 or m[-1] >= n:
        raise ValueError(f"marked indices must lie in [0, {n - 1}], got {m}")
    if len(m) == n:
        raise AllMarked("every state is marked; the unmarked block is empty")
    mset = set(m)
    perm = np.array([i for i in range(n) if i not in mset] + m, dtype=np.intp)
    r = p.entries[np.ix_(perm, perm)]
    k = n - len(m)
    mod = r.copy()
    mod[k:, :] = 0.0
    mod[k:, k:] = np.eye(n - k)
    blocks = [r[:k, :k], r[:k, k:], r[k:, :k], r[k:, k:]]
    for b in blocks:
        b.setflags(write=False)
    r.setflags(write=False)
    perm.setflags(write=False)
    return MarkedPartition(perm, tuple(m), len(m) / n, r, *blocks, validate(mod))


def leak_norm(part: MarkedPartition) -> float:
    return _kernels.top_singular_value(part.p1)


def _leak_gap(part):
    leak = leak_norm(part)
    if leak >= 1.0 - SATURATION_TOL:
        raise SaturatedLeak(f"||P1|| = {leak!r} is within {SATURATION_TOL} of 1")
    return 1.0 - leak


def hitting_proxy(part: MarkedPartition) -> float:
    """``sqrt(1 / (1 - ||P1||))`` with the order constant fixed at one. A proxy, not a step count."""
    return float(np.sqrt(1.0 / _leak_gap(part)))


def classical_hitting_proxy(part: MarkedPartition) -> float:
    return 1.0 / _leak_gap(part)


def simulate_absorption(part: MarkedPartition, steps: int, max_dim: int = DEFAULT_MAX_DIM) -> np.ndarray:
    """Iterate the walk of the absorbing chain and record the absorbed weight.

    The start state is the uniform superposition of the edge states ``|x, y>``
    with ``x, y`` unmarked and ``P_xy > 0``. Entry
    ``t`` of the result is one minus the squared norm of the state's component on
    unmarked-unmarked edges after ``t`` steps; entry 0 is therefore 0.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    walk = build_walk(part.modified, max_dim)
    n, k = part.n, part.unmarked_count
    psi = np.zeros((n, n))
    psi[:k, :k] = part.p1 > 0.0
    norm = np.sqrt(np.sum(psi))
    if norm == 0.0:
        raise ValueError("no unmarked-to-unmarked transitions; the start state is empty")
    state = (psi / norm).reshape(-1)
    curve = np.empty(steps + 1)
    for t in range(steps + 1):
        if t:
            state = walk.step(state)
        inner = state.reshape(n, n)[:k, :k]
        curve[t] = 1.0 - float(np.sum(inner * inner))
    curve[0] = 0.0
    return curve
