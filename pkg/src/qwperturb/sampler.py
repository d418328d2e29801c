"""Desk-scale emulation of quantum-sample preparation along a chain sequence.

The preparation algorithm itself is treated as a black box that returns a
distribution within total variation ``eta`` of the final stationary
distribution. Only that contract is modelled here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundReport, quantum_sample_bound
from .errors import DimensionMismatch, NotErgodic, OverlapTooSmall
from .markov_core import (
    Distribution,
    StochasticMatrix,
    as_stochastic,
    spectral_summary,
    stationary_distribution,
    tv_distance,
    validate,
)

DEFAULT_MIN_OVERLAP = 0.5
BROKEN_OVERLAP = 1e-6


def overlap(p, q) -> float:
    """Squared inner product of the coherent states ``sum_x sqrt(p_x) |x>``."""
    p = p.weights if isinstance(p, Distribution) else np.asarray(p, dtype=np.float64)
    q = q.weights if isinstance(q, Distribution) else np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionMismatch(f"distributions have shapes {p.shape} and {q.shape}")
    return float(np.sum(np.sqrt(p * q)) ** 2)


def _spectral_gap(chain: StochasticMatrix) -> float:
    if chain.symmetric:
        return spectral_summary(chain).gap
    moduli = np.sort(np.abs(np.linalg.eigvals(chain.entries)))[::-1]
    return float(1.0 - moduli[1]) if moduli.size > 1 else 1.0


@dataclass(frozen=True, eq=False)
class ChainSequence:
    chains: tuple
    distributions: tuple
    overlaps: np.ndarray
    gaps: np.ndarray

    @property
    def c(self) -> float:
        return float(self.overlaps.min())

    @property
    def r(self) -> int:
        return len(self.chains) - 1

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "c": self.c,
            "chains": [{"index": i, "matrix": ch.entries.tolist()} for i, ch in enumerate(self.chains)],
            "distributions": [d.weights.tolist() for d in self.distributions],
            "overlaps": self.overlaps.tolist(),
            "gaps": self.gaps.tolist(),
        }


def build_sequence(q, r: int) -> ChainSequence:
    """Interpolate linearly from the uniform chain to ``q`` in ``r`` steps."""
    q = as_stochastic(q)
    if not q.ergodic:
        raise NotErgodic("the target chain must be ergodic")
    if r < 1:
        raise ValueError(f"r must be at least 1, got {r}")
    n = q.n
    uniform = np.full((n, n), 1.0 / n)
    chains = []
    for i in range(r + 1):
        beta = i / r
        chains.append(q if i == r else validate((1.0 - beta) * uniform + beta * q.entries))
    dists = [stationary_distribution(ch) for ch in chains]
    ov = np.array([overlap(dists[i], dists[i + 1]) for i in range(r)])
    gaps = np.array([_spectral_gap(ch) for ch in chains])
    return ChainSequence(tuple(chains), tuple(dists), ov, gaps)


@dataclass(frozen=True, eq=False)
class EmulatedSample:
    target: Distribution
    output: Distribution
    eta: float
    achieved_tv: float
    warnings: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "target": self.target.weights.tolist(),
            "output": self.output.weights.tolist(),
            "eta": self.eta,
            "achieved_tv": self.achieved_tv,
            "warnings": list(self.warnings),
        }


def emulate_sampling(seq: ChainSequence, eta: float, seed: int, min_overlap: float = DEFAULT_MIN_OVERLAP):
    """Return a distribution at total variation at most ``eta`` from the last stationary distribution.

    A precision ``eta'`` is drawn uniformly from ``[0, eta]`` and the target is
    moved along a random zero-sum direction by that much, or by less if the
    direction would leave the simplex first.

    Raises:
        OverlapTooSmall: some adjacent overlap is below ``1e-6``.
    """
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta}")
    if (seq.overlaps < BROKEN_OVERLAP).any():
        raise OverlapTooSmall(f"adjacent overlap {seq.c!r} is effectively zero; the sequence is broken")
    notes = []
    low = np.flatnonzero(seq.overlaps < min_overlap)
    if low.size:
        msg = f"overlaps below {min_overlap} at steps {low.tolist()} (min {seq.c:.6g})"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    target = seq.distributions[-1]
    pi = target.weights
    n = pi.size
    rng = np.random.default_rng(seed)
    drawn = float(rng.uniform(0.0, eta)) if eta > 0.0 else 0.0
    v = rng.standard_normal(n)
    v -= v.mean()
    half_l1 = 0.5 * np.abs(v).sum()
    if drawn == 0.0 or half_l1 == 0.0:
        return EmulatedSample(target, target, float(eta), 0.0, tuple(notes))
    v /= half_l1
    neg = v < 0.0
    step = min(drawn, float((pi[neg] / -v[neg]).min()))
    for _ in range(64):
        out = np.clip(pi + step * v, 0.0, None)
        out /= out.sum()
        achieved = tv_distance(pi, out)
        if achieved <= eta:
            break
        step *= 0.5
    else:  # pragma: no cover - halving always lands inside the ball
        out, achieved = pi.copy(), 0.0
    return EmulatedSample(target, Distribution.of(out), float(eta), achieved, tuple(notes))


def verify_triangle(p, q, sample: EmulatedSample, context=None) -> BoundReport:
    """Check ``D(pi(P), pi~(Q)) <= eta + ||E||_inf / (2 (1 - tau1(P)))`` for an emulated sample."""
    if tv_distance(sample.target, stationary_distribution(q)) > 1e-12:
        raise ValueError("the sample's target is not the stationary distribution of Q")
    ctx = {"achieved_tv": sample.achieved_tv}
    ctx.update(context or {})
    return quantum_sample_bound(p, q, sample.eta, sample=sample, context=ctx)
