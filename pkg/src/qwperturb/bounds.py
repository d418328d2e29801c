"""Executable perturbation bounds. Each check returns a :class:`BoundReport`.

All checks compare a computed left-hand side with a right-hand side and pass
when ``rhs - lhs >= -1e-9``; the tolerance absorbs eigensolver rounding only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    EmptyComplement,
    EmptyMarkedSet,
    ErgodicCoefficientOne,
    GapDominatedByNoise,
    NotErgodic,
    NotSymmetric,
)
from .markov_core import (
    Perturbation,
    as_stochastic,
    ergodicity_coefficient,
    spectral_summary,
    stationary_distribution,
    tv_distance,
)
from .szegedy import hitting_proxy, leak_norm, mark

PASS_TOL = 1e-9

BOUND_IDS = ("weyl", "gap_sandwich", "interlacing", "leak_q1", "hitting", "tv", "quantum_sample")


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    context: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "context": dict(self.context),
        }


def make_report(bound_id: str, lhs: float, rhs: float, context: dict | None = None) -> BoundReport:
    lhs, rhs = float(lhs), float(rhs)
    slack = rhs - lhs
    return BoundReport(bound_id, lhs, rhs, slack, bool(slack >= -PASS_TOL), dict(context or {}))


def _pair(p, q, need_symmetric=True):
    p, q = as_stochastic(p), as_stochastic(q)
    if p.n != q.n:
        raise DimensionMismatch(f"P is {p.n}x{p.n} but Q is {q.n}x{q.n}")
    if need_symmetric and not (p.symmetric and q.symmetric):
        raise NotSymmetric("this bound is stated for symmetric chains")
    return p, q


def _base_context(p, q, extra):
    e = q.entries - p.entries
    l2 = _kernels.top_singular_value(e)
    ctx = {"n": p.n, "norm_l2": l2, "norm_linf": float(np.abs(e).sum(axis=1).max())}
    ctx.update(extra or {})
    return ctx, l2


def check_weyl(p, q, context=None) -> BoundReport:
    """Largest sorted-eigenvalue deviation against ``||Q - P||_2``."""
    p, q = _pair(p, q)
    ctx, l2 = _base_context(p, q, context)
    lhs = float(np.abs(spectral_summary(p).eigenvalues - spectral_summary(q).eigenvalues).max())
    return make_report("weyl", lhs, l2, ctx)


def check_gap_sandwich(p, q, context=None) -> BoundReport:
    """``delta - ||E|| <= Delta <= delta + ||E||``, reported on its tighter side."""
    p, q = _pair(p, q)
    ctx, l2 = _base_context(p, q, context)
    delta = spectral_summary(p).gap
    big_delta = spectral_summary(q).gap
    lower = big_delta - (delta - l2)
    upper = (delta + l2) - big_delta
    ctx.update(delta=delta, Delta=big_delta)
    if lower <= upper:
        ctx["side"] = "lower"
        return make_report("gap_sandwich", delta - l2, big_delta, ctx)
    ctx["side"] = "upper"
    return make_report("gap_sandwich", big_delta, delta + l2, ctx)


def check_interlacing(e, marked, context=None) -> BoundReport:
    """Spectral norm of the unmarked principal block of ``E`` against ``||E||_2``."""
    if isinstance(e, Perturbation):
        ent, l2 = e.entries, e.norm_l2
    else:
        ent = np.asarray(e, dtype=np.float64)
        l2 = _kernels.top_singular_value(ent)
    n = ent.shape[0]
    m = {int(i) for i in marked}
    if not m:
        raise EmptyMarkedSet("the marked set must be non-empty")
    keep = [i for i in range(n) if i not in m]
    if not keep:
        raise EmptyComplement("the marked set covers every state")
    lhs = _kernels.top_singular_value(ent[np.ix_(keep, keep)])
    ctx = {"n": n, "epsilon": len(m) / n, "norm_l2": l2, "norm_linf": float(np.abs(ent).sum(axis=1).max())}
    ctx.update(context or {})
    return make_report("interlacing", lhs, l2, ctx)


def check_leak_q1(p, q, marked, context=None) -> BoundReport:
    """``||Q1|| <= min(||P1|| + ||E||, 1 - (delta - ||E||) eps / 2)``.

    When ``delta <= ||E||`` the second branch is vacuous; only the first is
    checked and ``context["gap_dominated"]`` is set.
    """
    p, q = _pair(p, q)
    ctx, l2 = _base_context(p, q, context)
    part_p, part_q = mark(p, marked), mark(q, marked)
    eps = part_p.epsilon
    delta = spectral_summary(p).gap
    lhs = leak_norm(part_q)
    branch_norm = leak_norm(part_p) + l2
    ctx.update(epsilon=eps, delta=delta, gap_dominated=bool(delta <= l2))
    if delta <= l2:
        ctx["branch"] = "norm"
        return make_report("leak_q1", lhs, branch_norm, ctx)
    branch_gap = 1.0 - (delta - l2) * eps / 2.0
    ctx["branch"] = "norm" if branch_norm <= branch_gap else "gap"
    return make_report("leak_q1", lhs, min(branch_norm, branch_gap), ctx)


def check_hitting(p, q, marked, context=None) -> BoundReport:
    """Quantum hitting proxy of ``Q`` against ``sqrt(2 / ((delta - ||E||) eps))``.

    The constant 2 comes from substituting the gap branch of the ``||Q1||`` bound
    into ``sqrt(1 / (1 - ||Q1||))``.
    """
    p, q = _pair(p, q)
    ctx, l2 = _base_context(p, q, context)
    delta = spectral_summary(p).gap
    if delta <= l2:
        raise GapDominatedByNoise(f"spectral gap {delta!r} does not exceed ||E||_2 = {l2!r}")
    part_q = mark(q, marked)
    eps = part_q.epsilon
    rhs = float(np.sqrt(2.0 / ((delta - l2) * eps)))
    ctx.update(epsilon=eps, delta=delta, constant=2.0)
    return make_report("hitting", hitting_proxy(part_q), rhs, ctx)


def tv_bound_rhs(p, q) -> tuple[float, float, float]:
    """``(||E||_inf / (2 (1 - tau1(P))), tau1(P), ||E||_inf)``."""
    p, q = _pair(p, q, need_symmetric=False)
    tau = ergodicity_coefficient(p)
    if tau >= 1.0:
        raise ErgodicCoefficientOne("tau1(P) = 1; the stationary perturbation bound is undefined")
    linf = float(np.abs(q.entries - p.entries).sum(axis=1).max())
    return linf / (2.0 * (1.0 - tau)), tau, linf


def _require_ergodic(*chains):
    for c in chains:
        if not c.ergodic:
            raise NotErgodic("the stationary-distribution bound needs ergodic chains")


def check_tv_bound(p, q, context=None) -> BoundReport:
    p, q = _pair(p, q, need_symmetric=False)
    rhs, tau, linf = tv_bound_rhs(p, q)
    _require_ergodic(p, q)
    lhs = tv_distance(stationary_distribution(p), stationary_distribution(q))
    ctx = {"n": p.n, "tau1": tau, "norm_linf": linf}
    ctx.update(context or {})
    return make_report("tv", lhs, rhs, ctx)


def quantum_sample_bound(p, q, eta: float, sample=None, context=None) -> BoundReport:
    """``D(pi(P), pi~(Q)) <= eta + ||E||_inf / (2 (1 - tau1(P)))``.

    With an emulated ``sample`` the left side uses its output distribution.
    Without one the left side is ``D(pi(P), pi(Q))``, the ``eta = 0`` instance,
    and ``context["lhs_source"]`` says so.
    """
    if eta < 0.0:
        raise ValueError("eta must be nonnegative")
    p, q = _pair(p, q, need_symmetric=False)
    classical, tau, linf = tv_bound_rhs(p, q)
    _require_ergodic(p, q)
    pi_p = stationary_distribution(p)
    if sample is not None:
        lhs = tv_distance(pi_p, sample.output)
        source = "emulated_sample"
    else:
        lhs = tv_distance(pi_p, stationary_distribution(q))
        source = "exact_stationary"
    ctx = {"n": p.n, "tau1": tau, "norm_linf": linf, "eta": float(eta), "lhs_source": source}
    ctx.update(context or {})
    return make_report("quantum_sample", lhs, eta + classical, ctx)
