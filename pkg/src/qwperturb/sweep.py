"""Monte Carlo sweeps over random (P, E, M) instances.

Trial ``i`` of a sweep with master seed ``s`` draws everything from
``SeedSequence(entropy=s, spawn_key=(i,))``, so a trial's outcome does not
depend on which other trials ran or in what order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .errors import CannotPreserveStochasticity, QWPerturbError
from .markov_core import ergodicity_coefficient, spectral_summary, validate
from .perturb import random_perturbation, random_row_perturbation
from .sampler import build_sequence, emulate_sampling, verify_triangle

SHRINK_STEPS = 12
SEQUENCE_STEPS = 4


@dataclass(frozen=True)
class SweepSpec:
    """Instance generator settings.

    ``magnitude`` caps the spectral norm of ``E``; each trial draws its target
    uniformly below the cap and shrinks it by 4x whenever the rejection sampler
    cannot keep ``Q`` nonnegative. ``gap_fraction`` further caps it at that
    fraction of the spectral gap of ``P``. ``symmetric=False`` switches to
    general row-stochastic chains with ``tau1(P) <= tau_max`` and runs only the
    stationary-distribution checks.
    """

    n_min: int = 2
    n_max: int = 32
    magnitude: float = 0.1
    symmetric: bool = True
    gap_fraction: float | None = None
    eta: float = 0.1
    tau_max: float = 0.9
    checks: tuple = bounds.BOUND_IDS

    def __post_init__(self):
        if not 2 <= self.n_min <= self.n_max:
            raise ValueError(f"need 2 <= n_min <= n_max, got {self.n_min}, {self.n_max}")
        if not 0.0 <= self.magnitude <= 1.0:
            raise ValueError("magnitude must lie in [0, 1]")
        unknown = set(self.checks) - set(bounds.BOUND_IDS)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}")


@dataclass
class SweepSummary:
    trials: int
    violations: int = 0
    min_slack: float | None = None
    per_bound: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    reports: list = field(default_factory=list)

    def add(self, report: bounds.BoundReport):
        self.reports.append(report)
        entry = self.per_bound.setdefault(report.bound_id, {"checks": 0, "violations": 0, "min_slack": None})
        entry["checks"] += 1
        if not report.passed:
            entry["violations"] += 1
            self.violations += 1
        if entry["min_slack"] is None or report.slack < entry["min_slack"]:
            entry["min_slack"] = report.slack
        if self.min_slack is None or report.slack < self.min_slack:
            self.min_slack = report.slack

    def add_error(self, key: str):
        self.errors[key] = self.errors.get(key, 0) + 1

    def to_dict(self, include_reports: bool = False) -> dict:
        out = {
            "trials": self.trials,
            "violations": self.violations,
            "min_slack": self.min_slack,
            "per_bound": self.per_bound,
            "errors": self.errors,
        }
        if include_reports:
            out["reports"] = [r.to_dict() for r in self.reports]
        return out


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def random_symmetric_chain(rng, n: int) -> np.ndarray:
    """Symmetric ergodic chain: symmetrized uniform couplings, diagonal slack, 1% uniform mixing."""
    a = rng.random((n, n))
    s = 0.5 * (a + a.T)
    np.fill_diagonal(s, 0.0)
    s /= s.sum(axis=1).max()
    s[np.diag_indices(n)] = 1.0 - s.sum(axis=1)
    return 0.99 * s + 0.01 / n


def random_general_chain(rng, n: int, tau_max: float = 0.9) -> np.ndarray:
    while True:
        a = rng.random((n, n))
        a /= a.sum(axis=1, keepdims=True)
        p = 0.99 * a + 0.01 / n
        if ergodicity_coefficient(p) <= tau_max:
            return p


def random_marked_set(rng, n: int) -> list:
    k = int(rng.integers(1, n))
    return sorted(int(i) for i in rng.choice(n, size=k, replace=False))


def perturb_with_shrink(perturber, p, magnitude, seed):
    """Call ``perturber`` at ``magnitude``, shrinking 4x on each infeasible draw. ``E is None`` when all fail."""
    for _ in range(SHRINK_STEPS):
        try:
            q, e = perturber(p, magnitude, seed)
            return q, e, magnitude
        except CannotPreserveStochasticity:
            magnitude *= 0.25
    return p, None, 0.0


def _run(summary, bound_id, fn, *args, **kwargs):
    try:
        summary.add(fn(*args, **kwargs))
    except QWPerturbError as exc:
        summary.add_error(f"{bound_id}:{type(exc).__name__}")


def _symmetric_trial(spec, summary, rng, ctx):
    n = int(rng.integers(spec.n_min, spec.n_max + 1))
    p = validate(random_symmetric_chain(rng, n))
    marked = random_marked_set(rng, n)
    target = spec.magnitude * float(rng.uniform())
    if spec.gap_fraction is not None:
        target = min(target, spec.gap_fraction * spec_gap(p))
    noise_seed = int(rng.integers(2**63))
    q, e, used = perturb_with_shrink(random_perturbation, p, target, noise_seed)
    if e is None:
        summary.add_error("generate:CannotPreserveStochasticity")
        return
    eta = spec.eta * float(rng.uniform())
    sample_seed = int(rng.integers(2**63))
    ctx = dict(ctx, magnitude=used, marked=len(marked))
    checks = spec.checks
    if "weyl" in checks:
        _run(summary, "weyl", bounds.check_weyl, p, q, ctx)
    if "gap_sandwich" in checks:
        _run(summary, "gap_sandwich", bounds.check_gap_sandwich, p, q, ctx)
    if "interlacing" in checks:
        _run(summary, "interlacing", bounds.check_interlacing, e, marked, ctx)
    if "leak_q1" in checks:
        _run(summary, "leak_q1", bounds.check_leak_q1, p, q, marked, ctx)
    if "hitting" in checks:
        _run(summary, "hitting", bounds.check_hitting, p, q, marked, ctx)
    if "tv" in checks:
        _run(summary, "tv", bounds.check_tv_bound, p, q, ctx)
    if "quantum_sample" in checks:
        _sample_check(summary, p, q, eta, sample_seed, ctx)


def _general_trial(spec, summary, rng, ctx):
    n = int(rng.integers(spec.n_min, spec.n_max + 1))
    p = validate(random_general_chain(rng, n, spec.tau_max))
    target = spec.magnitude * float(rng.uniform())
    noise_seed = int(rng.integers(2**63))
    q, e, used = perturb_with_shrink(random_row_perturbation, p, target, noise_seed)
    if e is None:
        summary.add_error("generate:CannotPreserveStochasticity")
        return
    eta = spec.eta * float(rng.uniform())
    sample_seed = int(rng.integers(2**63))
    ctx = dict(ctx, magnitude=used)
    if "tv" in spec.checks:
        _run(summary, "tv", bounds.check_tv_bound, p, q, ctx)
    if "quantum_sample" in spec.checks:
        _sample_check(summary, p, q, eta, sample_seed, ctx)


def _sample_check(summary, p, q, eta, seed, ctx):
    try:
        seq = build_sequence(q, SEQUENCE_STEPS)
        sample = emulate_sampling(seq, eta, seed)
        summary.add(verify_triangle(p, q, sample, ctx))
    except QWPerturbError as exc:
        summary.add_error(f"quantum_sample:{type(exc).__name__}")


def spec_gap(p) -> float:
    return spectral_summary(p).gap


def sweep(spec: SweepSpec, trials: int, seed: int) -> SweepSummary:
    """Run every applicable check on ``trials`` random instances. Deterministic in ``seed``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    summary = SweepSummary(trials)
    run_trial = _symmetric_trial if spec.symmetric else _general_trial
    for i in range(trials):
        run_trial(spec, summary, trial_rng(seed, i), {"seed": seed, "trial": i})
    return summary
