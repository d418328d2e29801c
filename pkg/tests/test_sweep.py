import numpy as np
import pytest

from qwperturb.bounds import BOUND_IDS
from qwperturb.markov_core import validate
from qwperturb.serialize import canonical_json
from qwperturb.sweep import SweepSpec, random_symmetric_chain, sweep, trial_rng


def test_generator_is_valid(rng):
    for n in (2, 5, 17):
        p = validate(random_symmetric_chain(rng, n))
        assert p.symmetric and p.ergodic


def test_trial_streams_are_independent_of_order():
    a = trial_rng(9, 3).random(4)
    trial_rng(9, 0).random(100)
    b = trial_rng(9, 3).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, trial_rng(9, 4).random(4))


def test_zero_magnitude_single_trial():
    s = sweep(SweepSpec(magnitude=0.0), 1, 123)
    assert s.violations == 0
    by_id = {r.bound_id: r for r in s.reports}
    assert by_id["weyl"].lhs == 0.0
    assert by_id["tv"].lhs == 0.0
    assert by_id["gap_sandwich"].context["Delta"] == by_id["gap_sandwich"].context["delta"]
    assert by_id["interlacing"].lhs == 0.0


def test_same_seed_same_summary():
    spec = SweepSpec(n_max=10, magnitude=0.05)
    a = canonical_json(sweep(spec, 20, 5).to_dict(include_reports=True))
    b = canonical_json(sweep(spec, 20, 5).to_dict(include_reports=True))
    assert a == b
    c = canonical_json(sweep(spec, 20, 6).to_dict(include_reports=True))
    assert a != c


def test_symmetric_sweep_runs_every_check():
    s = sweep(SweepSpec(n_max=12, gap_fraction=0.5), 30, 2)
    assert s.violations == 0
    assert set(s.per_bound) == set(BOUND_IDS)
    assert s.min_slack == min(e["min_slack"] for e in s.per_bound.values())


def test_general_sweep():
    s = sweep(SweepSpec(n_max=12, symmetric=False), 30, 4)
    assert s.violations == 0
    assert set(s.per_bound) == {"tv", "quantum_sample"}


def test_check_subset():
    s = sweep(SweepSpec(n_max=6, checks=("weyl",)), 5, 0)
    assert set(s.per_bound) == {"weyl"}


@pytest.mark.parametrize(
    "kwargs",
    [{"n_min": 1}, {"n_min": 5, "n_max": 4}, {"magnitude": -0.1}, {"checks": ("nope",)}],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SweepSpec(**kwargs)


def test_bad_arguments():
    with pytest.raises(ValueError):
        sweep(SweepSpec(), 0, 1)
    with pytest.raises(ValueError):
        sweep(SweepSpec(), 1, -1)
