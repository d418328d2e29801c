"""Perturbation sensitivity of Szegedy quantum walks built from classical Markov chains."""

from ._kernels import BACKEND
from .bounds import (
    BoundReport,
    check_gap_sandwich,
    check_hitting,
    check_interlacing,
    check_leak_q1,
    check_tv_bound,
    check_weyl,
    quantum_sample_bound,
)
from .markov_core import (
    Distribution,
    Perturbation,
    SpectralSummary,
    StochasticMatrix,
    ergodicity_coefficient,
    norms,
    read_matrix,
    spectral_summary,
    stationary_distribution,
    tv_distance,
    uniform_chain,
    validate,
    write_matrix,
)
from .perturb import NoiseSpec, decompose, random_perturbation, random_row_perturbation, truncate_precision
from .sampler import ChainSequence, EmulatedSample, build_sequence, emulate_sampling, overlap, verify_triangle
from .sweep import SweepSpec, SweepSummary, sweep
from .szegedy import (
    MarkedPartition,
    SzegedyWalk,
    build_walk,
    classical_hitting_proxy,
    hitting_proxy,
    leak_norm,
    mark,
    simulate_absorption,
)

__version__ = "0.1.0"
