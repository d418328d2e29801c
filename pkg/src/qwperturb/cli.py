"""Command-line front end.

Exit codes: 0 on success with no bound violations, 1 if any bound is violated
beyond tolerance, 2 on input or configuration errors.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bounds
from .errors import ErgodicCoefficientOne, GapDominatedByNoise, QWPerturbError
from .markov_core import (
    ergodicity_coefficient,
    read_matrix,
    spectral_summary,
    stationary_distribution,
    validate,
    write_matrix,
)
from .perturb import NoiseSpec, decompose
from .sampler import build_sequence, emulate_sampling, verify_triangle
from .serialize import canonical_json, curve_to_csv, format_float, reports_to_csv
from .sweep import SweepSpec, sweep
from .szegedy import (
    DEFAULT_MAX_DIM,
    build_walk,
    classical_hitting_proxy,
    hitting_proxy,
    leak_norm,
    mark,
    simulate_absorption,
    spectral_correspondence,
)

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2

# Sub-seed streams: stream k of master seed s is SeedSequence(s, spawn_key=(k,)).
NOISE_STREAM, SAMPLE_STREAM = 0, 1


def derive_seed(seed: int, stream: int) -> int:
    state = np.random.SeedSequence(entropy=seed, spawn_key=(stream,)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _index_list(text):
    try:
        return sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}") from None


def _add_output(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="write the report here instead of stdout")


def _add_noise(p):
    p.add_argument("--noise", choices=("trunc", "rand"))
    p.add_argument("--bits", type=int, default=8)
    p.add_argument("--magnitude", type=float, default=0.0)
    p.add_argument("--seed", type=_seed, default=0)


def _add_marked(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--marked", type=_index_list, help="comma-separated marked state indices")
    g.add_argument("--marked-frac", type=float, help="mark the last ceil(frac * n) states")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwperturb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="validate a chain and report its spectrum, tau1 and stationary distribution")
    p.add_argument("--input", required=True)
    _add_output(p)

    p = sub.add_parser("perturb", help="apply truncation or random noise to a chain")
    p.add_argument("--input", required=True)
    _add_noise(p)
    p.add_argument("--write-q", help="write the perturbed chain in matrix text format")
    _add_output(p)

    p = sub.add_parser("quantize", help="build the Szegedy walk and, with a marked set, its absorption curve")
    p.add_argument("--input", required=True)
    _add_marked(p)
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--include-operator", action="store_true")
    p.add_argument("--max-dim", type=_positive_int, default=DEFAULT_MAX_DIM)
    _add_output(p)

    p = sub.add_parser("verify", help="run every applicable bound on a (P, Q) pair")
    p.add_argument("--input", required=True)
    p.add_argument("--perturbed", help="explicit Q; otherwise Q comes from --noise (or Q = P)")
    _add_noise(p)
    _add_marked(p)
    p.add_argument("--eta", type=float, help="also emulate a quantum sample of this precision")
    p.add_argument("--r", type=_positive_int, default=4, help="chain sequence length for sampling")
    p.add_argument("--max-dim", type=_positive_int, default=DEFAULT_MAX_DIM)
    _add_output(p)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over random instances")
    p.add_argument("--n", type=int, help="fix the dimension (overrides --n-min/--n-max)")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=32)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--magnitude", type=float, default=0.1)
    p.add_argument("--gap-fraction", type=float)
    p.add_argument("--general", action="store_true", help="non-symmetric chains; stationary-distribution checks only")
    p.add_argument("--tau-max", type=float, default=0.9)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--include-reports", action="store_true")
    _add_output(p)

    p = sub.add_parser("sample", help="build a chain sequence and emulate an eta-close quantum sample")
    p.add_argument("--input", required=True, help="target chain Q")
    p.add_argument("--reference", help="unperturbed chain P; adds the triangle-bound report")
    p.add_argument("--r", type=_positive_int, default=4)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--seed", type=_seed, default=0)
    _add_output(p)
    return parser


def _marked_set(args, n):
    if getattr(args, "marked", None) is not None:
        return args.marked
    frac = getattr(args, "marked_frac", None)
    if frac is None:
        return None
    if not 0.0 < frac < 1.0:
        raise QWPerturbError("--marked-frac must lie in (0, 1)")
    k = max(1, math.ceil(frac * n))
    return list(range(n - k, n))


def _emit(args, text):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kv_csv(rows):
    lines = ["quantity,value"]
    lines.extend(f"{k},{format_float(v) if isinstance(v, float) else v}" for k, v in rows)
    return "\n".join(lines) + "\n"


def cmd_analyze(args):
    p = validate(read_matrix(args.input))
    out = {"n": p.n, "symmetric": p.symmetric, "ergodic": p.ergodic, "tau1": ergodicity_coefficient(p)}
    if p.symmetric:
        s = spectral_summary(p)
        out["eigenvalues"] = s.eigenvalues.tolist()
        out["gap"] = s.gap
    if p.ergodic:
        out["stationary"] = stationary_distribution(p).weights.tolist()
    if args.format == "json":
        _emit(args, canonical_json(out))
    else:
        rows = []
        for k in sorted(out):
            v = out[k]
            if isinstance(v, list):
                rows.extend((f"{k}[{i}]", float(x)) for i, x in enumerate(v))
            else:
                rows.append((k, str(v).lower() if isinstance(v, bool) else v))
        _emit(args, _kv_csv(rows))
    return EXIT_OK


def _noise_spec(args):
    return NoiseSpec(args.noise, bits=args.bits, magnitude=args.magnitude, seed=derive_seed(args.seed, NOISE_STREAM))


def cmd_perturb(args):
    if args.noise is None:
        raise QWPerturbError("perturb needs --noise trunc|rand")
    p = validate(read_matrix(args.input))
    q, e = _noise_spec(args).apply(p)
    if args.write_q:
        write_matrix(args.write_q, q.entries, comment=f"perturbed with --noise {args.noise}")
    out = {
        "noise": args.noise,
        "norm_l2": e.norm_l2,
        "norm_linf": e.norm_linf,
        "q_symmetric": q.symmetric,
        "q_ergodic": q.ergodic,
        "Q": q.entries.tolist(),
        "E": e.entries.tolist(),
    }
    if args.format == "json":
        _emit(args, canonical_json(out))
    else:
        _emit(args, _kv_csv([("norm_l2", e.norm_l2), ("norm_linf", e.norm_linf),
                             ("q_symmetric", str(q.symmetric).lower()), ("q_ergodic", str(q.ergodic).lower())]))
    return EXIT_OK


def cmd_quantize(args):
    p = validate(read_matrix(args.input))
    walk = build_walk(p, args.max_dim)
    w = walk.operator
    out = {
        "n": p.n,
        "discriminant": walk.discriminant.tolist(),
        "orthogonality_error": float(np.abs(w.T @ w - np.eye(w.shape[0])).max()),
    }
    if p.symmetric:
        corr = spectral_correspondence(walk)
        out["eigenphases"] = corr["eigenphases"].tolist()
        out["predicted_phases"] = corr["predicted"].tolist()
        out["phase_match_error"] = corr["max_matched_error"]
    if args.include_operator:
        out["operator"] = w.tolist()
    marked = _marked_set(args, p.n)
    curve = None
    if marked is not None:
        part = mark(p, marked)
        curve = simulate_absorption(part, args.steps, args.max_dim)
        out.update(
            marked=list(part.marked),
            epsilon=part.epsilon,
            leak_norm=leak_norm(part),
            hitting_proxy=hitting_proxy(part),
            classical_hitting_proxy=classical_hitting_proxy(part),
            absorption=curve.tolist(),
        )
    if args.format == "json":
        _emit(args, canonical_json(out))
    else:
        if curve is None:
            raise QWPerturbError("CSV output of quantize is the absorption curve; pass --marked or --marked-frac")
        _emit(args, curve_to_csv(curve))
    return EXIT_OK


def _collect(reports, skipped, bound_id, fn, *a, **kw):
    try:
        reports.append(fn(*a, **kw))
    except (GapDominatedByNoise, ErgodicCoefficientOne) as exc:
        skipped.append({"bound_id": bound_id, "reason": f"{type(exc).__name__}: {exc}"})


def cmd_verify(args):
    p = validate(read_matrix(args.input))
    if args.perturbed:
        q = validate(read_matrix(args.perturbed))
        e = decompose(q, p)
    elif args.noise:
        q, e = _noise_spec(args).apply(p)
    else:
        q, e = p, decompose(p, p)
    marked = _marked_set(args, p.n)
    ctx = {"seed": args.seed}
    reports, skipped = [], []
    if p.symmetric and q.symmetric:
        _collect(reports, skipped, "weyl", bounds.check_weyl, p, q, ctx)
        _collect(reports, skipped, "gap_sandwich", bounds.check_gap_sandwich, p, q, ctx)
        if marked is not None:
            _collect(reports, skipped, "interlacing", bounds.check_interlacing, e, marked, ctx)
            _collect(reports, skipped, "leak_q1", bounds.check_leak_q1, p, q, marked, ctx)
            _collect(reports, skipped, "hitting", bounds.check_hitting, p, q, marked, ctx)
    if p.ergodic and q.ergodic:
        _collect(reports, skipped, "tv", bounds.check_tv_bound, p, q, ctx)
        if args.eta is not None:
            sample = emulate_sampling(build_sequence(q, args.r), args.eta, derive_seed(args.seed, SAMPLE_STREAM))
            _collect(reports, skipped, "quantum_sample", verify_triangle, p, q, sample, ctx)
    violations = sum(not r.passed for r in reports)
    if args.format == "json":
        _emit(args, canonical_json({"reports": reports, "skipped": skipped, "violations": violations}))
    else:
        _emit(args, reports_to_csv(reports))
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_sweep(args):
    n_min, n_max = (args.n, args.n) if args.n is not None else (args.n_min, args.n_max)
    try:
        spec = SweepSpec(
            n_min=n_min,
            n_max=n_max,
            magnitude=args.magnitude,
            symmetric=not args.general,
            gap_fraction=args.gap_fraction,
            eta=args.eta,
            tau_max=args.tau_max,
        )
    except ValueError as exc:
        raise QWPerturbError(str(exc)) from None
    summary = sweep(spec, args.trials, args.seed)
    if args.format == "json":
        _emit(args, canonical_json(summary.to_dict(include_reports=args.include_reports)))
    else:
        _emit(args, reports_to_csv(summary.reports))
    return EXIT_VIOLATION if summary.violations else EXIT_OK


def cmd_sample(args):
    q = validate(read_matrix(args.input))
    seq = build_sequence(q, args.r)
    sample = emulate_sampling(seq, args.eta, derive_seed(args.seed, SAMPLE_STREAM))
    out = {"sequence": seq.to_dict(), "sample": sample.to_dict()}
    report = None
    if args.reference:
        p = validate(read_matrix(args.reference))
        report = verify_triangle(p, q, sample, {"seed": args.seed})
        out["report"] = report
    if args.format == "json":
        _emit(args, canonical_json(out))
    else:
        lines = ["state,target,output"]
        lines.extend(
            f"{i},{format_float(t)},{format_float(o)}"
            for i, (t, o) in enumerate(zip(sample.target.weights, sample.output.weights))
        )
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_VIOLATION if report is not None and not report.passed else EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "perturb": cmd_perturb,
    "quantize": cmd_quantize,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (QWPerturbError, OSError) as exc:
        print(f"qwperturb {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"qwperturb {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
