"""Command-line interface: generate, solve, nash, bench.

Exit codes: 0 success, 2 usage or parameter error, 3 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction
from pathlib import Path

from .curb import all_minimal_curb, min_containing_curb, one_minimal_curb, smallest_minimal_curb
from .experiments import (
    ALGORITHMS,
    DISTRIBUTION_FIELDS,
    RUNTIME_FIELDS,
    ExperimentSpec,
    format_csv,
    run_distribution_experiment,
    run_runtime_experiment,
)
from .game import GameFormatError, StrategyRef, parse_game, serialize_game
from .generators import DEFAULT_BIG_Z, DEFAULT_EPSILON, FAMILIES, GeneratorSpec
from .nash import nash_via_curb_preprocessing, support_enumeration_nash

EXIT_USAGE = 2
EXIT_INPUT = 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _seed_or_random(seed: int | None) -> int:
    if seed is not None:
        return seed
    seed = secrets.randbits(32)
    print(f"rng seed: {seed}", file=sys.stderr)
    return seed


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_game(text)
    except GameFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    sampled = args.family in ("random", "covariant", "padded")
    seed = _seed_or_random(args.seed) if sampled else (args.seed or 0)
    try:
        spec = GeneratorSpec(
            args.family,
            rows=args.rows,
            cols=args.cols,
            rho=args.rho,
            r_prime=args.r_prime,
            c_prime=args.c_prime,
            k=args.k,
            epsilon=args.epsilon,
            big_z=args.big_z,
            rng_seed=seed,
        )
        game = spec.build()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(serialize_game(game), args.out)
    return 0


def _report_line(index: int, report) -> str:
    return f"set {index}: {report.set} size {report.size} lfp_calls {report.lfp_calls}"


def cmd_solve(args) -> int:
    seed_ref = None
    if args.seed_strategy is not None:
        try:
            seed_ref = StrategyRef.parse(args.seed_strategy)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.mode == "containing" and seed_ref is None:
        raise UsageError("--mode containing needs --seed-strategy")
    game = _load(args.game)
    rng_seed = None
    if args.mode == "all":
        reports = all_minimal_curb(game)
    elif args.mode == "small":
        reports = [smallest_minimal_curb(game)]
    elif args.mode == "one":
        rng_seed = _seed_or_random(args.rng_seed)
        reports = [one_minimal_curb(game, rng_seed)]
    else:
        if seed_ref.index >= game.count(seed_ref.player):
            raise UsageError(f"seed {seed_ref.label} is outside a {game.rows}x{game.cols} game")
        reports = [min_containing_curb(game, seed_ref)]

    if args.json:
        payload = {"mode": args.mode, "rng_seed": rng_seed, "sets": [r.to_dict() for r in reports]}
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    print(f"mode: {args.mode}")
    if rng_seed is not None:
        print(f"rng seed: {rng_seed}")
    for i, report in enumerate(reports, 1):
        print(_report_line(i, report))
    return 0


def cmd_nash(args) -> int:
    game = _load(args.game)
    report = None
    if args.preprocess_curb:
        try:
            profile, report = nash_via_curb_preprocessing(game, args.max_support)
        except RuntimeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        profiles = [profile]
    else:
        profiles = support_enumeration_nash(
            game, max_support=args.max_support, stop_after_first=not args.all
        )
    if args.json:
        payload = {
            "curb": report.to_dict() if report else None,
            "equilibria": [p.to_dict() for p in profiles],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    if report is not None:
        print(f"curb: {report.set} size {report.size} lfp_calls {report.lfp_calls}")
    if not profiles:
        print("no equilibrium found within the support bound")
    for p in profiles:
        print(f"equilibrium: {p.row_mix} {p.col_mix} regret {p.regret}")
    return 0


def _bench_spec(args) -> tuple[str, ExperimentSpec]:
    if args.spec:
        try:
            raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read experiment spec {args.spec}: {exc}") from exc
        try:
            gen = dict(raw["generator"])
            for key in ("epsilon", "big_z"):
                if key in gen:
                    gen[key] = Fraction(str(gen[key]))
            spec = ExperimentSpec(
                GeneratorSpec(**gen),
                raw["instance_count"],
                tuple(raw.get("sizes", ())),
                tuple(raw.get("algorithms", ALGORITHMS)),
                raw.get("rng_seed", 0),
                raw.get("output", args.out),
                raw.get("workers", args.workers),
            )
            return raw.get("experiment", args.experiment), spec
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad experiment spec: {exc}") from exc
    try:
        gen = GeneratorSpec(
            args.family,
            rows=args.rows,
            cols=args.cols,
            rho=args.rho,
            r_prime=args.r_prime,
            c_prime=args.c_prime,
            k=args.k,
        )
        spec = ExperimentSpec(
            gen,
            args.instances,
            tuple(args.sizes or ()),
            tuple(args.algorithms),
            _seed_or_random(args.seed),
            args.out,
            args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return args.experiment, spec


def cmd_bench(args) -> int:
    experiment, spec = _bench_spec(args)
    if experiment == "distribution":
        rows, fields = run_distribution_experiment(spec), DISTRIBUTION_FIELDS
    elif experiment == "runtime":
        rows, fields = run_runtime_experiment(spec), RUNTIME_FIELDS
    else:
        raise UsageError(f"unknown experiment {experiment!r}")
    if not spec.output:
        sys.stdout.write(format_csv(rows, fields))
    return 0


def _add_family_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rows", type=int, default=2, help="rows (Gamma/padded: total rows)")
    p.add_argument("--cols", type=int, default=2, help="columns (Gamma/padded: total columns)")
    p.add_argument("--rho", type=float, default=0.0, help="covariant correlation in [-1, 1]")
    p.add_argument("--r-prime", type=int, default=2, help="padded: rows of the top-left block")
    p.add_argument("--c-prime", type=int, default=2, help="padded: columns of the top-left block")
    p.add_argument("--k", type=int, default=1, help="Omega: number of extra strategies per player")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curbkit", description="CURB set solvers for bimatrix games")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a generated game in the canonical format")
    gen.add_argument("family", choices=FAMILIES)
    _add_family_params(gen)
    gen.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON, help="Omega epsilon (default 1/10)")
    gen.add_argument("--big-z", type=_fraction, default=DEFAULT_BIG_Z, help="Omega Z (default 10000)")
    gen.add_argument("--seed", type=int, help="RNG seed (random if omitted; printed to stderr)")
    gen.add_argument("--out", help="output file (default stdout)")
    gen.set_defaults(func=cmd_generate)

    solve = sub.add_parser("solve", help="find CURB sets of a game file")
    solve.add_argument("game")
    solve.add_argument("--mode", choices=("all", "one", "small", "containing"), default="all")
    solve.add_argument("--seed-strategy", help="seed for --mode containing, e.g. r:2 or c:1 (1-based)")
    solve.add_argument("--rng-seed", type=int, help="RNG seed for --mode one")
    solve.add_argument("--json", action="store_true", help="machine-readable output")
    solve.set_defaults(func=cmd_solve)

    nash = sub.add_parser("nash", help="find a Nash equilibrium by support enumeration")
    nash.add_argument("game")
    nash.add_argument("--preprocess-curb", action="store_true", help="search inside a smallest CURB set")
    nash.add_argument("--max-support", type=int, help="largest support size per player")
    nash.add_argument("--all", action="store_true", help="list every equilibrium found, not just the first")
    nash.add_argument("--json", action="store_true")
    nash.set_defaults(func=cmd_nash)

    bench = sub.add_parser("bench", help="run a distribution or runtime experiment, CSV output")
    bench.add_argument("experiment", nargs="?", choices=("distribution", "runtime"), default="distribution")
    bench.add_argument("--spec", help="JSON experiment spec (overrides the flags below)")
    bench.add_argument("--family", choices=FAMILIES, default="random")
    _add_family_params(bench)
    bench.add_argument("--sizes", type=int, nargs="+", help="total sizes n = rows + cols (even)")
    bench.add_argument("--instances", type=int, default=200)
    bench.add_argument("--algorithms", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    bench.add_argument("--seed", type=int, help="RNG seed (random if omitted; printed to stderr)")
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--out", help="CSV file (default stdout)")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
