"""Command line entry point: ``trivote compute|check|exists|experiment|gen``.

Exit codes: 0 success / satisfied / found, 1 violated / none found,
2 input or configuration error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from trivote.axioms import AxiomId, check, exists_committee
from trivote.errors import BudgetError, TrivoteError
from trivote.model import validate_instance
from trivote.profile_io import load_profile, serialize_profile
from trivote.rules import RULES, SEQUENTIAL_RULES, RuleConfig, run_rule
from trivote.sampling import SAMPLERS, TABLE_AXIOMS, ExperimentConfig, profile_rng, run_experiment, sample_ballot

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def atomic_write(path: Path, text: str) -> None:
    """Write via a temp file in the target directory and rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _names(instance, members) -> str:
    return " ".join(instance.names[c] for c in sorted(members))


def cmd_compute(args) -> int:
    instance = load_profile(args.profile)
    config = RuleConfig(alpha=args.alpha, seed=args.seed, stv_mode=args.stv_mode, tie_policy=args.tie_policy)
    outcome = run_rule(args.rule, instance, config)
    print(_names(instance, outcome.committee))
    if args.trace:
        doc = {
            "rule": args.rule,
            "committee": [instance.names[c] for c in outcome.committee],
            "score": outcome.score,
            "trace": outcome.trace,
        }
        if outcome.assignment is not None:
            doc["assignment"] = {instance.names[c]: list(v) for c, v in sorted(outcome.assignment.items())}
        atomic_write(args.trace, json.dumps(doc, indent=2, default=_jsonable) + "\n")
    return EXIT_OK


def _print_report(instance, report) -> None:
    if report.satisfied:
        print("SATISFIED")
        return
    wit = report.witness
    print("VIOLATED")
    print("witness voters (1-based): " + " ".join(str(v + 1) for v in wit.voters))
    print(f"level: {wit.level}")
    print(f"cohesion set: {instance.format_set(wit.cohesion_set)}")
    print(f"representation found: {wit.representation_found}")
    if wit.seated_disapproved:
        print(f"unanimously disapproved and seated: {instance.format_set(wit.seated_disapproved)}")


def cmd_check(args) -> int:
    instance = load_profile(args.profile)
    names = [x.strip() for x in args.committee.split(",") if x.strip()]
    W = instance.committee_by_name(names)
    report = check(instance, W, args.axiom, bound=args.oracle_bound)
    _print_report(instance, report)
    return EXIT_OK if report.satisfied else EXIT_NEGATIVE


def cmd_exists(args) -> int:
    instance = load_profile(args.profile)
    W = exists_committee(instance, args.axiom, bound=args.oracle_bound)
    if W is None:
        print("NONE")
        return EXIT_NEGATIVE
    print(_names(instance, W))
    return EXIT_OK


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def cmd_experiment(args) -> int:
    overrides = {}
    if args.profiles is not None:
        overrides["num_profiles"] = args.profiles
    if args.n is not None:
        overrides["n_range"] = tuple(args.n)
    if args.m is not None:
        overrides["m_range"] = tuple(args.m)
    if args.oracle_bound is not None:
        overrides["oracle_bound"] = args.oracle_bound
    overrides.update(
        seed=args.seed,
        rules=tuple(_csv_list(args.rules)),
        axioms=tuple(AxiomId.parse(a) for a in _csv_list(args.axioms)),
        sampler=args.sampler,
        alpha=args.alpha,
        stv_mode=args.stv_mode,
        workers=args.workers,
    )
    config = ExperimentConfig.paper_scale(**overrides) if args.paper_scale else ExperimentConfig(**overrides)
    table = run_experiment(config)
    if args.out:
        text = table.to_json() if args.format == "json" else table.to_csv()
        atomic_write(args.out, text)
    print(table.render())
    return EXIT_OK


def cmd_gen(args) -> int:
    rng = profile_rng(args.seed, 0)
    ballots = [sample_ballot(args.m, rng, args.sampler) for _ in range(args.n)]
    instance = validate_instance(ballots, args.m, args.k)
    text = serialize_profile(instance)
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trivote", description="Multiwinner elections with trichotomous ballots.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute a committee with a voting rule")
    p.add_argument("profile", type=Path)
    p.add_argument("--rule", required=True, choices=sorted(RULES))
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stv-mode", choices=["literal", "transfer"], default="literal")
    p.add_argument("--tie-policy", choices=["lowest-index", "seeded-random"], default=None)
    p.add_argument("--trace", type=Path, help="write the round-by-round trace as JSON")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("check", help="check one committee against an axiom")
    p.add_argument("profile", type=Path)
    p.add_argument("--axiom", required=True, type=AxiomId.parse)
    p.add_argument("--committee", required=True, help="comma-separated candidate names")
    p.add_argument("--oracle-bound", type=int, default=20)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("exists", help="search all committees for one satisfying an axiom")
    p.add_argument("profile", type=Path)
    p.add_argument("--axiom", required=True, type=AxiomId.parse)
    p.add_argument("--oracle-bound", type=int, default=20)
    p.set_defaults(func=cmd_exists)

    p = sub.add_parser("experiment", help="Monte Carlo axiom satisfaction over random profiles")
    p.add_argument("--profiles", type=int)
    p.add_argument("--n", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--m", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rules", default=",".join(SEQUENTIAL_RULES))
    p.add_argument("--axioms", default=",".join(a.value for a in TABLE_AXIOMS))
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--paper-scale", action="store_true", help="10,000 profiles, n in [4,20], m in [2,15]")
    p.add_argument("--oracle-bound", type=int)
    p.add_argument("--sampler", choices=SAMPLERS, default="uniform")
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--stv-mode", choices=["literal", "transfer"], default="literal")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gen", help="write a random impartial-culture profile")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampler", choices=SAMPLERS, default="uniform")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (TrivoteError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
