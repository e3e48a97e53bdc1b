"""planarcalc CLI — moment/cumulant conversion, effective actions, trees and checks.

Entry point: planarcalc

Subcommands:
    cumulants         Moment series JSON → free cumulant series JSON
    moments           Cumulant series JSON → moment series JSON
    effective-action  Moments or cumulants JSON → effective action JSON (+ ℓ table CSV)
    verify            Run a seeded property suite; exit 1 on any violation
    trees             List the admissible trees with n marks and their Feynman terms
    sample-moments    Estimate GUE trace moments by sampling

Configuration is read from CLI args or environment variables:
    PLANARCALC_SEED, PLANARCALC_DEGREE, PLANARCALC_ALPHABET,
    PLANARCALC_SCALAR, PLANARCALC_TOLERANCE, PLANARCALC_WORKERS

Exit codes: 0 success, 1 identity violations, 2 malformed document,
3 failed precondition.

Usage:
    planarcalc cumulants moments.json -o cumulants.json
    planarcalc effective-action cumulants.json --table ell.csv
    planarcalc verify --suite legendre --alphabet 2 --degree 5 --seed 42
    planarcalc trees --n 4
    planarcalc sample-moments -N 200 --samples 100 --seed 7 -o gue.json
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from planarcalc import __version__
from planarcalc.config import RunConfig, from_args
from planarcalc.cumulants import cumulants_from_moments, moments_from_cumulants
from planarcalc.effective_action import effective_action
from planarcalc.exceptions import DocumentError, PreconditionError
from planarcalc.sampling import MODELS, SampleSpec, sample_moments
from planarcalc.serialization import (
    dumps,
    effective_action_to_dict,
    l_table_csv,
    read_json,
    series_from_dict,
    series_role,
    series_to_dict,
    tree_to_dict,
    write_json,
)
from planarcalc.series import Series
from planarcalc.suites import SUITES, run_suite, suite_document
from planarcalc.trees import enumerate_admissible, render_term

logger = logging.getLogger("planarcalc")

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_DOCUMENT = 2
EXIT_PRECONDITION = 3

LOG_FORMAT = "[planarcalc] %(levelname)s %(name)s: %(message)s"

# ── helpers ───────────────────────────────────────────────────────────────────


def _emit(doc: Any, output: str | None, what: str) -> None:
    """Write ``doc`` to ``output`` or print it to stdout."""
    if output:
        write_json(doc, output)
        print(f"Wrote {what} to {output}")
    else:
        sys.stdout.write(dumps(doc))


def _load_series(path: str) -> tuple[Series, str | None]:
    doc = read_json(path)
    return series_from_dict(doc), series_role(doc)


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )


# ── subcommands ───────────────────────────────────────────────────────────────


def cmd_cumulants(args: argparse.Namespace, config: RunConfig) -> int:
    """Convert a moment series into its free cumulant series."""
    moments, _ = _load_series(args.input)
    cumulants = cumulants_from_moments(moments)
    _emit(series_to_dict(cumulants, role="cumulants"), config.output_path, "cumulants")
    return EXIT_OK


def cmd_moments(args: argparse.Namespace, config: RunConfig) -> int:
    """Convert a free cumulant series back into moments."""
    cumulants, _ = _load_series(args.input)
    moments = moments_from_cumulants(cumulants)
    _emit(series_to_dict(moments, role="moments"), config.output_path, "moments")
    return EXIT_OK


def cmd_effective_action(args: argparse.Namespace, config: RunConfig) -> int:
    """Build the effective action from moments (converted first) or cumulants."""
    series, role = _load_series(args.input)
    if role is None:
        role = "cumulants" if series.variable == "y" else "moments"
    if role == "effective_action":
        raise DocumentError("input is already an effective action")
    cumulants = series if role == "cumulants" else cumulants_from_moments(series)
    action = effective_action(cumulants)

    _emit(effective_action_to_dict(action), config.output_path, "effective action")
    if args.table:
        Path(args.table).write_text(l_table_csv(action), encoding="utf-8")
        # stdout carries the JSON document unless -o redirects it
        stream = sys.stdout if config.output_path else sys.stderr
        print(f"Wrote {len(action.series)} coefficients to {args.table}", file=stream)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    """Run one property suite and print its report."""
    reports = run_suite(
        args.suite,
        seed=config.seed,
        alphabet=config.alphabet,
        degree=config.degree,
        instances=args.instances,
        scalar=config.scalar,
        tolerance=config.tolerance_for,
        workers=config.workers,
    )
    doc = suite_document(
        args.suite,
        reports,
        seed=config.seed,
        alphabet=1 if args.suite == "univariate" else config.alphabet,
        degree=config.degree,
        scalar=config.scalar,
    )
    _emit(doc, config.output_path, f"{args.suite} report")
    failed = [r.identity for r in reports if not r.passed]
    if failed:
        logger.warning("identities violated: %s", ", ".join(failed))
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_trees(args: argparse.Namespace, config: RunConfig) -> int:
    """List admissible trees with their symbolic Feynman terms."""
    word = tuple(args.word) if args.word else None
    if word is not None and len(word) != args.n:
        raise PreconditionError(f"--word needs {args.n} letters, got {len(word)}")
    if word is not None and min(word) < 1:
        raise PreconditionError(f"--word letters are numbered from 1, got {list(word)}")
    trees = enumerate_admissible(args.n)

    if args.json or config.output_path:
        doc = [
            {**tree_to_dict(tree, word), "term": render_term(tree, word)} for tree in trees
        ]
        _emit(doc, config.output_path, f"{len(trees)} trees")
        return EXIT_OK

    print(f"{len(trees)} admissible trees with {args.n} marks")
    for k, tree in enumerate(trees, start=1):
        structure = json.dumps(tree.to_nested(), separators=(",", ""))
        print(f"  [{k}] {structure}  {render_term(tree, word)}")
    return EXIT_OK


def cmd_sample_moments(args: argparse.Namespace, config: RunConfig) -> int:
    """Sample GUE trace moments."""
    spec = SampleSpec(
        dimension=args.dimension,
        samples=args.samples,
        letters=args.letters,
        max_degree=config.degree,
        model=args.model,
    )
    moments = sample_moments(spec, config.seed, workers=config.workers)
    _emit(series_to_dict(moments, role="moments"), config.output_path, "sampled moments")
    return EXIT_OK


# ── arg parser ────────────────────────────────────────────────────────────────


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", default=None,
                        help="Output file path. If omitted, prints JSON to stdout.")


def _add_run_options(parser: argparse.ArgumentParser, *, alphabet: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="Random seed in [0, 2**64) (default: $PLANARCALC_SEED or 0)")
    parser.add_argument("--degree", type=int, default=None,
                        help="Truncation degree D (default: $PLANARCALC_DEGREE or 5)")
    if alphabet:
        parser.add_argument("--alphabet", type=int, default=None,
                            help="Number of letters n (default: $PLANARCALC_ALPHABET or 2)")
    parser.add_argument("--workers", type=int, default=None,
                        help="Worker threads (default: $PLANARCALC_WORKERS or 1)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planarcalc",
        description="Planar non-commutative functional calculus: cumulants, "
                    "effective actions and tree expansions.",
    )
    parser.add_argument("--version", action="version", version=f"planarcalc {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", default=False,
                        help="Log DEBUG messages to stderr")

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    # ── cumulants / moments ──────────────────────────────────────────────────
    p_cumulants = sub.add_parser("cumulants", help="Moment series JSON → cumulant series JSON")
    p_cumulants.add_argument("input", help="Moment series JSON file")
    _add_output(p_cumulants)

    p_moments = sub.add_parser("moments", help="Cumulant series JSON → moment series JSON")
    p_moments.add_argument("input", help="Cumulant series JSON file")
    _add_output(p_moments)

    # ── effective-action ─────────────────────────────────────────────────────
    p_action = sub.add_parser("effective-action",
                              help="Moments or cumulants JSON → effective action JSON")
    p_action.add_argument("input", help="Series JSON file; its role (or variable) selects "
                                        "moments or cumulants")
    p_action.add_argument("--table", default=None,
                          help="Also write the ℓ coefficients as CSV (header word,value)")
    _add_output(p_action)

    # ── verify ───────────────────────────────────────────────────────────────
    p_verify = sub.add_parser("verify", help="Run a seeded property suite")
    p_verify.add_argument("--suite", required=True, choices=list(SUITES),
                          help="Which identities to check")
    _add_run_options(p_verify)
    p_verify.add_argument("--instances", type=int, default=None,
                          help="Random instances to draw (default: per suite)")
    p_verify.add_argument("--scalar", choices=["rational", "float64"], default=None,
                          help="Scalar mode (default: $PLANARCALC_SCALAR or rational)")
    p_verify.add_argument("--tolerance", type=float, default=None,
                          help="Float comparison tolerance (default: $PLANARCALC_TOLERANCE "
                               "or 1e-9)")
    _add_output(p_verify)

    # ── trees ────────────────────────────────────────────────────────────────
    p_trees = sub.add_parser("trees", help="List admissible trees and their Feynman terms")
    p_trees.add_argument("--n", type=int, required=True, help="Number of marks (>= 2)")
    p_trees.add_argument("--word", type=int, nargs="+", default=None,
                         help="Letters decorating the marks 1..n")
    p_trees.add_argument("--json", action="store_true", default=False,
                         help="Print tree documents as JSON")
    _add_output(p_trees)

    # ── sample-moments ───────────────────────────────────────────────────────
    p_sample = sub.add_parser("sample-moments", help="Estimate GUE trace moments")
    p_sample.add_argument("--dimension", "-N", type=int, required=True,
                          help="Matrix dimension N (2..1024)")
    p_sample.add_argument("--samples", type=int, required=True, help="Sample count S")
    p_sample.add_argument("--letters", type=int, default=1,
                          help="Independent matrices per sample (default: 1)")
    p_sample.add_argument("--model", choices=list(MODELS), default="gue",
                          help="Matrix ensemble (default: gue)")
    _add_run_options(p_sample, alphabet=False)
    _add_output(p_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    dispatch = {
        "cumulants": cmd_cumulants,
        "moments": cmd_moments,
        "effective-action": cmd_effective_action,
        "verify": cmd_verify,
        "trees": cmd_trees,
        "sample-moments": cmd_sample_moments,
    }
    try:
        config = from_args(args)
        return dispatch[args.command](args, config)
    except DocumentError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_DOCUMENT
    except PreconditionError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
