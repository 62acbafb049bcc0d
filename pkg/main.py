# main.py
# Command-line entry point: matrix I/O, mutation, exchange-graph export,
# automorphism reports and audits.
#
#   python main.py COMMAND INPUT [flags]
#
# INPUT is a matrix document ({"rank": n, "matrix": [[...]]}) path or "-" for
# stdin. Every index on this surface is 1-based.

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from dotenv import load_dotenv

from automorphism import automorphism_group, induce_hom, verify_one_step
from cluster_config import ExplorationLimits, get_config, reload_config
from conjecture_lab import SUBJECTS, run_audit
from doc_models import (
    MatrixDocument,
    automorphism_report,
    dump,
    graph_document,
    hom_document,
    load_matrix_document,
)
from exchange_matrix import mutate_sequence
from laurent import render
from seed_engine import (
    SeedIntegrityError,
    cluster_variables,
    explore,
    initial_seed,
    replay,
    to_dot,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 2

COMMANDS = ("mutate", "graph", "variables", "autos", "check-hom", "audit")


class UsageError(ValueError):
    """Bad command line; reported before any computation"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="main.py", description="Exact cluster-algebra engine")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", help='matrix document path, or "-" for stdin')
    parser.add_argument("-k", "--mutations", help="comma list of 1-based directions, applied left to right")
    parser.add_argument("--max-nodes", type=int, default=None)
    parser.add_argument("--max-depth", type=int, default=None)
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true", help="graph: DOT instead of JSON")
    fmt.add_argument("--json", action="store_true", help="variables: JSON list instead of lines")
    parser.add_argument("--subject", choices=SUBJECTS, default="theorem")
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--perm", help="check-hom: 1-based bijection as a comma list")
    parser.add_argument("--target", default="", help="check-hom: mutation path to the target seed")
    parser.add_argument("--prune", action="store_true", help="only try magnitude-compatible bijections")
    parser.add_argument("-o", "--output", help="write the result here instead of stdout")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def parse_index_list(text: Optional[str], n: int, what: str) -> List[int]:
    """'1,2,1' -> [0, 1, 0]; empty text is the empty list"""
    if not text:
        return []
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError as e:
        raise UsageError(f"{what} must be a comma list of integers, got {text!r}") from e
    for v in values:
        if not 1 <= v <= n:
            raise UsageError(f"{what} entry {v} out of range 1..{n}")
    return [v - 1 for v in values]


def _configure_logging(verbose: int) -> None:
    level = get_config().logging.level
    if verbose == 1:
        level = "INFO"
    elif verbose > 1:
        level = "DEBUG"
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _limits(args) -> ExplorationLimits:
    defaults = get_config().limits
    return ExplorationLimits(
        max_nodes=args.max_nodes if args.max_nodes is not None else defaults.max_nodes,
        max_depth=args.max_depth if args.max_depth is not None else defaults.max_depth,
    )


def execute(args) -> tuple:
    """(exit status, text for the output stream)"""
    matrix = load_matrix_document(_read_input(args.input)).to_matrix()
    n = matrix.n

    if args.command == "mutate":
        if not args.mutations:
            raise UsageError("mutate needs -k/--mutations")
        mutated = mutate_sequence(matrix, parse_index_list(args.mutations, n, "--mutations"))
        return EXIT_OK, dump(MatrixDocument.from_matrix(mutated))

    s0 = initial_seed(matrix)

    if args.command == "check-hom":
        if not args.perm:
            raise UsageError("check-hom needs --perm")
        sigma = parse_index_list(args.perm, n, "--perm")
        target = replay(s0, parse_index_list(args.target, n, "--target"))
        h = induce_hom(s0, target, sigma)
        verify_one_step(h, s0)
        logger.info("[CLI] Candidate %s onto %s: %s", args.perm, target, h.verified.value)
        return EXIT_OK, dump(hom_document(h))

    if args.command == "audit":
        report = run_audit(args.subject, matrix, _limits(args), jobs=args.jobs, prune=args.prune)
        logger.info("[CLI] Audit %s finished in %.3fs", args.subject, report.elapsed)
        status = EXIT_OK if report.passed else EXIT_VIOLATIONS
        return status, dump(report.to_document(include_elapsed=False), exclude_none=True)

    graph = explore(s0, _limits(args), jobs=args.jobs)

    if args.command == "graph":
        if args.dot:
            return EXIT_OK, to_dot(graph)
        return EXIT_OK, dump(graph_document(graph))

    if args.command == "variables":
        variables = [render(x) for x in cluster_variables(graph)]
        if args.json:
            return EXIT_OK, json.dumps(variables, indent=2) + "\n"
        return EXIT_OK, "".join(v + "\n" for v in variables)

    # autos
    group = automorphism_group(graph, prune=True if args.prune else None, jobs=args.jobs)
    return EXIT_OK, dump(automorphism_report(group))


def run(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    reload_config()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    _configure_logging(args.verbose)

    try:
        status, text = execute(args)
    except (ValueError, IndexError, OSError, SeedIntegrityError) as e:
        # Covers document, matrix, parse, incomplete-graph and usage errors.
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
