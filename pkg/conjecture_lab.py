# conjecture_lab.py
# Brute-force auditors that test the rigidity, positivity and automorphism
# statements on concrete mutation classes and exchange graphs. Audits never
# assume the statements they check; every violation carries enough data to
# replay it in isolation.

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from cluster_config import ExplorationLimits, get_config
from doc_models import AuditDocument, canonical_json
from exchange_matrix import (
    ExchangeMatrix,
    Permutation,
    SignPattern,
    mutation_class,
    solve_column_scaling,
)
from laurent import render, substitute
from automorphism import (
    enumerate_candidates,
    induce_hom,
    permutes_variables,
    verify_one_step,
    verify_two_step,
)
from seed_engine import (
    ExchangeGraph,
    Seed,
    cluster_variables,
    exchange_binomial,
    explore,
    initial_seed,
    require_complete,
)
from worker_pool import parallel_map

logger = logging.getLogger(__name__)

SUBJECTS = ("scalar", "positivity", "theorem", "symmetrizer")

Violation = Dict[str, Any]


@dataclass
class AuditReport:
    subject: str
    instances_checked: int
    violations: List[Violation] = field(default_factory=list)
    elapsed: float = 0.0
    complete: bool = True

    def __post_init__(self):
        # Canonical order so reports do not depend on worker scheduling.
        self.violations = sorted(self.violations, key=canonical_json)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_document(self, include_elapsed: bool = True) -> AuditDocument:
        return AuditDocument(
            subject=self.subject,
            instances_checked=self.instances_checked,
            complete=self.complete,
            passed=self.passed,
            violations=self.violations,
            elapsed=round(self.elapsed, 6) if include_elapsed else None,
        )

    @classmethod
    def from_document(cls, document: AuditDocument) -> "AuditReport":
        return cls(
            subject=document.subject,
            instances_checked=document.instances_checked,
            violations=list(document.violations),
            elapsed=document.elapsed or 0.0,
            complete=document.complete,
        )


def _finish(report: AuditReport) -> AuditReport:
    if report.passed:
        logger.info(
            "[AUDIT] %s: %d instances, no violations (%.3fs)",
            report.subject, report.instances_checked, report.elapsed,
        )
    else:
        logger.warning(
            "[AUDIT] %s: %d violations over %d instances",
            report.subject, len(report.violations), report.instances_checked,
        )
    if not report.complete:
        logger.warning("[AUDIT] %s ran on a truncated instance set", report.subject)
    return report


def _settings(jobs: Optional[int], progress: Optional[bool]) -> Tuple[int, bool]:
    cfg = get_config()
    return cfg.resolve_jobs(jobs), cfg.audit.progress if progress is None else progress


# ---------------------------
# Matrix-level audits
# ---------------------------

def scalar_rigidity_audit(
    matrix: ExchangeMatrix,
    limits: Optional[ExplorationLimits] = None,
    jobs: Optional[int] = None,
    progress: Optional[bool] = None,
) -> AuditReport:
    """Over the mutation class: any integer diagonal A with B = B'·A is ±1 on
    nonzero blocks and constant in sign on each block."""
    if matrix.is_zero():
        raise ValueError("scalar rigidity audit needs a nonzero exchange matrix")
    jobs, progress = _settings(jobs, progress)
    start = time.perf_counter()
    members, complete = mutation_class(matrix, limits or get_config().limits)
    partition = matrix.blocks
    zero = set(partition.zero_indices)
    active = [j for j in range(matrix.n) if j not in zero]

    def check(member: ExchangeMatrix) -> List[Violation]:
        a = solve_column_scaling(matrix, member)
        if a is None:
            return []
        witness = {"matrix": matrix.to_rows(), "member": member.to_rows(), "scaling": list(a)}
        bad = [j for j in active if a[j] not in (1, -1)]
        if bad:
            kind = "scalar" if len({a[j] for j in active}) == 1 else "magnitude"
            return [dict(witness, kind=kind, columns=[j + 1 for j in bad])]
        signs = SignPattern(tuple(a[j] if j not in zero else 1 for j in range(matrix.n)))
        if not signs.is_constant_on(partition):
            return [dict(witness, kind="block_sign")]
        return []

    results = parallel_map(check, members, jobs=jobs, progress=progress, desc="scalar")
    violations = [v for found in results for v in found]
    return _finish(AuditReport("scalar", len(members), violations, time.perf_counter() - start, complete))


def symmetrizer_audit(
    matrix: ExchangeMatrix,
    limits: Optional[ExplorationLimits] = None,
    jobs: Optional[int] = None,
    progress: Optional[bool] = None,
) -> AuditReport:
    """The symmetrizer of B skew-symmetrizes, and the block partition of B
    matches, every member of its mutation class."""
    jobs, progress = _settings(jobs, progress)
    start = time.perf_counter()
    members, complete = mutation_class(matrix, limits or get_config().limits)
    d = matrix.symmetrizer

    def check(member: ExchangeMatrix) -> List[Violation]:
        found = []
        if not d.is_symmetrizer_of(member):
            found.append({"kind": "symmetrizer", "member": member.to_rows(), "symmetrizer": list(d.d)})
        if member.blocks != matrix.blocks:
            found.append({
                "kind": "blocks",
                "member": member.to_rows(),
                "blocks": [[i + 1 for i in b.indices] for b in member.blocks.blocks],
            })
        return found

    results = parallel_map(check, members, jobs=jobs, progress=progress, desc="symmetrizer")
    violations = [v for found in results for v in found]
    return _finish(AuditReport("symmetrizer", len(members), violations, time.perf_counter() - start, complete))


# ---------------------------
# Graph-level audits
# ---------------------------

def candidate_witness(graph: ExchangeGraph, target: Seed, sigma: Permutation) -> Violation:
    """Input matrix, 1-based mutation path to the target and 1-based σ: enough
    for `replay` + `induce_hom` (or `check-hom --target --perm`) to rebuild the
    candidate without re-exploring."""
    return {
        "matrix": graph.nodes[graph.initial].matrix.to_rows(),
        "path": [k + 1 for k in target.path],
        "target": graph.index_of(target.key),
        "sigma": [s + 1 for s in sigma],
    }


def positivity_audit(graph: ExchangeGraph) -> AuditReport:
    """Every enumerated cluster variable has nonnegative coefficients"""
    start = time.perf_counter()
    rows = graph.nodes[graph.initial].matrix.to_rows()
    found: Dict[Any, Seed] = {}
    for seed in graph.seeds():
        for x in seed.cluster:
            found.setdefault(x, seed)
    violations = [
        {
            "kind": "negative_coefficient",
            "variable": render(x),
            "matrix": rows,
            "path": [k + 1 for k in seed.path],
        }
        for x, seed in found.items()
        if not x.is_nonnegative()
    ]
    return _finish(AuditReport("positivity", len(found), violations, time.perf_counter() - start, graph.complete))


def theorem_audit(
    graph: ExchangeGraph,
    deep: Optional[bool] = None,
    prune: bool = False,
    jobs: Optional[int] = None,
    progress: Optional[bool] = None,
) -> AuditReport:
    """For every (node, σ) candidate: the sign test passes exactly when the
    one-step commutation check does, and accepted candidates map exchange
    binomials onto exchange binomials."""
    require_complete(graph, "theorem_audit")
    cfg = get_config()
    deep = cfg.audit.deep_checks if deep is None else deep
    jobs, progress = _settings(jobs, progress)
    start = time.perf_counter()
    s0 = graph.nodes[graph.initial]
    variables = cluster_variables(graph) if deep else []
    candidates = enumerate_candidates(graph, prune)

    def check(candidate: Tuple[Seed, Permutation]) -> List[Violation]:
        t, sigma = candidate
        h = induce_hom(s0, t, sigma)
        witness = candidate_witness(graph, t, sigma)
        signed = h.sign is not None
        committed = verify_one_step(h, s0)
        found = []
        if signed != committed:
            found.append(dict(witness, kind="equivalence", sign_test=signed, one_step=committed))
        if not signed:
            return found
        for k in range(s0.n):
            mapped = substitute(exchange_binomial(s0, k), h.images)
            if mapped is None or mapped != exchange_binomial(t, sigma[k]):
                found.append(dict(witness, kind="exchange_ratio", direction=k + 1))
        if deep and committed:
            if not verify_two_step(h, s0):
                found.append(dict(witness, kind="two_step"))
            if not permutes_variables(h, variables):
                found.append(dict(witness, kind="variables"))
        return found

    results = parallel_map(check, candidates, jobs=jobs, progress=progress, desc="theorem")
    violations = [v for found in results for v in found]
    return _finish(AuditReport("theorem", len(candidates), violations, time.perf_counter() - start, True))


def run_audit(
    subject: str,
    matrix: ExchangeMatrix,
    limits: Optional[ExplorationLimits] = None,
    jobs: Optional[int] = None,
    prune: bool = False,
) -> AuditReport:
    """Dispatch by subject name; graph subjects explore from the initial seed"""
    if subject == "scalar":
        return scalar_rigidity_audit(matrix, limits, jobs=jobs)
    if subject == "symmetrizer":
        return symmetrizer_audit(matrix, limits, jobs=jobs)
    if subject in ("positivity", "theorem"):
        graph = explore(initial_seed(matrix), limits, jobs=jobs)
        if subject == "positivity":
            return positivity_audit(graph)
        return theorem_audit(graph, prune=prune, jobs=jobs)
    raise ValueError(f"unknown audit subject {subject!r}; expected one of {', '.join(SUBJECTS)}")
