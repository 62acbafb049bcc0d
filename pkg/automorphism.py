# automorphism.py
# Cluster automorphism candidates and their verification. A Z-algebra
# homomorphism sending one cluster onto another is already a cluster
# automorphism, so the search space is exactly (target seed, bijection)
# pairs: a fast sign test on exchange matrices filters them and a symbolic
# one-step commutation check confirms.

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from cluster_config import get_config
from exchange_matrix import (
    Permutation,
    SignPattern,
    canonical_matrix,
    sign_match_up_to_blocks,
    validate_permutation,
)
from laurent import LaurentPolynomial, substitute
from seed_engine import (
    ExchangeGraph,
    Seed,
    SeedKey,
    mutate_seed,
    require_complete,
)
from worker_pool import parallel_map

logger = logging.getLogger(__name__)

Images = Tuple[LaurentPolynomial, ...]


class Verification(str, Enum):
    UNCHECKED = "unchecked"
    PASSED = "passed"
    FAILED = "failed"


@dataclass(eq=False)
class ClusterHom:
    """Endomorphism fixed by f(x_i) = images[i]; equal homs have equal image tuples"""
    images: Images
    target_key: SeedKey
    sigma: Permutation
    sign: Optional[SignPattern]
    target: Seed = field(repr=False)
    verified: Verification = Verification.UNCHECKED

    def __post_init__(self):
        self.images = tuple(self.images)
        if any(self.images[i] != self.target.cluster[s] for i, s in enumerate(self.sigma)):
            raise ValueError("images reordered by sigma must equal the target cluster")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClusterHom):
            return NotImplemented
        return self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    @property
    def n(self) -> int:
        return len(self.images)

    def apply(self, p: LaurentPolynomial) -> Optional[LaurentPolynomial]:
        return substitute(p, self.images)


def _check_ranks(s0: Seed, t: Seed) -> None:
    if s0.n != t.n:
        raise ValueError(f"rank mismatch: {s0.n} vs {t.n}")


def sign_test(s0: Seed, t: Seed, sigma: Sequence[int]) -> Optional[SignPattern]:
    """Per-block signs with B^σ = B_t·diag(a), or None when the candidate cannot be an automorphism"""
    _check_ranks(s0, t)
    permuted = canonical_matrix(s0.matrix, validate_permutation(sigma, s0.n))
    return sign_match_up_to_blocks(permuted, t.matrix, permuted.blocks)


def induce_hom(s0: Seed, t: Seed, sigma: Sequence[int]) -> ClusterHom:
    _check_ranks(s0, t)
    sigma = validate_permutation(sigma, s0.n)
    images = tuple(t.cluster[s] for s in sigma)
    return ClusterHom(images, t.key, sigma, sign_test(s0, t, sigma), t)


def verify_one_step(h: ClusterHom, s0: Seed) -> bool:
    """f(μ_k(x))_k = μ_σ(k)(z)_σ(k) for every k, by exact substitution"""
    passed = True
    for k in range(s0.n):
        mapped = h.apply(mutate_seed(s0, k).cluster[k])
        target_k = h.sigma[k]
        if mapped is None or mapped != mutate_seed(h.target, target_k).cluster[target_k]:
            passed = False
            break
    h.verified = Verification.PASSED if passed else Verification.FAILED
    return passed


def verify_two_step(h: ClusterHom, s0: Seed) -> bool:
    """Spot check of commutation two mutations deep, for all ordered pairs k != j"""
    n = s0.n
    first = [mutate_seed(s0, k) for k in range(n)]
    first_target = [mutate_seed(h.target, h.sigma[k]) for k in range(n)]
    for k in range(n):
        for j in range(n):
            if j == k:
                continue
            source = mutate_seed(first[k], j)
            target = mutate_seed(first_target[k], h.sigma[j])
            for i in range(n):
                mapped = h.apply(source.cluster[i])
                if mapped is None or mapped != target.cluster[h.sigma[i]]:
                    return False
    return True


def compose(f: ClusterHom, g: ClusterHom) -> Optional[Images]:
    """Images of f∘g on the initial cluster"""
    images = []
    for image in g.images:
        mapped = f.apply(image)
        if mapped is None:
            return None
        images.append(mapped)
    return tuple(images)


def permutes_variables(h: ClusterHom, variables: Sequence[LaurentPolynomial]) -> bool:
    """The hom restricts to a bijection of the given cluster-variable set"""
    mapped = [h.apply(v) for v in variables]
    if any(m is None for m in mapped):
        return False
    return set(mapped) == set(variables)


def candidate_permutations(s0: Seed, t: Seed, prune: bool = False) -> Iterator[Permutation]:
    """All bijections in lexicographic order, or only those matching entry magnitudes"""
    n = s0.n
    if not prune:
        yield from itertools.permutations(range(n))
        return

    b, bt = s0.matrix.entries, t.matrix.entries
    assigned: List[int] = []
    used = [False] * n

    def extend(i: int) -> Iterator[Permutation]:
        if i == n:
            yield tuple(assigned)
            return
        for v in range(n):
            if used[v]:
                continue
            if any(
                abs(b[i][j]) != abs(bt[v][assigned[j]]) or abs(b[j][i]) != abs(bt[assigned[j]][v])
                for j in range(i)
            ):
                continue
            used[v] = True
            assigned.append(v)
            yield from extend(i + 1)
            assigned.pop()
            used[v] = False

    yield from extend(0)


def enumerate_candidates(graph: ExchangeGraph, prune: bool = False) -> List[Tuple[Seed, Permutation]]:
    """(target seed, σ) pairs ordered by BFS node index, then σ"""
    s0 = graph.nodes[graph.initial]
    return [
        (t, sigma)
        for t in graph.seeds()
        for sigma in candidate_permutations(s0, t, prune)
    ]


@dataclass
class AutomorphismGroup:
    elements: List[ClusterHom]
    table: List[List[Optional[int]]]
    identity: Optional[int]

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_closed(self) -> bool:
        return all(entry is not None for row in self.table for entry in row)

    def inverse(self, i: int) -> Optional[int]:
        for j in range(self.order):
            if self.table[i][j] == self.identity and self.table[j][i] == self.identity:
                return j
        return None

    def has_inverses(self) -> bool:
        return self.identity is not None and all(self.inverse(i) is not None for i in range(self.order))

    def is_associative(self) -> bool:
        if not self.is_closed():
            return False
        t = self.table
        r = range(self.order)
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in r for b in r for c in r)

    def mixed_sign_elements(self) -> List[int]:
        """Elements whose sign pattern differs across blocks (decomposable B only)"""
        return [
            i for i, h in enumerate(self.elements)
            if h.sign is not None and h.sign.global_sign is None
        ]


def _dedupe(homs: Sequence[ClusterHom]) -> List[ClusterHom]:
    seen: Dict[Images, ClusterHom] = {}
    for h in homs:
        seen.setdefault(h.images, h)
    return list(seen.values())


def build_group(elements: List[ClusterHom], s0: Seed) -> AutomorphismGroup:
    index: Dict[Images, int] = {h.images: i for i, h in enumerate(elements)}
    table: List[List[Optional[int]]] = []
    for f in elements:
        row = []
        for g in elements:
            images = compose(f, g)
            row.append(index.get(images) if images is not None else None)
        table.append(row)
    group = AutomorphismGroup(elements, table, index.get(s0.cluster))
    if not group.is_closed():
        logger.error("[AUTOS] Candidate set of order %d is not closed under composition", group.order)
    return group


def automorphism_group(
    graph: ExchangeGraph,
    prune: Optional[bool] = None,
    jobs: Optional[int] = None,
    progress: Optional[bool] = None,
) -> AutomorphismGroup:
    """Sign-test every (node, σ) candidate, confirm survivors symbolically, assemble the group"""
    require_complete(graph, "automorphism_group")
    cfg = get_config()
    s0 = graph.nodes[graph.initial]
    prune = cfg.should_prune(s0.n, prune)
    candidates = enumerate_candidates(graph, prune)

    def check(candidate: Tuple[Seed, Permutation]) -> Optional[ClusterHom]:
        h = induce_hom(s0, *candidate)
        if h.sign is None:
            return None
        if not verify_one_step(h, s0):
            # Contradicts the cluster-to-cluster criterion; kept out of the group.
            logger.error("[AUTOS] Sign test passed but one-step check failed for sigma=%s", h.sigma)
            return None
        return h

    results = parallel_map(
        check, candidates,
        jobs=cfg.resolve_jobs(jobs),
        progress=cfg.audit.progress if progress is None else progress,
        desc="automorphisms",
    )
    elements = _dedupe([h for h in results if h is not None])
    logger.info("[AUTOS] %d candidates, %d automorphisms", len(candidates), len(elements))
    return build_group(elements, s0)


def brute_force_automorphisms(graph: ExchangeGraph, jobs: Optional[int] = None) -> List[ClusterHom]:
    """Verify-only oracle: every (node, σ) with no sign pruning"""
    require_complete(graph, "brute_force_automorphisms")
    s0 = graph.nodes[graph.initial]

    def check(candidate: Tuple[Seed, Permutation]) -> Optional[ClusterHom]:
        h = induce_hom(s0, *candidate)
        return h if verify_one_step(h, s0) else None

    results = parallel_map(check, enumerate_candidates(graph), jobs=get_config().resolve_jobs(jobs))
    return _dedupe([h for h in results if h is not None])
