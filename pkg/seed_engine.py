# seed_engine.py
# Labeled seeds, seed mutation through the exchange relation, and bounded
# breadth-first enumeration of the exchange graph of unlabeled seeds.

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from cluster_config import ExplorationLimits, get_config
from exchange_matrix import (
    Entries,
    ExchangeMatrix,
    canonical_matrix,
    mutate_matrix,
    validate_permutation,
)
from laurent import LaurentPolynomial, div_exact, render
from worker_pool import parallel_map

logger = logging.getLogger(__name__)

SeedKey = Tuple[Tuple[LaurentPolynomial, ...], Entries]


class SeedIntegrityError(RuntimeError):
    """A seed violated the Laurent phenomenon or positivity: corrupted input, not a user error"""


class IncompleteGraphError(ValueError):
    """The operation needs a complete exchange graph"""


@dataclass(frozen=True)
class Seed:
    cluster: Tuple[LaurentPolynomial, ...]
    matrix: ExchangeMatrix
    # Provenance only: two seeds reached along different paths are equal.
    path: Tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        cluster = tuple(self.cluster)
        if len(cluster) != self.matrix.n:
            raise ValueError(f"cluster has {len(cluster)} entries, matrix has rank {self.matrix.n}")
        if any(x.nvars != self.matrix.n for x in cluster):
            raise ValueError("cluster entries must be expressed in the initial cluster")
        if len(set(cluster)) != len(cluster):
            raise ValueError("cluster entries must be pairwise distinct")
        object.__setattr__(self, "cluster", cluster)
        object.__setattr__(self, "path", tuple(self.path))

    @property
    def n(self) -> int:
        return self.matrix.n

    @cached_property
    def key(self) -> SeedKey:
        return canonical_key(self)

    def __str__(self) -> str:
        return f"({', '.join(render(x) for x in self.cluster)}; {self.matrix})"


def initial_seed(matrix: ExchangeMatrix) -> Seed:
    """The formal cluster (x1, ..., xn) with the given exchange matrix"""
    n = matrix.n
    return Seed(tuple(LaurentPolynomial.variable(n, i) for i in range(n)), matrix)


def exchange_binomial(seed: Seed, k: int) -> LaurentPolynomial:
    """∏ x_i^[b_ik]+ + ∏ x_i^[-b_ik]+ over the seed's cluster"""
    positive = LaurentPolynomial.one(seed.n)
    negative = LaurentPolynomial.one(seed.n)
    for i, x in enumerate(seed.cluster):
        b = seed.matrix[i, k]
        if b > 0:
            positive = positive * x ** b
        elif b < 0:
            negative = negative * x ** (-b)
    return positive + negative


def mutate_seed(seed: Seed, k: int) -> Seed:
    if not 0 <= k < seed.n:
        raise IndexError(f"mutation index {k} out of range for rank {seed.n}")
    exchanged = div_exact(exchange_binomial(seed, k), seed.cluster[k])
    if exchanged is None:
        raise SeedIntegrityError(
            f"exchange division at {k + 1} is not exact for seed {seed} (path {list(seed.path)})"
        )
    cluster = list(seed.cluster)
    cluster[k] = exchanged
    return Seed(tuple(cluster), mutate_matrix(seed.matrix, k), seed.path + (k,))


def replay(s0: Seed, path: Sequence[int]) -> Seed:
    seed = s0
    for k in path:
        seed = mutate_seed(seed, k)
    return seed


def permute_seed(seed: Seed, sigma: Sequence[int]) -> Seed:
    """Move position i to sigma[i] in the cluster and the matrix simultaneously"""
    sigma = validate_permutation(sigma, seed.n)
    cluster: List[Optional[LaurentPolynomial]] = [None] * seed.n
    for i, s in enumerate(sigma):
        cluster[s] = seed.cluster[i]
    return Seed(tuple(cluster), canonical_matrix(seed.matrix, sigma), seed.path)


def canonical_key(seed: Seed) -> SeedKey:
    """Sorted cluster plus the matrix relabeled by the sorting permutation"""
    order = sorted(range(seed.n), key=lambda i: seed.cluster[i].sort_key())
    sigma = [0] * seed.n
    for rank, i in enumerate(order):
        sigma[i] = rank
    return tuple(seed.cluster[i] for i in order), canonical_matrix(seed.matrix, sigma).entries


def _check_positivity(seed: Seed) -> None:
    for i, x in enumerate(seed.cluster):
        if not x.is_nonnegative():
            raise SeedIntegrityError(
                f"cluster variable {render(x)} at position {i + 1} has a negative coefficient "
                f"(path {[k + 1 for k in seed.path]})"
            )


# ---------------------------
# Exchange graph
# ---------------------------

@dataclass
class ExchangeGraph:
    rank: int
    nodes: Dict[SeedKey, Seed]            # BFS insertion order
    edges: Dict[SeedKey, List[Optional[SeedKey]]]
    initial: SeedKey
    complete: bool
    depths: Dict[SeedKey, int]
    _index: Dict[SeedKey, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._index = {key: i for i, key in enumerate(self.nodes)}

    def __len__(self) -> int:
        return len(self.nodes)

    def keys(self) -> List[SeedKey]:
        return list(self.nodes)

    def seeds(self) -> List[Seed]:
        return list(self.nodes.values())

    def index_of(self, key: SeedKey) -> int:
        return self._index[key]

    def depth(self, key: SeedKey) -> int:
        return self.depths[key]

    def degree(self, key: SeedKey) -> int:
        return sum(1 for target in self.edges[key] if target is not None)

    def edge_list(self) -> List[Tuple[int, int, int]]:
        """Each undirected edge once as (u, v, k), u < v, k the direction at u"""
        result = []
        for key, targets in self.edges.items():
            u = self._index[key]
            for k, target in enumerate(targets):
                if target is not None and self._index[target] > u:
                    result.append((u, self._index[target], k))
        return result

    def reverse_direction(self, key: SeedKey, k: int) -> int:
        """Direction at the neighbor's representative that leads back along edge k"""
        target = self.edges[key][k]
        if target is None:
            raise KeyError(f"edge {k + 1} of node {self._index[key]} is unresolved")
        exchanged = mutate_seed(self.nodes[key], k).cluster[k]
        return self.nodes[target].cluster.index(exchanged)

    def is_regular(self) -> bool:
        return all(self.degree(key) == self.rank for key in self.nodes)

    def is_symmetric(self) -> bool:
        return all(
            key in self.edges[target]
            for key, targets in self.edges.items()
            for target in targets
            if target is not None
        )

    def iter_variables(self) -> Iterator[LaurentPolynomial]:
        for seed in self.nodes.values():
            yield from seed.cluster


def explore(
    s0: Seed,
    limits: Optional[ExplorationLimits] = None,
    jobs: Optional[int] = None,
    audit: Optional[bool] = None,
    progress: Optional[bool] = None,
) -> ExchangeGraph:
    """Breadth-first enumeration of unlabeled seeds reachable from s0.

    Each layer's mutations run on the worker pool; insertion is sequential in
    (node order, direction) order, so the graph does not depend on jobs.
    """
    cfg = get_config()
    limits = limits or cfg.limits
    jobs = cfg.resolve_jobs(jobs)
    audit = cfg.audit.audit_mode if audit is None else audit
    progress = cfg.audit.progress if progress is None else progress

    n = s0.n
    if audit:
        _check_positivity(s0)
    nodes: Dict[SeedKey, Seed] = {s0.key: s0}
    edges: Dict[SeedKey, List[Optional[SeedKey]]] = {s0.key: [None] * n}
    depths: Dict[SeedKey, int] = {s0.key: 0}
    complete = True
    frontier = [s0.key]
    layer = 0

    def expand(task: Tuple[SeedKey, int]) -> Tuple[Seed, SeedKey]:
        child = mutate_seed(nodes[task[0]], task[1])
        return child, child.key

    while frontier:
        tasks = [(key, k) for key in frontier for k in range(n)]
        results = parallel_map(expand, tasks, jobs=jobs, progress=progress, desc=f"layer {layer}")
        next_frontier = []
        for (key, k), (child, child_key) in zip(tasks, results):
            if child_key not in nodes:
                if layer >= limits.max_depth or len(nodes) >= limits.max_nodes:
                    complete = False
                    continue
                if audit:
                    _check_positivity(child)
                nodes[child_key] = child
                edges[child_key] = [None] * n
                depths[child_key] = layer + 1
                next_frontier.append(child_key)
            edges[key][k] = child_key
        logger.info("[EXPLORE] layer %d: %d new seeds, %d total", layer, len(next_frontier), len(nodes))
        frontier = next_frontier
        layer += 1

    if not complete:
        logger.warning(
            "[EXPLORE] Bound exceeded (max_nodes=%d, max_depth=%d): partial graph with %d seeds",
            limits.max_nodes, limits.max_depth, len(nodes),
        )
    return ExchangeGraph(n, nodes, edges, s0.key, complete, depths)


def require_complete(graph: ExchangeGraph, operation: str) -> None:
    if not graph.complete:
        raise IncompleteGraphError(
            f"{operation} needs a complete exchange graph; enumeration stopped at {len(graph)} seeds"
        )


def cluster_variables(graph: ExchangeGraph) -> List[LaurentPolynomial]:
    """All cluster variables of a complete graph, deduplicated, in canonical order"""
    require_complete(graph, "cluster_variables")
    return sorted(set(graph.iter_variables()), key=LaurentPolynomial.sort_key)


def node_label(key: SeedKey) -> str:
    return "{" + ", ".join(render(x) for x in key[0]) + "}"


def to_dot(graph: ExchangeGraph) -> str:
    lines = ["graph exchange {"]
    for i, key in enumerate(graph.nodes):
        lines.append(f'  n{i} [label="{node_label(key)}"];')
    for u, v, k in graph.edge_list():
        lines.append(f'  n{u} -- n{v} [label="{k + 1}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
