# exchange_matrix.py
# Integer exchange-matrix arithmetic: mutation (entrywise rule and the matrix
# product form), skew-symmetrizer search, block decomposition and the per-block
# sign comparison behind the automorphism test. Entries are Python ints, so
# mutation never overflows.

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from cluster_config import ExplorationLimits

logger = logging.getLogger(__name__)

Entries = Tuple[Tuple[int, ...], ...]
Permutation = Tuple[int, ...]
MatrixLike = Union["ExchangeMatrix", Sequence[Sequence[int]]]


class MatrixValidationError(ValueError):
    """Raised for non-square or sign-incompatible matrices"""


class NotSkewSymmetrizableError(MatrixValidationError):
    """Raised when no positive integer diagonal D makes B·D skew-symmetric"""


def positive_part(x: int) -> int:
    """[x]_+ = max(x, 0)"""
    return x if x > 0 else 0


def sign(x: int) -> int:
    return (x > 0) - (x < 0)


# ---------------------------
# Permutations
# ---------------------------

def validate_permutation(sigma: Sequence[int], n: int) -> Permutation:
    """Return sigma as a tuple, or raise ValueError if it is not a bijection of range(n)"""
    sigma = tuple(int(s) for s in sigma)
    if len(sigma) != n or sorted(sigma) != list(range(n)):
        raise ValueError(f"{list(sigma)} is not a bijection of [0, {n})")
    return sigma


def inverse_permutation(sigma: Sequence[int]) -> Permutation:
    inverse = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inverse[s] = i
    return tuple(inverse)


def compose_permutations(outer: Sequence[int], inner: Sequence[int]) -> Permutation:
    """(outer ∘ inner)(i) = outer[inner[i]]"""
    return tuple(outer[i] for i in inner)


# ---------------------------
# Structures
# ---------------------------

@dataclass(frozen=True)
class SkewSymmetrizer:
    """Diagonal of D, positive and gcd-normalized on each block"""
    d: Tuple[int, ...]

    def __post_init__(self):
        if any(x <= 0 for x in self.d):
            raise ValueError(f"skew-symmetrizer entries must be positive, got {self.d}")

    def is_symmetrizer_of(self, matrix: MatrixLike) -> bool:
        rows = _as_rows(matrix)
        if len(rows) != len(self.d):
            return False
        n = len(rows)
        return all(
            rows[i][j] * self.d[j] == -rows[j][i] * self.d[i]
            for i in range(n)
            for j in range(n)
        )


@dataclass(frozen=True)
class Block:
    indices: Tuple[int, ...]
    zero: bool


@dataclass(frozen=True)
class BlockPartition:
    """Connected components of the support graph; all-zero indices share one zero-block"""
    n: int
    blocks: Tuple[Block, ...]

    def block_of(self, i: int) -> Block:
        for block in self.blocks:
            if i in block.indices:
                return block
        raise IndexError(f"index {i} out of range for rank {self.n}")

    @property
    def nonzero_blocks(self) -> Tuple[Block, ...]:
        return tuple(b for b in self.blocks if not b.zero)

    @property
    def zero_indices(self) -> Tuple[int, ...]:
        for block in self.blocks:
            if block.zero:
                return block.indices
        return ()

    def is_decomposable(self) -> bool:
        return len(self.blocks) > 1


@dataclass(frozen=True)
class SignPattern:
    """Per-column ±1 relating two exchange matrices: B = B2·diag(a)"""
    a: Tuple[int, ...]

    def __post_init__(self):
        if any(x not in (1, -1) for x in self.a):
            raise ValueError(f"sign pattern entries must be ±1, got {self.a}")

    def is_constant_on(self, partition: BlockPartition) -> bool:
        return all(
            len({self.a[i] for i in block.indices}) <= 1
            for block in partition.nonzero_blocks
        )

    @property
    def global_sign(self) -> Optional[int]:
        values = set(self.a)
        return values.pop() if len(values) == 1 else None


# ---------------------------
# Exchange matrix
# ---------------------------

def _as_rows(matrix: MatrixLike) -> Entries:
    if isinstance(matrix, ExchangeMatrix):
        return matrix.entries
    rows = tuple(tuple(int(x) for x in row) for row in matrix)
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise MatrixValidationError(
                f"matrix is not square: row {i + 1} has {len(row)} entries, expected {n}"
            )
    return rows


def _support_graph(rows: Entries) -> nx.Graph:
    n = len(rows)
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != 0 or rows[j][i] != 0:
                graph.add_edge(i, j)
    return graph


def _sorted_components(graph: nx.Graph) -> List[List[int]]:
    return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])


def check_sign_compatible(rows: Entries) -> None:
    """Raise MatrixValidationError naming the first (1-based) offending (i, j)"""
    n = len(rows)
    for i in range(n):
        for j in range(n):
            if sign(rows[i][j]) != -sign(rows[j][i]):
                raise MatrixValidationError(
                    f"entry ({i + 1},{j + 1}) = {rows[i][j]} is not sign-compatible "
                    f"with entry ({j + 1},{i + 1}) = {rows[j][i]}"
                )


@dataclass(frozen=True)
class ExchangeMatrix:
    entries: Entries
    symmetrizer: SkewSymmetrizer = field(init=False, repr=False, compare=False)
    blocks: BlockPartition = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = _as_rows(self.entries)
        if not rows:
            raise MatrixValidationError("exchange matrix must have positive rank")
        check_sign_compatible(rows)
        d = find_skew_symmetrizer(rows)
        if d is None:
            raise NotSkewSymmetrizableError(f"matrix {[list(r) for r in rows]} is not skew-symmetrizable")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "symmetrizer", d)
        object.__setattr__(self, "blocks", decompose_blocks(rows))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "ExchangeMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def zero(cls, n: int) -> "ExchangeMatrix":
        return cls(tuple((0,) * n for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i]

    def column(self, k: int) -> Tuple[int, ...]:
        return tuple(row[k] for row in self.entries)

    def to_rows(self) -> List[List[int]]:
        return [list(row) for row in self.entries]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def __neg__(self) -> "ExchangeMatrix":
        return ExchangeMatrix(tuple(tuple(-x for x in row) for row in self.entries))

    def __str__(self) -> str:
        return str(self.to_rows())


def _check_index(matrix: ExchangeMatrix, k: int) -> None:
    if not 0 <= k < matrix.n:
        raise IndexError(f"mutation index {k} out of range for rank {matrix.n}")


def mutate_matrix(matrix: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Entrywise mutation rule at k (0-based)"""
    _check_index(matrix, k)
    b = matrix.entries
    n = matrix.n
    mutated = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == k or j == k:
                row.append(-b[i][j])
            else:
                row.append(b[i][j] + sign(b[i][k]) * positive_part(b[i][k] * b[k][j]))
        mutated.append(tuple(row))
    return ExchangeMatrix(tuple(mutated))


def mutate_matrix_product(matrix: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Mutation at k as the product (J_k + E_k)·B·(J_k + F_k)"""
    _check_index(matrix, k)
    n = matrix.n
    b = np.array(matrix.to_rows(), dtype=object)

    left = np.identity(n, dtype=object)
    right = np.identity(n, dtype=object)
    left[k, k] = -1
    right[k, k] = -1
    for i in range(n):
        left[i, k] += positive_part(-matrix.entries[i][k])
    for j in range(n):
        right[k, j] += positive_part(matrix.entries[k][j])

    product = left.dot(b).dot(right)
    return ExchangeMatrix(tuple(tuple(int(x) for x in row) for row in product))


def mutate_sequence(matrix: ExchangeMatrix, ks: Iterable[int]) -> ExchangeMatrix:
    """Apply mutations left to right"""
    for k in ks:
        matrix = mutate_matrix(matrix, k)
    return matrix


def find_skew_symmetrizer(matrix: MatrixLike) -> Optional[SkewSymmetrizer]:
    """Normalized positive diagonal D with B·D skew-symmetric (b_ij d_j = -b_ji d_i), or None.

    Ratios are propagated along a BFS spanning tree of each block with exact
    rationals, every constraint is then verified, and each block is scaled to
    coprime integers.
    """
    rows = _as_rows(matrix)
    n = len(rows)
    graph = _support_graph(rows)
    d: List[int] = [1] * n

    for component in _sorted_components(graph):
        root = component[0]
        values: Dict[int, Fraction] = {root: Fraction(1)}
        for u, v in nx.bfs_edges(graph, root):
            b_uv, b_vu = rows[u][v], rows[v][u]
            if b_uv == 0 or b_vu == 0:
                return None
            ratio = Fraction(-b_vu, b_uv)
            if ratio <= 0:
                return None
            values[v] = values[u] * ratio

        for i in component:
            for j in component:
                if rows[i][j] * values[j] != -rows[j][i] * values[i]:
                    return None

        denominator = reduce(lambda a, b: a * b // gcd(a, b), (values[i].denominator for i in component), 1)
        scaled = [int(values[i] * denominator) for i in component]
        common = reduce(gcd, scaled)
        for i, value in zip(component, scaled):
            d[i] = value // common

    return SkewSymmetrizer(tuple(d))


def decompose_blocks(matrix: MatrixLike) -> BlockPartition:
    """Components of the nonzero-entry graph; isolated all-zero indices form one zero-block"""
    rows = _as_rows(matrix)
    n = len(rows)
    blocks: List[Block] = []
    zero_indices: List[int] = []
    for component in _sorted_components(_support_graph(rows)):
        if len(component) == 1 and rows[component[0]][component[0]] == 0:
            zero_indices.append(component[0])
        else:
            blocks.append(Block(tuple(component), zero=False))
    if zero_indices:
        blocks.append(Block(tuple(zero_indices), zero=True))
    blocks.sort(key=lambda block: block.indices[0])
    return BlockPartition(n, tuple(blocks))


def sign_match_up_to_blocks(
    matrix: ExchangeMatrix,
    other: ExchangeMatrix,
    partition: BlockPartition,
) -> Optional[SignPattern]:
    """Sign pattern a with matrix = other·diag(a), constant on each nonzero block"""
    if matrix.n != other.n:
        raise ValueError(f"rank mismatch: {matrix.n} vs {other.n}")
    n = matrix.n
    b, b2 = matrix.entries, other.entries
    a = [1] * n

    for block in partition.blocks:
        if block.zero:
            # Zero columns get +1; the other matrix must vanish there too.
            if any(b2[i][j] != 0 for j in block.indices for i in range(n)):
                return None
            continue

        epsilon = None
        for j in block.indices:
            for i in range(n):
                if b[i][j] != 0:
                    if b2[i][j] == 0 or b[i][j] not in (b2[i][j], -b2[i][j]):
                        return None
                    epsilon = 1 if b[i][j] == b2[i][j] else -1
                    break
            if epsilon is not None:
                break
        if epsilon is None:
            return None

        for j in block.indices:
            if any(b[i][j] != epsilon * b2[i][j] for i in range(n)):
                return None
            a[j] = epsilon

    return SignPattern(tuple(a))


def canonical_matrix(matrix: ExchangeMatrix, sigma: Sequence[int]) -> ExchangeMatrix:
    """Simultaneous row/column permutation: b'_{σ(i)σ(j)} = b_ij"""
    n = matrix.n
    sigma = validate_permutation(sigma, n)
    permuted = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            permuted[sigma[i]][sigma[j]] = matrix.entries[i][j]
    return ExchangeMatrix.from_rows(permuted)


def solve_column_scaling(matrix: ExchangeMatrix, other: ExchangeMatrix) -> Optional[Tuple[int, ...]]:
    """Integer diagonal A with matrix = other·A, solved column by column.

    Columns zero in both matrices take a_k = 1; a column zero in exactly one
    of them, or a non-integer ratio, means no solution.
    """
    if matrix.n != other.n:
        raise ValueError(f"rank mismatch: {matrix.n} vs {other.n}")
    a = []
    for k in range(matrix.n):
        col, col2 = matrix.column(k), other.column(k)
        pivot = next((i for i, x in enumerate(col2) if x != 0), None)
        if pivot is None:
            if any(col):
                return None
            a.append(1)
            continue
        if col[pivot] % col2[pivot] != 0:
            return None
        scale = col[pivot] // col2[pivot]
        if any(x != scale * y for x, y in zip(col, col2)):
            return None
        a.append(scale)
    return tuple(a)


def mutation_class(
    matrix: ExchangeMatrix,
    limits: Optional[ExplorationLimits] = None,
) -> Tuple[List[ExchangeMatrix], bool]:
    """Labeled matrices reachable by mutation, in BFS order; (members, complete)"""
    limits = limits or ExplorationLimits()
    members: Dict[Entries, ExchangeMatrix] = {matrix.entries: matrix}
    queue = deque([(matrix, 0)])
    complete = True

    while queue:
        current, depth = queue.popleft()
        for k in range(current.n):
            mutated = mutate_matrix(current, k)
            if mutated.entries in members:
                continue
            if depth >= limits.max_depth or len(members) >= limits.max_nodes:
                complete = False
                continue
            members[mutated.entries] = mutated
            queue.append((mutated, depth + 1))

    if not complete:
        logger.warning("[MATRIX] Mutation class truncated at %d members", len(members))
    return list(members.values()), complete
