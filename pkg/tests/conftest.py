# Shared fixtures: finite-type exchange matrices and a seeded random corpus of
# skew-symmetrizable matrices.

import os
import random
import sys
from math import lcm

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cluster_config import reload_config
from exchange_matrix import ExchangeMatrix

A1 = [[0]]
A2 = [[0, 1], [-1, 0]]
A3 = [[0, 1, 0], [-1, 0, 1], [0, -1, 0]]
B2 = [[0, 2], [-1, 0]]
A2_A2 = [
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
    [0, 0, 0, 1],
    [0, 0, -1, 0],
]

CORPUS_SIZE = 1000


def random_skew_symmetrizable(rng: random.Random, n: int) -> ExchangeMatrix:
    """b_ij = m_ij * lcm(d_i, d_j) / d_j, so B·diag(d) is skew-symmetric"""
    d = [rng.choice((1, 2)) for _ in range(n)]
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = rng.randint(-2, 2)
            m[j][i] = -m[i][j]
    rows = [[m[i][j] * lcm(d[i], d[j]) // d[j] for j in range(n)] for i in range(n)]
    return ExchangeMatrix.from_rows(rows)


ENV_VARS = (
    "CLUSTER_JOBS",
    "CLUSTER_AUDIT_MODE",
    "CLUSTER_DEEP_CHECKS",
    "CLUSTER_PROGRESS",
    "CLUSTER_PRUNE_ABOVE_RANK",
    "CLUSTER_LOG_LEVEL",
)


@pytest.fixture(autouse=True, scope="session")
def clean_environment():
    # @given tests may not depend on function-scoped fixtures.
    saved = {name: os.environ.pop(name) for name in ENV_VARS if name in os.environ}
    reload_config()
    yield
    os.environ.update(saved)
    reload_config()


@pytest.fixture
def a1():
    return ExchangeMatrix.from_rows(A1)


@pytest.fixture
def a2():
    return ExchangeMatrix.from_rows(A2)


@pytest.fixture
def a3():
    return ExchangeMatrix.from_rows(A3)


@pytest.fixture
def b2():
    return ExchangeMatrix.from_rows(B2)


@pytest.fixture
def a2_a2():
    return ExchangeMatrix.from_rows(A2_A2)


@pytest.fixture(scope="session")
def corpus():
    rng = random.Random(20240607)
    return [random_skew_symmetrizable(rng, rng.randint(1, 6)) for _ in range(CORPUS_SIZE)]
