"""
Seed mutation, canonical keys and exchange-graph enumeration on finite types.
"""

import pytest

from cluster_config import ExplorationLimits
from exchange_matrix import ExchangeMatrix, mutate_matrix
from laurent import LaurentPolynomial as L, parse, render
from seed_engine import (
    IncompleteGraphError,
    Seed,
    SeedIntegrityError,
    canonical_key,
    cluster_variables,
    exchange_binomial,
    explore,
    initial_seed,
    mutate_seed,
    permute_seed,
    replay,
    to_dot,
)

A2_VARIABLES = ["x1", "x2", "x1^-1 + x1^-1*x2", "x2^-1 + x1*x2^-1", "x1^-1*x2^-1 + x2^-1 + x1^-1"]


def variables(n, texts):
    return {parse(t, n) for t in texts}


class TestMutateSeed:
    def test_a2_first_direction(self, a2):
        seed = mutate_seed(initial_seed(a2), 0)
        assert seed.cluster == (parse("x1^-1 + x1^-1*x2", 2), L.variable(2, 1))
        assert seed.matrix.to_rows() == [[0, -1], [1, 0]]
        assert seed.path == (0,)

    def test_rank_one(self, a1):
        seed = mutate_seed(initial_seed(a1), 0)
        assert seed.cluster == (L.monomial(1, (-1,), 2),)

    def test_involution(self, a3):
        s0 = initial_seed(a3)
        for k in range(3):
            twice = mutate_seed(mutate_seed(s0, k), k)
            assert twice == s0
            assert twice.path == (k, k)

    def test_exchange_binomial(self, b2):
        s0 = initial_seed(b2)
        # column 2 of [[0,2],[-1,0]]: x1^2 + 1
        assert exchange_binomial(s0, 1) == L.variable(2, 0) ** 2 + 1
        assert exchange_binomial(s0, 0) == L.variable(2, 1) + 1

    def test_index_out_of_range(self, a2):
        with pytest.raises(IndexError):
            mutate_seed(initial_seed(a2), 2)

    def test_corrupted_seed_raises_integrity_error(self, a2):
        bad = Seed((L.variable(2, 0) + 1, L.variable(2, 1) * 2), a2)
        # (1 + 2*x2) / (1 + x1) is not a Laurent polynomial
        with pytest.raises(SeedIntegrityError):
            mutate_seed(bad, 0)

    def test_seed_validation(self, a2):
        x1 = L.variable(2, 0)
        with pytest.raises(ValueError):
            Seed((x1,), a2)
        with pytest.raises(ValueError):
            Seed((x1, x1), a2)
        with pytest.raises(ValueError):
            Seed((L.variable(3, 0), L.variable(3, 1)), a2)

    def test_replay(self, a3):
        s0 = initial_seed(a3)
        seed = replay(s0, [0, 1, 2, 1])
        assert seed.path == (0, 1, 2, 1)
        assert seed == mutate_seed(mutate_seed(mutate_seed(mutate_seed(s0, 0), 1), 2), 1)


class TestCanonicalKey:
    def test_invariant_under_permutation(self, a3):
        seed = replay(initial_seed(a3), [1, 0])
        for sigma in [(0, 1, 2), (2, 1, 0), (1, 2, 0), (0, 2, 1)]:
            assert canonical_key(permute_seed(seed, sigma)) == canonical_key(seed)

    def test_global_sign_distinguishes(self, a2):
        s0 = initial_seed(a2)
        flipped = Seed(s0.cluster, -a2)
        assert canonical_key(flipped) != canonical_key(s0)

    def test_path_is_provenance_only(self, a2):
        s0 = initial_seed(a2)
        assert Seed(s0.cluster, s0.matrix, (0, 0)) == s0


class TestExplore:
    def test_a1(self, a1):
        graph = explore(initial_seed(a1))
        assert graph.complete
        assert len(graph) == 2
        assert graph.edge_list() == [(0, 1, 0)]
        assert cluster_variables(graph) == sorted({L.variable(1, 0), L.monomial(1, (-1,), 2)}, key=L.sort_key)

    def test_a2_pentagon(self, a2):
        graph = explore(initial_seed(a2), ExplorationLimits(max_nodes=10, max_depth=10))
        assert graph.complete
        assert len(graph) == 5
        assert graph.is_regular() and graph.is_symmetric()
        assert len(graph.edge_list()) == 5
        assert set(cluster_variables(graph)) == variables(2, A2_VARIABLES)

    @pytest.mark.parametrize("fixture, seeds, nvars", [("a3", 14, 9), ("b2", 6, 6)])
    def test_finite_type_counts(self, request, fixture, seeds, nvars):
        matrix = request.getfixturevalue(fixture)
        graph = explore(initial_seed(matrix))
        assert graph.complete
        assert len(graph) == seeds
        assert len(cluster_variables(graph)) == nvars
        assert graph.is_regular() and graph.is_symmetric()

    @pytest.mark.parametrize("fixture", ["a1", "a2", "a3", "b2"])
    def test_laurent_phenomenon_and_positivity(self, request, fixture):
        graph = explore(initial_seed(request.getfixturevalue(fixture)), audit=True)
        for x in graph.iter_variables():
            assert x.is_nonnegative()

    @pytest.mark.parametrize("fixture", ["a2", "a3", "b2"])
    def test_replay_determinism(self, request, fixture):
        graph = explore(initial_seed(request.getfixturevalue(fixture)))
        s0 = graph.nodes[graph.initial]
        for key, seed in graph.nodes.items():
            assert replay(s0, seed.path).key == key
            assert graph.depth(key) == len(seed.path)

    def test_edges_lead_back(self, a3):
        graph = explore(initial_seed(a3))
        for key in graph.keys():
            for k in range(3):
                target = graph.edges[key][k]
                back = graph.reverse_direction(key, k)
                assert graph.edges[target][back] == key

    def test_node_bound(self, a2):
        graph = explore(initial_seed(a2), ExplorationLimits(max_nodes=1))
        assert not graph.complete
        assert len(graph) == 1
        with pytest.raises(IncompleteGraphError):
            cluster_variables(graph)

    def test_depth_bound(self, a3):
        graph = explore(initial_seed(a3), ExplorationLimits(max_depth=1))
        assert not graph.complete
        assert len(graph) == 4
        assert max(graph.depths.values()) == 1

    def test_partial_graph_logs_warning(self, a2, caplog):
        with caplog.at_level("WARNING"):
            explore(initial_seed(a2), ExplorationLimits(max_nodes=2))
        assert "partial graph" in caplog.text

    def test_infinite_type_stops(self):
        kronecker = ExchangeMatrix.from_rows([[0, 2], [-2, 0]])
        graph = explore(initial_seed(kronecker), ExplorationLimits(max_nodes=20))
        assert not graph.complete
        assert len(graph) == 20

    def test_jobs_do_not_change_the_graph(self, a3):
        reference = explore(initial_seed(a3), jobs=1)
        parallel = explore(initial_seed(a3), jobs=4)
        assert reference == parallel
        assert list(reference.nodes) == list(parallel.nodes)
        assert to_dot(reference) == to_dot(parallel)


def test_to_dot_pentagon(a2):
    dot = to_dot(explore(initial_seed(a2)))
    assert dot.startswith("graph exchange {")
    assert dot.count(" -- ") == 5
    assert dot.count("[label=\"{") == 5
    # x2 sorts before x1: exponent (0, 1) < (1, 0)
    assert 'n0 [label="{x2, x1}"]' in dot


def test_mutation_matches_matrix_rule(a3):
    s0 = initial_seed(a3)
    for k in range(3):
        assert mutate_seed(s0, k).matrix == mutate_matrix(a3, k)


def test_seed_str_is_readable(a2):
    text = str(mutate_seed(initial_seed(a2), 0))
    assert render(parse("x1^-1 + x1^-1*x2", 2)) in text
