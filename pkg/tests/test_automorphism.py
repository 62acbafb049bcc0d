"""
Cluster automorphisms: sign test, one-step verification and the group.
"""

import math

import pytest

from automorphism import (
    Verification,
    automorphism_group,
    brute_force_automorphisms,
    candidate_permutations,
    compose,
    enumerate_candidates,
    induce_hom,
    permutes_variables,
    sign_test,
    verify_one_step,
    verify_two_step,
)
from exchange_matrix import ExchangeMatrix
from laurent import LaurentPolynomial as L, parse
from seed_engine import (
    IncompleteGraphError,
    Seed,
    cluster_variables,
    explore,
    initial_seed,
    mutate_seed,
)
from cluster_config import ExplorationLimits


@pytest.fixture
def a2_graph(a2):
    return explore(initial_seed(a2))


@pytest.fixture
def a3_graph(a3):
    return explore(initial_seed(a3))


class TestSignTest:
    def test_mutated_target_flips_sign(self, a2):
        s0 = initial_seed(a2)
        assert sign_test(s0, mutate_seed(s0, 0), (0, 1)).a == (-1, -1)

    def test_identity(self, a3):
        s0 = initial_seed(a3)
        assert sign_test(s0, s0, (0, 1, 2)).a == (1, 1, 1)

    def test_magnitude_mismatch(self, a2):
        s0 = initial_seed(a2)
        t = Seed(s0.cluster, ExchangeMatrix.from_rows([[0, 2], [-2, 0]]))
        assert sign_test(s0, t, (0, 1)) is None

    def test_rank_mismatch(self, a2, a3):
        with pytest.raises(ValueError):
            sign_test(initial_seed(a2), initial_seed(a3), (0, 1))
        with pytest.raises(ValueError):
            induce_hom(initial_seed(a2), initial_seed(a3), (0, 1))

    def test_blockwise_signs_on_direct_sum(self, a2_a2):
        s0 = initial_seed(a2_a2)
        t = mutate_seed(s0, 0)
        pattern = sign_test(s0, t, (0, 1, 2, 3))
        assert pattern.a == (-1, -1, 1, 1)
        assert pattern.global_sign is None
        assert verify_one_step(induce_hom(s0, t, (0, 1, 2, 3)), s0)


class TestInduceAndVerify:
    def test_identity(self, a3):
        s0 = initial_seed(a3)
        h = induce_hom(s0, s0, (0, 1, 2))
        assert h.images == s0.cluster
        assert h.verified is Verification.UNCHECKED
        assert verify_one_step(h, s0)
        assert h.verified is Verification.PASSED

    def test_mutated_target(self, a2):
        s0 = initial_seed(a2)
        h = induce_hom(s0, mutate_seed(s0, 0), (0, 1))
        assert h.images == (parse("x1^-1 + x1^-1*x2", 2), L.variable(2, 1))
        assert h.sign.a == (-1, -1)
        assert verify_one_step(h, s0)

    def test_swap(self, a2):
        s0 = initial_seed(a2)
        h = induce_hom(s0, s0, (1, 0))
        assert h.images == (L.variable(2, 1), L.variable(2, 0))

    def test_failed_sign_fails_symbolically(self, a2_graph):
        s0 = a2_graph.nodes[a2_graph.initial]
        for t, sigma in enumerate_candidates(a2_graph):
            h = induce_hom(s0, t, sigma)
            if h.sign is None:
                assert not verify_one_step(h, s0)
                assert h.verified is Verification.FAILED

    def test_equality_by_images(self, a2):
        s0 = initial_seed(a2)
        h1 = induce_hom(s0, s0, (0, 1))
        h2 = induce_hom(s0, s0, (0, 1))
        h2.verified = Verification.PASSED
        assert h1 == h2 and hash(h1) == hash(h2)

    def test_images_must_match_target(self, a2):
        s0 = initial_seed(a2)
        h = induce_hom(s0, s0, (0, 1))
        with pytest.raises(ValueError):
            type(h)(h.images, h.target_key, (1, 0), h.sign, h.target)


class TestCandidates:
    def test_all_bijections(self, a3):
        s0 = initial_seed(a3)
        assert len(list(candidate_permutations(s0, s0))) == math.factorial(3)

    def test_pruned_bijections_match_magnitudes(self, a3):
        s0 = initial_seed(a3)
        pruned = list(candidate_permutations(s0, s0, prune=True))
        # the path 1-2-3 only has the identity and the reversal
        assert pruned == [(0, 1, 2), (2, 1, 0)]

    def test_ordering(self, a2_graph):
        candidates = enumerate_candidates(a2_graph)
        assert len(candidates) == 10
        assert candidates[0][1] == (0, 1) and candidates[1][1] == (1, 0)


class TestGroup:
    def test_rank_one(self, a1):
        group = automorphism_group(explore(initial_seed(a1)))
        assert group.order == 2
        assert group.identity == 0
        assert group.elements[1].images == (L.monomial(1, (-1,), 2),)
        assert compose(group.elements[1], group.elements[1]) == group.elements[0].images
        assert group.table == [[0, 1], [1, 0]]

    @pytest.mark.parametrize("fixture, order", [("a2", 10), ("a3", 12), ("b2", 6)])
    def test_matches_brute_force(self, request, fixture, order):
        graph = explore(initial_seed(request.getfixturevalue(fixture)))
        group = automorphism_group(graph)
        assert set(group.elements) == set(brute_force_automorphisms(graph))
        assert group.order == order

    def test_group_axioms(self, a3_graph):
        group = automorphism_group(a3_graph)
        assert group.identity is not None
        assert group.is_closed()
        assert group.has_inverses()
        assert group.is_associative()
        assert group.mixed_sign_elements() == []

    def test_elements_permute_cluster_variables(self, a3_graph):
        variables = cluster_variables(a3_graph)
        s0 = a3_graph.nodes[a3_graph.initial]
        for h in automorphism_group(a3_graph).elements:
            assert h.verified is Verification.PASSED
            assert h.sign.is_constant_on(s0.matrix.blocks)
            assert permutes_variables(h, variables)

    def test_two_step_commutation(self, a2_graph):
        s0 = a2_graph.nodes[a2_graph.initial]
        for h in automorphism_group(a2_graph).elements:
            assert verify_two_step(h, s0)

    def test_pruning_keeps_the_group(self, a3_graph):
        assert automorphism_group(a3_graph, prune=True).elements == automorphism_group(a3_graph, prune=False).elements

    def test_jobs_do_not_change_the_group(self, a3_graph):
        reference = automorphism_group(a3_graph, jobs=1)
        parallel = automorphism_group(a3_graph, jobs=4)
        assert reference.elements == parallel.elements
        assert reference.table == parallel.table

    def test_rejects_partial_graph(self, a2):
        graph = explore(initial_seed(a2), ExplorationLimits(max_nodes=2))
        with pytest.raises(IncompleteGraphError):
            automorphism_group(graph)
        with pytest.raises(IncompleteGraphError):
            brute_force_automorphisms(graph)
