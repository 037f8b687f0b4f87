import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socid import (
    IdentityAssignment,
    IdentitySet,
    IdentitySpec,
    Network,
    Population,
    ValidationError,
    identity_components,
    link_difference,
    same_identity_row_matrix,
    typed_degree,
)

from conftest import random_assignment, random_connected_net


def bridged_cliques():
    from socid import ScenarioConfig, generate
    return generate(ScenarioConfig(kind="two-cliques-bridge", clique_size=5))


class TestNetwork:
    def test_degree_triangle(self, triangle):
        assert all(triangle.degree(i) == 2 for i in range(3))

    def test_degree_path(self, path3):
        assert path3.degree(1) == 2
        assert path3.degree(0) == path3.degree(2) == 1

    def test_degree_bridge_node(self):
        net, _ = bridged_cliques()
        # bridge endpoints carry their 4 clique links plus the bridge
        assert net.degree(4) == 5
        assert net.degree(5) == 5
        assert net.degree(0) == 4

    def test_degree_out_of_range(self, path3):
        with pytest.raises(IndexError):
            path3.degree(3)

    def test_rejects_self_loop(self):
        with pytest.raises(ValidationError, match="self-loop"):
            Network(3, [(0, 1), (1, 2), (2, 2)])

    def test_rejects_disconnected(self):
        with pytest.raises(ValidationError, match="not connected"):
            Network(4, [(0, 1), (2, 3)])

    def test_disconnected_allowed_when_relaxed(self):
        net = Network(4, [(0, 1), (2, 3)], require_connected=False)
        assert not net.connected

    def test_rejects_out_of_range_edge(self):
        with pytest.raises(ValidationError, match="out of range"):
            Network(2, [(0, 5)])

    def test_needs_two_individuals(self):
        with pytest.raises(ValidationError):
            Network(1, [])

    def test_deduplicates_and_orients_edges(self):
        net = Network(3, [(1, 0), (0, 1), (1, 2)])
        assert net.edges == ((0, 1), (1, 2))

    def test_from_adjacency_rejects_asymmetry(self):
        with pytest.raises(ValidationError, match="not symmetric"):
            Network.from_adjacency([[0, 1, 0], [0, 0, 1], [0, 1, 0]])

    def test_from_adjacency_rejects_diagonal(self):
        with pytest.raises(ValidationError, match="self-loop"):
            Network.from_adjacency([[1, 1], [1, 0]])

    def test_from_adjacency_round_trip(self, k4):
        assert Network.from_adjacency(k4.adjacency()) == k4


class TestIdentitySet:
    def test_needs_two(self):
        with pytest.raises(ValidationError):
            IdentitySet((IdentitySpec("A", 1.0, 1.0),))

    def test_unique_labels(self):
        with pytest.raises(ValidationError, match="unique"):
            IdentitySet((IdentitySpec("A", 1.0, 1.0), IdentitySpec("A", 0.5, 0.5)))

    def test_negative_prescription_rejected(self):
        with pytest.raises(ValidationError):
            IdentitySpec("A", 1.0, -0.1)

    def test_monotone_pairing_warns_not_raises(self):
        with pytest.warns(UserWarning, match="not positively paired"):
            IdentitySet((IdentitySpec("A", 0.1, 2.0), IdentitySpec("B", 0.9, 1.0)))

    def test_consistent_pairing_is_silent(self, recwarn):
        IdentitySet((IdentitySpec("A", 1.0, 1.5), IdentitySpec("B", 0.5, 0.5)))
        assert not recwarn.list

    def test_lookup(self):
        ids = IdentitySet((IdentitySpec("A", 1.0, 1.5), IdentitySpec("B", 0.5, 0.5)))
        assert ids["B"].mu == 0.5
        with pytest.raises(KeyError):
            ids["C"]


class TestPopulation:
    def test_rejects_nonpositive_ability(self):
        with pytest.raises(ValidationError, match="positive"):
            Population((1.0, 0.0), 1.0, 1.0, 1.0)

    def test_rejects_negative_weight(self):
        with pytest.raises(ValidationError, match="beta"):
            Population((1.0,), 1.0, -0.5, 1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            Population((1.0, float("nan")), 1.0, 1.0, 1.0)

    def test_homogeneous_detection(self):
        assert Population((2.0, 2.0), 0, 0, 0).is_homogeneous
        het = Population((1.0, 2.0), 0, 0, 0)
        assert not het.is_homogeneous
        with pytest.raises(ValidationError):
            het.homogeneous_w()


class TestAssignment:
    def test_counts_and_members(self):
        assign = IdentityAssignment(("A", "B", "A"))
        assert assign.counts() == {"A": 2, "B": 1}
        assert assign.members("A") == (0, 2)

    def test_with_identity_is_functional(self):
        assign = IdentityAssignment(("A", "B"))
        other = assign.with_identity(0, "B")
        assert assign.labels == ("A", "B")
        assert other.labels == ("B", "B")

    def test_validate_against_identity_set(self, path3):
        ids = IdentitySet((IdentitySpec("A", 1, 1), IdentitySpec("B", 0.5, 0.5)))
        with pytest.raises(ValidationError, match="unknown identity"):
            IdentityAssignment(("A", "B", "C")).validate(path3, ids)
        with pytest.raises(ValidationError, match="covers"):
            IdentityAssignment(("A", "B")).validate(path3, ids)


class TestTypedDegree:
    def test_path_counts(self, path3):
        assign = IdentityAssignment(("A", "B", "A"))
        assert typed_degree(path3, assign, 1, "A") == 2
        assert typed_degree(path3, assign, 1, "B") == 0

    def test_bridge_node_counts_one_cross(self):
        net, assign = bridged_cliques()
        assert typed_degree(net, assign, 4, "B") == 1
        assert typed_degree(net, assign, 4, "A") == 4

    def test_independent_of_own_identity(self, path3):
        assign = IdentityAssignment(("A", "B", "A"))
        flipped = assign.with_identity(1, "A")
        assert typed_degree(path3, assign, 1, "A") == typed_degree(path3, flipped, 1, "A")


class TestRowMatrix:
    def test_pair(self):
        net = Network(2, [(0, 1)])
        _, ghat = same_identity_row_matrix(net, IdentityAssignment(("I", "I")), "I")
        assert np.array_equal(ghat, [[0, 1], [1, 0]])

    def test_triangle_half(self, triangle):
        _, ghat = same_identity_row_matrix(
            triangle, IdentityAssignment(("I",) * 3), "I")
        assert np.allclose(ghat, 0.5 * (np.ones((3, 3)) - np.eye(3)))

    def test_isolated_member_zero_row(self, path3):
        assign = IdentityAssignment(("J", "I", "J"))
        members, ghat = same_identity_row_matrix(path3, assign, "I")
        assert members == (1,)
        assert np.array_equal(ghat, [[0.0]])


class TestLinkDifference:
    def test_triangle_with_pendant(self):
        net = Network(4, [(0, 1), (1, 2), (0, 2), (0, 3)])
        view = link_difference(net, [0, 1, 2])
        assert view.as_dict() == {0: 1, 1: 2, 2: 2}

    def test_bridged_clique(self):
        net, _ = bridged_cliques()
        view = link_difference(net, range(5))
        assert view.as_dict() == {0: 4, 1: 4, 2: 4, 3: 4, 4: 3}

    def test_whole_network_gives_degrees(self, k4):
        view = link_difference(k4, range(4))
        assert view.k == k4.degrees

    def test_empty_rejected(self, k4):
        with pytest.raises(ValidationError):
            link_difference(k4, [])

    def test_out_of_range_rejected(self, k4):
        with pytest.raises(ValidationError):
            link_difference(k4, [0, 9])


@given(st.integers(2, 12), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_typed_degrees_partition_by_identity(n, seed):
    rng = np.random.default_rng(seed)
    net = random_connected_net(rng, n)
    assign = random_assignment(rng, n)
    for i in range(n):
        parts = sum(typed_degree(net, assign, i, lab) for lab in ("A", "B"))
        assert parts == net.degree(i)


@given(st.integers(2, 12), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_row_matrix_rows_sum_to_one_or_zero(n, seed):
    rng = np.random.default_rng(seed)
    net = random_connected_net(rng, n)
    assign = random_assignment(rng, n)
    for lab in ("A", "B"):
        _, ghat = same_identity_row_matrix(net, assign, lab)
        assert np.all(ghat >= 0)
        sums = ghat.sum(axis=1)
        assert np.all((np.abs(sums - 1) < 1e-12) | (sums == 0))


@given(st.integers(3, 12), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_removing_member_drops_neighbor_k_by_two(n, seed):
    rng = np.random.default_rng(seed)
    net = random_connected_net(rng, n)
    members = sorted(rng.choice(n, size=rng.integers(2, n + 1), replace=False).tolist())
    before = link_difference(net, members).as_dict()
    removed = members[int(rng.integers(0, len(members)))]
    rest = [i for i in members if i != removed]
    if not rest:
        return
    after = link_difference(net, rest).as_dict()
    for i in rest:
        expected = before[i] - 2 if net.has_edge(i, removed) else before[i]
        assert after[i] == expected


def test_identity_components_split(path3):
    assign = IdentityAssignment(("A", "B", "A"))
    assert identity_components(path3, assign, "A") == [(0,), (2,)]
    assert identity_components(path3, assign, "B") == [(1,)]
