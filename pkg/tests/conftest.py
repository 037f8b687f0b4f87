import numpy as np
import pytest

from socid import (
    IdentityAssignment,
    IdentitySet,
    IdentitySpec,
    Network,
    Population,
)


def two_identities(mu_a=1.0, mu_b=0.5, v_a=1.5, v_b=0.5, labels=("A", "B")):
    return IdentitySet((IdentitySpec(labels[0], mu_a, v_a),
                        IdentitySpec(labels[1], mu_b, v_b)))


def homogeneous_pop(n, w=1.0, alpha=1.0, beta=1.0, gamma=1.0):
    return Population((w,) * n, alpha, beta, gamma)


def all_assignment(n, label):
    return IdentityAssignment((label,) * n)


def random_connected_net(rng, n, extra=0.3):
    """Random tree plus extra edges; connected by construction."""
    edges = {(int(rng.integers(0, i)), i) for i in range(1, n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < extra:
                edges.add((i, j))
    return Network(n, sorted(edges))


def random_assignment(rng, n, labels=("A", "B")):
    return IdentityAssignment(tuple(labels[int(k)] for k in rng.integers(0, 2, n)))


@pytest.fixture
def path3():
    return Network(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    return Network(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k4():
    return Network(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])


@pytest.fixture
def star5():
    # center 0 plus 4 leaves
    return Network(5, [(0, i) for i in range(1, 5)])


@pytest.fixture
def two_cliques():
    from socid import ScenarioConfig, generate
    net, assign = generate(ScenarioConfig(kind="two-cliques-bridge", clique_size=5))
    return net, assign
