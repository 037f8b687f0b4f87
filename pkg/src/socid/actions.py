"""Stage-2 equilibrium: action choice under conformity pressure.

Given identities fixed, each individual maximizes

    mu_I + beta*d_iI + x - x^2/(2 w_i) - (alpha/2)(x - xbar_iI)^2
        - (gamma/2)(x - v_I)^2

where xbar_iI is the average action of same-identity neighbors.  The best
response is x = b_i (1 + gamma v_I + alpha xbar_iI) with
b_i = 1/(gamma + alpha + 1/w_i), so each identity's equilibrium profile is
the unique solution of a linear system whose matrix I - alpha*Gtilde is
invertible because alpha*b_i < 1 for every i.

An individual with no same-identity neighbors has no one to conform to; the
neighbor-average term is defined to vanish and their best response drops the
alpha term entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError
from .graph import (
    IdentityAssignment,
    IdentitySet,
    Network,
    Population,
    same_identity_row_matrix,
    typed_degree,
)

DIRECT_RESIDUAL_TOL = 1e-10
ITERATIVE_TOL = 1e-12
ITERATIVE_MAX_ITERS = 10**6


@dataclass(frozen=True, eq=False)
class ConformityWeights:
    """Per-individual responsiveness b_i = 1/(gamma + alpha + 1/w_i)."""

    b: np.ndarray

    @classmethod
    def from_population(cls, pop: Population) -> "ConformityWeights":
        w = pop.w_array
        b = 1.0 / (pop.gamma + pop.alpha + 1.0 / w)
        assert np.all(b > 0) and np.all(b <= w + 1e-15)
        # alpha*b < 1 holds for any w > 0, gamma >= 0; it is what makes the
        # conformity system a contraction.
        assert np.all(pop.alpha * b < 1.0)
        return cls(b)


@dataclass(frozen=True, eq=False)
class ActionProfile:
    """Equilibrium actions with neighbor averages and realized utilities."""

    x: np.ndarray
    xbar: np.ndarray
    utilities: np.ndarray
    iterations: int | None = None

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def total_action(self) -> float:
        return float(self.x.sum())

    def total_utility(self) -> float:
        return float(self.utilities.sum())


def _check_inputs(net: Network, assign: IdentityAssignment,
                  identities: IdentitySet, pop: Population) -> None:
    assign.validate(net, identities)
    if pop.n != net.n:
        raise ValidationError(f"population size {pop.n} != network size {net.n}")


def _identity_groups(net, assign, identities):
    """Per identity: (members, ghat, isolated mask); skips empty identities."""
    groups = []
    for spec in identities:
        members, ghat = same_identity_row_matrix(net, assign, spec.label)
        if not members:
            continue
        isolated = ghat.sum(axis=1) == 0
        groups.append((spec, members, ghat, isolated))
    return groups


def solve_actions(net: Network, assign: IdentityAssignment,
                  identities: IdentitySet, pop: Population) -> ActionProfile:
    """Unique equilibrium action profile, one dense linear solve per identity.

    Members isolated within their identity get the closed form
    (1 + gamma v)/(gamma + 1/w_i).
    """
    _check_inputs(net, assign, identities, pop)
    weights = ConformityWeights.from_population(pop)
    w = pop.w_array
    alpha, gamma = pop.alpha, pop.gamma

    x = np.zeros(net.n)
    for spec, members, ghat, isolated in _identity_groups(net, assign, identities):
        idx = np.array(members)
        b = weights.b[idx]
        rhs_weight = np.where(isolated, 1.0 / (gamma + 1.0 / w[idx]), b)
        gtilde = b[:, None] * ghat
        m = np.eye(len(members)) - alpha * gtilde
        xs = np.linalg.solve(m, (1.0 + gamma * spec.v) * rhs_weight)

        resid = xs - (1.0 + gamma * spec.v) * rhs_weight - alpha * (gtilde @ xs)
        assert np.max(np.abs(resid)) <= DIRECT_RESIDUAL_TOL
        assert np.all(xs >= 0)
        x[idx] = xs

    return profile_from_actions(net, assign, identities, pop, x)


def solve_actions_iterative(net: Network, assign: IdentityAssignment,
                            identities: IdentitySet, pop: Population,
                            x0=None, tol: float = ITERATIVE_TOL,
                            max_iters: int = ITERATIVE_MAX_ITERS) -> ActionProfile:
    """Fixed-point iteration of the best-response map from any start.

    The map x -> b*(1 + gamma v + alpha ghat x) is a sup-norm contraction
    with factor alpha*max(b) < 1, so the iteration reaches the same profile
    as the direct solve.  Raises ConvergenceError with the last residual if
    max_iters is exhausted.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    _check_inputs(net, assign, identities, pop)
    weights = ConformityWeights.from_population(pop)
    w = pop.w_array
    alpha, gamma = pop.alpha, pop.gamma

    x = np.zeros(net.n) if x0 is None else np.asarray(x0, dtype=float).copy()
    if x.shape != (net.n,):
        raise ValidationError("x0 must have one entry per individual")

    groups = _identity_groups(net, assign, identities)
    prepared = []
    for spec, members, ghat, isolated in groups:
        idx = np.array(members)
        b = weights.b[idx]
        const = np.where(
            isolated,
            (1.0 + gamma * spec.v) / (gamma + 1.0 / w[idx]),
            b * (1.0 + gamma * spec.v),
        )
        coef = np.where(isolated, 0.0, alpha * b)
        prepared.append((idx, ghat, const, coef))

    for it in range(1, max_iters + 1):
        delta = 0.0
        for idx, ghat, const, coef in prepared:
            xs = const + coef * (ghat @ x[idx])
            delta = max(delta, float(np.max(np.abs(xs - x[idx]))))
            x[idx] = xs
        if delta <= tol:
            prof = profile_from_actions(net, assign, identities, pop, x)
            return ActionProfile(prof.x, prof.xbar, prof.utilities, iterations=it)
    raise ConvergenceError(
        f"best-response iteration did not converge in {max_iters} steps "
        f"(last step moved {delta:.3e}, tol {tol:.3e})")


def profile_from_actions(net: Network, assign: IdentityAssignment,
                         identities: IdentitySet, pop: Population,
                         x) -> ActionProfile:
    """Assemble neighbor averages and utilities for an arbitrary action vector."""
    x = np.asarray(x, dtype=float)
    xbar = x.copy()  # isolated members default to their own action
    for spec, members, ghat, isolated in _identity_groups(net, assign, identities):
        idx = np.array(members)
        avg = ghat @ x[idx]
        xbar[idx[~isolated]] = avg[~isolated]
    utils = np.array([
        _utility_terms(net, assign, identities, pop, i, x[i], xbar[i])
        for i in range(net.n)
    ])
    return ActionProfile(x, xbar, utils)


def _utility_terms(net, assign, identities, pop, i, xi, xbari) -> float:
    spec = identities[assign.labels[i]]
    d_same = typed_degree(net, assign, i, spec.label)
    u = spec.mu + pop.beta * d_same + xi - xi**2 / (2.0 * pop.w[i])
    if d_same > 0:
        u -= 0.5 * pop.alpha * (xi - xbari) ** 2
    u -= 0.5 * pop.gamma * (xi - spec.v) ** 2
    return float(u)


def utility(net: Network, assign: IdentityAssignment, identities: IdentitySet,
            pop: Population, profile: ActionProfile, i: int) -> float:
    """Utility of individual i at a stored profile."""
    return _utility_terms(net, assign, identities, pop, i,
                          profile.x[i], profile.xbar[i])


def utility_at(net: Network, assign: IdentityAssignment, identities: IdentitySet,
               pop: Population, x, i: int) -> float:
    """Utility of i at a raw action vector (neighbor averages recomputed)."""
    return profile_from_actions(net, assign, identities, pop, x).utilities[i]


def value_function(net: Network, assign: IdentityAssignment,
                   identities: IdentitySet, pop: Population,
                   i: int, label: str, mode: str = "fixed",
                   profile: ActionProfile | None = None) -> float:
    """Value of identity ``label`` to individual i.

    mode="fixed" (default): everyone else keeps their current identity and
    equilibrium action; i picks the label, best-responds in action against
    the fixed actions of its would-be same-identity neighbors, and the
    resulting utility is returned.

    mode="resolve": the whole stage-2 game is re-solved under the deviated
    assignment before reading off i's utility.
    """
    if mode == "resolve":
        deviated = assign.with_identity(i, label)
        return float(solve_actions(net, deviated, identities, pop).utilities[i])
    if mode != "fixed":
        raise ValidationError(f"unknown value mode {mode!r}")

    if profile is None:
        profile = solve_actions(net, assign, identities, pop)
    spec = identities[label]
    nbrs = [j for j in net.neighbors[i] if assign.labels[j] == label and j != i]
    d_same = len(nbrs)
    gamma, alpha = pop.gamma, pop.alpha
    if d_same > 0:
        xbari = float(np.mean(profile.x[nbrs]))
        b_i = 1.0 / (gamma + alpha + 1.0 / pop.w[i])
        xi = b_i * (1.0 + gamma * spec.v + alpha * xbari)
        conform = 0.5 * alpha * (xi - xbari) ** 2
    else:
        xi = (1.0 + gamma * spec.v) / (gamma + 1.0 / pop.w[i])
        conform = 0.0
    return float(spec.mu + pop.beta * d_same + xi - xi**2 / (2.0 * pop.w[i])
                 - conform - 0.5 * gamma * (xi - spec.v) ** 2)


@dataclass(frozen=True, eq=False)
class ValueTable:
    """V[i, k]: value of identity labels[k] to individual i."""

    labels: tuple[str, ...]
    V: np.ndarray

    def value(self, i: int, label: str) -> float:
        return float(self.V[i, self.labels.index(label)])


def value_table(net: Network, assign: IdentityAssignment,
                identities: IdentitySet, pop: Population,
                mode: str = "fixed") -> ValueTable:
    """All (individual, identity) values under one base equilibrium."""
    profile = solve_actions(net, assign, identities, pop) if mode == "fixed" else None
    labels = identities.labels
    V = np.empty((net.n, len(labels)))
    for k, label in enumerate(labels):
        for i in range(net.n):
            V[i, k] = value_function(net, assign, identities, pop, i, label,
                                     mode=mode, profile=profile)
    return ValueTable(labels, V)


def equal_ability_action(w: float, gamma: float, v: float) -> float:
    """Closed-form common action when all abilities equal w."""
    return (1.0 + gamma * v) / (gamma + 1.0 / w)


def equal_ability_value(w: float, gamma: float, v: float, mu: float,
                        beta: float, d_same: int) -> float:
    """Closed-form value of an identity when all abilities equal w."""
    return mu + beta * d_same + equal_ability_intrinsic(w, gamma, v)


def equal_ability_intrinsic(w: float, gamma: float, v: float, mu: float = 0.0) -> float:
    """Identity value net of the same-identity neighbor term, equal abilities."""
    return mu + (1.0 + gamma * v * (2.0 - v / w)) / (2.0 * (gamma + 1.0 / w))
