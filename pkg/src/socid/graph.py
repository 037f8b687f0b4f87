"""Graph and population model.

Undirected simple networks over individuals 0..n-1, identity labels with
status and prescribed action, preference parameters, and the derived
structures the solvers consume: identity-conditioned degrees, row-normalized
same-identity interaction matrices, and in-group/out-group link differences.

All structures are immutable after construction and safe to share across
workers.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import InitVar, dataclass, field

import numpy as np

from .errors import ValidationError


def _normalize_edges(n: int, edges) -> tuple[tuple[int, int], ...]:
    """Canonicalize an edge list: (min, max) pairs, deduplicated, sorted."""
    seen = set()
    for e in edges:
        i, j = e
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"edge ({i},{j}) out of range for n={n}")
        if i == j:
            raise ValidationError(f"self-loop at node {i}")
        seen.add((i, j) if i < j else (j, i))
    return tuple(sorted(seen))


@dataclass(frozen=True)
class Network:
    """Undirected simple graph on n individuals.

    Edges are stored canonically as sorted (i, j) pairs with i < j; (i, j)
    and (j, i) in the input denote the same edge and duplicates are merged.
    The whole graph is required to be connected unless ``require_connected``
    is disabled (used for deliberately segregated scenario instances).
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    require_connected: InitVar[bool] = True
    neighbors: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    degrees: tuple[int, ...] = field(init=False, repr=False, compare=False)
    connected: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self, require_connected: bool):
        if self.n < 2:
            raise ValidationError("network needs at least 2 individuals")
        object.__setattr__(self, "edges", _normalize_edges(self.n, self.edges))
        nbrs = [set() for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        object.__setattr__(self, "neighbors", tuple(frozenset(s) for s in nbrs))
        object.__setattr__(self, "degrees", tuple(len(s) for s in nbrs))
        object.__setattr__(self, "connected", self._check_connected())
        if require_connected and not self.connected:
            raise ValidationError("network is not connected")

    def _check_connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in self.neighbors[i]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return len(seen) == self.n

    @classmethod
    def from_adjacency(cls, matrix, require_connected: bool = True) -> "Network":
        """Build from a 0/1 adjacency matrix; rejects asymmetry and self-loops."""
        a = np.asarray(matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError("adjacency matrix must be square")
        if np.any(a != a.T):
            raise ValidationError("adjacency matrix is not symmetric")
        if np.any(np.diag(a) != 0):
            raise ValidationError("adjacency matrix has self-loops")
        ii, jj = np.nonzero(np.triu(a, 1))
        return cls(a.shape[0], tuple(zip(ii.tolist(), jj.tolist())),
                   require_connected=require_connected)

    def degree(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"individual {i} out of range")
        return self.degrees[i]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.neighbors[i]

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=int)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a


@dataclass(frozen=True)
class IdentitySpec:
    """One social identity: a label, its status, and its prescribed action."""

    label: str
    mu: float
    v: float

    def __post_init__(self):
        if not np.isfinite(self.mu) or not np.isfinite(self.v):
            raise ValidationError(f"identity {self.label!r}: mu and v must be finite")
        if self.v < 0:
            raise ValidationError(f"identity {self.label!r}: prescribed action must be >= 0")


@dataclass(frozen=True)
class IdentitySet:
    """Ordered collection of at least two identities with unique labels.

    Warns (does not reject) when statuses and prescribed actions are not
    positively paired, since the solvers do not rely on that pairing.
    """

    specs: tuple[IdentitySpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        if len(self.specs) < 2:
            raise ValidationError("need at least 2 identities")
        labels = [s.label for s in self.specs]
        if len(set(labels)) != len(labels):
            raise ValidationError("identity labels must be unique")
        for a in self.specs:
            for b in self.specs:
                if a.label >= b.label:
                    continue
                if a.v >= b.v and a.mu < b.mu or b.v >= a.v and b.mu < a.mu:
                    warnings.warn(
                        f"identities {a.label!r}/{b.label!r}: status and "
                        "prescribed action are not positively paired")
                elif a.v == b.v and a.mu == b.mu:
                    warnings.warn(
                        f"identities {a.label!r} and {b.label!r} are indistinguishable")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.specs)

    def __len__(self) -> int:
        return len(self.specs)

    def __iter__(self):
        return iter(self.specs)

    def __getitem__(self, label: str) -> IdentitySpec:
        for s in self.specs:
            if s.label == label:
                return s
        raise KeyError(f"unknown identity label {label!r}")

    def pair(self) -> tuple[IdentitySpec, IdentitySpec]:
        """The two identities, in declared order; only valid when len == 2."""
        if len(self.specs) != 2:
            raise ValidationError("pair() requires exactly 2 identities")
        return self.specs[0], self.specs[1]


@dataclass(frozen=True)
class Population:
    """Abilities w_i > 0 and the preference weights alpha, beta, gamma >= 0."""

    w: tuple[float, ...]
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        w = tuple(float(x) for x in self.w)
        object.__setattr__(self, "w", w)
        arr = np.asarray(w)
        if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValidationError("abilities must be finite and positive")
        for name in ("alpha", "beta", "gamma"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0:
                raise ValidationError(f"{name} must be finite and >= 0")

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def w_array(self) -> np.ndarray:
        return np.asarray(self.w)

    @property
    def is_homogeneous(self) -> bool:
        return max(self.w) - min(self.w) <= 1e-12 * max(self.w)

    def homogeneous_w(self) -> float:
        if not self.is_homogeneous:
            raise ValidationError("population abilities are heterogeneous")
        return self.w[0]


@dataclass(frozen=True)
class IdentityAssignment:
    """Stage-1 profile: the identity label chosen by each individual."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if not self.labels:
            raise ValidationError("assignment must cover at least one individual")

    @property
    def n(self) -> int:
        return len(self.labels)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for lab in self.labels:
            out[lab] = out.get(lab, 0) + 1
        return out

    def members(self, label: str) -> tuple[int, ...]:
        return tuple(i for i, lab in enumerate(self.labels) if lab == label)

    def with_identity(self, i: int, label: str) -> "IdentityAssignment":
        labs = list(self.labels)
        labs[i] = label
        return IdentityAssignment(tuple(labs))

    def validate(self, net: Network, identities: IdentitySet) -> None:
        if self.n != net.n:
            raise ValidationError(
                f"assignment covers {self.n} individuals, network has {net.n}")
        known = set(identities.labels)
        for i, lab in enumerate(self.labels):
            if lab not in known:
                raise ValidationError(f"individual {i} has unknown identity {lab!r}")


@dataclass(frozen=True)
class SubgroupView:
    """A subset S with each member's in-group minus out-group link count."""

    members: tuple[int, ...]
    k: tuple[int, ...]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.members, self.k))


def typed_degree(net: Network, assign: IdentityAssignment, i: int, label: str) -> int:
    """Number of i's neighbors holding ``label``; independent of i's own identity."""
    if not 0 <= i < net.n:
        raise IndexError(f"individual {i} out of range")
    if label not in set(assign.labels):
        # Counting a label nobody holds is legal as long as it is a known
        # identity; the caller owns that check.  Zero neighbors of it anyway.
        pass
    return sum(1 for j in net.neighbors[i] if assign.labels[j] == label)


def typed_degrees(net: Network, assign: IdentityAssignment, label: str) -> np.ndarray:
    """Vector of d_{i,label} over all individuals."""
    return np.array([typed_degree(net, assign, i, label) for i in range(net.n)])


def same_identity_row_matrix(
    net: Network, assign: IdentityAssignment, label: str
) -> tuple[tuple[int, ...], np.ndarray]:
    """Row-normalized interaction matrix among the members of one identity.

    Returns (members, ghat) where members lists the identity's individuals in
    ascending index order and ghat[r, s] = 1/d_{i,label} when members r and s
    are linked.  A member with no same-identity neighbors gets an all-zero
    row; its conformity-to-neighbors term is defined to vanish.
    """
    members = assign.members(label)
    idx = {i: r for r, i in enumerate(members)}
    ghat = np.zeros((len(members), len(members)))
    for r, i in enumerate(members):
        d = typed_degree(net, assign, i, label)
        if d == 0:
            continue
        for j in net.neighbors[i]:
            if assign.labels[j] == label:
                ghat[r, idx[j]] = 1.0 / d
    return members, ghat


def link_difference(net: Network, members) -> SubgroupView:
    """Per-member k_i(S): links into S minus links out of S."""
    s = sorted(set(int(i) for i in members))
    if not s:
        raise ValidationError("subgroup must be non-empty")
    if s[0] < 0 or s[-1] >= net.n:
        raise ValidationError("subgroup member out of range")
    inset = frozenset(s)
    ks = []
    for i in s:
        din = sum(1 for j in net.neighbors[i] if j in inset)
        ks.append(2 * din - net.degrees[i])
    return SubgroupView(tuple(s), tuple(ks))


def identity_components(
    net: Network, assign: IdentityAssignment, label: str
) -> list[tuple[int, ...]]:
    """Connected components of the same-identity subgraph of one identity."""
    members = set(assign.members(label))
    comps: list[tuple[int, ...]] = []
    left = set(members)
    while left:
        start = min(left)
        comp = {start}
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in net.neighbors[i]:
                if j in members and j not in comp:
                    comp.add(j)
                    queue.append(j)
        comps.append(tuple(sorted(comp)))
        left -= comp
    return comps
