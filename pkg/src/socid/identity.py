"""Stage-1 machinery: identity choice, equilibria, cohesion, and diffusion.

With two identities and equal abilities, individual i prefers identity A
over B exactly when d_iA - d_iB >= c, where c scales the difference in the
identities' intrinsic values by the weight beta on same-identity neighbors
(c <= 0 means A is intrinsically weakly more attractive).  Everything here
builds on that inequality: equilibrium verification and exhaustive
enumeration, the per-individual adoption thresholds it induces, the peeling
construction of maximal cohesive ("blocking") subgroups able to sustain the
less attractive identity, and the round-based diffusion dynamics after a
shift in c.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import equal_ability_intrinsic, solve_actions, value_function
from .errors import ConvergenceError, ValidationError
from .graph import (
    IdentityAssignment,
    IdentitySet,
    Network,
    Population,
    SubgroupView,
    typed_degree,
)


def intrinsic_values(identities: IdentitySet, pop: Population) -> dict[str, float]:
    """Intrinsic value of each identity; requires equal abilities."""
    w = pop.homogeneous_w()
    return {s.label: equal_ability_intrinsic(w, pop.gamma, s.v, s.mu)
            for s in identities}


@dataclass(frozen=True)
class RelativeCost:
    """Scaled intrinsic-value difference between two identities.

    ``a_label`` plays the A role in the adoption condition
    d_iA - d_iB >= c.  With orientation "attractive" (the default) the A
    role goes to the intrinsically weakly more attractive identity, so
    c <= 0 always; with "declared" the identities keep their declared order
    and c may take either sign.
    """

    c: float
    a_label: str
    b_label: str
    intrinsic_a: float
    intrinsic_b: float


def relative_cost(identities: IdentitySet, pop: Population,
                  orient: str = "attractive") -> RelativeCost:
    if pop.beta == 0:
        raise ValidationError(
            "beta = 0: neighbor term absent; identity choice degenerates to "
            "the sign of the intrinsic-value difference")
    if orient not in ("attractive", "declared"):
        raise ValidationError(f"unknown orientation {orient!r}")
    first, second = identities.pair()
    vals = intrinsic_values(identities, pop)
    if orient == "attractive" and vals[second.label] > vals[first.label]:
        first, second = second, first
    va, vb = vals[first.label], vals[second.label]
    return RelativeCost(c=(vb - va) / pop.beta, a_label=first.label,
                        b_label=second.label, intrinsic_a=va, intrinsic_b=vb)


def best_response_identity(net: Network, assign: IdentityAssignment, i: int,
                           c: float, a: str = "A", b: str = "B") -> str:
    """Two-identity best response; ties (d_iA - d_iB = c) go to the A role."""
    da = typed_degree(net, assign, i, a)
    db = typed_degree(net, assign, i, b)
    return a if da - db >= c else b


def is_identity_equilibrium(net: Network, assign: IdentityAssignment, c: float,
                            a: str = "A", b: str = "B") -> tuple[bool, tuple[int, ...]]:
    """Check a two-identity assignment; returns (ok, violating individuals)."""
    _check_two_labels(assign, a, b)
    violators = tuple(
        i for i in range(net.n)
        if best_response_identity(net, assign, i, c, a, b) != assign.labels[i])
    return not violators, violators


def _check_two_labels(assign: IdentityAssignment, a: str, b: str) -> None:
    extra = set(assign.labels) - {a, b}
    if extra:
        raise ValidationError(f"assignment uses labels {sorted(extra)} outside ({a!r}, {b!r})")


def _neighbor_masks(net: Network) -> list[int]:
    masks = [0] * net.n
    for i, j in net.edges:
        masks[i] |= 1 << j
        masks[j] |= 1 << i
    return masks


def enumerate_equilibria(net: Network, c: float, n_limit: int = 20,
                         a: str = "A", b: str = "B") -> list[IdentityAssignment]:
    """All two-identity equilibria by exhaustive search over 2^n assignments.

    Returned sorted by the number of A-role members (then by assignment
    pattern) so output is deterministic.  Refuses networks above n_limit;
    use the cascade or blocking-set tools there instead.
    """
    if net.n > n_limit:
        raise ValidationError(
            f"n={net.n} exceeds enumeration limit {n_limit}; use the cascade "
            "or blocking-set tools for larger networks")
    masks = _neighbor_masks(net)
    degs = net.degrees
    found = []
    for amask in range(1 << net.n):
        ok = True
        for i in range(net.n):
            da = (masks[i] & amask).bit_count()
            wants_a = 2 * da - degs[i] >= c
            if wants_a != bool((amask >> i) & 1):
                ok = False
                break
        if ok:
            found.append(amask)
    found.sort(key=lambda m: (m.bit_count(), m))
    return [
        IdentityAssignment(tuple(a if (m >> i) & 1 else b for i in range(net.n)))
        for m in found
    ]


def all_low_equilibrium_exists(net: Network, c: float) -> bool:
    """Can everyone coordinate on the intrinsically less attractive identity?"""
    if c > 0:
        raise ValidationError("c must be <= 0 (A role is the weakly more attractive identity)")
    return min(net.degrees) > abs(c)


def find_blocking_set(net: Network, c: float, seed=None) -> SubgroupView:
    """Maximal subgroup whose members all keep k_i(S) > |c|, by peeling.

    Starting from the seed (default: every individual), repeatedly delete
    all members whose in-group minus out-group link count is <= |c|.  Each
    deletion lowers a remaining in-neighbor's count by exactly 2, so the
    peeling order cannot matter and the survivors are the unique maximal
    such subgroup within the seed.  An empty result means no subgroup of the
    seed can sustain the less attractive identity against everyone else.
    """
    if c > 0:
        raise ValidationError("c must be <= 0 (A role is the weakly more attractive identity)")
    members = set(range(net.n)) if seed is None else set(int(i) for i in seed)
    if any(i < 0 or i >= net.n for i in members):
        raise ValidationError("seed member out of range")
    threshold = abs(c)
    din = {i: sum(1 for j in net.neighbors[i] if j in members) for i in members}
    while True:
        peel = [i for i in members if 2 * din[i] - net.degrees[i] <= threshold]
        if not peel:
            break
        for i in peel:
            members.remove(i)
            del din[i]
            for j in net.neighbors[i]:
                if j in members:
                    din[j] -= 1
    out = tuple(sorted(members))
    return SubgroupView(out, tuple(2 * din[i] - net.degrees[i] for i in out))


@dataclass(frozen=True)
class ThresholdReport:
    """Per-individual adoption thresholds for the A role at a given c.

    t[i] = (c + d_i)/2 is the number of A-neighbors at which i adopts A;
    q[i] = t[i]/d_i is the same threshold as a fraction of neighbors (NaN
    for isolated individuals, who decide by the sign of c alone).
    t[i] <= 0 marks an unconditional adopter.
    """

    c: float
    t: np.ndarray
    q: np.ndarray
    unconditional: np.ndarray
    isolated: np.ndarray


def thresholds(net: Network, c: float) -> ThresholdReport:
    d = np.asarray(net.degrees, dtype=float)
    t = 0.5 * (c + d)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(d > 0, t / d, np.nan)
    return ThresholdReport(c=float(c), t=t, q=q,
                           unconditional=t <= 0, isolated=d == 0)


@dataclass(frozen=True)
class CascadeRound:
    """One committed update round: c level, snapshot after it, who switched."""

    c: float
    index: int
    assignment: tuple[str, ...]
    switchers: tuple[int, ...]
    scheme: str


@dataclass(frozen=True)
class CascadeTrace:
    initial: IdentityAssignment
    rounds: tuple[CascadeRound, ...]
    c_schedule: tuple[float, ...]
    mode: str
    a_label: str
    b_label: str
    converged: bool
    cycle_detected: bool
    final: IdentityAssignment = field(init=False, compare=False)

    def __post_init__(self):
        labels = self.rounds[-1].assignment if self.rounds else self.initial.labels
        object.__setattr__(self, "final", IdentityAssignment(labels))

    def a_fraction(self) -> float:
        return self.final.counts().get(self.a_label, 0) / self.final.n

    def stall_set(self) -> tuple[int, ...]:
        """Individuals still in the B role when the dynamics stop."""
        return self.final.members(self.b_label)

    def rounds_at(self, c: float) -> int:
        return sum(1 for r in self.rounds if r.c == c)


def cascade(net: Network, initial: IdentityAssignment, c_schedule,
            mode: str = "monotone", a: str = "A", b: str = "B",
            update: str = "synchronous", max_passes: int = 10_000) -> CascadeTrace:
    """Myopic identity updating through a schedule of c values.

    mode="monotone": only B-role individuals reconsider, so the A side grows
    weakly each round and every c stage terminates within n rounds; the
    schedule must be non-increasing.  mode="general": everyone best-responds,
    in both directions, and the schedule is unrestricted.

    update="synchronous" recomputes all flips against the round-start
    snapshot and commits them together; in general mode this can cycle, which
    is detected by snapshot hashing and resolved by rerunning the stage with
    update="sequential" (ascending-index, immediate commits), which always
    terminates.  Rounds with no switch are not recorded.
    """
    _check_two_labels(initial, a, b)
    if mode not in ("monotone", "general"):
        raise ValidationError(f"unknown cascade mode {mode!r}")
    if update not in ("synchronous", "sequential"):
        raise ValidationError(f"unknown update scheme {update!r}")
    schedule = tuple(float(c) for c in c_schedule)
    if not schedule:
        raise ValidationError("c schedule must be non-empty")
    if mode == "monotone" and any(c2 > c1 for c1, c2 in zip(schedule, schedule[1:])):
        raise ValidationError("monotone mode requires a non-increasing c schedule")

    masks = _neighbor_masks(net)
    degs = net.degrees
    amask = sum(1 << i for i, lab in enumerate(initial.labels) if lab == a)

    def flips_for(am: int, c: float) -> int:
        out = 0
        for i in range(net.n):
            holds_a = bool((am >> i) & 1)
            if mode == "monotone" and holds_a:
                continue
            da = (masks[i] & am).bit_count()
            wants_a = 2 * da - degs[i] >= c
            if wants_a != holds_a:
                out |= 1 << i
        return out

    def run_sequential(am: int, c: float, start_index: int) -> tuple[int, list[CascadeRound]]:
        recorded = []
        for _ in range(max_passes):
            switched = []
            for i in range(net.n):
                holds_a = bool((am >> i) & 1)
                if mode == "monotone" and holds_a:
                    continue
                da = (masks[i] & am).bit_count()
                wants_a = 2 * da - degs[i] >= c
                if wants_a != holds_a:
                    am ^= 1 << i
                    switched.append(i)
            if not switched:
                return am, recorded
            recorded.append(CascadeRound(
                c, start_index + len(recorded), _labels_of(am, net.n, a, b),
                tuple(switched), "sequential-pass"))
        raise ConvergenceError(f"sequential updating exceeded {max_passes} passes")

    rounds: list[CascadeRound] = []
    cycle_detected = False
    for c in schedule:
        if update == "sequential":
            amask, staged = run_sequential(amask, c, 0)
            rounds.extend(staged)
            continue
        stage_start = amask
        stage_rounds: list[CascadeRound] = []
        seen = {amask}
        idx = 0
        while True:
            flips = flips_for(amask, c)
            if not flips:
                break
            amask ^= flips
            stage_rounds.append(CascadeRound(
                c, idx, _labels_of(amask, net.n, a, b),
                tuple(i for i in range(net.n) if (flips >> i) & 1), "synchronous"))
            idx += 1
            if amask in seen:
                cycle_detected = True
                amask, stage_rounds = run_sequential(stage_start, c, 0)
                break
            seen.add(amask)
        rounds.extend(stage_rounds)

    return CascadeTrace(
        initial=initial, rounds=tuple(rounds), c_schedule=schedule, mode=mode,
        a_label=a, b_label=b, converged=True, cycle_detected=cycle_detected)


def _labels_of(amask: int, n: int, a: str, b: str) -> tuple[str, ...]:
    return tuple(a if (amask >> i) & 1 else b for i in range(n))


@dataclass(frozen=True)
class DiffusionReport:
    """How far the A role spreads from an all-B start at a given c.

    The three condition flags bound the outcome: nobody moves unless some
    degree is at most |c|; full diffusion is impossible while a cohesive
    subgroup with all k_i(S) > |c| exists; and once the first switch happens,
    max degree - 2 <= |c| guarantees everyone follows.
    """

    c: float
    min_degree: int
    max_degree: int
    necessary_min_degree: bool
    necessary_no_blocking_set: bool
    sufficient_max_degree: bool
    blocking_set: tuple[int, ...]
    full_diffusion: bool
    stall_set: tuple[int, ...]
    consistent: bool


def full_diffusion_conditions(net: Network, c_prime: float,
                              a: str = "A", b: str = "B") -> DiffusionReport:
    """Evaluate the three diffusion conditions and cross-check with a cascade."""
    if c_prime > 0:
        raise ValidationError("c must be <= 0 (A role is the weakly more attractive identity)")
    mind, maxd = min(net.degrees), max(net.degrees)
    blocking = find_blocking_set(net, c_prime)
    trace = cascade(net, IdentityAssignment((b,) * net.n), [c_prime],
                    mode="monotone", a=a, b=b)
    stall = trace.stall_set()
    full = not stall
    any_flip = bool(trace.rounds)
    nec_min = mind <= abs(c_prime)
    nec_block = not blocking.members
    suf_max = maxd - 2 <= abs(c_prime)
    consistent = (
        full == nec_block
        and any_flip == nec_min
        and stall == blocking.members
        # the joint sufficient condition forces full diffusion only when the
        # switch can actually reach everyone
        and (not net.connected or full or not (suf_max and nec_min))
    )
    return DiffusionReport(
        c=float(c_prime), min_degree=mind, max_degree=maxd,
        necessary_min_degree=nec_min, necessary_no_blocking_set=nec_block,
        sufficient_max_degree=suf_max, blocking_set=blocking.members,
        full_diffusion=full, stall_set=stall, consistent=consistent)


def best_response_identity_general(net: Network, assign: IdentityAssignment,
                                   identities: IdentitySet, pop: Population,
                                   i: int, mode: str = "fixed",
                                   profile=None) -> str:
    """Best identity for i by value comparison; works for any identity count.

    Ties go to the higher intrinsic value when abilities are equal, then to
    declared label order.
    """
    if profile is None and mode == "fixed":
        profile = solve_actions(net, assign, identities, pop)
    vals = {
        s.label: value_function(net, assign, identities, pop, i, s.label,
                                mode=mode, profile=profile)
        for s in identities
    }
    best = max(vals.values())
    tied = [lab for lab in identities.labels if vals[lab] == best]
    if len(tied) > 1 and pop.is_homogeneous:
        intr = intrinsic_values(identities, pop)
        top = max(intr[lab] for lab in tied)
        tied = [lab for lab in tied if intr[lab] == top]
    return tied[0]


def is_identity_equilibrium_general(net: Network, assign: IdentityAssignment,
                                    identities: IdentitySet, pop: Population,
                                    mode: str = "fixed") -> tuple[bool, tuple[int, ...]]:
    """Equilibrium check via value comparison, any number of identities."""
    profile = solve_actions(net, assign, identities, pop) if mode == "fixed" else None
    violators = tuple(
        i for i in range(net.n)
        if best_response_identity_general(net, assign, identities, pop, i,
                                          mode=mode, profile=profile) != assign.labels[i])
    return not violators, violators
