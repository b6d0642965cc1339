"""Expansion, unique-neighbor and confinement audits.

Certifies or refutes (delta, gamma) expansion on concrete instances:
exhaustively over all small subsets, over neighbor-connected subsets only
(sufficient, since any set decomposes into neighbor-connected pieces whose
neighborhoods are disjoint), or by sampled cluster growth.  Ratio
comparisons use exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .gf2 import BitMatrix, matvec, pack_vector
from .tanner import TannerGraph

DEFAULT_CAP = 5_000_000


@dataclass
class ExpansionReport:
    delta_tested: int
    gamma_target: Fraction
    mode: str
    certified: bool
    worst_set: tuple = ()
    worst_ratio: Fraction | None = None
    n_sets_checked: int = 0
    distance_violations: list = field(default_factory=list)
    kind: str = "left"

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "delta_tested": self.delta_tested,
            "gamma_target": [self.gamma_target.numerator,
                             self.gamma_target.denominator],
            "mode": self.mode,
            "certified": self.certified,
            "worst_set": list(self.worst_set),
            "worst_ratio": None if self.worst_ratio is None else
                [self.worst_ratio.numerator, self.worst_ratio.denominator],
            "n_sets_checked": self.n_sets_checked,
            "distance_violations": [list(v) for v in self.distance_violations],
        }


def _as_fraction(gamma) -> Fraction:
    if isinstance(gamma, Fraction):
        return gamma
    if isinstance(gamma, (tuple, list)):
        return Fraction(int(gamma[0]), int(gamma[1]))
    return Fraction(gamma).limit_denominator(10**9)


def _subset_cap_ok(n: int, delta: int, cap: int) -> bool:
    total = 0
    for s in range(1, delta + 1):
        total += math.comb(n, s)
        if total > cap:
            return False
    return True


def _exhaustive_sets(n: int, delta: int):
    for s in range(1, delta + 1):
        yield from combinations(range(n), s)


# -- neighbor-connected set enumeration ---------------------------------------


def _bit_cograph(G: TannerGraph, side: str):
    """Adjacency, under the 'share a check' relation, of one side."""
    n = G.n_bits if side == "left" else G.n_checks
    adj = [set() for _ in range(n)]
    if side == "left":
        for c in range(G.n_checks):
            members = set(int(b) for b in G.check_neighbors(c))
            for b in members:
                adj[b].update(members - {b})
    else:
        for b in range(G.n_bits):
            members = set(int(c) for c in G.bit_neighbors(b))
            for c in members:
                adj[c].update(members - {c})
    return adj


def enumerate_connected_sets(G: TannerGraph, s_max: int, side: str = "left",
                             cap: int = DEFAULT_CAP):
    """All neighbor-connected subsets of size <= s_max, each emitted once.

    Canonical-parent scheme: a set is grown only from its minimum vertex,
    and each vertex may only be added by the frontier that first exposed
    it, which makes the generation tree a spanning tree of the set family.
    """
    adj = _bit_cograph(G, side)
    n = len(adj)
    emitted = 0

    def extend(current, frontier, forbidden):
        nonlocal emitted
        emitted += 1
        if emitted > cap:
            raise ValueError(f"more than {cap} connected sets; reduce s_max")
        yield tuple(sorted(current))
        if len(current) == s_max:
            return
        frontier = list(frontier)
        blocked = set(forbidden)
        for idx, v in enumerate(frontier):
            new_forbidden = blocked | set(frontier[:idx])
            new_frontier = [u for u in sorted(adj[v])
                            if u not in current and u not in new_forbidden
                            and u not in frontier]
            yield from extend(current | {v},
                              frontier[idx + 1:] + new_frontier,
                              new_forbidden)
            blocked.add(v)

    for root in range(n):
        start_frontier = [u for u in sorted(adj[root]) if u > root]
        forbidden = {u for u in range(root + 1)}
        yield from extend({root}, start_frontier, forbidden)


# -- core audits ---------------------------------------------------------------


def _neighbor_count(G: TannerGraph, S, side: str) -> int:
    if side == "left":
        return len(G.neighbor_set(S))
    return len(G.check_neighbor_set(S))


def _unique_neighbor_count(G: TannerGraph, S, side: str) -> int:
    if side == "left":
        return len(G.unique_neighbor_set(S))
    return len(G.check_unique_neighbor_set(S))


def _audit_sets(G, sets, gamma: Fraction, counter, delta, mode, side) -> ExpansionReport:
    worst_ratio = None
    worst_set = ()
    checked = 0
    certified = True
    for S in sets:
        checked += 1
        size = len(S)
        count = counter(G, S, side)
        ratio = Fraction(count, size)
        if worst_ratio is None or ratio < worst_ratio or (
                ratio == worst_ratio and tuple(S) < worst_set):
            worst_ratio = ratio
            worst_set = tuple(S)
        if ratio < gamma:
            certified = False
    return ExpansionReport(
        delta_tested=delta, gamma_target=gamma, mode=mode,
        certified=certified, worst_set=worst_set, worst_ratio=worst_ratio,
        n_sets_checked=checked, kind=side,
    )


def _sampled_sets(G: TannerGraph, delta: int, side: str, rng, n_samples: int):
    """Random neighbor-connected clusters, grown from a uniform seed."""
    adj = _bit_cograph(G, side)
    n = len(adj)
    for _ in range(n_samples):
        size = int(rng.integers(1, delta + 1))
        v = int(rng.integers(0, n))
        current = {v}
        frontier = set(adj[v])
        while len(current) < size and frontier:
            u = int(rng.choice(sorted(frontier)))
            current.add(u)
            frontier |= adj[u]
            frontier -= current
        yield tuple(sorted(current))


def audit_left_expansion(G: TannerGraph, delta: int, gamma, mode="exhaustive",
                         cap: int = DEFAULT_CAP, rng=None,
                         n_samples: int = 1000) -> ExpansionReport:
    """Check |Gamma(S)| >= gamma |S| for bit sets up to size delta."""
    gamma = _as_fraction(gamma)
    if mode == "exhaustive":
        if not _subset_cap_ok(G.n_bits, delta, cap):
            raise ValueError(
                "subset count exceeds the cap; use mode='connected_sets'")
        sets = _exhaustive_sets(G.n_bits, delta)
    elif mode == "connected_sets":
        sets = enumerate_connected_sets(G, delta, "left", cap)
    elif mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        sets = _sampled_sets(G, delta, "left", rng, n_samples)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _audit_sets(G, sets, gamma, _neighbor_count, delta, mode, "left")


def audit_right_expansion(G: TannerGraph, delta: int, gamma, mode="exhaustive",
                          cap: int = DEFAULT_CAP, rng=None,
                          n_samples: int = 1000) -> ExpansionReport:
    gamma = _as_fraction(gamma)
    if mode == "exhaustive":
        if not _subset_cap_ok(G.n_checks, delta, cap):
            raise ValueError(
                "subset count exceeds the cap; use mode='connected_sets'")
        sets = _exhaustive_sets(G.n_checks, delta)
    elif mode == "connected_sets":
        sets = enumerate_connected_sets(G, delta, "right", cap)
    elif mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        sets = _sampled_sets(G, delta, "right", rng, n_samples)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _audit_sets(G, sets, gamma, _neighbor_count, delta, mode, "right")


def audit_unique_neighbor(G: TannerGraph, delta: int, gamma_u,
                          mode="exhaustive", cap: int = DEFAULT_CAP,
                          rng=None, n_samples: int = 1000,
                          side: str = "left") -> ExpansionReport:
    """Check |Gamma_u(S)| >= gamma_u |S| (edges counted with multiplicity;
    a check reached twice is not a unique neighbor)."""
    gamma_u = _as_fraction(gamma_u)
    n = G.n_bits if side == "left" else G.n_checks
    if mode == "exhaustive":
        if not _subset_cap_ok(n, delta, cap):
            raise ValueError(
                "subset count exceeds the cap; use mode='connected_sets'")
        sets = _exhaustive_sets(n, delta)
    elif mode == "connected_sets":
        sets = enumerate_connected_sets(G, delta, side, cap)
    elif mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        sets = _sampled_sets(G, delta, side, rng, n_samples)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    report = _audit_sets(G, sets, gamma_u, _unique_neighbor_count, delta,
                         mode, side)
    report.kind = f"unique_neighbor_{side}"
    return report


def audit_confinement(H: BitMatrix, delta: int, gamma, mode="exhaustive",
                      cap: int = DEFAULT_CAP) -> ExpansionReport:
    """Check |He| >= gamma |e| for all non-kernel errors with |e| <= delta.

    Kernel elements of weight <= delta are reported separately as distance
    violations (they witness distance <= delta, not failed confinement).
    """
    gamma = _as_fraction(gamma)
    if mode != "exhaustive":
        raise ValueError("confinement audits are exhaustive only")
    if not _subset_cap_ok(H.cols, delta, cap):
        raise ValueError("subset count exceeds the cap; lower delta")
    worst_ratio = None
    worst_set = ()
    checked = 0
    certified = True
    violations = []
    nw = H.data.shape[1]
    columns = [pack_vector([1 if i == c else 0 for i in range(H.cols)], H.cols)
               for c in range(H.cols)]
    for S in _exhaustive_sets(H.cols, delta):
        checked += 1
        vec = np.zeros(nw, dtype=np.uint64)
        for c in S:
            vec ^= columns[c]
        syn = int(matvec(H, vec).sum())
        if syn == 0:
            violations.append(tuple(S))
            continue
        ratio = Fraction(syn, len(S))
        if worst_ratio is None or ratio < worst_ratio or (
                ratio == worst_ratio and tuple(S) < worst_set):
            worst_ratio = ratio
            worst_set = tuple(S)
        if ratio < gamma:
            certified = False
    return ExpansionReport(
        delta_tested=delta, gamma_target=gamma, mode=mode,
        certified=certified, worst_set=worst_set, worst_ratio=worst_ratio,
        n_sets_checked=checked, distance_violations=violations,
        kind="confinement",
    )
