"""Baseline random Tanner-graph generators.

Candidate-neighbor-set construction, the random geometric variant, the
Gallager configuration model, and the check-splitting right-degree fix.
"""

from __future__ import annotations

import math

import numpy as np

from .tanner import TannerGraph


def gen_candidate_set(n, m, c, sets, rng, with_replacement=False) -> TannerGraph:
    """Connect each bit to c checks drawn from its candidate set.

    Sampling is without replacement by default (a with-replacement flag is
    kept for the proof-faithful variant).  Candidate sets smaller than c
    are an error.
    """
    if c < 1:
        raise ValueError("c must be >= 1")
    if len(sets) != n:
        raise ValueError("need one candidate set per bit")
    bits, checks = [], []
    for ell, cand in enumerate(sets):
        cand = np.asarray(cand, dtype=np.int64)
        if cand.size and (cand.min() < 0 or cand.max() >= m):
            raise ValueError(f"candidate set of bit {ell} out of range")
        if not with_replacement and cand.size < c:
            raise ValueError(
                f"candidate set of bit {ell} has {cand.size} < c={c} entries"
            )
        if cand.size == 0:
            raise ValueError(f"candidate set of bit {ell} is empty")
        picked = rng.choice(cand, size=c, replace=with_replacement)
        bits.extend([ell] * c)
        checks.extend(int(r) for r in picked)
    return TannerGraph(
        n, m, np.array(bits), np.array(checks),
        provenance={"generator": "candidate_set", "c": c,
                    "with_replacement": bool(with_replacement)},
    )


def _ball_radius(volume: float, dim: int) -> float:
    """Radius of the dim-ball of the given volume."""
    unit = math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)
    return (volume / unit) ** (1.0 / dim)


def _torus_dist2(points, center):
    d = np.abs(points - center[None, :])
    d = np.minimum(d, 1.0 - d)
    return (d * d).sum(axis=1)


def gen_geometric(n, m, c, dim, beta, alpha, rng) -> TannerGraph:
    """Random geometric construction on the unit dim-torus.

    Bits and checks are placed i.i.d. uniformly; the candidate set of a bit
    is every check within the ball of volume alpha * m**(beta-1) around it
    (periodic boundary, so each ball has exactly that volume).
    """
    if not 0 < beta < 1:
        raise ValueError("beta must be in (0, 1)")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    bit_pos = rng.random((n, dim))
    check_pos = rng.random((m, dim))
    vol = alpha * m ** (beta - 1.0)
    r2 = _ball_radius(vol, dim) ** 2
    sets = []
    for ell in range(n):
        cand = np.nonzero(_torus_dist2(check_pos, bit_pos[ell]) <= r2)[0]
        if cand.size < c:
            raise ValueError(
                f"candidate set of bit {ell} has {cand.size} < c={c} checks; "
                "increase alpha or m"
            )
        sets.append(cand)
    graph = gen_candidate_set(n, m, c, sets, rng)
    graph.provenance.update(
        generator="geometric", dim=dim, beta=beta, alpha=alpha,
        mean_candidates=float(np.mean([len(s) for s in sets])),
    )
    return graph


def gallager_from_permutation(perm, n, m, wbit, wcheck) -> TannerGraph:
    """Configuration-model graph from an explicit socket matching."""
    N = n * wbit
    if N != m * wcheck:
        raise ValueError(
            f"regular matching requires n*wbit == m*wcheck "
            f"({n}*{wbit}={N} != {m}*{wcheck}={m * wcheck})"
        )
    perm = np.asarray(perm, dtype=np.int64)
    bits = np.arange(N, dtype=np.int64) // wbit
    checks = perm // wcheck
    return TannerGraph(
        n, m, bits, checks,
        provenance={"generator": "gallager", "wbit": wbit, "wcheck": wcheck},
    )


def gen_gallager(n, m, wbit, wcheck, rng) -> TannerGraph:
    """Gallager ensemble: a uniform random matching of n*wbit = m*wcheck
    sockets, then sockets collapsed into bits and checks."""
    if n * wbit != m * wcheck:
        raise ValueError(
            f"n*wbit must equal m*wcheck ({n * wbit} != {m * wcheck})"
        )
    perm = rng.permutation(n * wbit)
    return gallager_from_permutation(perm, n, m, wbit, wcheck)


def right_degree_correct(G: TannerGraph) -> TannerGraph:
    """Split heavy checks so every check has degree <= ceil(n*c/m).

    Each check r of degree d_r becomes ceil(d_r/d) checks with its edges
    distributed evenly; bit degrees and the bit -> original-check-family
    incidence multiset are preserved.
    """
    bit_deg = np.bincount(G.edge_bits, minlength=G.n_bits)
    c = int(bit_deg.max()) if G.n_bits else 0
    if G.n_bits and not (bit_deg == c).all():
        raise ValueError("right_degree_correct expects a left-regular graph")
    d = math.ceil(G.n_bits * c / G.n_checks)
    new_bits, new_checks = [], []
    family = []  # original check of each new check
    next_id = 0
    for r in range(G.n_checks):
        members = G.check_neighbors(r)
        parts = max(1, math.ceil(len(members) / d))
        # Distribute evenly: part sizes differ by at most one.
        base, extra = divmod(len(members), parts)
        start = 0
        for p in range(parts):
            size = base + (1 if p < extra else 0)
            for b in members[start:start + size]:
                new_bits.append(int(b))
                new_checks.append(next_id)
            start += size
            family.append(r)
            next_id += 1
    out = TannerGraph(
        G.n_bits, next_id,
        np.array(new_bits, dtype=np.int64), np.array(new_checks, dtype=np.int64),
        provenance={"generator": "right_degree_correct",
                    "parent": dict(G.provenance), "degree_cap": d,
                    "check_family": family},
    )
    return out
