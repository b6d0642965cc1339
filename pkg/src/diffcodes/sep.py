"""Simple exclusion process and gap-process machinery.

A configuration of k particles on the cycle C_N is summarized by its gap
vector: the k cyclic inter-particle distances (each >= 1, summing to N).
The gap process moves unit mass between adjacent entries, rejecting moves
that would create a zero gap; the SEP induces its lazy version with
update probability q = 2k/N.  Exact enumeration of compositions gives the
stationary oracle and the small-gap tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels

RNG_CHUNK = 1 << 20


@dataclass
class GapVector:
    gaps: np.ndarray

    def __post_init__(self):
        self.gaps = np.asarray(self.gaps, dtype=np.int64)
        if self.gaps.size < 1:
            raise ValueError("gap vector needs at least one entry")
        if (self.gaps < 1).any():
            raise ValueError("all gaps must be >= 1")

    @property
    def k(self) -> int:
        return int(self.gaps.size)

    @property
    def N(self) -> int:
        return int(self.gaps.sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, GapVector) and np.array_equal(self.gaps, other.gaps)


@dataclass
class SepState:
    N: int
    occupied: np.ndarray  # sorted distinct vertex positions

    def __post_init__(self):
        self.occupied = np.sort(np.asarray(self.occupied, dtype=np.int64))
        if self.occupied.size:
            if self.occupied[0] < 0 or self.occupied[-1] >= self.N:
                raise ValueError("positions out of range")
            if np.unique(self.occupied).size != self.occupied.size:
                raise ValueError("positions must be distinct")

    @property
    def k(self) -> int:
        return int(self.occupied.size)


def gap_vector_of(s: SepState) -> GapVector:
    """Cyclic successive distances, anchored at the smallest occupied
    vertex (canonical anchor)."""
    if s.k == 0:
        raise ValueError("no particles")
    p = s.occupied
    gaps = np.empty(s.k, dtype=np.int64)
    gaps[:-1] = np.diff(p)
    gaps[-1] = s.N - p[-1] + p[0]
    return GapVector(gaps)


def gap_step(g: GapVector, index: int, direction: str) -> GapVector:
    """One proposed move; rejected moves return the input unchanged."""
    k = g.k
    if not 0 <= index < k:
        raise ValueError("index out of range")
    i = index
    j = i - 1 if i else k - 1
    gaps = g.gaps
    if direction == "up":
        if gaps[j] == 1:
            return g
        out = gaps.copy()
        out[i] += 1
        out[j] -= 1
    elif direction == "down":
        if gaps[i] == 1:
            return g
        out = gaps.copy()
        out[i] -= 1
        out[j] += 1
    else:
        raise ValueError("direction must be 'up' or 'down'")
    return GapVector(out)


def _draw_moves(k: int, steps: int, q: float, rng) -> np.ndarray:
    """Moves encoded as index*2 + (1 if up else 0); -1 is a lazy hold.
    For q < 1 the hold coin is drawn before the move."""
    if q >= 1.0:
        return rng.integers(0, 2 * k, size=steps, dtype=np.int64)
    act = rng.random(steps) < q
    moves = rng.integers(0, 2 * k, size=steps, dtype=np.int64)
    moves[~act] = -1
    return moves


def gap_run(g0: GapVector, steps: int, q: float, rng) -> GapVector:
    """Iterate the (lazy) gap chain: with probability q propose a uniform
    (index, fair direction) move, else hold."""
    if not 0 <= q <= 1:
        raise ValueError("q must be a probability")
    gaps = g0.gaps.copy()
    remaining = steps
    while remaining > 0:
        chunk = min(remaining, RNG_CHUNK)
        _kernels.gap_chunk(gaps, _draw_moves(g0.k, chunk, q, rng))
        remaining -= chunk
    return GapVector(gaps)


def sep_run(s0: SepState, T_sweeps: float, rng, record_sweeps=None):
    """Evolve the SEP by round(N*T) uniform edge selections (discrete
    time).  Returns the trace of states: the initial state, optional
    snapshots every ``record_sweeps`` sweeps, and the final state."""
    N = s0.N
    occ = np.zeros(N, dtype=np.uint8)
    occ[s0.occupied] = 1
    total = int(round(N * T_sweeps))
    trace = [s0]
    stride = None if record_sweeps is None else int(record_sweeps) * N
    done = 0
    while done < total:
        chunk = min(total - done, RNG_CHUNK if stride is None else stride)
        edges = rng.integers(0, N, size=chunk, dtype=np.int64)
        _kernels.sep_chunk(occ, edges)
        done += chunk
        if stride is not None and done < total:
            trace.append(SepState(N, np.nonzero(occ)[0]))
    trace.append(SepState(N, np.nonzero(occ)[0]))
    return trace


def sep_run_instrumented(s0: SepState, n_events: int, rng,
                         collect_moves: bool = False) -> dict:
    """Run the SEP one edge selection at a time, classifying each event as
    an induced gap transition and accumulating the lazy-gap-chain model
    expectations alongside.

    Categories: ('up', j) / ('down', j) for particle j (cyclic particle
    order is invariant under exclusion dynamics) and 'hold'.  Under the
    induced chain each allowed move has probability 1/N per event.
    Returns counts, model expectations and model variances per category;
    with collect_moves, also the accepted-move sequence and final gaps.
    """
    N, k = s0.N, s0.k
    pos = s0.occupied.copy()              # position of particle j
    who = -np.ones(N, dtype=np.int64)
    who[pos] = np.arange(k)
    cats = [("up", j) for j in range(k)] + [("down", j) for j in range(k)]
    counts = {c: 0 for c in cats}
    counts["hold"] = 0
    expected = {c: 0.0 for c in counts}
    variance = {c: 0.0 for c in counts}

    # gaps by particle identity: g[j] = distance from particle j to j+1
    g = np.empty(k, dtype=np.int64)
    g[:-1] = np.diff(pos)
    g[-1] = N - pos[-1] + pos[0]

    moves = [] if collect_moves else None
    edges = rng.integers(0, N, size=n_events, dtype=np.int64)
    inv_n = 1.0 / N
    for v in edges:
        v = int(v)
        w = v + 1 if v + 1 < N else 0
        # model probabilities for this state
        p_hold = 1.0
        for j in range(k):
            jm = j - 1 if j else k - 1
            if g[jm] > 1:  # up at j allowed
                expected[("up", j)] += inv_n
                variance[("up", j)] += inv_n * (1.0 - inv_n)
                p_hold -= inv_n
            if g[j] > 1:   # down at j allowed
                expected[("down", j)] += inv_n
                variance[("down", j)] += inv_n * (1.0 - inv_n)
                p_hold -= inv_n
        expected["hold"] += p_hold
        variance["hold"] += p_hold * (1.0 - p_hold)
        # actual transition
        a, b = who[v], who[w]
        if (a < 0) == (b < 0):
            counts["hold"] += 1
            continue
        if a >= 0:      # particle a moves v -> w (clockwise): down at a
            j = int(a)
            who[w], who[v] = a, -1
            pos[j] = w
            jm = j - 1 if j else k - 1
            g[j] -= 1
            g[jm] += 1
            counts[("down", j)] += 1
            if moves is not None:
                moves.append(("down", j))
        else:           # particle b moves w -> v (counter-clockwise): up at b
            j = int(b)
            who[v], who[w] = b, -1
            pos[j] = v
            jm = j - 1 if j else k - 1
            g[j] += 1
            g[jm] -= 1
            counts[("up", j)] += 1
            if moves is not None:
                moves.append(("up", j))
    out = {"counts": counts, "expected": expected, "variance": variance,
           "n_events": n_events}
    if moves is not None:
        out["moves"] = moves
        out["final_gaps"] = g.tolist()
    return out


# -- coupling ---------------------------------------------------------------


def align_smaller(g: GapVector, gp: GapVector):
    """Cyclic shift of gp making it entrywise <= g, or None."""
    if g.k != gp.k:
        return None
    a, b = g.gaps, gp.gaps
    for shift in range(g.k):
        rolled = np.roll(b, -shift)
        if (rolled <= a).all():
            return GapVector(rolled)
    return None


def coupled_gap_run(g0: GapVector, g0p: GapVector, steps: int, rng) -> dict:
    """Evolve both chains under identical (index, direction) proposals;
    each chain applies its own rejection rule.  Reports whether the
    entrywise ordering held at every step."""
    if g0.k != g0p.k:
        raise ValueError("coupled chains need the same number of gaps")
    aligned = align_smaller(g0, g0p)
    if aligned is None:
        raise ValueError("initial ordering violated: no cyclic shift of the "
                         "second vector is entrywise <= the first")
    g = g0.gaps.copy()
    gp = aligned.gaps.copy()
    violations = 0
    remaining = steps
    while remaining > 0:
        chunk = min(remaining, RNG_CHUNK)
        moves = rng.integers(0, 2 * g0.k, size=chunk, dtype=np.int64)
        violations += _kernels.coupled_gap_chunk(g, gp, moves)
        remaining -= chunk
    return {
        "g_final": GapVector(g),
        "gp_final": GapVector(gp),
        "ordering_held": violations == 0,
        "violations": int(violations),
    }


def vertex_removal_smaller(g: GapVector, n_remove: int, rng) -> GapVector:
    """A smaller valid gap vector built by deleting unoccupied vertices:
    each removal decrements one gap that is still > 1."""
    gaps = g.gaps.copy()
    for _ in range(n_remove):
        room = np.nonzero(gaps > 1)[0]
        if room.size == 0:
            raise ValueError("no unoccupied vertices left to remove")
        gaps[rng.choice(room)] -= 1
    return GapVector(gaps)


# -- exact oracles ----------------------------------------------------------


def n_compositions(N: int, k: int) -> int:
    """Number of gap vectors: compositions of N into k positive parts."""
    return math.comb(N - 1, k - 1)


def enumerate_gap_vectors(N: int, k: int, cap: int = 2_000_000):
    """All compositions of N into k positive parts, each with probability
    1 / C(N-1, k-1).  Raises if the count exceeds the cap."""
    total = n_compositions(N, k)
    if total > cap:
        raise ValueError(f"{total} compositions exceed the cap {cap}")
    out = []
    for cuts in combinations(range(1, N), k - 1):
        prev = 0
        parts = []
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(N - prev)
        out.append(tuple(parts))
    return out


def small_gap_tail(N: int, k: int, d: int, Q: int, cap: int = 2_000_000) -> dict:
    """Tail of the number of small gaps under the uniform stationary law.

    exact_prob counts enumerated vectors with >= Q entries <= d (None when
    enumeration exceeds the cap); bound is C(k,Q) * (e^2 k d / N)^Q.
    """
    if d < 1 or not 1 <= Q <= k:
        raise ValueError("need d >= 1 and 1 <= Q <= k")
    bound = math.comb(k, Q) * (math.e ** 2 * k * d / N) ** Q
    try:
        vectors = enumerate_gap_vectors(N, k, cap=cap)
    except ValueError:
        return {"exact_prob": None, "bound": bound, "n_hits": None}
    hits = sum(1 for v in vectors if sum(1 for x in v if x <= d) >= Q)
    return {
        "exact_prob": hits / len(vectors),
        "bound": bound,
        "n_hits": hits,
    }


# -- transition-matrix oracles ------------------------------------------------


def gap_transition_matrix(N: int, k: int, q: float = 1.0, cap: int = 200_000):
    """Exact transition matrix of the (lazy) gap chain over all
    compositions.  Returns (states, P)."""
    states = enumerate_gap_vectors(N, k, cap=cap)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    P = np.zeros((n, n))
    per_move = q / (2 * k)
    for s, row in index.items():
        stay = 1.0 - q
        for i in range(k):
            j = i - 1 if i else k - 1
            # up at i
            if s[j] > 1:
                t = list(s)
                t[i] += 1
                t[j] -= 1
                P[row, index[tuple(t)]] += per_move
            else:
                stay += per_move
            # down at i
            if s[i] > 1:
                t = list(s)
                t[i] -= 1
                t[j] += 1
                P[row, index[tuple(t)]] += per_move
            else:
                stay += per_move
        P[row, row] += stay
    return states, P


def stationary_distribution(P: np.ndarray, tol: float = 1e-13,
                            max_doublings: int = 60) -> np.ndarray:
    """Stationary law by repeated squaring from a deterministic start."""
    n = P.shape[0]
    pi = np.zeros(n)
    pi[0] = 1.0
    Pk = P.copy()
    for _ in range(max_doublings):
        nxt = pi @ Pk
        if np.abs(nxt - pi).sum() * 0.5 < tol:
            pi = nxt
            break
        pi = nxt
        Pk = Pk @ Pk
    return pi


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())
