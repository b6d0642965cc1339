"""Diffusion codes: a random SWAP network on the cycle graph, collapsed
into a Tanner graph.

Labels start at their own vertex (identity numbering).  After the
interchange process runs for T sweeps (one sweep = N uniformly random
edge swaps in discrete time), label i wires bit i // wbit to the check
group of the vertex where i ended up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .tanner import TannerGraph

RNG_CHUNK = 1 << 20  # fixed chunk size: part of the determinism contract


@dataclass
class Permutation:
    """State of the interchange process: map[v] = label at vertex v."""

    n: int
    map: np.ndarray

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.map] = np.arange(self.n, dtype=np.int64)
        return inv

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(n, np.arange(n, dtype=np.int64))


@dataclass
class DiffusionParams:
    n: int
    m: int
    wbit: int
    wcheck: int
    T: float                   # sweeps; one sweep = N swap selections
    time_mode: str = "discrete"
    seed: int = 0

    def __post_init__(self):
        if self.time_mode not in ("discrete", "continuous"):
            raise ValueError("time_mode must be 'discrete' or 'continuous'")
        if self.T < 0:
            raise ValueError("T must be >= 0")
        self.N = partition_size(self.n, self.m, self.wbit, self.wcheck)


def partition_size(n, m, wbit, wcheck) -> int:
    """Number of cycle vertices N, with bounded-degree padding.

    N = min(n*wbit, m*wcheck); the side that over-provisions gets a final
    short group, so bit degrees stay <= wbit, check degrees <= wcheck, and
    the bit/check counts are exactly n and m.
    """
    N = min(n * wbit, m * wcheck)
    if N <= (n - 1) * wbit:
        raise ValueError(
            f"cannot fit {n} bit groups of size <= {wbit} over {N} vertices"
        )
    if N <= (m - 1) * wcheck:
        raise ValueError(
            f"cannot fit {m} check groups of size <= {wcheck} over {N} vertices"
        )
    return N


def n_swaps_for(params: DiffusionParams, rng) -> int:
    """Total swap count: round(N*T) in discrete time, Poisson(N*T) in
    continuous time (the embedded jump chains are identical)."""
    mean = params.N * params.T
    if params.time_mode == "discrete":
        return int(round(mean))
    return int(rng.poisson(mean))


def apply_swaps(perm: Permutation, n_swaps: int, rng) -> None:
    """Apply uniformly random cycle-edge swaps, chunking the RNG stream."""
    remaining = n_swaps
    while remaining > 0:
        chunk = min(remaining, RNG_CHUNK)
        edges = rng.integers(0, perm.n, size=chunk, dtype=np.int64)
        _kernels.swap_chunk(perm.map, edges)
        remaining -= chunk


def interchange_run(N: int, T: float, time_mode: str, rng) -> Permutation:
    """Run the interchange process on the cycle C_N for T sweeps."""
    params = DiffusionParams(n=N, m=N, wbit=1, wcheck=1, T=T,
                             time_mode=time_mode)
    perm = Permutation.identity(N)
    apply_swaps(perm, n_swaps_for(params, rng), rng)
    return perm


def build_diffusion_code(p: DiffusionParams) -> TannerGraph:
    """Construct the Tanner graph of an (n, m, wbit, wcheck, T) diffusion
    code on the cycle graph, recording final label positions for extent
    audits."""
    rng = np.random.default_rng(p.seed)
    N = p.N
    perm = Permutation.identity(N)
    swaps = n_swaps_for(p, rng)
    apply_swaps(perm, swaps, rng)
    positions = perm.inverse          # vertex where each label ended up
    labels = np.arange(N, dtype=np.int64)
    bits = labels // p.wbit
    checks = np.minimum(positions // p.wcheck, p.m - 1)
    graph = TannerGraph(
        p.n, p.m, bits, checks,
        provenance={
            "generator": "diffusion",
            "seed": p.seed,
            "T_sweeps": p.T,
            "time_mode": p.time_mode,
            "n_swaps": swaps,
            "N": N,
            "wbit": p.wbit,
            "wcheck": p.wcheck,
            "final_positions": positions,
        },
    )
    return graph


def _check_interval(r: int, N: int, m: int, wcheck: int):
    start = r * wcheck
    end = min((r + 1) * wcheck, N) if r < m - 1 else N
    return start, end


def max_check_extent(G: TannerGraph, p: DiffusionParams) -> int:
    """Geometric size of the largest check on the cycle.

    For each check, take the final positions of the labels that started in
    its socket interval, together with the interval itself, and measure
    the maximal cyclic distance from the interval's center vertex.
    """
    prov = G.provenance
    if "final_positions" not in prov:
        raise ValueError("graph lacks recorded final positions")
    positions = np.asarray(prov["final_positions"])
    N = p.N
    worst = 0
    for r in range(p.m):
        start, end = _check_interval(r, N, p.m, p.wcheck)
        center = start + (end - 1 - start) // 2
        pts = np.concatenate([positions[start:end], [start, end - 1]])
        d = np.abs(pts - center)
        d = np.minimum(d, N - d)
        worst = max(worst, int(d.max()))
    return worst
