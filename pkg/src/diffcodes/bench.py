"""Experiment harnesses: decoding-threshold campaigns and thermal
protocols, parallelized over derived-seed tasks so results are identical
for any worker count."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .decoders import DecoderGraph, binomial_stderr, decode_trials
from .diffusion import DiffusionParams, build_diffusion_code
from .seeds import derive_seed, deterministic_map

SCHEMA_VERSION = 1
TRIAL_CHUNK = 500  # fixed task granularity: part of the determinism contract


def family_checks(n: int, wbit: int, wcheck: int) -> int:
    """Check count of the bounded-degree family: bits stay wbit-regular
    (N = n*wbit) and the final check group absorbs the remainder."""
    return math.ceil(n * wbit / wcheck)


def parse_time_spec(spec, n: int, N: int) -> float:
    """Diffusion time in sweeps from a spec string: a float, 'N', 'n', or
    '[c*]n^a' / '[c*]N^a'."""
    if isinstance(spec, (int, float)):
        return float(spec)
    s = str(spec).strip()
    try:
        return float(s)
    except ValueError:
        pass
    factor = 1.0
    if "*" in s:
        head, s = s.split("*", 1)
        factor = float(head)
    base = {"n": n, "N": N}.get(s[0])
    if base is None:
        raise ValueError(f"cannot parse time spec {spec!r}")
    if len(s) == 1:
        return factor * base
    if s[1] != "^":
        raise ValueError(f"cannot parse time spec {spec!r}")
    return factor * base ** float(s[2:])


def family_params(n: int, wbit: int, wcheck: int, T_spec, seed: int,
                  time_mode: str = "discrete") -> DiffusionParams:
    m = family_checks(n, wbit, wcheck)
    N = n * wbit
    T = parse_time_spec(T_spec, n, N)
    return DiffusionParams(n=n, m=m, wbit=wbit, wcheck=wcheck, T=T,
                           time_mode=time_mode, seed=seed)


@lru_cache(maxsize=8)
def _cached_decoder_graph(n, wbit, wcheck, T_spec, seed, time_mode, edge_mode):
    params = family_params(n, wbit, wcheck, T_spec, seed, time_mode)
    return DecoderGraph(build_diffusion_code(params), edge_mode)


def _decode_task(task):
    (decoder, n, wbit, wcheck, T_spec, time_mode, code_seed, p, trials,
     trial_seed, max_iters, edge_mode) = task
    dg = _cached_decoder_graph(n, wbit, wcheck, T_spec, code_seed, time_mode,
                               edge_mode)
    failures = decode_trials(dg, decoder, p, trials, trial_seed, max_iters)
    return failures


def threshold_bench(decoder, n_grid, p_grid, trials_per_point,
                    codes_per_size, master_seed, wbit=9, wcheck=11,
                    T_spec="N", max_iters=60, workers=None,
                    time_mode="discrete", edge_mode="simple"):
    """Failure rates over an (n, p) grid for a diffusion-code family.

    For each size, codes_per_size instances are drawn with derived seeds;
    each (instance, p) cell runs trials_per_point i.i.d. bit-flip trials
    on the all-zero codeword, split into fixed-size chunks.  Returns one
    row per (n, p) with failures aggregated over instances.
    """
    if not p_grid:
        raise ValueError("p_grid must not be empty")
    if not n_grid:
        raise ValueError("n_grid must not be empty")
    tasks = []
    layout = []
    for n in n_grid:
        for ci in range(codes_per_size):
            code_seed = derive_seed(master_seed, f"code/{n}/{wbit}/{wcheck}", ci)
            for p in p_grid:
                remaining = trials_per_point
                chunk_idx = 0
                while remaining > 0:
                    chunk = min(remaining, TRIAL_CHUNK)
                    label = f"noise/{decoder}/{n}/{ci}/{p!r}"
                    trial_seed = derive_seed(master_seed, label, chunk_idx)
                    tasks.append((decoder, n, wbit, wcheck, T_spec, time_mode,
                                  code_seed, p, chunk, trial_seed, max_iters,
                                  edge_mode))
                    layout.append((n, p, chunk))
                    remaining -= chunk
                    chunk_idx += 1
    results = deterministic_map(_decode_task, tasks, workers)
    cells = {}
    for (n, p, chunk), failures in zip(layout, results):
        f, t = cells.get((n, p), (0, 0))
        cells[(n, p)] = (f + failures, t + chunk)
    rows = []
    for n in n_grid:
        m = family_checks(n, wbit, wcheck)
        for p in p_grid:
            failures, trials = cells[(n, p)]
            rows.append({
                "schema_version": SCHEMA_VERSION,
                "decoder": decoder,
                "n": n,
                "m": m,
                "wbit": wbit,
                "wcheck": wcheck,
                "T_spec": str(T_spec),
                "p": p,
                "trials": trials,
                "failures": failures,
                "failure_rate": failures / trials,
                "stderr": binomial_stderr(failures, trials),
                "master_seed": master_seed,
            })
    return rows


def crossing_bracket(rows, n_low: int, n_high: int):
    """Threshold bracket from the failure-rate curves of the smallest and
    largest sizes: (largest p where big-n beats small-n, smallest p where
    the order has reversed)."""
    by_p = {}
    for r in rows:
        if r["n"] in (n_low, n_high):
            by_p.setdefault(r["p"], {})[r["n"]] = r["failure_rate"]
    ps = sorted(by_p)
    p_below = None
    p_above = None
    for p in ps:
        cell = by_p[p]
        if cell[n_high] < cell[n_low]:
            p_below = p
        elif cell[n_high] > cell[n_low] and p_above is None and p_below is not None:
            p_above = p
    return p_below, p_above


# -- thermal harness -----------------------------------------------------------


@lru_cache(maxsize=4)
def _cached_code(n, wbit, wcheck, T_spec, seed, time_mode="discrete",
                 edge_mode="simple"):
    params = family_params(n, wbit, wcheck, T_spec, seed, time_mode)
    code = build_diffusion_code(params)
    return code, DecoderGraph(code, edge_mode)


def _memory_task(task):
    from .thermal import memory_time

    (n, wbit, wcheck, T_spec, code_seed, tau, check_every, max_sweeps,
     trial_seed, edge_mode) = task
    code, dg = _cached_code(n, wbit, wcheck, T_spec, code_seed,
                            edge_mode=edge_mode)
    rng = np.random.default_rng(trial_seed)
    return memory_time(code, tau, check_every, max_sweeps, rng,
                       decoder_graph=dg, mode=edge_mode)


def memory_time_campaign(n, tau, trials, master_seed, wbit=9, wcheck=11,
                         T_spec="N", check_every=10, max_sweeps=200_000,
                         codes=1, workers=None, edge_mode="simple"):
    """Memory-time trials at one (n, tau); returns the record list."""
    tasks = []
    for ci in range(codes):
        code_seed = derive_seed(master_seed, f"memcode/{n}", ci)
        for t in range(trials):
            trial_seed = derive_seed(master_seed, f"memtrial/{n}/{ci}/{tau!r}", t)
            tasks.append((n, wbit, wcheck, T_spec, code_seed, tau,
                          check_every, max_sweeps, trial_seed, edge_mode))
    return deterministic_map(_memory_task, tasks, workers)
