"""Flip and belief-propagation decoders, and the i.i.d. bit-flip
threshold benchmark.

Both decoders act on the parity-mode (GF(2)-reduced) graph; duplicate
edges cancel before decoding.  The flip decoder sweeps the bits in a
seeded random order and flips immediately whenever that strictly lowers
the number of unsatisfied checks; ties are never flipped
(zero-temperature Metropolis rejects non-improving moves).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .tanner import TannerGraph

CONVERGED = "Converged"
STOPPING_SET = "StoppingSet"
ITERATION_LIMIT = "IterationLimit"


@dataclass
class DecodeOutcome:
    status: str
    final_word: np.ndarray
    flips_performed: int = 0
    iterations: int = 0


class DecoderGraph:
    """Preprocessed CSR views of a reduced Tanner graph.

    mode='parity' cancels even-multiplicity parallel edges (GF(2)
    semantics); mode='simple' keeps one edge per incident pair (the
    biadjacency-support convention).
    """

    def __init__(self, G: TannerGraph, mode: str = "parity"):
        self.mode = mode
        bit_ptr, bit_checks, check_ptr, check_bits = G.reduced_adjacency(mode)
        self.n = G.n_bits
        self.m = G.n_checks
        self.bit_ptr = bit_ptr
        self.bit_checks = bit_checks
        self.check_ptr = check_ptr
        self.check_bits = check_bits
        # edge list grouped by check, for BP
        self.edge_bit = check_bits.astype(np.int32)
        self.edge_check = np.repeat(
            np.arange(self.m, dtype=np.int64), np.diff(check_ptr))

    def syndrome(self, word: np.ndarray) -> np.ndarray:
        """Per-check parities (uint8) of a 0/1 word."""
        if self.m == 0:
            return np.zeros(0, dtype=np.uint8)
        contrib = word[self.check_bits].astype(np.int64)
        sums = np.bincount(self.edge_check, weights=contrib, minlength=self.m)
        return (sums.astype(np.int64) & 1).astype(np.uint8)


def flip_decode(G: TannerGraph | DecoderGraph, word, rng=None,
                max_sweeps=None) -> DecodeOutcome:
    """Greedy flip decoding of a word (0/1 array of length n_bits)."""
    dg = G if isinstance(G, DecoderGraph) else DecoderGraph(G)
    w = np.ascontiguousarray(np.asarray(word, dtype=np.uint8) & 1)
    if w.size != dg.n:
        raise ValueError("word length mismatch")
    unsat = dg.syndrome(w)
    unsat_count = int(unsat.sum())
    if unsat_count == 0:
        return DecodeOutcome(CONVERGED, w, 0)
    order = (rng.permutation(dg.n).astype(np.int64) if rng is not None
             else np.arange(dg.n, dtype=np.int64))
    if max_sweeps is None:
        max_sweeps = dg.m * unsat_count + 1
    unsat_count, flips, sweeps = _kernels.flip_decode_run(
        w, dg.bit_ptr, dg.bit_checks, unsat, order,
        unsat_count, max_sweeps)
    status = CONVERGED if unsat_count == 0 else STOPPING_SET
    return DecodeOutcome(status, w, int(flips), int(sweeps))


def channel_llr(p_channel: float) -> float:
    if not 0 < p_channel < 0.5:
        raise ValueError("p_channel must be in (0, 1/2)")
    return math.log((1.0 - p_channel) / p_channel)


def bp_decode(G: TannerGraph | DecoderGraph, received, p_channel: float,
              max_iters: int = 60,
              schedule: str = "flooding") -> DecodeOutcome:
    """Sum-product decoding of a received word under the binary symmetric
    channel with crossover p_channel.

    schedule='flooding' updates all checks from the previous iteration's
    messages; schedule='serial' sweeps the checks sequentially with fresh
    posteriors (converges in fewer iterations and is markedly more stable
    on heavy columns).
    """
    dg = G if isinstance(G, DecoderGraph) else DecoderGraph(G)
    r = np.asarray(received, dtype=np.uint8) & 1
    if r.size != dg.n:
        raise ValueError("word length mismatch")
    llr = channel_llr(p_channel)
    llr0 = np.where(r == 0, llr, -llr).astype(np.float64)
    hard = np.zeros(dg.n, dtype=np.uint8)
    if schedule == "flooding":
        runner = _kernels.bp_decode_run
    elif schedule == "serial":
        runner = _kernels.bp_decode_serial
    else:
        raise ValueError(f"unknown schedule {schedule!r}")
    converged, iters = runner(llr0, dg.edge_bit, dg.check_ptr, hard, max_iters)
    status = CONVERGED if converged else ITERATION_LIMIT
    return DecodeOutcome(status, hard, 0, int(iters))


def bp_posteriors(G: TannerGraph | DecoderGraph, received, p_channel: float,
                  n_iters: int) -> np.ndarray:
    """Posterior LLRs after a fixed number of sum-product iterations."""
    dg = G if isinstance(G, DecoderGraph) else DecoderGraph(G)
    r = np.asarray(received, dtype=np.uint8) & 1
    llr = channel_llr(p_channel)
    llr0 = np.where(r == 0, llr, -llr).astype(np.float64)
    return np.asarray(
        _kernels.bp_posteriors(llr0, dg.edge_bit, dg.check_ptr, n_iters))


# -- benchmark harness --------------------------------------------------------


def decode_trials(dg: DecoderGraph, decoder: str, p: float, trials: int,
                  seed: int, max_iters: int = 60,
                  bp_schedule: str = "serial") -> int:
    """Number of failures over i.i.d. bit-flip trials on the all-zero
    codeword.  Failure = StoppingSet, IterationLimit, or convergence to
    any word other than all-zeros."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(trials):
        word = (rng.random(dg.n) < p).astype(np.uint8)
        if decoder == "flip":
            out = flip_decode(dg, word, rng=rng)
        elif decoder == "bp":
            out = bp_decode(dg, word, p_channel=p, max_iters=max_iters,
                            schedule=bp_schedule)
        else:
            raise ValueError(f"unknown decoder {decoder!r}")
        if out.status != CONVERGED or out.final_word.any():
            failures += 1
    return failures


def binomial_stderr(failures: int, trials: int) -> float:
    rate = failures / trials
    return math.sqrt(max(rate * (1.0 - rate), 1.0 / trials) / trials)
