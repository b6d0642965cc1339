"""Ising dynamics for parity-check Hamiltonians.

Each check contributes -prod(spins) to the energy, so a violated check
costs +2 relative to the ground state and a single-spin flip changes the
energy by 2 * (change in unsatisfied-check count).  Energy *density* is
reported per check: codewords sit at 0, the fully violated state at 1,
and m independent checks equilibrate at 1 / (1 + e^{2/tau}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .decoders import CONVERGED, DecoderGraph, flip_decode
from .gf2 import BitMatrix, rank
from .tanner import TannerGraph

RNG_SWEEP_BATCH = 64  # sweeps of randomness drawn per batch


class SpinSystem:
    """Spins (+-1) coupled by parity checks, with incremental
    unsatisfied-check bookkeeping."""

    def __init__(self, n_spins: int, check_rows):
        self.n = int(n_spins)
        self.m = len(check_rows)
        lengths = np.array([len(r) for r in check_rows], dtype=np.int64)
        self.check_ptr = np.zeros(self.m + 1, dtype=np.int64)
        np.cumsum(lengths, out=self.check_ptr[1:])
        self.check_bits = (np.concatenate(check_rows).astype(np.int32)
                           if self.m else np.zeros(0, dtype=np.int32))
        # transpose adjacency: checks touching each spin
        order = np.argsort(self.check_bits, kind="stable")
        self.bit_ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.check_bits, minlength=self.n),
                  out=self.bit_ptr[1:])
        self.bit_checks = np.repeat(
            np.arange(self.m, dtype=np.int64), lengths
        )[order].astype(np.int32)
        self.deg_max = int(np.diff(self.bit_ptr).max()) if self.n else 0
        self.spins = np.ones(self.n, dtype=np.int8)
        self.unsat = np.zeros(self.m, dtype=np.uint8)
        self.unsat_count = 0

    @classmethod
    def from_tanner(cls, G: TannerGraph, mode: str = "parity") -> "SpinSystem":
        _, _, check_ptr, check_bits = G.reduced_adjacency(mode)
        rows = [check_bits[check_ptr[j]:check_ptr[j + 1]]
                for j in range(G.n_checks)]
        return cls(G.n_bits, rows)

    def set_word(self, word) -> None:
        """Load a 0/1 word (0 -> +1, 1 -> -1) and rebuild the syndrome."""
        w = np.asarray(word, dtype=np.uint8) & 1
        self.spins = np.where(w == 1, -1, 1).astype(np.int8)
        self.recompute()

    def word(self) -> np.ndarray:
        return (self.spins < 0).astype(np.uint8)

    def recompute(self) -> None:
        if self.m == 0:
            self.unsat_count = 0
            return
        contrib = (self.spins[self.check_bits] < 0).astype(np.int64)
        edge_check = np.repeat(np.arange(self.m, dtype=np.int64),
                               np.diff(self.check_ptr))
        parity = np.bincount(edge_check, weights=contrib, minlength=self.m)
        self.unsat = (parity.astype(np.int64) & 1).astype(np.uint8)
        self.unsat_count = int(self.unsat.sum())

    def bookkeeping_consistent(self) -> bool:
        saved, count = self.unsat.copy(), self.unsat_count
        self.recompute()
        ok = count == self.unsat_count and np.array_equal(saved, self.unsat)
        return ok

    def energy_density(self) -> float:
        return self.unsat_count / self.m if self.m else 0.0


def energy_density(s: SpinSystem) -> float:
    return s.energy_density()


def acceptance_table(tau: float, deg_max: int) -> np.ndarray:
    """min(1, exp(-2*delta/tau)) for delta in [-deg_max, deg_max]; at
    tau = 0 only non-increasing moves pass (delta = 0 still accepted,
    since min(1, e^0) = 1)."""
    deltas = np.arange(-deg_max, deg_max + 1, dtype=np.float64)
    if tau == 0.0:
        return (deltas <= 0).astype(np.float64)
    with np.errstate(over="ignore"):
        table = np.exp(-2.0 * deltas / tau)
    return np.minimum(table, 1.0)


def metropolis_sweeps(s: SpinSystem, tau: float, sweeps: int, rng) -> None:
    """Run `sweeps` sweeps (n proposals each, uniform random sites)."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    accept = acceptance_table(tau, s.deg_max)
    done = 0
    while done < sweeps:
        batch = min(sweeps - done, RNG_SWEEP_BATCH)
        sites = rng.integers(0, s.n, size=batch * s.n, dtype=np.int64)
        urand = rng.random(batch * s.n)
        s.unsat_count = int(_kernels.metropolis_chunk(
            s.spins, s.bit_ptr, s.bit_checks, s.unsat, sites, urand,
            accept, s.deg_max, s.unsat_count))
        done += batch


def metropolis_sweep(s: SpinSystem, tau: float, rng) -> SpinSystem:
    """One sweep, in place (returned for convenience)."""
    metropolis_sweeps(s, tau, 1, rng)
    return s


def equilibrium_energy(H: BitMatrix, tau: float):
    """Analytic equilibrium energy density 1/(1 + e^{2/tau}) when the
    check rows are linearly independent; None otherwise."""
    if rank(H) != H.rows:
        return None
    return equilibrium_energy_formula(tau)


def equilibrium_energy_formula(tau: float) -> float:
    if tau == 0.0:
        return 0.0
    if math.isinf(tau):
        return 0.5
    return 1.0 / (1.0 + math.exp(2.0 / tau))


def gibbs_energy_density(H: BitMatrix, tau: float) -> float:
    """Exhaustive 2^n Gibbs average of unsat/m (partition-function oracle).

    Exact summation (math.fsum); feasible for n <= ~22.
    """
    n, m = H.cols, H.rows
    if n > 24:
        raise ValueError("exhaustive Gibbs oracle capped at n <= 24")
    masks = [int.from_bytes(H.data[r].astype("<u8").tobytes(), "little")
             for r in range(m)]
    states = np.arange(1 << n, dtype=np.uint64)
    unsat = np.zeros(1 << n, dtype=np.int32)
    for mask in masks:
        unsat += (np.bitwise_count(states & np.uint64(mask)) & 1).astype(np.int32)
    if tau == 0.0:
        return float(unsat.min()) / m
    beta2 = 2.0 / tau
    log_w = -beta2 * unsat.astype(np.float64)
    log_w -= log_w.max()
    w = np.exp(log_w)
    num = math.fsum((w * (unsat / m)).tolist())
    den = math.fsum(w.tolist())
    return num / den


@dataclass
class AnnealSchedule:
    tau_start: float
    tau_end: float
    delta_tau: float
    equil_sweeps: int = 1000
    sample_every: int = 10
    t_eq: int = 200

    def taus(self) -> np.ndarray:
        if self.delta_tau <= 0:
            raise ValueError("delta_tau must be > 0")
        n_steps = int(round(abs(self.tau_end - self.tau_start) / self.delta_tau))
        sign = 1.0 if self.tau_end >= self.tau_start else -1.0
        return self.tau_start + sign * self.delta_tau * np.arange(n_steps + 1)


def run_anneal(s: SpinSystem, schedule: AnnealSchedule, rng):
    """Heating or cooling protocol.

    Per temperature: equil_sweeps equilibration sweeps, then t_eq sweeps
    sampling the energy density every sample_every sweeps.  The state
    carries over between temperatures.  Returns a list of sample records
    (tau, sweep, energy_density).
    """
    samples = []
    for tau in schedule.taus():
        tau = float(tau)
        metropolis_sweeps(s, tau, schedule.equil_sweeps, rng)
        done = 0
        while done < schedule.t_eq:
            step = min(schedule.sample_every, schedule.t_eq - done)
            metropolis_sweeps(s, tau, step, rng)
            done += step
            samples.append((tau, schedule.equil_sweeps + done,
                            s.energy_density()))
    return samples


def anneal_means(samples) -> dict:
    """Mean sampled energy density per temperature."""
    sums, counts = {}, {}
    for tau, _, e in samples:
        sums[tau] = sums.get(tau, 0.0) + e
        counts[tau] = counts.get(tau, 0) + 1
    return {tau: sums[tau] / counts[tau] for tau in sums}


def memory_time(code: TannerGraph, tau: float, check_every: int,
                max_sweeps: int, rng, decoder_graph: DecoderGraph = None,
                mode: str = "parity") -> dict:
    """Sweeps until the flip decoder first fails to recover all-zeros.

    Starts from the all-zero codeword, runs Metropolis at tau, and every
    check_every sweeps decodes a copy; failure (stopping set or
    convergence to a different word) stops the clock.  censored=True if
    max_sweeps elapsed first.
    """
    if tau <= 0:
        raise ValueError("memory_time needs tau > 0")
    s = SpinSystem.from_tanner(code, mode)
    dg = decoder_graph or DecoderGraph(code, mode)
    sweeps = 0
    while sweeps < max_sweeps:
        step = min(check_every, max_sweeps - sweeps)
        metropolis_sweeps(s, tau, step, rng)
        sweeps += step
        out = flip_decode(dg, s.word(), rng=rng)
        if out.status != CONVERGED or out.final_word.any():
            return {"time": sweeps, "censored": False}
    return {"time": sweeps, "censored": True}


def quantum_thermal_system(css, sector: str = "Z") -> SpinSystem:
    """Classical spin system of one CSS sector: spins are qubits, checks
    are the chosen sector's stabilizer rows (the two sectors commute, so
    each is a faithful classical simulation of its error dynamics)."""
    if sector == "Z":
        rows = css.z_check_qubits
    elif sector == "X":
        rows = css.x_check_qubits
    else:
        raise ValueError("sector must be 'X' or 'Z'")
    return SpinSystem(css.n_qubits, rows)
