import math

import numpy as np
import pytest

from diffcodes.decoders import DecoderGraph
from diffcodes.diffusion import DiffusionParams, build_diffusion_code
from diffcodes.gf2 import BitMatrix
from diffcodes.hgp import hypergraph_product
from diffcodes.tanner import TannerGraph
from diffcodes.thermal import (
    AnnealSchedule, SpinSystem, acceptance_table, anneal_means,
    equilibrium_energy, equilibrium_energy_formula, gibbs_energy_density,
    memory_time, metropolis_sweep, metropolis_sweeps, quantum_thermal_system,
    run_anneal,
)


def cycle_graph(n):
    bits = np.repeat(np.arange(n), 2)
    checks = np.empty(2 * n, dtype=np.int64)
    checks[0::2] = np.arange(n)
    checks[1::2] = (np.arange(n) - 1) % n
    return TannerGraph(n, n, bits, checks)


class TestEnergy:
    def test_codeword_zero(self):
        s = SpinSystem.from_tanner(cycle_graph(5))
        s.set_word(np.zeros(5, dtype=np.uint8))
        assert s.energy_density() == 0.0

    def test_single_flip_on_cycle(self):
        s = SpinSystem.from_tanner(cycle_graph(5))
        word = np.zeros(5, dtype=np.uint8)
        word[2] = 1
        s.set_word(word)
        assert s.energy_density() == pytest.approx(2 / 5)

    def test_uniform_spins_mean_half(self):
        # independent checks: each violated with probability 1/2
        rng = np.random.default_rng(0)
        G = cycle_graph(12)  # rank 11 of 12 checks; near-independent
        s = SpinSystem.from_tanner(G)
        es = []
        for _ in range(400):
            s.set_word(rng.integers(0, 2, size=12).astype(np.uint8))
            es.append(s.energy_density())
        assert abs(np.mean(es) - 0.5) < 0.02


class TestMetropolis:
    def test_acceptance_table_limits(self):
        t0 = acceptance_table(0.0, 3)
        assert t0.tolist() == [1, 1, 1, 1, 0, 0, 0]  # delta <= 0 only
        tinf = acceptance_table(1e12, 3)
        assert np.allclose(tinf, 1.0)

    def test_tau_zero_from_codeword_is_frozen(self):
        G = build_diffusion_code(
            DiffusionParams(n=22, m=18, wbit=9, wcheck=11, T=198.0, seed=3))
        s = SpinSystem.from_tanner(G)
        rng = np.random.default_rng(1)
        metropolis_sweeps(s, 0.0, 20, rng)
        assert s.unsat_count == 0
        # at tau = 0 only strictly improving or free moves are accepted;
        # from the ground state of an expanding code nothing single-flip
        # is free, so the state is exactly the codeword
        assert not s.word().any()

    def test_bookkeeping_consistent_after_sweeps(self):
        G = build_diffusion_code(
            DiffusionParams(n=22, m=18, wbit=9, wcheck=11, T=198.0, seed=4))
        s = SpinSystem.from_tanner(G)
        rng = np.random.default_rng(2)
        metropolis_sweeps(s, 1.5, 50, rng)
        assert s.bookkeeping_consistent()

    def test_detailed_balance_six_spins(self):
        # long-run state histogram matches exact Gibbs weights within 3 sigma
        G = cycle_graph(6)
        s = SpinSystem.from_tanner(G)
        tau = 2.0
        rng = np.random.default_rng(5)
        H = G.to_parity_check_matrix("parity")
        # exact Gibbs over the 64 states
        from diffcodes.gf2 import matvec, pack_vector

        energies = np.array([
            int(matvec(H, pack_vector(
                [(x >> i) & 1 for i in range(6)], 6)).sum())
            for x in range(64)])
        weights = np.exp(-2.0 * energies / tau)
        probs = weights / weights.sum()
        counts = np.zeros(64)
        n_samples = 40_000
        metropolis_sweeps(s, tau, 200, rng)  # burn-in
        for _ in range(n_samples):
            metropolis_sweeps(s, tau, 2, rng)
            state = int(np.dot(s.word(), 1 << np.arange(6)))
            counts[state] += 1
        # correlated samples: compare each cell at 3 sigma with an
        # effective-sample-size deflation factor
        ess = n_samples / 4
        for state in range(64):
            sigma = math.sqrt(probs[state] * (1 - probs[state]) * ess)
            assert abs(counts[state] / 4 - probs[state] * ess) <= 4 * sigma


class TestEquilibrium:
    def test_limits(self):
        assert equilibrium_energy_formula(0.0) == 0.0
        assert equilibrium_energy_formula(math.inf) == 0.5
        assert equilibrium_energy_formula(2.0) == pytest.approx(
            1 / (1 + math.exp(1.0)))

    def test_requires_independent_checks(self):
        # cycle repetition checks are dependent (they sum to zero)
        H = cycle_graph(6).to_parity_check_matrix("parity")
        assert equilibrium_energy(H, 1.0) is None

    def test_independent_checks_give_formula(self):
        H = BitMatrix.from_dense(np.array([[1, 1, 0], [0, 1, 1]]))
        assert equilibrium_energy(H, 1.3) == pytest.approx(
            equilibrium_energy_formula(1.3))

    def test_matches_exhaustive_gibbs(self):
        rng = np.random.default_rng(7)
        for trial in range(4):
            n = int(rng.integers(6, 13))
            m = int(rng.integers(2, n - 1))
            while True:
                H = BitMatrix.from_dense(rng.integers(0, 2, size=(m, n)))
                if equilibrium_energy(H, 1.0) is not None:
                    break
            for tau in (0.7, 1.5, 3.0):
                exact = gibbs_energy_density(H, tau)
                assert exact == pytest.approx(
                    equilibrium_energy_formula(tau), abs=1e-12)


class TestAnneal:
    def test_no_sampling_window(self):
        s = SpinSystem.from_tanner(cycle_graph(6))
        sched = AnnealSchedule(0.0, 0.2, 0.1, equil_sweeps=5, t_eq=0)
        samples = run_anneal(s, sched, np.random.default_rng(8))
        assert samples == []

    def test_heating_increases_energy(self):
        G = build_diffusion_code(
            DiffusionParams(n=44, m=36, wbit=9, wcheck=11, T=396.0, seed=9))
        s = SpinSystem.from_tanner(G)
        sched = AnnealSchedule(0.5, 3.5, 0.5, equil_sweeps=60, t_eq=40,
                               sample_every=10)
        samples = run_anneal(s, sched, np.random.default_rng(10))
        means = anneal_means(samples)
        assert means[0.5] < 0.05
        assert means[3.5] > 0.25

    def test_schedule_direction(self):
        sched = AnnealSchedule(4.0, 0.0, 1.0)
        assert sched.taus().tolist() == [4.0, 3.0, 2.0, 1.0, 0.0]


class TestMemoryTime:
    def test_cold_run_censors(self):
        G = build_diffusion_code(
            DiffusionParams(n=22, m=18, wbit=9, wcheck=11, T=198.0, seed=11))
        out = memory_time(G, 0.3, check_every=10, max_sweeps=50,
                          rng=np.random.default_rng(12))
        assert out == {"time": 50, "censored": True}

    def test_hot_run_fails_fast(self):
        G = build_diffusion_code(
            DiffusionParams(n=22, m=18, wbit=9, wcheck=11, T=198.0, seed=13))
        out = memory_time(G, 6.0, check_every=5, max_sweeps=3000,
                          rng=np.random.default_rng(14))
        assert not out["censored"]
        assert out["time"] <= 200

    def test_mean_nonincreasing_in_tau(self):
        # monotone trend over a temperature scan (T = N diffusion time so
        # the parity graph keeps healthy degrees)
        G = build_diffusion_code(
            DiffusionParams(n=88, m=72, wbit=9, wcheck=11, T=792.0, seed=15))
        dg = DecoderGraph(G)
        means = []
        for tau in (1.5, 1.8, 2.8):
            times = []
            for t in range(60):
                rng = np.random.default_rng(1000 * t + int(tau * 10))
                times.append(memory_time(G, tau, 1, 30_000, rng,
                                         decoder_graph=dg)["time"])
            means.append(np.mean(times))
        assert means[0] > means[1] > means[2]


class TestQuantum:
    def test_two_qubit_toy(self):
        G = TannerGraph(1, 1, np.array([0]), np.array([0]))
        css = hypergraph_product(G)
        for sector in ("X", "Z"):
            s = quantum_thermal_system(css, sector)
            assert s.n == 2 and s.m == 1

    def test_sector_rows_match(self):
        G = build_diffusion_code(
            DiffusionParams(n=6, m=5, wbit=5, wcheck=6, T=1.0, seed=16))
        css = hypergraph_product(G)
        s = quantum_thermal_system(css, "Z")
        assert s.n == css.n_qubits
        assert s.m == css.n_z_checks
        # energy of a single-qubit error = its H_Z column weight
        q = 3
        word = np.zeros(css.n_qubits, dtype=np.uint8)
        word[q] = 1
        s.set_word(word)
        col_weight = sum(1 for row in css.z_check_qubits if q in row)
        assert s.unsat_count == col_weight
