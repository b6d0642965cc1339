from fractions import Fraction

import numpy as np
import pytest

from diffcodes.diffusion import DiffusionParams, build_diffusion_code
from diffcodes.generators import gen_gallager
from diffcodes.gf2 import BitMatrix, rank
from diffcodes.hgp import (
    CssCode, css_k, css_validate, css_validate_dense, hypergraph_product,
    quantum_confinement_audit, save_css,
)
from diffcodes.tanner import TannerGraph


def single_edge_graph():
    return TannerGraph(1, 1, np.array([0]), np.array([0]))


def cycle_repetition_graph(n):
    bits = np.repeat(np.arange(n), 2)
    checks = np.empty(2 * n, dtype=np.int64)
    checks[0::2] = np.arange(n)
    checks[1::2] = (np.arange(n) - 1) % n
    return TannerGraph(n, n, bits, checks)


class TestProduct:
    def test_single_edge(self):
        c = hypergraph_product(single_edge_graph())
        assert c.n_qubits == 2
        assert c.n_x_checks == 1 and c.n_z_checks == 1
        assert css_validate(c) and css_validate_dense(c)

    def test_counts_closed_form(self):
        rng = np.random.default_rng(0)
        for (n, m, wb, wc) in [(6, 4, 2, 3), (8, 4, 3, 6), (10, 5, 2, 4)]:
            G = gen_gallager(n, m, wb, wc, rng)
            c = hypergraph_product(G)
            assert c.n_qubits == n * n + m * m
            assert c.n_x_checks == n * m
            assert c.n_z_checks == m * n

    def test_block_structure_matches_kronecker(self):
        rng = np.random.default_rng(1)
        G = gen_gallager(4, 2, 1, 2, rng)
        H = G.to_parity_check_matrix("parity").to_dense()
        c = hypergraph_product(G)
        n, m = 4, 2
        hx_expected = np.hstack([np.kron(np.eye(n, dtype=np.uint8), H),
                                 np.kron(H.T, np.eye(m, dtype=np.uint8))]) % 2
        hz_expected = np.hstack([np.kron(H, np.eye(n, dtype=np.uint8)),
                                 np.kron(np.eye(m, dtype=np.uint8), H.T)]) % 2
        assert np.array_equal(c.H_X.to_dense(), hx_expected)
        assert np.array_equal(c.H_Z.to_dense(), hz_expected)

    def test_css_identity_random_inputs(self):
        for seed in range(15):
            rng = np.random.default_rng(seed)
            G = gen_gallager(6, 4, 2, 3, rng)
            c = hypergraph_product(G)
            assert css_validate(c)
            assert css_validate_dense(c)

    def test_css_identity_diffusion_inputs(self):
        for seed in range(10):
            p = DiffusionParams(n=8, m=7, wbit=6, wcheck=7, T=2.0, seed=seed)
            c = hypergraph_product(build_diffusion_code(p))
            assert css_validate(c)

    def test_logical_count_lower_bound(self):
        # k >= (n_A - m_A)^2 on small instances
        rng = np.random.default_rng(3)
        for (n, m, wb, wc) in [(6, 4, 2, 3), (9, 6, 2, 3)]:
            G = gen_gallager(n, m, wb, wc, rng)
            c = hypergraph_product(G)
            assert css_k(c) >= (n - m) ** 2

    def test_cycle_repetition_toric_like(self):
        n = 4
        c = hypergraph_product(cycle_repetition_graph(n))
        assert c.n_qubits == 2 * n * n
        # toric-like: k = 2 from the two cycle directions, >= (n-m)^2 = 0
        assert css_k(c) == 2

    def test_degree_bounds(self):
        rng = np.random.default_rng(4)
        G = gen_gallager(8, 4, 3, 6, rng)
        c = hypergraph_product(G)
        assert c.max_check_degree() <= 3 + 6
        assert c.max_sector_qubit_degree() <= max(3, 6)


class TestValidate:
    def test_counterexample(self):
        bad = CssCode(1, [np.array([0])], [np.array([0])])
        assert not css_validate(bad)

    def test_row_shuffle_preserves_identity(self):
        rng = np.random.default_rng(5)
        G = gen_gallager(6, 4, 2, 3, rng)
        c = hypergraph_product(G)
        order = rng.permutation(len(c.z_check_qubits))
        shuffled = CssCode(c.n_qubits, c.x_check_qubits,
                           [c.z_check_qubits[i] for i in order])
        assert css_validate(shuffled)


class TestConfinementAudit:
    def test_stabilizer_rows_vacuous(self):
        c = hypergraph_product(single_edge_graph())
        report = quantum_confinement_audit(c, delta=2, gamma=1, w_max=2)
        # every error is within weight 1 of the stabilizer group here;
        # audit must run without certifying violations
        assert report.certified

    def test_single_qubit_errors_exact(self):
        c = hypergraph_product(cycle_repetition_graph(3))
        report = quantum_confinement_audit(c, delta=1, gamma=1, w_max=1,
                                           sector="Z")
        assert report.certified
        # every weight-1 error has reduced weight 1 here, and |H_Z x| >= 2
        assert report.worst_ratio >= 2

    def test_both_sectors_run(self):
        c = hypergraph_product(single_edge_graph())
        for sector in ("X", "Z"):
            report = quantum_confinement_audit(c, delta=1, gamma=Fraction(1),
                                               w_max=1, sector=sector)
            assert report.kind.endswith(sector)


class TestSerialization:
    def test_save_files(self, tmp_path):
        c = hypergraph_product(cycle_repetition_graph(3))
        save_css(c, tmp_path / "q")
        from diffcodes.gf2 import read_alist

        hx = read_alist(tmp_path / "q.hx.alist")
        assert hx == c.H_X
        assert (tmp_path / "q.json").exists()
