import numpy as np
import pytest

from diffcodes.diffusion import DiffusionParams, build_diffusion_code
from diffcodes.generators import gen_gallager
from diffcodes.tanner import TannerGraph


def star_graph():
    """One check wired once each to bits 0 and 1."""
    return TannerGraph(2, 1, np.array([0, 1]), np.array([0, 0]))


def t0_code(n, w):
    return build_diffusion_code(
        DiffusionParams(n=n, m=n, wbit=w, wcheck=w, T=0.0, seed=1))


class TestNeighborSets:
    def test_empty(self):
        G = star_graph()
        assert G.neighbor_set([]) == set()
        assert G.unique_neighbor_set([]) == set()

    def test_t0_matching(self):
        # T=0 diffusion code with wbit=wcheck, n=m: one-to-one matching
        G = t0_code(4, 3)
        for i in range(4):
            assert G.neighbor_set([i]) == {i}

    def test_shared_check(self):
        G = TannerGraph(2, 1, np.array([0, 1]), np.array([0, 0]))
        assert G.neighbor_set([0, 1]) == {0}

    def test_unique_neighbor_parity(self):
        G = star_graph()
        assert G.unique_neighbor_set([0]) == {0}
        assert G.unique_neighbor_set([0, 1]) == set()

    def test_parallel_edges_not_unique(self):
        # a check reached by two parallel edges from one bit is not unique
        G = TannerGraph(1, 1, np.array([0, 0]), np.array([0, 0]))
        assert G.unique_neighbor_set([0]) == set()

    def test_unique_neighbor_oracle(self):
        # direct multiset-count oracle on random Gallager instances
        rng = np.random.default_rng(5)
        G = gen_gallager(8, 6, 3, 4, rng)
        for i in range(8):
            incident = G.bit_neighbors(i)
            counts = {}
            for c in incident:
                counts[int(c)] = counts.get(int(c), 0) + 1
            expected = {c for c, k in counts.items() if k == 1}
            assert G.unique_neighbor_set([i]) == expected

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            star_graph().neighbor_set([5])

    def test_gamma_u_bounded_by_gamma(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            G = gen_gallager(10, 6, 3, 5, rng)
            S = list(rng.choice(10, size=3, replace=False))
            gu = len(G.unique_neighbor_set(S))
            g = len(G.neighbor_set(S))
            deg_sum = sum(len(G.bit_neighbors(int(b))) for b in S)
            assert gu <= g <= deg_sum


class TestParityMatrix:
    def test_modes_agree_on_simple_graph(self):
        G = star_graph()
        assert (G.to_parity_check_matrix("parity")
                == G.to_parity_check_matrix("simple"))

    def test_t0_odd_multiplicity_gives_identity(self):
        # 3 parallel edges per pair: 3 mod 2 = 1
        G = t0_code(4, 3)
        assert np.array_equal(
            G.to_parity_check_matrix("parity").to_dense(), np.eye(4))

    def test_double_edge_cancels(self):
        G = TannerGraph(1, 1, np.array([0, 0]), np.array([0, 0]))
        assert G.to_parity_check_matrix("parity").to_dense().tolist() == [[0]]
        assert G.to_parity_check_matrix("simple").to_dense().tolist() == [[1]]

    def test_parity_matches_syndrome_xor(self):
        rng = np.random.default_rng(7)
        G = gen_gallager(9, 3, 2, 6, rng)
        H = G.to_parity_check_matrix("parity").to_dense()
        word = rng.integers(0, 2, size=9).astype(np.uint8)
        mult = G.multiplicity_matrix()
        expected = (mult @ word) % 2
        assert np.array_equal((H @ word) % 2, expected)


class TestDegreeAudit:
    def test_gallager_biregular(self):
        rng = np.random.default_rng(3)
        G = gen_gallager(8, 4, 3, 6, rng)
        audit = G.degree_audit()
        assert audit == {"max_bit_degree": 3, "max_check_degree": 6,
                         "is_biregular": True}

    def test_empty_edges(self):
        G = TannerGraph(3, 2, np.array([], dtype=np.int64),
                        np.array([], dtype=np.int64))
        audit = G.degree_audit()
        assert audit["max_bit_degree"] == 0
        assert audit["max_check_degree"] == 0

    def test_padded_diffusion_bounded(self):
        # N not divisible: degrees stay bounded by (wbit, wcheck)
        p = DiffusionParams(n=10, m=9, wbit=9, wcheck=10, T=2.0, seed=4)
        G = build_diffusion_code(p)
        audit = G.degree_audit()
        assert audit["max_bit_degree"] <= 9
        assert audit["max_check_degree"] <= 10


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(11)
        G = gen_gallager(8, 6, 3, 4, rng)
        prefix = tmp_path / "code"
        G.save(prefix)
        loaded = TannerGraph.load(prefix)
        assert loaded.n_bits == G.n_bits
        assert loaded.n_checks == G.n_checks
        assert np.array_equal(loaded.edge_bits, G.edge_bits)
        assert np.array_equal(loaded.edge_checks, G.edge_checks)
        assert loaded.provenance["generator"] == "gallager"

    def test_files_exist(self, tmp_path):
        G = star_graph()
        G.save(tmp_path / "g")
        for suffix in (".json", ".alist", ".edges"):
            assert (tmp_path / f"g{suffix}").exists()
