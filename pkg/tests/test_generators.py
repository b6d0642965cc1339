import numpy as np
import pytest

from diffcodes.gf2 import nullspace_dim
from diffcodes.generators import (
    gallager_from_permutation, gen_candidate_set, gen_gallager,
    gen_geometric, right_degree_correct,
)


class TestCandidateSet:
    def test_single_edge(self):
        rng = np.random.default_rng(0)
        G = gen_candidate_set(1, 1, 1, [[0]], rng)
        assert G.n_edges == 1
        assert (G.edge_bits[0], G.edge_checks[0]) == (0, 0)

    def test_deterministic_when_tight(self):
        # |candidates| == c leaves no randomness
        rng = np.random.default_rng(1)
        sets = [[0, 1, 2], [3, 4, 5]]
        G = gen_candidate_set(2, 6, 3, sets, rng)
        assert G.neighbor_set([0]) == {0, 1, 2}
        assert G.neighbor_set([1]) == {3, 4, 5}

    def test_left_regular_every_seed(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            sets = [list(range(8))] * 6
            G = gen_candidate_set(6, 8, 3, sets, rng)
            deg = np.bincount(G.edge_bits, minlength=6)
            assert (deg == 3).all()

    def test_too_small_candidate_set(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError, match="bit 1"):
            gen_candidate_set(2, 5, 3, [[0, 1, 2], [3, 4][:2]], rng)

    def test_without_replacement_no_parallel_edges(self):
        rng = np.random.default_rng(3)
        G = gen_candidate_set(5, 6, 4, [list(range(6))] * 5, rng)
        for b in range(5):
            incident = G.bit_neighbors(b)
            assert len(set(int(c) for c in incident)) == len(incident)


class TestGeometric:
    def test_mean_candidate_size(self):
        # expected |candidates| = alpha * m^beta = 2 * 10 = 20
        sizes = []
        for seed in range(40):
            rng = np.random.default_rng(seed)
            G = gen_geometric(30, 100, 3, dim=1, beta=0.5, alpha=2.0, rng=rng)
            sizes.append(G.provenance["mean_candidates"])
        assert abs(np.mean(sizes) - 20.0) < 1.5

    def test_beta_near_one_recovers_uniform(self):
        rng = np.random.default_rng(5)
        G = gen_geometric(10, 20, 3, dim=1, beta=0.999, alpha=1.0, rng=rng)
        # ball volume ~ 1: every check is a candidate
        assert G.provenance["mean_candidates"] >= 19.0

    def test_parameter_validation(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ValueError):
            gen_geometric(5, 10, 2, dim=1, beta=1.5, alpha=1.0, rng=rng)
        with pytest.raises(ValueError):
            gen_geometric(5, 10, 2, dim=1, beta=0.5, alpha=0.5, rng=rng)

    def test_too_sparse_raises_with_offender(self):
        rng = np.random.default_rng(7)
        with pytest.raises(ValueError, match="bit"):
            gen_geometric(20, 10, 8, dim=2, beta=0.1, alpha=1.0, rng=rng)


class TestGallager:
    def test_requires_matching_socket_counts(self):
        rng = np.random.default_rng(8)
        with pytest.raises(ValueError):
            gen_gallager(4888, 4000, 9, 11, rng)  # 43992 != 44000

    def test_identity_permutation_is_matching(self):
        G = gallager_from_permutation(np.arange(12), 4, 4, 3, 3)
        for i in range(4):
            assert G.neighbor_set([i]) == {i}
            assert len(G.bit_neighbors(i)) == 3

    def test_biregular_every_seed(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            G = gen_gallager(10, 6, 3, 5, rng)
            audit = G.degree_audit()
            assert audit["is_biregular"]
            assert audit["max_bit_degree"] == 3
            assert audit["max_check_degree"] == 5

    def test_single_node_group_marginal_uniform(self):
        # chi-square: the group of socket 0 is uniform over checks
        m, wcheck = 6, 4
        counts = np.zeros(m)
        n_seeds = 3000
        for seed in range(n_seeds):
            rng = np.random.default_rng(seed)
            perm = rng.permutation(m * wcheck)
            counts[perm[0] // wcheck] += 1
        expected = n_seeds / m
        chi2 = ((counts - expected) ** 2 / expected).sum()
        # 5 dof; P(chi2 > 20.5) ~ 1e-3
        assert chi2 < 20.5

    def test_rate_approaches_design_rate(self):
        # k/n -> 1 - wbit/wcheck as n grows
        rates = []
        for seed in range(5):
            rng = np.random.default_rng(seed)
            G = gen_gallager(220, 180, 9, 11, rng)
            k = nullspace_dim(G.to_parity_check_matrix("parity"))
            rates.append(k / 220)
        assert abs(np.mean(rates) - (1 - 9 / 11)) < 0.02


class TestRightDegreeCorrect:
    def test_already_bounded_unchanged(self):
        G = gallager_from_permutation(np.arange(12), 4, 4, 3, 3)
        out = right_degree_correct(G)
        assert out.n_checks == G.n_checks

    def test_even_split(self):
        # one check of degree 2d splits into two checks of degree d
        import numpy as np
        from diffcodes.tanner import TannerGraph

        n, m = 8, 2
        # every bit degree 1, all edges into check 0: d = ceil(8/2) = 4
        G = TannerGraph(n, m, np.arange(n), np.zeros(n, dtype=np.int64))
        out = right_degree_correct(G)
        deg = np.bincount(out.edge_checks, minlength=out.n_checks)
        assert out.n_checks == 3  # check 0 split in two, empty check 1 kept
        assert sorted(deg.tolist()) == [0, 4, 4]

    def test_bounds_and_preservation(self):
        import math

        rng = np.random.default_rng(11)
        sets = [list(range(7))] * 12
        G = gen_candidate_set(12, 7, 3, sets, rng)
        out = right_degree_correct(G)
        d = math.ceil(12 * 3 / 7)
        assert G.n_checks <= out.n_checks <= 2 * G.n_checks
        deg = np.bincount(out.edge_checks, minlength=out.n_checks)
        assert deg.max() <= d
        # left degrees and total edge count preserved
        assert out.n_edges == G.n_edges
        assert np.array_equal(
            np.bincount(out.edge_bits, minlength=12),
            np.bincount(G.edge_bits, minlength=12))
        # bit -> original-check-family incidences preserved
        family = out.provenance["check_family"]
        orig = sorted(zip(G.edge_bits.tolist(), G.edge_checks.tolist()))
        mapped = sorted((int(b), family[int(c)])
                        for b, c in zip(out.edge_bits, out.edge_checks))
        assert orig == mapped
