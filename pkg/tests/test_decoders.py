import numpy as np
import pytest

from diffcodes.decoders import (
    CONVERGED, ITERATION_LIMIT, STOPPING_SET, DecoderGraph, bp_decode,
    bp_posteriors, channel_llr, decode_trials, flip_decode,
)
from diffcodes.diffusion import DiffusionParams, build_diffusion_code
from diffcodes.gf2 import BitMatrix
from diffcodes.tanner import TannerGraph


def cycle_graph(n):
    bits = np.repeat(np.arange(n), 2)
    checks = np.empty(2 * n, dtype=np.int64)
    checks[0::2] = np.arange(n)
    checks[1::2] = (np.arange(n) - 1) % n
    return TannerGraph(n, n, bits, checks)


HAMMING_EDGES = [
    (0, 0), (2, 0), (4, 0), (6, 0),
    (1, 1), (2, 1), (5, 1), (6, 1),
    (3, 2), (4, 2), (5, 2), (6, 2),
]


def hamming_graph():
    bits = np.array([e[0] for e in HAMMING_EDGES])
    checks = np.array([e[1] for e in HAMMING_EDGES])
    return TannerGraph(7, 3, bits, checks)


def stopping_set_graph():
    """Three bits, checks {0,1}, {1,2}, {0,2}, {0,1,2}: the word 111 has
    one unsatisfied check but no improving single flip."""
    bits = np.array([0, 1, 1, 2, 0, 2, 0, 1, 2])
    checks = np.array([0, 0, 1, 1, 2, 2, 3, 3, 3])
    return TannerGraph(3, 4, bits, checks)


def ml_decode(G, received, p):
    """Exhaustive maximum-likelihood oracle."""
    H = G.to_parity_check_matrix("parity").to_dense()
    n = G.n_bits
    best, best_metric = None, None
    for x in range(1 << n):
        word = np.array([(x >> i) & 1 for i in range(n)], dtype=np.uint8)
        if ((H @ word) % 2).any():
            continue
        dist = int((word != received).sum())
        if best_metric is None or dist < best_metric:
            best, best_metric = word, dist
    return best


class TestFlip:
    def test_codeword_zero_flips(self):
        G = cycle_graph(5)
        out = flip_decode(G, np.zeros(5, dtype=np.uint8))
        assert out.status == CONVERGED and out.flips_performed == 0

    def test_single_error_on_cycle(self):
        G = cycle_graph(5)
        word = np.zeros(5, dtype=np.uint8)
        word[2] = 1
        out = flip_decode(G, word, rng=np.random.default_rng(0))
        assert out.status == CONVERGED
        assert not out.final_word.any()
        assert out.flips_performed == 1

    def test_stopping_set(self):
        out = flip_decode(stopping_set_graph(), np.ones(3, dtype=np.uint8),
                          rng=np.random.default_rng(1))
        assert out.status == STOPPING_SET
        assert out.final_word.tolist() == [1, 1, 1]

    def test_termination_bound(self):
        # unsat strictly decreases per flip, so flips <= initial unsat count
        rng = np.random.default_rng(2)
        p = DiffusionParams(n=33, m=27, wbit=9, wcheck=11, T=3.0, seed=5)
        G = build_diffusion_code(p)
        dg = DecoderGraph(G)
        for _ in range(50):
            word = (rng.random(33) < 0.2).astype(np.uint8)
            unsat0 = int(dg.syndrome(word).sum())
            out = flip_decode(dg, word.copy(), rng=rng)
            if out.status == CONVERGED:
                assert not dg.syndrome(out.final_word).any()
            assert out.flips_performed <= max(unsat0, 1) * dg.m

    def test_deterministic_given_rng_state(self):
        G = cycle_graph(9)
        word = np.zeros(9, dtype=np.uint8)
        word[[1, 4]] = 1
        a = flip_decode(G, word.copy(), rng=np.random.default_rng(7))
        b = flip_decode(G, word.copy(), rng=np.random.default_rng(7))
        assert np.array_equal(a.final_word, b.final_word)
        assert a.flips_performed == b.flips_performed


class TestBp:
    def test_codeword_converges_at_zero(self):
        G = hamming_graph()
        out = bp_decode(G, np.zeros(7, dtype=np.uint8), 0.05)
        assert out.status == CONVERGED and out.iterations == 0

    def test_single_error_matches_ml(self):
        # bits of degree <= 2 are corrected in one flooding pass and agree
        # with the exhaustive ML oracle
        G = hamming_graph()
        for i in range(6):
            received = np.zeros(7, dtype=np.uint8)
            received[i] = 1
            out = bp_decode(G, received, 0.05, max_iters=50)
            assert out.status == CONVERGED
            assert np.array_equal(out.final_word, ml_decode(G, received, 0.05))
            assert not out.final_word.any()

    def test_degree_three_bit_fixed_point_is_ml(self):
        # an error on the degree-3 bit makes the first flooding iteration
        # pass through a wrong codeword (which the zero-syndrome stop
        # returns); without the stop the message fixed point is the ML
        # codeword
        G = hamming_graph()
        received = np.zeros(7, dtype=np.uint8)
        received[6] = 1
        out = bp_decode(G, received, 0.05, max_iters=50)
        assert out.status == CONVERGED
        assert np.array_equal(out.final_word,
                              np.array([0, 0, 1, 0, 1, 1, 0], dtype=np.uint8))
        llrs = bp_posteriors(G, received, 0.05, n_iters=30)
        assert (llrs > 0).all()  # fixed point decodes to all-zeros (= ML)

    def test_iteration_limit_status(self):
        # an unsatisfiable pattern on a graph with a degree-0 kernel:
        # force it by flipping half the bits at high channel noise
        G = stopping_set_graph()
        received = np.array([1, 1, 1], dtype=np.uint8)
        out = bp_decode(G, received, 0.49, max_iters=3)
        assert out.status in (CONVERGED, ITERATION_LIMIT)

    def test_channel_llr_validation(self):
        with pytest.raises(ValueError):
            channel_llr(0.6)

    def test_tree_posteriors_exact(self):
        # path code: checks {i, i+1}, a tree, so sum-product is exact
        n = 5
        bits = np.repeat(np.arange(n), 2)[1:-1]
        checks = np.repeat(np.arange(n - 1), 2)
        G = TannerGraph(n, n - 1, bits, checks)
        rng = np.random.default_rng(3)
        p = 0.12
        received = rng.integers(0, 2, size=n).astype(np.uint8)
        llrs = bp_posteriors(G, received, p, n_iters=n)
        # brute-force posterior over codewords
        H = G.to_parity_check_matrix("parity").to_dense()
        priors = np.where(received == 1, 1 - p, p)  # P(x_i = 1 | r_i) factor
        marg1 = np.zeros(n)
        total = 0.0
        for x in range(1 << n):
            word = np.array([(x >> i) & 1 for i in range(n)])
            if ((H @ word) % 2).any():
                continue
            w = np.prod(np.where(word == 1, priors, 1 - priors))
            total += w
            marg1 += w * word
        marg1 /= total
        got = 1.0 / (1.0 + np.exp(llrs))  # P(x_i = 1) from the LLR
        assert np.allclose(got, marg1, atol=1e-9)


class TestTrials:
    def test_zero_noise_zero_failures(self):
        p = DiffusionParams(n=22, m=18, wbit=9, wcheck=11, T=2.0, seed=1)
        dg = DecoderGraph(build_diffusion_code(p))
        assert decode_trials(dg, "flip", 1e-9, 100, seed=0) == 0

    def test_reproducible(self):
        p = DiffusionParams(n=22, m=18, wbit=9, wcheck=11, T=2.0, seed=1)
        dg = DecoderGraph(build_diffusion_code(p))
        a = decode_trials(dg, "flip", 0.05, 200, seed=42)
        b = decode_trials(dg, "flip", 0.05, 200, seed=42)
        assert a == b

    def test_far_above_threshold_fails(self):
        p = DiffusionParams(n=110, m=90, wbit=9, wcheck=11, T=5.0, seed=2)
        dg = DecoderGraph(build_diffusion_code(p))
        failures = decode_trials(dg, "flip", 0.2, 50, seed=1)
        assert failures >= 45

    def test_wrong_codeword_counts_as_failure(self):
        # two bits fully sharing two checks: word 11 is a nonzero codeword
        G = TannerGraph(2, 2, np.array([0, 1, 0, 1]), np.array([0, 0, 1, 1]))
        dg = DecoderGraph(G)
        # with p close to 1/2 some trials land on 11, which decodes as a
        # (wrong) codeword; those must be failures
        failures = decode_trials(dg, "flip", 0.45, 400, seed=3)
        word_11_rate = 0.45 ** 2  # ~20% of trials
        assert failures >= 400 * word_11_rate * 0.5
