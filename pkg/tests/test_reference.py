import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpdecode.codes import gallager_regular, hamming74, tanner155
from lpdecode.decoders import is_codeword
from lpdecode.gf2 import BinaryMatrix
from lpdecode.reference import BpConfig, bp_decode, bp_posteriors, codewords, ml_decode


def all_words(n):
    return ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def test_codebook_by_brute_force():
    H = hamming74()
    W = all_words(7)
    expected = W[~((W.astype(int) @ H.bits.T.astype(int)) % 2).any(axis=1)]
    expected = sorted(map(tuple, expected.tolist()))
    assert sorted(map(tuple, codewords(H).tolist())) == expected
    assert [tuple(r) for r in codewords(H).tolist()] == expected  # lexicographic order


def test_ml_examples():
    H = hamming74()
    bits, cost = ml_decode(np.ones(7), H)
    assert not bits.any() and cost == 0.0
    gamma = np.array([-1.0, 1, 1, 1, 1, 1, 1])
    bits, cost = ml_decode(gamma, H)
    costs = codewords(H) @ gamma
    assert cost == costs.min() and float(gamma @ bits) == cost


def test_ml_tie_goes_to_smallest_word():
    H = hamming74()
    bits, cost = ml_decode(np.zeros(7), H)
    assert not bits.any() and cost == 0.0


def test_ml_guard():
    with pytest.raises(ValueError):
        ml_decode(np.ones(155), tanner155())


@given(st.lists(st.floats(-5, 5), min_size=7, max_size=7))
def test_ml_is_optimal(g):
    H = hamming74()
    gamma = np.array(g)
    bits, cost = ml_decode(gamma, H)
    assert is_codeword(bits, H)
    assert cost <= (codewords(H) @ gamma).min() + 1e-12


def test_bp_config():
    with pytest.raises(ValueError):
        BpConfig(max_iterations=0)
    with pytest.raises(ValueError):
        BpConfig(clamp=0)


def test_bp_noiseless():
    H = tanner155()
    r = bp_decode(np.full(H.n, 4.0), H)
    assert r.converged and r.iterations <= 1 and not r.bits.any()


def test_bp_zero_llr_decides_zero():
    H = hamming74()
    r = bp_decode(np.zeros(7), H, BpConfig(1))
    assert r.converged and not r.bits.any() and r.iterations == 0


def bitwise_map(gamma, H):
    W = codewords(H).astype(float)
    costs = W @ gamma
    w = np.exp(-(costs - costs.min()))
    p1 = (w[:, None] * W).sum(0) / w.sum()
    return np.log((1 - p1) / p1)


def test_bp_on_tree_is_exact():
    """On a cycle-free graph BP computes exact bitwise posteriors after diameter-many rounds."""
    trees = [
        BinaryMatrix([[1, 1, 1, 0, 0], [0, 0, 1, 1, 1]]),
        BinaryMatrix([[1, 1, 0, 0, 0, 0, 0], [0, 1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1, 0], [0, 0, 0, 0, 0, 1, 1]]),
    ]
    rng = np.random.default_rng(3)
    for H in trees:
        for _ in range(300):
            gamma = rng.normal(0, 2, H.n)
            post = bp_posteriors(gamma, H, 2 * H.m)
            assert np.allclose(post, bitwise_map(gamma, H), atol=1e-8)


def test_bp_tree_hard_decision_agrees_with_ml_when_confident():
    # bitwise MAP and block ML can differ; on a tree they coincide when BP converges to a codeword
    H = BinaryMatrix([[1, 1, 1, 0, 0], [0, 0, 1, 1, 1]])
    rng = np.random.default_rng(4)
    agree = total = 0
    for _ in range(500):
        gamma = rng.normal(1.5, 1.5, 5)
        r = bp_decode(gamma, H, BpConfig(10))
        if r.converged:
            total += 1
            agree += float(gamma @ r.bits) == pytest.approx(ml_decode(gamma, H)[1])
    assert total > 400 and agree / total > 0.97


def test_bp_early_stop_gives_codeword():
    H = gallager_regular(20, 3, 4, seed=20)
    rng = np.random.default_rng(9)
    for _ in range(200):
        r = bp_decode(2 * (1 + rng.normal(0, 0.8, H.n)) / 0.64, H, BpConfig(50))
        if r.converged:
            assert is_codeword(r.bits, H)


def test_bp_symmetry():
    """Flipping the LLRs of a code containing the all-one word flips the decision."""
    H = hamming74()  # contains 1111111
    assert any(c.all() for c in codewords(H))
    rng = np.random.default_rng(1)
    for _ in range(200):
        gamma = rng.normal(1.0, 1.0, 7)
        a = bp_decode(gamma, H, BpConfig(20))
        b = bp_decode(-gamma, H, BpConfig(20))
        assert a.converged == b.converged and a.iterations == b.iterations
        if a.converged:
            assert np.array_equal(a.bits ^ 1, b.bits)
