import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbsiso.correlations import (
    correlation_tensor,
    cumulant,
    fock_oracle_cumulant,
    pattern_probability,
    wick_moment,
)
from gbsiso.encoding import EncodedSampler, encode, moments_direct, moments_from_sampler, rescale, takagi
from gbsiso.errors import GuardError, OracleInconclusive
from gbsiso.graph import apply_permutation, generate


def single_mode(r):
    enc = EncodedSampler(np.eye(1, dtype=complex), np.array([r]), 1.0, np.array([math.tanh(r)]))
    return enc, moments_from_sampler(enc)


def double_sum_pair_cumulant(u, r, x, y):
    """Two-mode output correlator summed term by term over input modes a, b."""
    n = np.sinh(r) ** 2
    eps = np.sinh(2 * r) / 2
    m = len(r)
    total = 0.0
    for a in range(m):
        for b in range(m):
            total += n[a] * (n[b] + 1) * np.conj(u[x, a]) * u[y, a] * u[x, b] * np.conj(u[y, b])
            total += eps[a] * eps[b] * np.conj(u[x, a]) * np.conj(u[y, a]) * u[x, b] * u[y, b]
    return total


def random_encoding(rng, m, alpha=0.9):
    a = rng.normal(size=(m, m))
    return takagi(rescale((a + a.T) / 2, alpha)[0])


class TestWick:
    def test_first_order_is_occupation(self):
        mom = moments_direct(rescale(generate("path", 4).adjacency)[0])
        for x in range(4):
            assert wick_moment(mom, (x,)) == pytest.approx(mom.n[x, x], rel=1e-14)

    def test_single_mode_second_moment(self):
        r = 0.4
        _, mom = single_mode(r)
        n, e = math.sinh(r) ** 2, math.sinh(2 * r) / 2
        assert wick_moment(mom, (0, 0)) == pytest.approx(n * (n + 1) + n * n + e * e, rel=1e-13)

    def test_vacuum(self):
        mom = moments_direct(np.zeros((3, 3)))
        for t in [(0,), (0, 1), (2, 2, 1), (0, 1, 2, 2)]:
            assert wick_moment(mom, t) == 0

    def test_guard(self):
        _, mom = single_mode(0.1)
        with pytest.raises(GuardError):
            wick_moment(mom, (0,) * 7)


class TestCumulant:
    def test_second_order_is_covariance(self):
        mom = moments_direct(rescale(generate("cycle", 5).adjacency)[0])
        for x, y in [(0, 1), (0, 2), (3, 3)]:
            cov = wick_moment(mom, (x, y)) - wick_moment(mom, (x,)) * wick_moment(mom, (y,))
            assert cumulant(mom, (x, y)) == pytest.approx(cov, rel=1e-12)

    def test_single_mode_variance(self):
        r = 0.55
        _, mom = single_mode(r)
        assert cumulant(mom, (0, 0)) == pytest.approx(math.sinh(2 * r) ** 2 / 2, rel=1e-13)
        assert cumulant(mom, (0, 0)) == pytest.approx(2 * math.sinh(r) ** 2 * math.cosh(r) ** 2, rel=1e-13)

    def test_third_order_expansion(self):
        mom = moments_direct(rescale(generate("star", 4).adjacency, 0.7)[0])
        x, y, z = 0, 1, 3
        m = lambda *t: wick_moment(mom, t)
        expected = m(x, y, z) - m(x, y) * m(z) - m(x, z) * m(y) - m(y, z) * m(x) + 2 * m(x) * m(y) * m(z)
        assert cumulant(mom, (x, y, z)) == pytest.approx(expected, rel=1e-12)

    def test_matches_double_sum(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            m = int(rng.integers(1, 7))
            enc = random_encoding(rng, m)
            mom = moments_from_sampler(enc)
            for x, y in itertools.product(range(m), repeat=2):
                ref = double_sum_pair_cumulant(enc.unitary, enc.squeezing, x, y)
                assert abs(ref.imag) < 1e-10
                assert cumulant(mom, (x, y)) == pytest.approx(ref.real, abs=1e-9)


class TestTensor:
    def test_vertex_transitive_first_order(self):
        mom = moments_direct(rescale(generate("complete", 3).adjacency)[0])
        t = correlation_tensor(mom, 1).values
        assert np.ptp(t) < 1e-14

    def test_path_first_order(self):
        mom = moments_direct(rescale(generate("path", 3).adjacency)[0])
        v = correlation_tensor(mom, 1).values
        assert v[0] == pytest.approx(v[2], rel=1e-13)
        assert abs(v[0] - v[1]) > 1e-3

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_index_symmetry(self, m, k, seed):
        rng = np.random.default_rng(seed)
        t = correlation_tensor(moments_from_sampler(random_encoding(rng, m)), k).values
        for _ in range(10):
            idx = tuple(rng.integers(0, m, size=k))
            for p in itertools.permutations(idx):
                assert t[p] == t[idx]

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_permutation_covariance(self, k):
        rng = np.random.default_rng(k)
        g = generate("erdos_renyi", 6, 3, p=0.5).adjacency
        perm = rng.permutation(6)
        at = rescale(g)[0]
        t = correlation_tensor(moments_direct(at), k).values
        moved = correlation_tensor(moments_direct(apply_permutation(at, perm)), k).values
        inv = np.argsort(perm)
        np.testing.assert_allclose(moved[np.ix_(*[perm] * k)], t, atol=1e-10)
        np.testing.assert_allclose(moved, t[np.ix_(*[inv] * k)], atol=1e-10)

    def test_entry_guard(self):
        mom = moments_direct(rescale(generate("path", 12).adjacency)[0])
        with pytest.raises(GuardError):
            correlation_tensor(mom, 3, max_entries=1000)


class TestFockOracle:
    def test_single_mode_occupation(self):
        enc, _ = single_mode(0.3)
        value, tail = fock_oracle_cumulant(enc, (0,))
        assert value == pytest.approx(math.sinh(0.3) ** 2, abs=1e-10)
        assert value == pytest.approx(0.0927326, abs=1e-7)
        assert tail <= 1e-8

    def test_vacuum(self):
        enc = takagi(np.zeros((2, 2)))
        for t in [(0,), (0, 1), (1, 1, 0), (0, 0, 1, 1)]:
            assert fock_oracle_cumulant(enc, t)[0] == 0

    def test_edge_cross_cumulant(self):
        enc = encode(generate("path", 2).adjacency, 0.6)
        mom = moments_from_sampler(enc)
        value, _ = fock_oracle_cumulant(enc, (0, 1))
        assert value == pytest.approx(cumulant(mom, (0, 1)), abs=1e-7)

    def test_small_cutoff_is_inconclusive(self):
        enc, _ = single_mode(0.8)
        with pytest.raises(OracleInconclusive):
            fock_oracle_cumulant(enc, (0,), cutoff=6)

    def test_mode_guard(self):
        with pytest.raises(GuardError):
            fock_oracle_cumulant(takagi(np.zeros((4, 4))), (0,), cutoff=4)


class TestPatternProbability:
    def test_vacuum_probability(self):
        enc = encode(generate("cycle", 5).adjacency, 0.8)
        p0 = pattern_probability(enc, [0] * 5)
        assert p0 == pytest.approx(np.prod(1 / np.cosh(enc.squeezing)), rel=1e-12)

    def test_two_mode_squeezed_pair(self):
        # the single-edge encoding is a two-mode squeezed vacuum with tanh r = c
        c = 0.6
        enc = encode(generate("path", 2).adjacency, c)
        assert pattern_probability(enc, [1, 1]) == pytest.approx(c**2 * (1 - c**2), rel=1e-12)
        assert pattern_probability(enc, [1, 0]) == 0

    def test_relabeling_invariance(self):
        g = generate("erdos_renyi", 6, 8, p=0.5).adjacency
        perm = np.random.default_rng(0).permutation(6)
        c = 0.8 / np.max(np.abs(np.linalg.eigvalsh(g)))
        e1 = encode(g, scale=c)
        e2 = encode(apply_permutation(g, perm), scale=c)
        pattern = np.array([1, 1, 0, 1, 1, 0])
        moved = np.empty_like(pattern)
        moved[perm] = pattern
        assert pattern_probability(e2, moved) == pytest.approx(pattern_probability(e1, pattern), rel=1e-10)

    def test_collision_free_mass_at_most_one(self):
        enc = encode(generate("cycle", 6).adjacency, 0.7)
        total = sum(pattern_probability(enc, p) for p in itertools.product((0, 1), repeat=6))
        assert 0 < total <= 1

    def test_collisions_unsupported(self):
        with pytest.raises(ValueError):
            pattern_probability(encode(generate("path", 2).adjacency), [2, 0])
