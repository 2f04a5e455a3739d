import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from permgen.asymptotics import B
from permgen.partitions import (PartitionTail, class_parity_probability, hardy_ramanujan, iter_partitions,
                                partition_count, sample_uniform_partition, tail_probability_exact,
                                tail_probability_limit, tail_thresholds)
from permgen.perm import CycleType

from .oracles import partitions_dp, partitions_list


class TestCount:
    def test_examples(self):
        assert partition_count(0) == 1
        assert partition_count(1) == 1
        assert partition_count(10) == 42 == len(partitions_list(10))
        assert partition_count(100) == 190569292

    def test_against_dp(self):
        for n in range(201):
            assert partition_count(n) == partitions_dp(n)

    def test_negative(self):
        assert partition_count(-3) == 0

    @pytest.mark.parametrize("n", [1, 5, 12, 20])
    def test_iter_partitions(self, n):
        got = list(iter_partitions(n))
        assert len(got) == len(set(got)) == partition_count(n)
        assert {tuple(sorted(ct.lengths(), reverse=True)) for ct in got} == set(partitions_list(n))


class TestHardyRamanujan:
    def test_ratio_100(self):
        assert 1.0 <= hardy_ramanujan(100) / partition_count(100) <= 1.1

    def test_ratio_10000(self):
        assert 1.0 <= hardy_ramanujan(10_000) / partition_count(10_000) <= 1.01

    def test_domain(self):
        with pytest.raises(ValueError):
            hardy_ramanujan(0)


class TestSampler:
    def test_n_one(self):
        rng = np.random.default_rng(0)
        assert all(sample_uniform_partition(1, rng) == CycleType({1: 1}) for _ in range(10))

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_chi_square(self, n):
        rng = np.random.default_rng(n)
        freq = Counter(sample_uniform_partition(n, rng) for _ in range(100_000))
        assert len(freq) == partition_count(n)
        assert chisquare(list(freq.values())).pvalue > 0.001

    @pytest.mark.parametrize("n, small, head", [(12, 1, 3), (15, 2, 4), (30, 3, 8)])
    def test_chi_square_all_stages(self, n, small, head):
        # small parts, dense proposals and thinned proposals all in play
        rng = np.random.default_rng(100 + n)
        draws = 25_000 if n < 30 else 50_000
        freq = Counter(sample_uniform_partition(n, rng, small_parts=small, head=head) for _ in range(draws))
        if n < 30:
            assert len(freq) == partition_count(n)
            assert chisquare(list(freq.values())).pvalue > 0.001
        else:
            # p(30) = 5604 cells is too many for the draws; check the law of the largest part
            largest = Counter(max(ct.lengths()) for ct in freq.elements())
            counts = Counter(max(p) for p in partitions_list(n))
            observed = [largest[m] for m in sorted(counts)]
            expected = [draws * counts[m] / partition_count(n) for m in sorted(counts)]
            assert chisquare(observed, expected).pvalue > 0.001

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3000), st.integers(0, 2**32))
    def test_degree(self, n, seed):
        assert sample_uniform_partition(n, np.random.default_rng(seed)).n == n

    def test_degree_1000(self):
        rng = np.random.default_rng(9)
        assert all(sample_uniform_partition(1000, rng).n == 1000 for _ in range(200))

    def test_two_cycles_small(self):
        rng = np.random.default_rng(10)
        n = 10_000
        big = sum(2 * sample_uniform_partition(n, rng)[2] / n > 0.05 for _ in range(2000))
        assert big / 2000 < 0.01


class TestTail:
    def test_limit_examples(self):
        assert tail_probability_limit(PartitionTail(0, 0)) == 1
        assert tail_probability_limit(PartitionTail(1, 0)) == pytest.approx(math.exp(-B), rel=1e-15)
        assert tail_probability_limit(PartitionTail(0, 1)) == pytest.approx(math.exp(-2 * B), rel=1e-15)
        # quoted values, good to the fifth decimal
        assert tail_probability_limit(PartitionTail(1, 0)) == pytest.approx(0.277338, abs=1e-5)
        assert tail_probability_limit(PartitionTail(0, 1)) == pytest.approx(0.076916, abs=1e-5)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            PartitionTail(-1, 0)

    def test_thresholds(self):
        assert tail_thresholds(100, PartitionTail(1, 0.5)) == (10, 5)
        assert tail_thresholds(10, PartitionTail(1, 0)) == (4, 0)

    @pytest.mark.parametrize("n", [10, 17, 25])
    def test_exact_against_enumeration(self, n):
        t = PartitionTail(0.7, 0.4)
        a, b = tail_thresholds(n, t)
        hits = sum(ct[1] >= a and ct[2] >= b for ct in iter_partitions(n))
        assert tail_probability_exact(n, t) == Fraction(hits, partition_count(n))

    def test_exact_approaches_limit(self):
        t = PartitionTail(1, 0.5)
        gaps = [abs(float(tail_probability_exact(n, t)) - tail_probability_limit(t)) for n in (100, 1000, 10_000)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.01

    def test_empirical_moderate_n(self):
        n, draws = 2500, 20_000
        rng = np.random.default_rng(12)
        samples = [sample_uniform_partition(n, rng) for _ in range(draws)]
        for x, y in [(0.5, 0), (1, 0), (0, 0.5), (1, 0.5)]:
            t = PartitionTail(x, y)
            a, b = tail_thresholds(n, t)
            est = sum(ct[1] >= a and ct[2] >= b for ct in samples) / draws
            exact = float(tail_probability_exact(n, t))
            sigma = math.sqrt(exact * (1 - exact) / draws)
            assert abs(est - exact) <= 4 * sigma


class TestParity:
    def test_small(self):
        assert class_parity_probability(2) == 0.5
        assert class_parity_probability(3) == pytest.approx(2 / 3)

    def test_exact_matches_enumeration(self):
        evens = sum(ct.is_even for ct in iter_partitions(15))
        assert class_parity_probability(15) == evens / partition_count(15)

    def test_sampled_near_half(self):
        est = class_parity_probability(1000, samples=20_000, rng=np.random.default_rng(13))
        assert est == pytest.approx(0.5, abs=0.015)

    def test_domain(self):
        with pytest.raises(ValueError):
            class_parity_probability(1)
