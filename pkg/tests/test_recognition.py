from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permgen.errors import BudgetError, DegenerateDegreeError
from permgen.partitions import sample_uniform_partition
from permgen.perm import Permutation, orbits, parity, sample_with_cycle_type
from permgen.recognition import (GroupClass, classify, contains_alternating, group_order, has_jordan_cycle,
                                 is_primitive, is_transitive, recognize_alternating, schreier_sims)

from .oracles import closure_order


def cyc(n, *cycles):
    return Permutation.from_cycles(n, *cycles)


S5 = [cyc(5, (0, 1)), cyc(5, (0, 1, 2, 3, 4))]
A5 = [cyc(5, (0, 1, 2)), cyc(5, (2, 3, 4))]
KLEIN = [cyc(4, (0, 1), (2, 3)), cyc(4, (0, 2), (1, 3))]

small_gens = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.permutations(list(range(n))), min_size=1, max_size=3).map(lambda g: (n, g)))


def closure(gens, n):
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = tuple(s[i] for i in g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def has_block_through_zero(gens, n):
    elements = closure(gens, n)
    for size in range(2, n):
        if n % size:
            continue
        for rest in combinations(range(1, n), size - 1):
            block = frozenset((0,) + rest)
            if all(frozenset(g[i] for i in block) in (block,) or not frozenset(g[i] for i in block) & block
                   for g in elements):
                return True
    return False


class TestTransitivity:
    def test_examples(self):
        assert is_transitive([cyc(5, (0, 1, 2, 3, 4))], 5)
        assert not is_transitive([cyc(4, (0, 1), (2, 3))], 4)
        assert not is_transitive([cyc(4, (0, 1)), cyc(4, (2, 3))], 4)

    @settings(max_examples=200)
    @given(small_gens)
    def test_matches_short_orbit_count(self, data):
        n, gens = data
        perms = [Permutation(g) for g in gens]
        assert is_transitive(perms, n) == (orbits(perms, n).short_orbit_count() == 0)


class TestOrder:
    def test_examples(self):
        assert group_order(S5) == 120
        assert group_order(A5) == 60
        assert group_order([], 5) == 1
        assert group_order(KLEIN) == 4

    def test_random_against_closure(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            n = int(rng.integers(2, 8))
            gens = [rng.permutation(n) for _ in range(int(rng.integers(1, 3)))]
            assert group_order(gens, n) == closure_order(gens, n)

    @settings(max_examples=150, deadline=None)
    @given(small_gens)
    def test_property_against_closure(self, data):
        n, gens = data
        assert group_order([np.array(g) for g in gens], n) == closure_order(gens, n)

    @pytest.mark.parametrize("n", [10, 33, 64])
    def test_symmetric_and_alternating(self, n):
        from math import factorial
        long = cyc(n, tuple(range(n)))
        assert group_order([cyc(n, (0, 1)), long]) == factorial(n)
        three = [cyc(n, (i, i + 1, i + 2)) for i in range(n - 2)]
        assert group_order(three) == factorial(n) // 2

    def test_wreath_product(self):
        # S_4 wr S_2 on 8 points has order 2 * 24^2
        gens = [cyc(8, (0, 1)), cyc(8, (0, 1, 2, 3)), cyc(8, (0, 4), (1, 5), (2, 6), (3, 7))]
        assert group_order(gens) == 2 * 24 * 24

    def test_chain_membership(self):
        chain = schreier_sims(A5)
        assert chain.complete
        assert chain.contains(cyc(5, (0, 1, 2)))
        assert not chain.contains(cyc(5, (0, 1)))
        for level in range(len(chain.levels)):
            base = chain.base[level]
            for x, u in chain.transversal(level).items():
                assert u(base) == x

    def test_partial_chain_is_lower_bound(self):
        chain = schreier_sims(S5, stop_order=10)
        assert chain.order_lower_bound() >= 10
        assert 120 % chain.order_lower_bound() == 0


class TestPrimitivity:
    @settings(max_examples=80, deadline=None)
    @given(st.integers(2, 6).flatmap(
        lambda n: st.lists(st.permutations(list(range(n))), min_size=1, max_size=2).map(lambda g: (n, g))))
    def test_against_block_enumeration(self, data):
        n, gens = data
        perms = [Permutation(g) for g in gens]
        if not is_transitive(perms, n):
            return
        assert is_primitive(perms, n) == (not has_block_through_zero(gens, n))

    def test_examples(self):
        assert is_primitive(S5)
        assert not is_primitive([cyc(6, (0, 1, 2, 3, 4, 5))])
        assert is_primitive([cyc(7, (0, 1, 2, 3, 4, 5, 6))])


class TestRecognition:
    def test_contains_alternating_examples(self):
        assert contains_alternating(S5)
        assert not contains_alternating(KLEIN)
        assert contains_alternating(A5)

    def test_classify_examples(self):
        assert classify([cyc(5, (0, 1, 2, 3, 4))]) is GroupClass.TRANSITIVE_PROPER
        assert classify(S5) is GroupClass.SYMMETRIC
        assert classify(A5) is GroupClass.ALTERNATING
        assert classify([cyc(5, (0, 1))]) is GroupClass.INTRANSITIVE

    def test_degenerate_degree(self):
        with pytest.raises(DegenerateDegreeError):
            classify([cyc(2, (0, 1))])

    def test_jordan_cycle(self):
        # n = 20: primes in (10, 17] are 11, 13, 17
        assert has_jordan_cycle(cyc(20, tuple(range(13))).images.tolist())
        assert not has_jordan_cycle(cyc(20, tuple(range(19))).images.tolist())
        assert not has_jordan_cycle(cyc(20, tuple(range(7))).images.tolist())

    def test_budget(self):
        n = 40
        # imprimitive and without Jordan witnesses: exact route needed
        gens = [cyc(n, *[(2 * i, 2 * i + 1) for i in range(20)]),
                cyc(n, tuple(range(0, n, 2)), tuple(range(1, n, 2)))]
        assert recognize_alternating(gens, n, max_exact_degree=10) is None
        with pytest.raises(BudgetError):
            contains_alternating(gens, n, max_exact_degree=10)
        assert recognize_alternating(gens, n) is False

    @settings(max_examples=100, deadline=None)
    @given(st.integers(3, 9).flatmap(
        lambda n: st.lists(st.permutations(list(range(n))), min_size=1, max_size=2).map(lambda g: (n, g))))
    def test_classify_parity_consistency(self, data):
        n, gens = data
        perms = [Permutation(g) for g in gens]
        tag = classify(perms, n)
        odd = any(parity(p) == "odd" for p in perms)
        if tag is GroupClass.SYMMETRIC:
            assert odd
        if tag is GroupClass.ALTERNATING:
            assert not odd
        from math import factorial
        order = closure_order(gens, n) if n <= 7 else None
        if order is not None:
            assert (tag in (GroupClass.ALTERNATING, GroupClass.SYMMETRIC)) == (order >= factorial(n) // 2)


def _random_pair(rng, primes):
    kind = int(rng.integers(4))
    n = int(rng.integers(8, 65))
    if kind == 0:
        return [rng.permutation(n), rng.permutation(n)], n
    if kind == 1:
        return [sample_with_cycle_type(sample_uniform_partition(n, rng), rng).images for _ in range(2)], n
    if kind == 2:
        m = n // 2

        def swap_halves():
            img = np.arange(n)
            a, b = rng.permutation(m), rng.permutation(m)
            flip = m if rng.integers(2) else 0
            img[:m] = a + flip
            img[m:2 * m] = b + (m - flip)
            return img
        return [swap_halves(), swap_halves()], n
    p = int(rng.choice(primes))
    return [(int(rng.integers(1, p)) * np.arange(p) + int(rng.integers(p))) % p for _ in range(2)], p


@pytest.mark.slow
def test_fast_path_matches_exact():
    """Jordan shortcut never changes the answer (10^4 pairs, n in 8..64)."""
    rng = np.random.default_rng(2024)
    primes = [p for p in range(8, 65) if all(p % q for q in range(2, p))]
    outcomes = set()
    for _ in range(10_000):
        gens, n = _random_pair(rng, primes)
        fast = recognize_alternating(gens, n, fast=True)
        exact = recognize_alternating(gens, n, fast=False)
        assert fast == exact, (n, [g.tolist() for g in gens])
        outcomes.add(exact)
    assert outcomes == {True, False}
