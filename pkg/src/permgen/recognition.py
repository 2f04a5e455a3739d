"""Transitivity, group order and recognition of A_n / S_n.

The exact route is a Schreier-Sims stabilizer chain.  Strong generators are
first collected from random group elements, then the chain is completed by
sifting every Schreier generator, so the result never depends on luck.  The
product of the fundamental orbit sizes of a partial chain is a lower bound
on the group order; construction stops as soon as that bound meets a known
upper bound, which is what keeps ``S_n`` and ``A_n`` cheap to certify.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import BudgetError, DegenerateDegreeError, DegreeMismatchError
from .perm import Permutation, _index_dtype, orbits

__all__ = [
    "GroupClass",
    "StabilizerChain",
    "schreier_sims",
    "is_transitive",
    "group_order",
    "contains_alternating",
    "recognize_alternating",
    "classify",
    "has_jordan_cycle",
    "is_primitive",
    "MAX_EXACT_DEGREE",
]

MAX_EXACT_DEGREE = 512
WITNESS_TRIALS = 300


class GroupClass(enum.Enum):
    INTRANSITIVE = "intransitive"
    TRANSITIVE_PROPER = "transitive_proper"
    ALTERNATING = "alternating"
    SYMMETRIC = "symmetric"


def _arrays(gens: Sequence[Permutation | np.ndarray], n: int | None) -> tuple[list[np.ndarray], int]:
    arrs = [np.asarray(g.images if isinstance(g, Permutation) else g) for g in gens]
    if n is None:
        if not arrs:
            raise ValueError("degree is required for an empty generator list")
        n = arrs[0].size
    for a in arrs:
        if a.size != n:
            raise DegreeMismatchError(f"generator of degree {a.size} in a group of degree {n}")
    dt = _index_dtype(n)
    return [a.astype(dt, copy=False) for a in arrs], n


class _Level:
    __slots__ = ("base", "orbit", "in_orbit", "uinv")

    def __init__(self, base: int, n: int, ident: np.ndarray):
        self.base = base
        self.orbit = [base]
        self.in_orbit = np.zeros(n, dtype=bool)
        self.in_orbit[base] = True
        # uinv[x] maps x back to the base point
        self.uinv = {base: ident}


class StabilizerChain:
    """Base, strong generators and inverse transversals of a permutation group."""

    def __init__(self, n: int):
        self.n = n
        self.ident = np.arange(n, dtype=_index_dtype(n))
        self.levels: list[_Level] = []
        self.gens: list[np.ndarray] = []
        self.gen_inv: list[np.ndarray] = []
        # index of the first base point moved by each strong generator
        self.gen_depth: list[int] = []
        self.complete = False

    @property
    def base(self) -> list[int]:
        return [lev.base for lev in self.levels]

    @property
    def fundamental_orbit_sizes(self) -> list[int]:
        return [len(lev.orbit) for lev in self.levels]

    def order_lower_bound(self) -> int:
        return math.prod(self.fundamental_orbit_sizes)

    @property
    def order(self) -> int:
        if not self.complete:
            raise RuntimeError("chain construction stopped early; order is only a lower bound")
        return self.order_lower_bound()

    def transversal(self, level: int) -> dict[int, Permutation]:
        """Coset representatives ``u`` with ``u(base) = x`` at one level."""
        out = {}
        for x, uinv in self.levels[level].uinv.items():
            u = np.empty(self.n, dtype=np.int64)
            u[uinv] = np.arange(self.n)
            out[x] = Permutation(u, check=False)
        return out

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        for i in range(start, len(self.levels)):
            lev = self.levels[i]
            x = g[lev.base]
            if not lev.in_orbit[x]:
                return g, i
            g = lev.uinv[x][g]
        return g, len(self.levels)

    def contains(self, p: Permutation) -> bool:
        g = p.images.astype(self.ident.dtype)
        h, _ = self.sift(g)
        return bool(np.array_equal(h, self.ident))

    def is_identity(self, g: np.ndarray) -> bool:
        return bool(np.array_equal(g, self.ident))

    def insert(self, h: np.ndarray, depth: int) -> None:
        """Add a sift residue that fixes the first ``depth`` base points."""
        if depth == len(self.levels):
            moved = np.flatnonzero(h != self.ident)
            self.levels.append(_Level(int(moved[0]), self.n, self.ident))
        hinv = np.empty_like(h)
        hinv[h] = self.ident
        self.gens.append(h)
        self.gen_inv.append(hinv)
        self.gen_depth.append(depth)
        gi = len(self.gens) - 1
        for i in range(depth + 1):
            self._extend(i, gi)

    def _level_gens(self, i: int) -> list[int]:
        return [gi for gi, d in enumerate(self.gen_depth) if d >= i]

    def _extend(self, i: int, new_gi: int) -> None:
        lev = self.levels[i]
        if len(lev.orbit) == self.n - i:
            # the orbit already holds every point not fixed by the stabilizer
            return
        s, sinv = self.gens[new_gi], self.gen_inv[new_gi]
        pts = np.fromiter(lev.orbit, dtype=np.int64, count=len(lev.orbit))
        images = s[pts]
        fresh = np.flatnonzero(~lev.in_orbit[images])
        queue = []
        for idx in fresh.tolist():
            y, z = int(pts[idx]), int(images[idx])
            lev.in_orbit[z] = True
            lev.orbit.append(z)
            lev.uinv[z] = lev.uinv[y][sinv]
            queue.append(z)
        if not queue:
            return
        gens = self._level_gens(i)
        while queue:
            y = queue.pop()
            uy = lev.uinv[y]
            for gi in gens:
                z = int(self.gens[gi][y])
                if not lev.in_orbit[z]:
                    lev.in_orbit[z] = True
                    lev.orbit.append(z)
                    lev.uinv[z] = uy[self.gen_inv[gi]]
                    queue.append(z)


class _ProductReplacement:
    """Random group elements by the product replacement walk."""

    def __init__(self, gens: list[np.ndarray], rng: np.random.Generator, slots: int = 10, warmup: int = 40):
        self.rng = rng
        self.state = [gens[i % len(gens)] for i in range(max(slots, len(gens)))]
        self.acc = gens[0]
        for _ in range(warmup):
            self.next()

    def next(self) -> np.ndarray:
        r = len(self.state)
        i, j, side = self.rng.integers((r, r - 1, 2)).tolist()
        j += j >= i
        if side:
            self.state[i] = self.state[i][self.state[j]]
        else:
            self.state[i] = self.state[j][self.state[i]]
        self.acc = self.acc[self.state[i]]
        return self.acc


def _upper_bound(gens: list[np.ndarray], n: int) -> int:
    full = math.factorial(n)
    if all(_array_is_even(g) for g in gens):
        return full // 2 if n >= 2 else full
    return full


def _array_is_even(g: np.ndarray) -> bool:
    img = g.tolist()
    n = len(img)
    seen = bytearray(n)
    cycles = 0
    for s in range(n):
        if not seen[s]:
            cycles += 1
            x = s
            while not seen[x]:
                seen[x] = 1
                x = img[x]
    return (n - cycles) % 2 == 0


def schreier_sims(gens: Sequence[Permutation | np.ndarray], n: int | None = None, *,
                  stop_order: int | None = None, seed: int = 0,
                  quiet_rounds: int = 30, verify: bool = True) -> StabilizerChain:
    """Stabilizer chain of ``<gens>``.

    With ``stop_order`` set, construction may stop once the order lower bound
    reaches it; ``chain.complete`` then tells whether the chain is exact.
    Base points are the smallest point moved by each new residue.  With
    ``verify=False`` only the random phase runs and the chain may be partial.
    """
    arrs, n = _arrays(gens, n)
    chain = StabilizerChain(n)
    arrs = [a for a in arrs if not chain.is_identity(a)]
    if not arrs:
        chain.complete = True
        return chain
    upper = _upper_bound(arrs, n)
    target = upper if stop_order is None else min(stop_order, upper)

    def done() -> bool:
        lb = chain.order_lower_bound()
        if lb == upper:
            chain.complete = True
        return lb >= target

    for a in arrs:
        h, j = chain.sift(a)
        if not chain.is_identity(h):
            chain.insert(h, j)
    if done():
        return chain

    # random phase: cheap growth of the chain
    walk = _ProductReplacement(arrs, np.random.default_rng(seed))
    quiet = 0
    while quiet < quiet_rounds:
        h, j = chain.sift(walk.next())
        if chain.is_identity(h):
            quiet += 1
            continue
        quiet = 0
        chain.insert(h, j)
        if done():
            return chain
    if not verify:
        return chain

    # deterministic completion: every Schreier generator must sift to 1
    verified: list[set] = [set() for _ in chain.levels]
    i = len(chain.levels) - 1
    while i >= 0:
        lev = chain.levels[i]
        restart = None
        for x in list(lev.orbit):
            ux = None
            for gi in chain._level_gens(i):
                if (x, gi) in verified[i]:
                    continue
                if ux is None:
                    ux = np.empty_like(chain.ident)
                    ux[lev.uinv[x]] = chain.ident
                s = chain.gens[gi]
                y = int(s[x])
                h = lev.uinv[y][s[ux]]
                h, j = chain.sift(h, i + 1)
                if not chain.is_identity(h):
                    chain.insert(h, j)
                    while len(verified) < len(chain.levels):
                        verified.append(set())
                    restart = j
                    break
                verified[i].add((x, gi))
            if restart is not None:
                break
        if restart is not None:
            if done():
                return chain
            i = restart
        else:
            i -= 1
    chain.complete = True
    return chain


def is_transitive(gens: Sequence[Permutation], n: int) -> bool:
    return len(orbits(list(gens), n).blocks) == 1


def group_order(gens: Sequence[Permutation], n: int | None = None) -> int:
    if not gens:
        return 1
    return schreier_sims(gens, n).order


@lru_cache(maxsize=None)
def _jordan_primes(n: int) -> frozenset[int]:
    """Primes p with n/2 < p <= n - 3."""
    hi = n - 3
    if hi < 2:
        return frozenset()
    sieve = bytearray([1]) * (hi + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(hi) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(range(p * p, hi + 1, p)))
    return frozenset(p for p in range(n // 2 + 1, hi + 1) if sieve[p])


def has_jordan_cycle(images: Sequence[int], primes: frozenset[int] | None = None) -> bool:
    """True if the permutation has a cycle of prime length ``p``, n/2 < p <= n-3.

    Such a cycle is the only one of length divisible by ``p``, so a suitable
    power of the permutation is a ``p``-cycle.
    """
    n = len(images)
    if primes is None:
        primes = _jordan_primes(n)
    if not primes:
        return False
    half = n // 2
    seen = bytearray(n)
    covered = 0
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = 1
            x = images[x]
            length += 1
        if length > half:
            return length in primes
        covered += length
        if n - covered <= half:
            return False
    return False


def _minimal_block_is_everything(arrs: list[list[int]], n: int, b: int) -> bool:
    """Atkinson's closure: the finest block system with 0 and ``b`` together."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    parent[b] = 0
    classes = n - 1
    queue = [(0, b)]
    while queue:
        x, y = queue.pop()
        for g in arrs:
            rx, ry = find(g[x]), find(g[y])
            if rx != ry:
                parent[ry] = rx
                classes -= 1
                if classes == 1:
                    return True
                queue.append((rx, ry))
    return classes == 1


def is_primitive(gens: Sequence[Permutation | np.ndarray], n: int | None = None) -> bool:
    """Primitivity of a transitive group (checked for every block through 0)."""
    arrs, n = _arrays(gens, n)
    lists = [a.tolist() for a in arrs]
    return all(_minimal_block_is_everything(lists, n, b) for b in range(1, n))


def _witness_search(arrs: list[np.ndarray], n: int, rng: np.random.Generator, trials: int) -> bool:
    """Look for an element with a Jordan cycle in a transitive group.

    A transitive group holding a prime cycle longer than n/2 is primitive,
    and a primitive group holding a p-cycle with p <= n-3 contains A_n.
    Only a positive answer is conclusive.
    """
    primes = _jordan_primes(n)
    if not primes:
        return False
    for a in arrs:
        if has_jordan_cycle(a.tolist(), primes):
            return True
    walk = _ProductReplacement(arrs, rng, warmup=10)
    for _ in range(trials):
        if has_jordan_cycle(walk.next().tolist(), primes):
            return True
    return False


def recognize_alternating(gens: Sequence[Permutation | np.ndarray], n: int | None = None, *,
                          fast: bool = True, transitive: bool | None = None,
                          rng: np.random.Generator | None = None,
                          max_exact_degree: int = MAX_EXACT_DEGREE,
                          witness_trials: int = WITNESS_TRIALS) -> bool | None:
    """Decide ``<gens> >= A_n``; ``None`` means undecided within the budget.

    Intransitive groups are rejected outright (A_n is transitive for n >= 3).
    """
    arrs, n = _arrays(gens, n)
    if n <= 2:
        return True
    if transitive is None:
        transitive = len(orbits([Permutation(a, check=False) for a in arrs], n).blocks) == 1
    if not transitive:
        return False
    if fast:
        if rng is None:
            rng = np.random.default_rng(0)
        if _witness_search(arrs, n, rng, witness_trials):
            return True
    if n > max_exact_degree:
        return None
    half = math.factorial(n) // 2
    if schreier_sims(arrs, n, stop_order=half, verify=False).order_lower_bound() >= half:
        return True
    # A_n is primitive for n >= 3, so a block system rules it out exactly;
    # this keeps large imprimitive groups away from the chain verification
    if not is_primitive(arrs, n):
        return False
    chain = schreier_sims(arrs, n, stop_order=half)
    return chain.order_lower_bound() >= half


def contains_alternating(gens: Sequence[Permutation], n: int | None = None, *, fast: bool = True,
                         rng: np.random.Generator | None = None,
                         max_exact_degree: int = MAX_EXACT_DEGREE) -> bool:
    answer = recognize_alternating(gens, n, fast=fast, rng=rng, max_exact_degree=max_exact_degree)
    if answer is None:
        raise BudgetError(f"degree exceeds the exact recognition budget ({max_exact_degree}) "
                          "and no Jordan witness was found")
    return answer


def classify(gens: Sequence[Permutation], n: int | None = None, *, fast: bool = True,
             rng: np.random.Generator | None = None,
             max_exact_degree: int = MAX_EXACT_DEGREE) -> GroupClass:
    arrs, n = _arrays(gens, n)
    if len(orbits([Permutation(a, check=False) for a in arrs], n).blocks) != 1:
        return GroupClass.INTRANSITIVE
    if n < 3:
        raise DegenerateDegreeError("A_n/S_n distinction needs degree n >= 3")
    answer = recognize_alternating(arrs, n, fast=fast, transitive=True, rng=rng,
                                   max_exact_degree=max_exact_degree)
    if answer is None:
        raise BudgetError(f"degree exceeds the exact recognition budget ({max_exact_degree})")
    if not answer:
        return GroupClass.TRANSITIVE_PROPER
    if all(_array_is_even(a) for a in arrs):
        return GroupClass.ALTERNATING
    return GroupClass.SYMMETRIC
