"""Integer partitions: counting, asymptotics, uniform sampling and tails."""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .asymptotics import A, B
from .perm import CycleType

__all__ = [
    "PartitionTail",
    "partition_count",
    "hardy_ramanujan",
    "iter_partitions",
    "sample_uniform_partition",
    "tail_probability_limit",
    "tail_probability_exact",
    "tail_thresholds",
    "class_parity_probability",
]

_table = [1]
_table_lock = threading.Lock()


def partition_count(n: int) -> int:
    """Exact ``p(n)`` by Euler's pentagonal number recurrence."""
    if n < 0:
        return 0
    if n < len(_table):
        return _table[n]
    with _table_lock:
        table = _table
        for m in range(len(table), n + 1):
            total = 0
            j = 1
            while True:
                g1 = j * (3 * j - 1) // 2
                if g1 > m:
                    break
                sign = 1 if j % 2 else -1
                total += sign * table[m - g1]
                g2 = g1 + j
                if g2 <= m:
                    total += sign * table[m - g2]
                j += 1
            table.append(total)
    return _table[n]


def hardy_ramanujan(n: int) -> float:
    """Leading-order asymptotic ``(a/n) exp(2 b sqrt(n))``."""
    if n < 1:
        raise ValueError("n must be positive")
    return A / n * math.exp(2 * B * math.sqrt(n))


def iter_partitions(n: int) -> Iterator[CycleType]:
    """All partitions of ``n``, as cycle types."""

    def rec(rest, largest):
        if rest == 0:
            yield []
            return
        for part in range(min(rest, largest), 0, -1):
            for tail in rec(rest - part, part):
                yield [part] + tail

    for parts in rec(n, n):
        yield CycleType.from_lengths(parts)


class _SmallParts:
    """Counts ``p_j(r)`` of partitions of ``r`` into parts at most ``j``."""

    def __init__(self, n: int, k: int):
        self.k = k
        rows = [[1] * (n + 1)]
        for j in range(2, k + 1):
            row = list(rows[-1])
            for r in range(j, n + 1):
                row[r] += row[r - j]
            rows.append(row)
        self.rows = rows
        log_q = -B / math.sqrt(n)
        top = rows[-1]
        logf = np.array([r * log_q + math.log(top[r]) for r in range(n + 1)])
        # acceptance weight of a remainder r, relative to the best remainder
        self.accept = np.exp(logf - logf.max())

    def sample(self, rest: int, rnd: random.Random) -> dict[int, int]:
        """Uniform partition of ``rest`` into parts at most ``k``."""
        counts = {}
        for j in range(self.k, 1, -1):
            below = self.rows[j - 2]
            u = rnd.randrange(self.rows[j - 1][rest])
            z = 0
            while True:
                u -= below[rest - j * z]
                if u < 0:
                    break
                z += 1
            if z:
                counts[j] = z
            rest -= j * z
        if rest:
            counts[1] = rest
        return counts


@lru_cache(maxsize=4)
def _small_parts(n: int, k: int) -> _SmallParts:
    return _SmallParts(n, k)


def default_small_parts(n: int) -> int:
    return max(1, math.ceil(math.sqrt(n) / 2))


def _head_limit(n: int, k: int) -> int:
    return min(n, k + math.ceil(8 * math.sqrt(n)))


def sample_uniform_partition(n: int, rng: np.random.Generator, *, small_parts: int | None = None,
                             head: int | None = None, batch: int = 8) -> CycleType:
    """Uniform random partition of ``n``.

    Multiplicities ``Z_i`` of the parts are independent geometric with
    ``P(Z_i >= j) = q^{ij}``, ``q = exp(-b/sqrt(n))``; conditioned on
    ``sum i Z_i = n`` they are a uniform partition.  The large parts
    ``Z_{k+1}, ..., Z_n`` are proposed; given the remainder ``r``, the small
    parts have law ``q^r p_k(r)`` times a uniform partition of ``r`` into parts
    at most ``k``, so the proposal is kept with probability proportional to
    ``q^r p_k(r)`` and the small parts are then drawn exactly.

    Sizes up to ``head`` are drawn densely.  Above it ``Z_i`` is almost always
    0, so ``Z_i >= 1`` is found by thinning: candidates are Bernoulli with the
    largest tail rate and kept with the ratio of rates.
    """
    if n < 1:
        raise ValueError("n must be positive")
    k = default_small_parts(n) if small_parts is None else min(max(1, small_parts), n)
    table = _small_parts(n, k)
    if k == n:
        return CycleType(table.sample(n, random.Random(int(rng.integers(2**63)))))
    top = _head_limit(n, k) if head is None else min(n, max(k, head))
    sizes = np.arange(k + 1, top + 1)
    root = math.sqrt(n)
    scale = root / B / sizes
    beta = B / root
    tail_len = n - top
    tail_rate = math.exp(-beta * (top + 1))
    while True:
        # floor(E / (i beta)) with E exponential is geometric with P(Z >= j) = q^{ij}
        z = np.floor(rng.standard_exponential((batch, sizes.size)) * scale).astype(np.int64)
        rest = n - z @ sizes
        tails = [None] * batch
        if tail_len:
            found = rng.binomial(tail_len, tail_rate, size=batch)
            for row in np.flatnonzero(found).tolist():
                # a uniform subset of the right size is an iid Bernoulli pattern
                cand = top + 1 + rng.choice(tail_len, size=int(found[row]), replace=False)
                cand = cand[rng.random(cand.size) < np.exp(-beta * (cand - top - 1))]
                if cand.size:
                    zz = 1 + np.floor(rng.standard_exponential(cand.size) / (beta * cand)).astype(np.int64)
                    tails[row] = (cand, zz)
                    rest[row] -= int(zz @ cand)
        u = rng.random(batch)
        ok = rest >= 0
        weight = np.zeros(batch)
        weight[ok] = table.accept[rest[ok]]
        hits = np.flatnonzero(u < weight)
        if hits.size:
            row = int(hits[0])
            counts = table.sample(int(rest[row]), random.Random(int(rng.integers(2**63))))
            nz = np.flatnonzero(z[row])
            counts.update(zip((nz + k + 1).tolist(), z[row, nz].tolist()))
            if tails[row] is not None:
                counts.update(zip(*(a.tolist() for a in tails[row])))
            return CycleType(counts)


@dataclass(frozen=True)
class PartitionTail:
    """Thresholds ``c_1 >= x sqrt(n)`` and ``c_2 >= y sqrt(n)``."""

    x: float
    y: float

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise ValueError("tail thresholds must be nonnegative")


def tail_probability_limit(t: PartitionTail) -> float:
    return math.exp(-B * (t.x + 2 * t.y))


def tail_thresholds(n: int, t: PartitionTail) -> tuple[int, int]:
    """Smallest counts ``(c_1, c_2)`` meeting the thresholds at degree ``n``."""
    root = math.sqrt(n)
    return math.ceil(t.x * root - 1e-12), math.ceil(t.y * root - 1e-12)


def tail_probability_exact(n: int, t: PartitionTail) -> Fraction:
    """``P(c_1 >= x sqrt(n), c_2 >= y sqrt(n))`` for a uniform partition of ``n``.

    Removing the required 1s and 2s is a bijection onto partitions of the rest.
    """
    a, b = tail_thresholds(n, t)
    return Fraction(partition_count(n - a - 2 * b), partition_count(n))


def class_parity_probability(n: int, samples: int | None = None,
                             rng: np.random.Generator | None = None) -> float:
    """Fraction of uniform random classes of ``S_n`` made of even permutations.

    With ``samples=None`` every partition is enumerated and the value is exact.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if samples is None:
        evens = sum(ct.is_even for ct in iter_partitions(n))
        return evens / partition_count(n)
    if rng is None:
        rng = np.random.default_rng()
    evens = sum(sample_uniform_partition(n, rng).is_even for _ in range(samples))
    return evens / samples
