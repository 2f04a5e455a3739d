"""Exact expected number of orbits of each size for two random class elements.

For a ``k``-set ``S`` to be an orbit of ``<pi, pi'>``, ``S`` must be a union of
cycles of both permutations and the restrictions must generate a transitive
group on ``S``.  Summing over the cycle types ``d``, ``d'`` the restrictions
can have gives

    E N_k = C(n,k)^-1 * sum prod_i C(c_i, d_i) C(c'_i, d'_i) * p(d; d')

where ``p(d; d')`` is the probability that uniform elements of those types in
``S_k`` generate a transitive group.  ``p`` is found by enumeration for small
``k`` and kept in a table that can be persisted to disk.
"""

from __future__ import annotations

import logging
import math
import os
import tempfile
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Mapping

from .errors import CapacityError
from .perm import CycleType, UnionFind, class_size, iter_class

log = logging.getLogger(__name__)

__all__ = [
    "SolutionPair",
    "PTable",
    "OrbitCountSplit",
    "DEFAULT_CAP",
    "restricted_partitions",
    "enumerate_solutions",
    "transitive_pair_probability",
    "closed_form_p",
    "expected_orbit_count",
    "expected_orbit_split",
    "expected_orbit_total",
    "default_table",
]

DEFAULT_CAP = 9
TABLE_VERSION = 1

Counts = tuple[tuple[int, int], ...]


def _counts(c: CycleType | Mapping[int, int] | Counts) -> dict[int, int]:
    if isinstance(c, CycleType):
        return c.as_dict()
    return {int(i): int(v) for i, v in dict(c).items() if v}


@dataclass(frozen=True)
class SolutionPair:
    d: Counts
    d_prime: Counts
    k: int

    def d_type(self) -> CycleType:
        return CycleType(self.d)

    def d_prime_type(self) -> CycleType:
        return CycleType(self.d_prime)


def restricted_partitions(k: int, bounds: Mapping[int, int] | None = None) -> Iterator[Counts]:
    """Partitions of ``k`` as ``((i, d_i), ...)`` with ``d_i <= bounds[i]``.

    Lexicographic in ``(d_1, d_2, ...)``, ascending.  ``bounds=None`` means
    unrestricted.
    """

    def bound(i):
        if bounds is None:
            return k // i
        return min(bounds.get(i, 0), k // i)

    def rec(i, rest):
        if i > k:
            if rest == 0:
                yield ()
            return
        for di in range(min(bound(i), rest // i) + 1):
            for tail in rec(i + 1, rest - i * di):
                yield ((i, di),) + tail if di else tail

    yield from rec(1, k)


def enumerate_solutions(k: int, c, c_prime) -> list[SolutionPair]:
    if k < 1:
        raise ValueError("k must be positive")
    cd, cpd = _counts(c), _counts(c_prime)
    left = list(restricted_partitions(k, cd))
    right = list(restricted_partitions(k, cpd))
    return [SolutionPair(d, dp, k) for d in left for dp in right]


def _count_transitive(fixed: CycleType, enumerated: CycleType) -> int:
    """Number of elements of class ``enumerated`` that, together with one
    canonical element of class ``fixed``, act transitively."""
    k = fixed.n
    tau = []
    pos = 0
    for length in fixed.lengths():
        cyc = list(range(pos, pos + length))
        tau.extend(cyc[1:] + cyc[:1])
        pos += length
    base = UnionFind(k)
    for i, j in enumerate(tau):
        base.union(i, j)
    if base.count == 1:
        return class_size(enumerated)
    parent0, size0, count0 = base.parent, base.size, base.count
    hits = 0
    for images in iter_class(enumerated):
        uf = UnionFind.__new__(UnionFind)
        uf.parent, uf.size, uf.count = list(parent0), list(size0), count0
        for i, j in enumerate(images):
            if uf.union(i, j) and uf.count == 1:
                hits += 1
                break
    return hits


def _spec(c: Counts) -> str:
    return " ".join(f"{i}^{v}" for i, v in c) or "-"


def _unspec(text: str) -> Counts:
    return () if text.strip() == "-" else CycleType.parse(text).counts


class PTable:
    """Memo of ``p(d; d')`` values, optionally backed by a text file.

    File format: a ``# ptable v1`` header, then ``k; d-spec; d'-spec; num/den``
    lines.  Readers never block; each missing key is computed by exactly one
    thread and published once complete.
    """

    def __init__(self, path: str | os.PathLike | None = None, cap: int = DEFAULT_CAP):
        self.cap = cap
        self.path = Path(path) if path is not None else None
        self._values: dict[tuple[Counts, Counts], Fraction] = {}
        self._lock = threading.Lock()
        self._key_locks: dict[tuple[Counts, Counts], threading.Lock] = {}
        if self.path is not None and self.path.exists():
            self.load()

    def __len__(self):
        return len(self._values)

    def __contains__(self, key):
        return key in self._values

    def load(self) -> None:
        lines = self.path.read_text().splitlines()
        if not lines or lines[0].strip() != f"# ptable v{TABLE_VERSION}":
            log.warning("ignoring p-table %s with unknown version header", self.path)
            return
        for line in lines[1:]:
            if not line.strip() or line.startswith("#"):
                continue
            k, d, dp, val = (part.strip() for part in line.split(";"))
            key = (_unspec(d), _unspec(dp))
            self._values[key] = Fraction(val)

    def save(self) -> None:
        if self.path is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self._lock:
            items = sorted(self._values.items(), key=lambda kv: (sum(i * v for i, v in kv[0][0]), kv[0]))
        body = [f"# ptable v{TABLE_VERSION}"]
        for (d, dp), val in items:
            k = sum(i * v for i, v in d)
            body.append(f"{k}; {_spec(d)}; {_spec(dp)}; {val.numerator}/{val.denominator}")
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".ptable")
        with os.fdopen(fd, "w") as fh:
            fh.write("\n".join(body) + "\n")
        os.replace(tmp, self.path)

    def get(self, d: Counts, d_prime: Counts) -> Fraction:
        key = (d, d_prime)
        val = self._values.get(key)
        if val is not None:
            return val
        k = sum(i * v for i, v in d)
        if k > self.cap:
            raise CapacityError(f"p(d; d') needs k={k}, above the enumeration cap {self.cap}")
        with self._lock:
            key_lock = self._key_locks.setdefault(key, threading.Lock())
        with key_lock:
            val = self._values.get(key)
            if val is None:
                val = _brute_force_p(CycleType(d), CycleType(d_prime))
                self._values[key] = val
                self._values.setdefault((d_prime, d), val)
                if self.path is not None:
                    self.save()
        return val


def _brute_force_p(a: CycleType, b: CycleType) -> Fraction:
    # enumerate whichever class is smaller
    if class_size(b) <= class_size(a):
        return Fraction(_count_transitive(a, b), class_size(b))
    return Fraction(_count_transitive(b, a), class_size(a))


_default_table: PTable | None = None
_default_lock = threading.Lock()


def default_table() -> PTable:
    """Process-wide table; persisted at ``$PERMGEN_PTABLE`` when that is set."""
    global _default_table
    with _default_lock:
        if _default_table is None:
            _default_table = PTable(os.environ.get("PERMGEN_PTABLE"))
        return _default_table


def transitive_pair_probability(d, d_prime, k: int | None = None, *,
                                table: PTable | None = None) -> Fraction:
    """Probability that uniform ``tau`` of type ``d`` and ``tau'`` of type
    ``d'`` in ``S_k`` generate a transitive group."""
    dc, dpc = CycleType(_counts(d)), CycleType(_counts(d_prime))
    if k is not None and (dc.n != k or dpc.n != k):
        raise ValueError(f"types {dc} and {dpc} are not both partitions of {k}")
    if dc.n != dpc.n:
        raise ValueError("types have different degrees")
    return (table or default_table()).get(dc.counts, dpc.counts)


def closed_form_p(variant: str, m: int) -> Fraction:
    """``p`` for the three families built from fixed points and 2-cycles.

    ``odd``: p(1, m; 1, m) in S_{2m+1}; ``even_fixed_points``: p(2, m-1; 0, m)
    in S_{2m}; ``even_plain``: p(0, m; 0, m) in S_{2m}.
    """
    f = math.factorial
    if variant == "odd":
        if m < 0:
            raise ValueError("odd variant needs m >= 0")
        cls = Fraction(f(2 * m + 1), 2**m * f(m))
        return Fraction(f(2 * m + 1)) / cls**2
    if m < 1:
        raise ValueError(f"{variant} variant needs m >= 1")
    involutions = Fraction(f(2 * m), 2**m * f(m))
    if variant == "even_fixed_points":
        with_fixed = Fraction(f(2 * m), 2 ** (m - 1) * 2 * f(m - 1))
        return Fraction(f(2 * m), 2) / (with_fixed * involutions)
    if variant == "even_plain":
        return Fraction(f(2 * m - 1)) / involutions**2
    raise ValueError(f"unknown variant {variant!r}")


def _p_value(d: Counts, dp: Counts, table: PTable) -> Fraction:
    k = sum(i * v for i, v in d)
    if k <= table.cap or (d, dp) in table:
        return table.get(d, dp)
    lengths = {i for i, _ in d} | {i for i, _ in dp}
    if lengths <= {1, 2}:
        # past the cap, types on {1, 2} are covered by the closed forms
        f1, g1 = dict(d).get(1, 0), dict(dp).get(1, 0)
        m = k // 2
        if f1 + g1 > 2:
            return Fraction(0)
        if k % 2:
            return closed_form_p("odd", m)
        if f1 == 2 or g1 == 2:
            return closed_form_p("even_fixed_points", m)
        return closed_form_p("even_plain", m)
    return table.get(d, dp)


@dataclass(frozen=True)
class OrbitCountSplit:
    """``E N_k`` split into terms using only 1- and 2-cycles (``sigma1``) and
    the rest (``sigma2``)."""

    k: int
    sigma1: Fraction
    sigma2: Fraction

    @property
    def total(self) -> Fraction:
        return self.sigma1 + self.sigma2

    @property
    def ratio(self) -> float:
        return float(self.sigma2 / self.sigma1) if self.sigma1 else math.inf


def expected_orbit_split(n: int, c, c_prime, k: int, *, table: PTable | None = None) -> OrbitCountSplit:
    if not 1 <= k <= n // 2:
        raise ValueError(f"k={k} outside 1..{n // 2}")
    cd, cpd = _counts(c), _counts(c_prime)
    for name, cc in (("c", cd), ("c'", cpd)):
        total = sum(i * v for i, v in cc.items())
        if total != n:
            raise ValueError(f"{name} has degree {total}, expected {n}")
    table = table or default_table()
    sigma1 = Fraction(0)
    sigma2 = Fraction(0)
    for sol in enumerate_solutions(k, cd, cpd):
        weight = 1
        for i, v in sol.d:
            weight *= math.comb(cd[i], v)
        for i, v in sol.d_prime:
            weight *= math.comb(cpd[i], v)
        term = weight * _p_value(sol.d, sol.d_prime, table)
        if all(i <= 2 for i, _ in sol.d) and all(i <= 2 for i, _ in sol.d_prime):
            sigma1 += term
        else:
            sigma2 += term
    norm = math.comb(n, k)
    return OrbitCountSplit(k, sigma1 / norm, sigma2 / norm)


def expected_orbit_count(n: int, c, c_prime, k: int, *, table: PTable | None = None) -> Fraction:
    """Exact ``E N_k``, the expected number of orbits of size ``k``."""
    return expected_orbit_split(n, c, c_prime, k, table=table).total


def expected_orbit_total(n: int, c, c_prime, kmax: int | None = None, *,
                         table: PTable | None = None) -> Fraction:
    """``sum_{k <= kmax} E N_k``; equals ``E N`` only for ``kmax = n // 2``."""
    if kmax is None:
        kmax = n // 2
    if kmax > n // 2:
        raise ValueError(f"kmax={kmax} exceeds n/2")
    return sum((expected_orbit_count(n, c, c_prime, k, table=table) for k in range(1, kmax + 1)),
               Fraction(0))
