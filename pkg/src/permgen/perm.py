"""Permutations on {0, ..., n-1}, cycle types, class sampling and orbits."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import CycleTypeError, DegreeMismatchError

__all__ = [
    "Permutation",
    "CycleType",
    "OrbitPartition",
    "UnionFind",
    "ClassSampler",
    "compose",
    "cycle_type",
    "parity",
    "class_size",
    "sample_with_cycle_type",
    "orbits",
    "iter_class",
    "component_count",
    "orbit_sizes_from_labels",
]


def _index_dtype(n: int):
    return np.int16 if n <= np.iinfo(np.int16).max else np.int32


class Permutation:
    """Immutable permutation of ``range(n)``; ``p(i) == p.images[i]``.

    The image array is a read-only numpy array so that permutations can be
    shared freely between threads.
    """

    __slots__ = ("_images", "_hash")

    def __init__(self, images: Sequence[int] | np.ndarray, *, check: bool = True):
        arr = np.array(images, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("images must be one-dimensional")
        if check:
            n = arr.size
            seen = np.zeros(n, dtype=bool)
            if n and (arr.min() < 0 or arr.max() >= n):
                raise ValueError("images are not a bijection on range(n)")
            seen[arr] = True
            if not seen.all():
                raise ValueError("images are not a bijection on range(n)")
        arr.flags.writeable = False
        self._images = arr
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(np.arange(n), check=False)

    @classmethod
    def from_cycles(cls, n: int, *cycles: Iterable[int]) -> Permutation:
        """Build from disjoint cycles, e.g. ``from_cycles(4, (0, 1), (2, 3))``."""
        images = np.arange(n)
        seen = set()
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if a in seen:
                    raise ValueError(f"point {a} appears in two cycles")
                seen.add(a)
                images[a] = b
        return cls(images)

    @property
    def images(self) -> np.ndarray:
        return self._images

    @property
    def degree(self) -> int:
        return int(self._images.size)

    def __call__(self, i: int) -> int:
        return int(self._images[i])

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def inverse(self) -> Permutation:
        inv = np.empty_like(self._images)
        inv[self._images] = np.arange(self.degree)
        return Permutation(inv, check=False)

    def cycles(self, *, include_fixed: bool = False) -> list[tuple[int, ...]]:
        img = self._images.tolist()
        seen = [False] * len(img)
        out = []
        for start in range(len(img)):
            if seen[start]:
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = img[x]
            if include_fixed or len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._images, np.arange(self.degree)))

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self._images, other._images)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._images.tobytes())
        return self._hash

    def __repr__(self):
        cycles = "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles())
        return f"Permutation<{self.degree}>{cycles or '()'}"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``p∘q``, i.e. ``result(i) == p(q(i))``."""
    if p.degree != q.degree:
        raise DegreeMismatchError(f"degrees differ: {p.degree} != {q.degree}")
    return Permutation(p.images[q.images], check=False)


_FACTOR = re.compile(r"^(\d+)\^(\d+)$")


@dataclass(frozen=True)
class CycleType:
    """Counts ``c_i`` of ``i``-cycles; only nonzero counts are stored.

    Construct with ``CycleType({1: 2, 3: 1})`` or ``CycleType.parse("1^2 3^1")``.
    """

    counts: tuple[tuple[int, int], ...]
    n: int = field(init=False)

    def __init__(self, counts: Mapping[int, int] | Iterable[tuple[int, int]], n: int | None = None):
        items = dict(counts).items() if not isinstance(counts, Mapping) else counts.items()
        clean = []
        for i, c in items:
            i, c = int(i), int(c)
            if i < 1 or c < 0:
                raise CycleTypeError(f"invalid factor {i}^{c}")
            if c:
                clean.append((i, c))
        clean.sort()
        total = sum(i * c for i, c in clean)
        if n is not None and n != total:
            raise CycleTypeError(f"cycle type sums to {total}, expected degree {n}")
        object.__setattr__(self, "counts", tuple(clean))
        object.__setattr__(self, "n", total)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> CycleType:
        """Parse whitespace-separated ``i^c`` factors, e.g. ``"1^2 2^3 5^1"``."""
        counts: dict[int, int] = {}
        for tok in text.split():
            m = _FACTOR.match(tok)
            if not m:
                raise CycleTypeError(f"bad factor {tok!r}, expected i^c")
            i, c = int(m.group(1)), int(m.group(2))
            if i in counts:
                raise CycleTypeError(f"duplicate cycle length {i}")
            counts[i] = c
        return cls(counts, n)

    @classmethod
    def from_lengths(cls, lengths: Iterable[int]) -> CycleType:
        return cls(Counter(lengths))

    def __getitem__(self, i: int) -> int:
        for j, c in self.counts:
            if j == i:
                return c
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    def lengths(self) -> list[int]:
        """Cycle lengths in ascending order, with multiplicity."""
        return [i for i, c in self.counts for _ in range(c)]

    @property
    def num_cycles(self) -> int:
        return sum(c for _, c in self.counts)

    @property
    def is_even(self) -> bool:
        return (self.n - self.num_cycles) % 2 == 0

    def __str__(self):
        return " ".join(f"{i}^{c}" for i, c in self.counts)

    def __repr__(self):
        return f"CycleType({self.as_dict()!r})"


@dataclass(frozen=True)
class OrbitPartition:
    blocks: tuple[frozenset[int], ...]
    size_histogram: Mapping[int, int]

    @property
    def degree(self) -> int:
        return sum(k * c for k, c in self.size_histogram.items())

    def short_orbit_count(self) -> int:
        """Number of orbits of size at most n/2; zero iff transitive (n >= 1)."""
        n = self.degree
        return sum(c for k, c in self.size_histogram.items() if k <= n // 2)

    def is_transitive(self) -> bool:
        return len(self.blocks) == 1


def cycle_type(p: Permutation) -> CycleType:
    return CycleType.from_lengths(len(c) for c in p.cycles(include_fixed=True))


def parity(p: Permutation) -> str:
    """``"even"`` or ``"odd"``."""
    return "even" if cycle_type(p).is_even else "odd"


def class_size(ct: CycleType) -> int:
    denom = 1
    for i, c in ct.counts:
        denom *= i**c * math.factorial(c)
    return math.factorial(ct.n) // denom


class ClassSampler:
    """Uniform sampler for a conjugacy class of ``S_n``.

    Cycle slots are laid out by increasing length; a uniform shuffle of the
    points written into the slots is a uniform class element, since every
    element arises from exactly ``prod(i^c_i c_i!)`` arrangements.
    """

    def __init__(self, ct: CycleType):
        self.cycle_type = ct
        lengths = np.array(ct.lengths(), dtype=np.int64)
        label = np.repeat(np.arange(lengths.size), lengths)
        start = np.concatenate(([0], np.cumsum(lengths)[:-1]))
        nxt = np.arange(ct.n) + 1
        # the last slot of each cycle wraps to its first
        nxt[start + lengths - 1] = start
        self._next_slot = nxt
        self._slot_label = label
        self.num_cycles = int(lengths.size)
        self.cycle_lengths = lengths

    def sample_arrays(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(images, cycle_label)`` for one uniform class element."""
        arr = rng.permutation(self.cycle_type.n)
        images = np.empty_like(arr)
        images[arr] = arr[self._next_slot]
        labels = np.empty_like(arr)
        labels[arr] = self._slot_label
        return images, labels

    def sample(self, rng: np.random.Generator) -> Permutation:
        return Permutation(self.sample_arrays(rng)[0], check=False)


def sample_with_cycle_type(ct: CycleType, rng: np.random.Generator) -> Permutation:
    return ClassSampler(ct).sample(rng)


def iter_class(ct: CycleType) -> Iterator[list[int]]:
    """Yield image lists of every element of the class, each exactly once.

    Each cycle is started at the smallest point not yet used, and only its
    length and remaining entries are chosen, so no element repeats.
    """
    n = ct.n
    remaining = Counter(ct.lengths())
    images = list(range(n))
    used = [False] * n

    def rec():
        try:
            start = used.index(False)
        except ValueError:
            yield list(images)
            return
        used[start] = True
        for length in sorted(remaining):
            if remaining[length] == 0:
                continue
            remaining[length] -= 1
            yield from _extend(start, start, length - 1)
            remaining[length] += 1
        used[start] = False

    def _extend(start, last, todo):
        if todo == 0:
            images[last] = start
            yield from rec()
            return
        for x in range(start + 1, n):
            if not used[x]:
                used[x] = True
                images[last] = x
                yield from _extend(start, x, todo - 1)
                used[x] = False

    yield from rec()


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.size[x] < self.size[y]:
            x, y = y, x
        self.parent[y] = x
        self.size[x] += self.size[y]
        self.count -= 1
        return True


def orbits(gens: Sequence[Permutation], n: int | None = None) -> OrbitPartition:
    """Orbit partition of the group generated by ``gens``.

    An empty generator list is the trivial group; then ``n`` is required.
    """
    if n is None:
        if not gens:
            raise ValueError("degree is required for an empty generator list")
        n = gens[0].degree
    for g in gens:
        if g.degree != n:
            raise DegreeMismatchError(f"generator of degree {g.degree} in a group of degree {n}")
    uf = UnionFind(n)
    for g in gens:
        for i, j in enumerate(g.images.tolist()):
            uf.union(i, j)
    members: dict[int, set[int]] = {}
    for x in range(n):
        members.setdefault(uf.find(x), set()).add(x)
    blocks = tuple(sorted((frozenset(b) for b in members.values()), key=min))
    hist = Counter(len(b) for b in blocks)
    return OrbitPartition(blocks, dict(sorted(hist.items())))


def _label_edges(la: np.ndarray, lb: np.ndarray, mb: int) -> np.ndarray:
    return np.unique(la * mb + lb)


def component_count(la: np.ndarray, ma: int, lb: np.ndarray, mb: int) -> int:
    """Number of orbits of ``<a, b>`` given cycle labels of ``a`` and ``b``.

    Point ``i`` joins cycle ``la[i]`` of ``a`` to cycle ``lb[i]`` of ``b``;
    orbits are the components of this bipartite cycle graph, so union-find
    runs over at most ``ma + mb`` nodes and the distinct label pairs.
    """
    keys = _label_edges(la, lb, mb)
    if keys.size > _SPARSE_EDGES:
        return _sparse_components(keys, ma, mb)[0]
    uf = UnionFind(ma + mb)
    for key in keys.tolist():
        uf.union(key // mb, ma + key % mb)
        if uf.count == 1:
            break
    return uf.count


# above this many distinct edges the compiled graph search beats Python union-find
_SPARSE_EDGES = 400


def _sparse_components(keys: np.ndarray, ma: int, mb: int) -> tuple[int, np.ndarray]:
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    size = ma + mb
    graph = coo_matrix((np.ones(keys.size, dtype=np.int8), (keys // mb, ma + keys % mb)), shape=(size, size))
    return connected_components(graph, directed=False)


def orbit_sizes_from_labels(la: np.ndarray, lengths_a: np.ndarray,
                            lb: np.ndarray, mb: int) -> list[int]:
    """Sizes of the orbits of ``<a, b>`` from cycle labels, as in
    :func:`component_count`."""
    ma = lengths_a.size
    keys = _label_edges(la, lb, mb)
    if keys.size > _SPARSE_EDGES:
        count, comp = _sparse_components(keys, ma, mb)
        sizes = np.bincount(comp[:ma], weights=lengths_a, minlength=count)
        return [int(v) for v in sizes if v]
    uf = UnionFind(ma + mb)
    for key in keys.tolist():
        uf.union(key // mb, ma + key % mb)
    sizes: Counter = Counter()
    for cid, length in enumerate(lengths_a.tolist()):
        sizes[uf.find(cid)] += length
    return list(sizes.values())
