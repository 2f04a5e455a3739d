"""Seeded Monte Carlo experiments and exact reports.

Every sample draws from its own generator keyed by ``(seed, index)``, and
outcomes are reduced in index order, so results do not depend on how the
samples are split between worker processes.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from . import asymptotics
from .asymptotics import LimitParams
from .errors import CapacityError, DegenerateDegreeError, InfeasibleConfigError
from .expectation import PTable, expected_orbit_split
from .partitions import iter_partitions, partition_count, sample_uniform_partition
from .perm import (ClassSampler, CycleType, UnionFind, class_size, component_count, iter_class,
                   orbit_sizes_from_labels)
from .recognition import MAX_EXACT_DEGREE, recognize_alternating

log = logging.getLogger(__name__)

__all__ = [
    "ScaledSpec",
    "RANDOM_CLASS",
    "ExperimentConfig",
    "EstimateResult",
    "Comparison",
    "RandomClassReport",
    "ExactRow",
    "ExactReport",
    "wilson_interval",
    "sample_rng",
    "build_cycle_type",
    "build_cycle_type_noted",
    "estimate_event",
    "compare_transitive_vs_alternating",
    "random_class_experiment",
    "random_class_exact",
    "exact_event_probabilities",
    "exact_report",
    "orbit_count_samples",
]

RANDOM_CLASS = "uniform-random-class"
FILLERS = ("long-cycle", "three-cycles", "mixed")
EVENTS = ("transitive", "alternating", "classify")

INTRANSITIVE, TRANSITIVE, PROPER, ALTERNATING, SYMMETRIC, UNKNOWN = range(6)
OUTCOME_NAMES = ("intransitive", "transitive", "transitive_proper", "alternating", "symmetric", "unknown")


@dataclass(frozen=True)
class ScaledSpec:
    """``c_1 = floor(x sqrt(n))`` fixed points, ``c_2 = floor(y n / 2)`` two-cycles,
    the rest filled according to ``filler``."""

    x: float
    y: float
    filler: str = "long-cycle"

    def __post_init__(self):
        if self.filler not in FILLERS:
            raise ValueError(f"unknown filler {self.filler!r}")


ClassSpec = Union[CycleType, ScaledSpec, str]


def _fill(r: int, filler: str) -> list[int]:
    if r == 0:
        return []
    if filler == "long-cycle":
        return [r]
    if filler == "three-cycles":
        q, rem = divmod(r, 3)
        if rem == 0:
            return [3] * q
        return [3] * (q - 1) + [3 + rem]
    # mixed: about half the points in 3-cycles, the rest in one long cycle
    threes = r // 6
    rest = r - 3 * threes
    if rest < 3:
        return _fill(r, "three-cycles")
    return [3] * threes + [rest]


def build_cycle_type_noted(n: int, x: float, y: float, filler: str = "long-cycle") -> tuple[CycleType, str | None]:
    """As :func:`build_cycle_type`, also returning a note on any adjustment."""
    if filler not in FILLERS:
        raise ValueError(f"unknown filler {filler!r}")
    c1 = math.floor(x * math.sqrt(n) + 1e-9)
    c2 = math.floor(y * n / 2 + 1e-9)
    r = n - c1 - 2 * c2
    if x < 0 or y < 0 or r < 0:
        raise InfeasibleConfigError(f"x={x}, y={y} need {c1 + 2 * c2} points but n={n}")
    note = None
    if r in (1, 2):
        # a leftover of 1 or 2 points cannot form a cycle of length >= 3;
        # borrow from c_2 (smallest relative change) or else from c_1
        if c2 >= 1:
            c2 -= 1
            r += 2
            note = f"c2 reduced by 1 to fill a cycle of length {r}"
        elif c1 >= 3 - r:
            take = 3 - r
            c1 -= take
            r += take
            note = f"c1 reduced by {take} to fill a cycle of length {r}"
        else:
            raise InfeasibleConfigError(f"n={n} leaves {r} points that no filler can place")
    counts = {1: c1, 2: c2}
    for length in _fill(r, filler):
        counts[length] = counts.get(length, 0) + 1
    ct = CycleType(counts, n)
    if note:
        log.info("build_cycle_type(n=%d, x=%g, y=%g): %s", n, x, y, note)
    return ct, note


def build_cycle_type(n: int, x: float, y: float, filler: str = "long-cycle") -> CycleType:
    return build_cycle_type_noted(n, x, y, filler)[0]


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    spec: ClassSpec
    spec_prime: ClassSpec
    event: str = "transitive"
    samples: int = 10_000
    seed: int = 0
    threads: int = 1
    max_exact_degree: int = MAX_EXACT_DEGREE
    fast: bool = True
    exact_kmax: int | None = None

    def __post_init__(self):
        if self.event not in EVENTS:
            raise ValueError(f"unknown event {self.event!r}")
        if self.samples < 0 or self.threads < 1:
            raise ValueError("samples must be >= 0 and threads >= 1")
        if self.event == "classify" and self.n < 3:
            raise DegenerateDegreeError("classification needs n >= 3")
        for s in (self.spec, self.spec_prime):
            if isinstance(s, str) and s != RANDOM_CLASS:
                raise ValueError(f"unknown class spec {s!r}")
            if isinstance(s, CycleType) and s.n != self.n:
                raise InfeasibleConfigError(f"cycle type {s} has degree {s.n}, not {self.n}")
            if isinstance(s, ScaledSpec):
                build_cycle_type(self.n, s.x, s.y, s.filler)

    def resolved(self, which: int) -> CycleType | None:
        s = self.spec if which == 0 else self.spec_prime
        if isinstance(s, CycleType):
            return s
        if isinstance(s, ScaledSpec):
            return build_cycle_type(self.n, s.x, s.y, s.filler)
        return None

    def limit_params(self) -> LimitParams | None:
        if isinstance(self.spec, ScaledSpec) and isinstance(self.spec_prime, ScaledSpec):
            return LimitParams(self.spec.x, self.spec.y, self.spec_prime.x, self.spec_prime.y)
        return None


class _Side:
    def __init__(self, cfg: ExperimentConfig, which: int):
        self.n = cfg.n
        self.fixed = cfg.resolved(which)
        self.sampler = ClassSampler(self.fixed) if self.fixed is not None else None

    def draw(self, rng: np.random.Generator):
        if self.sampler is not None:
            sampler, ct = self.sampler, self.fixed
        else:
            ct = sample_uniform_partition(self.n, rng)
            sampler = ClassSampler(ct)
        images, labels = sampler.sample_arrays(rng)
        return images, labels, sampler, ct


def _run_chunk(cfg: ExperimentConfig, start: int, stop: int, recognize: bool) -> np.ndarray:
    left, right = _Side(cfg, 0), _Side(cfg, 1)
    out = np.empty(stop - start, dtype=np.int8)
    for idx in range(start, stop):
        rng = sample_rng(cfg.seed, idx)
        a, la, sa, ca = left.draw(rng)
        b, lb, sb, cb = right.draw(rng)
        if component_count(la, sa.num_cycles, lb, sb.num_cycles) != 1:
            code = INTRANSITIVE
        elif not recognize:
            code = TRANSITIVE
        else:
            answer = recognize_alternating([a, b], cfg.n, fast=cfg.fast, transitive=True, rng=rng,
                                           max_exact_degree=cfg.max_exact_degree)
            if answer is None:
                code = UNKNOWN
            elif not answer:
                code = PROPER
            else:
                code = ALTERNATING if (ca.is_even and cb.is_even) else SYMMETRIC
        out[idx - start] = code
    return out


def _outcomes(cfg: ExperimentConfig, recognize: bool) -> np.ndarray:
    if cfg.threads == 1 or cfg.samples < 2 * cfg.threads:
        return _run_chunk(cfg, 0, cfg.samples, recognize)
    bounds = np.linspace(0, cfg.samples, cfg.threads + 1).astype(int)
    with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
        parts = list(pool.map(_run_chunk, [cfg] * cfg.threads, bounds[:-1].tolist(),
                              bounds[1:].tolist(), [recognize] * cfg.threads))
    return np.concatenate(parts)


@dataclass
class EstimateResult:
    event: str
    n: int
    samples: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int
    wall_time: float
    limit: float | None = None
    exact_expected_n: float | None = None
    unknown: int = 0
    counts: dict[str, int] = field(default_factory=dict)

    CSV_FIELDS = ("event", "n", "samples", "estimate", "ci_low", "ci_high", "limit", "seed")

    @property
    def sigma(self) -> float:
        if not self.samples:
            return math.nan
        return math.sqrt(max(self.estimate * (1 - self.estimate), 1e-300) / self.samples)

    def row(self) -> dict:
        return {k: getattr(self, k) for k in self.CSV_FIELDS}


def _limit_value(cfg: ExperimentConfig) -> float | None:
    lp = cfg.limit_params()
    if lp is None:
        return None
    try:
        return asymptotics.generation_probability_limit(lp)
    except ValueError:
        return None


def _summarize(event: str, cfg: ExperimentConfig, codes: np.ndarray, success: tuple[int, ...],
               elapsed: float) -> EstimateResult:
    hist = np.bincount(codes, minlength=len(OUTCOME_NAMES))
    unknown = int(hist[UNKNOWN])
    decided = int(codes.size) - unknown
    hits = int(sum(hist[c] for c in success))
    est = hits / decided if decided else 0.0
    lo, hi = wilson_interval(hits, decided)
    counts = {name: int(hist[i]) for i, name in enumerate(OUTCOME_NAMES) if hist[i]}
    exact_en = None
    if cfg.exact_kmax:
        a, b = cfg.resolved(0), cfg.resolved(1)
        if a is not None and b is not None:
            kmax = min(cfg.exact_kmax, cfg.n // 2)
            exact_en = float(sum(expected_orbit_split(cfg.n, a, b, k).total for k in range(1, kmax + 1)))
    return EstimateResult(event, cfg.n, decided, hits, est, lo, hi, cfg.seed, elapsed,
                          _limit_value(cfg), exact_en, unknown, counts)


def estimate_event(cfg: ExperimentConfig) -> EstimateResult:
    """Monte Carlo frequency of ``cfg.event``.

    ``transitive``: the pair acts transitively.  ``alternating``: the group
    contains ``A_n``.  ``classify``: as ``alternating``, with the breakdown into
    proper / ``A_n`` / ``S_n`` in ``counts``.  Undecided recognitions, possible only above the exact
    degree budget, are excluded from the estimate and reported in ``unknown``.
    """
    t0 = time.perf_counter()
    recognize = cfg.event != "transitive"
    codes = _outcomes(cfg, recognize)
    success = {
        "transitive": (TRANSITIVE,),
        "alternating": (ALTERNATING, SYMMETRIC),
        "classify": (ALTERNATING, SYMMETRIC),
    }[cfg.event]
    return _summarize(cfg.event, cfg, codes, success, time.perf_counter() - t0)


@dataclass
class Comparison:
    n: int
    samples: int
    transitive: float
    alternating: float
    difference: float
    transitive_ci: tuple[float, float]
    alternating_ci: tuple[float, float]
    unknown: int
    seed: int


def compare_transitive_vs_alternating(cfg: ExperimentConfig) -> Comparison:
    """Both events on one sample stream; ``difference`` counts transitive
    groups not containing ``A_n``."""
    codes = _outcomes(cfg, recognize=True)
    unknown = int(np.count_nonzero(codes == UNKNOWN))
    decided = codes[codes != UNKNOWN]
    total = int(decided.size)
    trans = int(np.count_nonzero(decided != INTRANSITIVE))
    alt = int(np.count_nonzero((decided == ALTERNATING) | (decided == SYMMETRIC)))
    pt = trans / total if total else 0.0
    pa = alt / total if total else 0.0
    return Comparison(cfg.n, total, pt, pa, pt - pa, wilson_interval(trans, total),
                      wilson_interval(alt, total), unknown, cfg.seed)


@dataclass
class RandomClassReport:
    n: int
    samples: int
    seed: int
    frequencies: dict[str, float]
    intervals: dict[str, tuple[float, float]]
    unknown: int
    recognized: bool
    comparators: dict[str, float]
    wall_time: float

    def rows(self) -> list[dict]:
        out = []
        for name, est in self.frequencies.items():
            lo, hi = self.intervals[name]
            out.append({"event": name, "n": self.n, "samples": self.samples, "estimate": est,
                        "ci_low": lo, "ci_high": hi, "limit": self.comparators.get(name),
                        "seed": self.seed})
        return out


def random_class_experiment(n: int, samples: int, seed: int, *, threads: int = 1,
                            max_exact_degree: int = MAX_EXACT_DEGREE,
                            recognize: bool = True) -> RandomClassReport:
    """Two uniform classes, one uniform element of each.

    Above ``max_exact_degree`` only transitivity is reported.
    """
    if n < 3:
        raise DegenerateDegreeError("random class experiment needs n >= 3")
    if recognize and n > max_exact_degree:
        warnings.warn(f"n={n} exceeds the exact recognition budget {max_exact_degree}; "
                      "reporting transitivity only", stacklevel=2)
        recognize = False
    cfg = ExperimentConfig(n, RANDOM_CLASS, RANDOM_CLASS, "alternating" if recognize else "transitive",
                           samples, seed, threads, max_exact_degree)
    t0 = time.perf_counter()
    codes = _outcomes(cfg, recognize)
    unknown = int(np.count_nonzero(codes == UNKNOWN))
    decided = codes[codes != UNKNOWN]
    total = int(decided.size)
    groups = {"transitive": decided != INTRANSITIVE}
    if recognize:
        groups["contains_alternating"] = (decided == ALTERNATING) | (decided == SYMMETRIC)
        groups["alternating"] = decided == ALTERNATING
        groups["symmetric"] = decided == SYMMETRIC
    freqs, cis = {}, {}
    for name, mask in groups.items():
        hits = int(np.count_nonzero(mask))
        freqs[name] = hits / total if total else 0.0
        cis[name] = wilson_interval(hits, total)
    c = asymptotics.application_constant(check=False)
    comparators = {"transitive": c, "contains_alternating": c, "alternating": c / 4, "symmetric": 3 * c / 4}
    return RandomClassReport(n, total, seed, freqs, cis, unknown, recognize,
                             {k: v for k, v in comparators.items() if k in freqs},
                             time.perf_counter() - t0)


def exact_event_probabilities(ct: CycleType, ct_prime: CycleType, *, recognize: bool = True,
                              max_class: int = 200_000) -> dict[str, Fraction]:
    """Exact event probabilities for uniform elements of two classes.

    One canonical element of ``ct`` is fixed and ``ct_prime`` enumerated;
    conjugating both elements does not change any of the events.
    """
    if ct.n != ct_prime.n:
        raise ValueError("classes of different degrees")
    n = ct.n
    size = class_size(ct_prime)
    if size > max_class:
        raise CapacityError(f"class {ct_prime} has {size} elements, above the cap {max_class}")
    fixed = ClassSampler(ct)._next_slot
    counts = dict.fromkeys(OUTCOME_NAMES[:5], 0)
    for images in iter_class(ct_prime):
        uf = UnionFind(n)
        for i, j in enumerate(fixed.tolist()):
            uf.union(i, j)
        for i, j in enumerate(images):
            uf.union(i, j)
        if uf.count != 1:
            counts["intransitive"] += 1
        elif not recognize:
            counts["transitive"] += 1
        elif n <= 2 or recognize_alternating([fixed, np.array(images)], n, fast=False, transitive=True):
            counts["alternating" if ct.is_even and ct_prime.is_even else "symmetric"] += 1
        else:
            counts["transitive_proper"] += 1
    out = {"transitive": Fraction(size - counts["intransitive"], size)}
    if recognize:
        alt = counts["alternating"] + counts["symmetric"]
        out["contains_alternating"] = Fraction(alt, size)
        out["alternating"] = Fraction(counts["alternating"], size)
        out["symmetric"] = Fraction(counts["symmetric"], size)
    return out


def random_class_exact(n: int, *, recognize: bool = True) -> dict[str, Fraction]:
    """Exact random-class event probabilities by enumerating all class pairs."""
    classes = list(iter_partitions(n))
    weight = Fraction(1, partition_count(n) ** 2)
    total: dict[str, Fraction] = {}
    for a in classes:
        for b in classes:
            # enumerate the smaller class
            fixed, enum_ = (a, b) if class_size(b) <= class_size(a) else (b, a)
            for key, val in exact_event_probabilities(fixed, enum_, recognize=recognize).items():
                total[key] = total.get(key, Fraction(0)) + weight * val
    return total


def orbit_count_samples(n: int, ct: CycleType, ct_prime: CycleType, samples: int, seed: int) -> np.ndarray:
    """Per-sample orbit-size histograms: ``out[s, k]`` is ``N_k`` in sample ``s``."""
    if ct.n != n or ct_prime.n != n:
        raise InfeasibleConfigError(f"cycle types of degree {ct.n} and {ct_prime.n}, expected {n}")
    sa, sb = ClassSampler(ct), ClassSampler(ct_prime)
    out = np.zeros((samples, n + 1), dtype=np.int32)
    for idx in range(samples):
        rng = sample_rng(seed, idx)
        _, la = sa.sample_arrays(rng)
        _, lb = sb.sample_arrays(rng)
        for size in orbit_sizes_from_labels(la, sa.cycle_lengths, lb, sb.num_cycles):
            out[idx, size] += 1
    return out


@dataclass
class ExactRow:
    k: int
    expected: Fraction
    sigma1: Fraction
    sigma2: Fraction

    def as_dict(self) -> dict:
        ratio = float(self.sigma2 / self.sigma1) if self.sigma1 else (0.0 if not self.sigma2 else math.inf)
        return {"k": self.k, "expected_count": f"{self.expected.numerator}/{self.expected.denominator}",
                "decimal": float(self.expected), "sigma1": float(self.sigma1),
                "sigma2": float(self.sigma2), "sigma2_over_sigma1": ratio}


@dataclass
class ExactReport:
    n: int
    type: CycleType
    type_prime: CycleType
    kmax: int
    rows: list[ExactRow]
    partial_expected_n: Fraction
    prediction: float
    limit_expected_n: float | None = None
    limit_probability: float | None = None
    exact_transitive: Fraction | None = None

    def summary(self) -> dict:
        out = {"n": self.n, "type": str(self.type), "type2": str(self.type_prime), "kmax": self.kmax,
               "partial_expected_n": float(self.partial_expected_n),
               "partial_expected_n_exact": f"{self.partial_expected_n.numerator}/"
                                           f"{self.partial_expected_n.denominator}",
               "prediction_exp_minus_en": self.prediction,
               "limit_expected_n": self.limit_expected_n,
               "limit_probability": self.limit_probability,
               "exact_transitive": None if self.exact_transitive is None else float(self.exact_transitive)}
        return out

    def to_dict(self) -> dict:
        out = self.summary()
        out["rows"] = [r.as_dict() for r in self.rows]
        return out


def exact_report(n: int, type_: CycleType | ScaledSpec, type_prime: CycleType | ScaledSpec, kmax: int, *,
                 table: PTable | None = None, exact_class_cap: int = 20_000) -> ExactReport:
    """Table of ``E N_k`` for ``k <= kmax`` with the 1/2-cycle split, the partial
    ``E N``, the ``exp(-E N)`` prediction and available comparators."""
    limit = None
    if isinstance(type_, ScaledSpec) and isinstance(type_prime, ScaledSpec):
        limit = LimitParams(type_.x, type_.y, type_prime.x, type_prime.y)
    ct = type_ if isinstance(type_, CycleType) else build_cycle_type(n, type_.x, type_.y, type_.filler)
    cp = type_prime if isinstance(type_prime, CycleType) else build_cycle_type(
        n, type_prime.x, type_prime.y, type_prime.filler)
    if ct.n != n or cp.n != n:
        raise InfeasibleConfigError("cycle types do not match n")
    kmax = min(kmax, n // 2)
    rows = []
    for k in range(1, kmax + 1):
        split = expected_orbit_split(n, ct, cp, k, table=table)
        rows.append(ExactRow(k, split.total, split.sigma1, split.sigma2))
    partial = sum((r.expected for r in rows), Fraction(0))
    report = ExactReport(n, ct, cp, kmax, rows, partial, math.exp(-float(partial)))
    if limit is not None and not limit.is_indeterminate():
        report.limit_expected_n = asymptotics.expected_N_limit(limit)
        report.limit_probability = asymptotics.generation_probability_limit(limit)
    small = min(class_size(ct), class_size(cp))
    if small <= exact_class_cap:
        fixed, enum_ = (ct, cp) if class_size(cp) <= class_size(ct) else (cp, ct)
        report.exact_transitive = exact_event_probabilities(fixed, enum_, recognize=False)["transitive"]
    return report
