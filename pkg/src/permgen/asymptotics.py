"""Limiting generation probability and the random-class constants.

Parameters follow the scaling ``c_1 ~ x sqrt(n)`` fixed points and
``c_2 ~ y n / 2`` two-cycles for each permutation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from .errors import IndeterminateLimitError, NumericError

__all__ = [
    "Extended",
    "INF",
    "LimitParams",
    "generation_probability_limit",
    "expected_N_limit",
    "sigma1_limit",
    "LimitConsistency",
    "limit_consistency_check",
    "exp1",
    "B",
    "B_SQUARED",
    "A",
    "ApplicationConstant",
    "application_constant",
    "application_constant_report",
    "split_constants",
]

EULER_GAMMA = 0.57721566490153286061
B = math.pi / math.sqrt(6)
B_SQUARED = math.pi**2 / 6
A = 1 / (4 * math.sqrt(3))


class Extended(enum.Enum):
    INF = "inf"

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"


INF = Extended.INF
XValue = Union[float, Extended]


def _parse_x(v) -> XValue:
    if v is INF:
        return INF
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        v = float(v)
    if isinstance(v, float) and math.isinf(v):
        return INF
    v = float(v)
    if v < 0 or math.isnan(v):
        raise ValueError(f"x must be >= 0 or inf, got {v}")
    return v


@dataclass(frozen=True)
class LimitParams:
    """``x, x'`` are fixed-point scales (``INF`` allowed); ``y, y'`` in [0, 1]."""

    x: XValue
    y: float
    x_prime: XValue
    y_prime: float

    def __post_init__(self):
        object.__setattr__(self, "x", _parse_x(self.x))
        object.__setattr__(self, "x_prime", _parse_x(self.x_prime))
        for name in ("y", "y_prime"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
            object.__setattr__(self, name, v)

    @property
    def yy(self) -> float:
        return self.y * self.y_prime

    def is_indeterminate(self) -> bool:
        if self.yy >= 1:
            return False
        return (self.x == 0 and self.x_prime is INF) or (self.x is INF and self.x_prime == 0)

    def is_zero_edge(self) -> bool:
        return self.yy >= 1 or self.x is INF or self.x_prime is INF

    def swapped(self) -> LimitParams:
        return LimitParams(self.x_prime, self.y_prime, self.x, self.y)


def _check(p: LimitParams) -> None:
    if p.is_indeterminate():
        raise IndeterminateLimitError(
            f"(x, x') = ({p.x}, {p.x_prime}) with yy' < 1 is indeterminate: the probability "
            "can be close to 0 or to 1 depending on the classes")


def _exponent(p: LimitParams) -> float:
    x, xp, y, yp = p.x, p.x_prime, p.y, p.y_prime
    return (x * xp + 0.5 * x * x * yp + 0.5 * xp * xp * y) / (1 - y * yp)


def generation_probability_limit(p: LimitParams) -> float:
    """Limit of P(<pi, pi'> transitive), equally of P(<pi, pi'> >= A_n)."""
    _check(p)
    if p.is_zero_edge():
        return 0.0
    return math.sqrt(1 - p.yy) * math.exp(-_exponent(p))


def expected_N_limit(p: LimitParams) -> float:
    """Limit of the expected number of orbits of size at most n/2."""
    _check(p)
    if p.is_zero_edge():
        return math.inf
    return _exponent(p) - 0.5 * math.log1p(-p.yy)


def sigma1_limit(p: LimitParams, k: int) -> float:
    """Limit of the 1- and 2-cycle part of ``E N_k`` at fixed ``k``.

    The even case is written without dividing by ``y`` so that it stays
    finite and continuous at ``y = 0`` or ``y' = 0``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if p.x is INF or p.x_prime is INF:
        raise ValueError("sigma1_limit needs finite x and x'")
    x, xp, y, yp = p.x, p.x_prime, p.y, p.y_prime
    m, odd = divmod(k, 2)
    if odd:
        return x * xp * (y * yp) ** m
    return (0.5 * x * x * y ** (m - 1) * yp**m
            + 0.5 * xp * xp * yp ** (m - 1) * y**m
            + (y * yp) ** m / (2 * m))


@dataclass(frozen=True)
class LimitConsistency:
    kmax: int
    partial_sum: float
    expected_n: float
    limit: float
    partial_gap: float
    identity_gap: float


def limit_consistency_check(p: LimitParams, kmax: int) -> LimitConsistency:
    """Compare ``exp(-sum_{k<=kmax} sigma1)`` and ``exp(-E N)`` with the limit."""
    if p.is_zero_edge() or p.is_indeterminate():
        raise ValueError("consistency check needs finite, non-edge parameters")
    partial = math.fsum(sigma1_limit(p, k) for k in range(1, kmax + 1))
    en = expected_N_limit(p)
    lim = generation_probability_limit(p)
    return LimitConsistency(kmax, partial, en, lim,
                            abs(math.exp(-partial) - lim), abs(math.exp(-en) - lim))


def _exp1_series(t: float) -> float:
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -t / k
        contrib = term / k
        total += contrib
        if abs(contrib) < 1e-17 * max(abs(total), 1e-300):
            break
        k += 1
        if k > 500:
            raise NumericError("E1 series did not converge")
    return -EULER_GAMMA - math.log(t) - total


def _exp1_continued_fraction(t: float) -> float:
    # modified Lentz on e^-t / (t + 1 - 1^2/(t + 3 - 2^2/(t + 5 - ...)))
    tiny = 1e-300
    b = t + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h * math.exp(-t)
    raise NumericError("E1 continued fraction did not converge")


def exp1(t: float) -> float:
    """Exponential integral ``E1(t) = int_t^inf e^-u / u du`` for ``t > 0``."""
    if t <= 0:
        raise ValueError("E1 needs t > 0")
    if t <= 1.5:
        return _exp1_series(t)
    return _exp1_continued_fraction(t)


@dataclass(frozen=True)
class ApplicationConstant:
    value: float
    quadrature: float
    quadrature_error: float
    tail_bound: float
    exp1_b2: float

    @property
    def agreement(self) -> float:
        return abs(self.value - self.quadrature)


def application_constant_report(*, tol: float = 1e-6, cutoff: float = 40.0) -> ApplicationConstant:
    """Both routes to the random-class generation constant.

    The double integral ``b^2 int int exp(-x x' - b(x + x'))`` is taken over
    ``[0, cutoff/b]^2``; the integrand is below ``e^{-b(x+x')}``, so the
    discarded region contributes at most ``2 e^{-cutoff}``.
    """
    from scipy import integrate

    e1 = exp1(B_SQUARED)
    closed = B_SQUARED * math.exp(B_SQUARED) * e1
    upper = cutoff / B
    val, err = integrate.dblquad(lambda xp, x: math.exp(-x * xp - B * (x + xp)),
                                 0.0, upper, 0.0, upper, epsabs=1e-12, epsrel=1e-12)
    quad = B_SQUARED * val
    tail = 2 * math.exp(-cutoff)
    if err * B_SQUARED > tol:
        raise NumericError(f"quadrature error estimate {err:.2e} above tolerance")
    if abs(quad - closed) > tol:
        raise NumericError(f"quadrature {quad!r} and E1 form {closed!r} disagree")
    return ApplicationConstant(closed, quad, err * B_SQUARED, tail, e1)


def application_constant(*, check: bool = True) -> float:
    """``b^2 e^{b^2} E1(b^2)`` with ``b = pi/sqrt(6)``, about 0.6889."""
    if check:
        return application_constant_report().value
    return B_SQUARED * math.exp(B_SQUARED) * exp1(B_SQUARED)


def split_constants() -> tuple[float, float]:
    """Limits of P(G = A_n) and P(G = S_n) for random classes.

    Both classes are even with limiting probability 1/4.
    """
    c = application_constant()
    return c / 4, 3 * c / 4
