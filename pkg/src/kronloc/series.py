"""Truncated power series and the tree generating functions y = x phi(y).

Coefficients are Python integers throughout.  Floating point appears only
in the singularity and growth estimates, which run on mpmath at a fixed
working precision.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import mpmath

WORKING_DPS = 64


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients c_0..c_N of a power series known up to x^N."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise SeriesError("a truncated series needs at least c_0")

    @classmethod
    def from_list(cls, coeffs: Sequence[int], order: int) -> "TruncatedSeries":
        c = [int(x) for x in coeffs[: order + 1]]
        c += [0] * (order + 1 - len(c))
        return cls(tuple(c))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        if n < 0:
            return 0
        if n > self.order:
            raise SeriesError(f"coefficient x^{n} is beyond the truncation order {self.order}")
        return self.coeffs[n]

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise SeriesError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1])

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries(tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [0] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if ai:
                for j in range(n + 1 - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return TruncatedSeries(tuple(out))

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            raise SeriesError("negative powers are not supported")
        result = TruncatedSeries.from_list([1], self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self) -> "TruncatedSeries":
        """Multiply by x, keeping the order."""
        return TruncatedSeries((0,) + self.coeffs[:-1])

    def derivative(self) -> "TruncatedSeries":
        """g'(x); the result is known one order less."""
        if self.order == 0:
            return TruncatedSeries((0,))
        return TruncatedSeries(tuple(i * self.coeffs[i] for i in range(1, self.order + 1)))

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(x)) for inner with zero constant term."""
        if inner.coeffs[0] != 0:
            raise SeriesError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        inner = inner.truncate(n)
        acc = TruncatedSeries.from_list([self.coeffs[n]], n)
        for c in reversed(self.coeffs[:n]):
            acc = acc * inner
            acc = TruncatedSeries((acc.coeffs[0] + c,) + acc.coeffs[1:])
        return acc

    def to_list(self) -> list[int]:
        return list(self.coeffs)


@dataclass(frozen=True)
class PhiSpec:
    """phi as a dense coefficient list, or in the form (1 + a x^b)^c."""

    dense: tuple[int, ...] | None = None
    a: int = 0
    b: int = 0
    c: int = 1

    def __post_init__(self):
        if self.dense is None:
            if self.a < 1 or self.b < 1 or self.c < 1:
                raise SeriesError("binomial form needs a, b, c >= 1")
        else:
            if not self.dense or self.dense[0] <= 0:
                raise SeriesError("phi(0) must be positive")
            if any(x < 0 for x in self.dense):
                raise SeriesError("phi must have non-negative coefficients")

    @classmethod
    def binomial(cls, a: int, b: int, c: int = 1) -> "PhiSpec":
        return cls(None, a, b, c)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int]) -> "PhiSpec":
        c = list(coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return cls(tuple(int(x) for x in c))

    @property
    def is_binomial(self) -> bool:
        return self.dense is None

    def series(self, order: int) -> TruncatedSeries:
        if self.dense is not None:
            return TruncatedSeries.from_list(self.dense, order)
        out = [0] * (order + 1)
        for k in range(self.c + 1):
            if k * self.b > order:
                break
            out[k * self.b] = comb(self.c, k) * self.a**k
        return TruncatedSeries(tuple(out))

    def is_admissible(self) -> bool:
        """phi_0 > 0 and phi_j > 0 for some j >= 2."""
        if self.dense is None:
            return self.b >= 2
        return any(x > 0 for x in self.dense[2:])

    def __str__(self) -> str:
        if self.dense is None:
            inner = f"1+{self.a}x^{self.b}" if self.a != 1 else f"1+x^{self.b}"
            return inner if self.c == 1 else f"({inner})^{self.c}"
        terms = []
        for i, c in enumerate(self.dense):
            if c:
                terms.append(str(c) if i == 0 else f"{'' if c == 1 else c}x" + (f"^{i}" if i > 1 else ""))
        return "+".join(terms) or "0"


_BINOMIAL = re.compile(r"^\((.*)\)\^(\d+)$")
_TERM = re.compile(r"^(\d*)\*?(x(?:\^(\d+))?)?$")


def parse_phi(text: str) -> PhiSpec:
    """Parse "1+2x+x^2", "1+2*x^2" or "(1+x^2)^3"."""
    s = text.replace(" ", "")
    power = 1
    mo = _BINOMIAL.match(s)
    if mo:
        s, power = mo.group(1), int(mo.group(2))
    if not s:
        raise SeriesError(f"malformed phi: {text!r}")
    coeffs: dict[int, int] = {}
    for term in s.split("+"):
        tm = _TERM.match(term)
        if not term or not tm or (not tm.group(1) and not tm.group(2)):
            raise SeriesError(f"malformed phi term {term!r} in {text!r}")
        c = int(tm.group(1)) if tm.group(1) else 1
        e = 0 if not tm.group(2) else int(tm.group(3) or 1)
        coeffs[e] = coeffs.get(e, 0) + c
    dense = [coeffs.get(i, 0) for i in range(max(coeffs) + 1)]
    nonzero = [i for i, c in enumerate(dense) if c]
    if power != 1 and dense[0] == 1 and len(nonzero) == 2:
        b = nonzero[1]
        return PhiSpec.binomial(dense[b], b, power)
    if dense[0] <= 0:
        raise SeriesError("phi(0) must be positive")
    if power == 1 and len(nonzero) == 2 and dense[0] == 1:
        return PhiSpec.binomial(dense[nonzero[1]], nonzero[1], 1)
    full = TruncatedSeries.from_list(dense, (len(dense) - 1) * power) ** power
    return PhiSpec.from_coeffs(full.coeffs)


def solve_functional(phi: PhiSpec, order: int) -> TruncatedSeries:
    """The series y with y(0) = 0 and y = x phi(y), up to x^order.

    Each pass of y <- x phi(y) fixes one more coefficient, so ``order``
    passes suffice; one extra pass checks that nothing moves any more.
    """
    if order < 1:
        raise SeriesError("order must be at least 1")
    p = phi.series(order)
    y = TruncatedSeries((0,) * (order + 1))
    for _ in range(order):
        y = p.compose(y).shift()
    again = p.compose(y).shift()
    assert again == y, "fixed-point iteration did not stabilise"
    return y


def lagrange_composition_coeff(g: TruncatedSeries, phi: PhiSpec, n: int) -> Fraction:
    """[x^n] g(y(x)) = (1/n) [u^(n-1)] g'(u) phi(u)^n."""
    if n < 1:
        raise SeriesError("n must be at least 1")
    if g.order < n:
        raise SeriesError(f"g must be known to order {n} (have {g.order})")
    dg = g.derivative().truncate(n - 1)
    p = phi.series(n - 1) ** n
    return Fraction((dg * p)[n - 1], n)


def lagrange_power_coeff(a: int, b: int, m: int, n: int) -> int:
    """[x^n] y^m for y = x (1 + a y^b):  (m/n) C(n, (n-m)/b) a^((n-m)/b)."""
    if min(a, b, m, n) < 1:
        raise SeriesError("a, b, m, n must be positive")
    if n < m or (n - m) % b:
        return 0
    k = (n - m) // b
    num = m * comb(n, k) * a**k
    q, r = divmod(num, n)
    assert r == 0, "inexact division in the power coefficient"
    return q


def tree_family_coeff(m: int, n: int) -> int:
    """[x^n] y^m for y = x (1 + y^(m-1))^(m-1)."""
    if m < 3:
        raise SeriesError("need m >= 3")
    if n < m or (n - m) % (m - 1):
        return 0
    k = (n - m) // (m - 1)
    num = m * comb(n * (m - 1), k)
    q, r = divmod(num, n)
    assert r == 0, "inexact division in the tree-family coefficient"
    return q


# ---------------------------------------------------------------------------
# singularity and growth


def big_ln(n: int, dps: int = WORKING_DPS) -> mpmath.mpf:
    """Natural log of a positive integer of any size.

    The integer is shifted down to a mantissa with a few more bits than the
    working precision; the shift comes back as a multiple of ln 2.
    """
    if n <= 0:
        raise ValueError("logarithm of a non-positive integer")
    keep = int(dps * 3.33) + 32
    shift = max(0, n.bit_length() - keep)
    with mpmath.workdps(dps + 10):
        val = mpmath.log(mpmath.mpf(n >> shift)) + shift * mpmath.log(2)
    with mpmath.workdps(dps):
        return +val


@dataclass(frozen=True)
class SingularityInverse:
    """x0^{-1} = factor * base^exponent, with factor = a b and base = 1/((b-1) a)."""

    value: mpmath.mpf
    factor: int
    base: Fraction
    exponent: Fraction

    def ln(self, dps: int = WORKING_DPS) -> mpmath.mpf:
        with mpmath.workdps(dps):
            b = self.base
            return (big_ln(self.factor, dps) + self.exponent.numerator
                    * (big_ln(b.numerator, dps) - big_ln(b.denominator, dps))
                    / self.exponent.denominator)


def _require_lacunary(a: int, b: int) -> None:
    if b == 1:
        raise SeriesError("no square-root singularity regime for b = 1")
    if a < 1 or b < 1:
        raise SeriesError("need a >= 1 and b >= 2")


def x0_inverse(a: int, b: int, dps: int = WORKING_DPS) -> SingularityInverse:
    """Reciprocal radius of convergence of y = x (1 + a y^b).

    From y0 = x0 (1 + a y0^b) and 1 = x0 a b y0^(b-1) one gets
    a (b-1) y0^b = 1 and x0^{-1} = a b y0^(b-1).
    """
    _require_lacunary(a, b)
    base = Fraction(1, (b - 1) * a)
    exponent = Fraction(b - 1, b)
    with mpmath.workdps(dps):
        value = a * b * mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                                     mpmath.mpf(exponent.numerator) / exponent.denominator)
    return SingularityInverse(value, a * b, base, exponent)


def _ab(phi) -> tuple[int, int]:
    if isinstance(phi, PhiSpec):
        if not phi.is_binomial or phi.c != 1:
            raise SeriesError("asymptotics are implemented for phi = 1 + a x^b only")
        return phi.a, phi.b
    a, b = phi
    return int(a), int(b)


def asymptotic_coeff_estimate(phi, n: int, dps: int = WORKING_DPS) -> mpmath.mpf:
    """Leading-order estimate of [x^n] y for phi = 1 + a x^b.

    The square-root singularity gives
        sqrt(x0 F_x / (2 pi F_yy)) x0^{-n} n^{-3/2},  F(x, y) = x phi(y).
    For b >= 2 the coefficients vanish unless n = 1 mod b, and the b
    singularities on the circle |x| = x0 add up on that class, so the
    estimate there is b times the single-singularity term and 0 elsewhere.
    """
    a, b = _ab(phi)
    _require_lacunary(a, b)
    if n < 1:
        raise SeriesError("n must be at least 1")
    if (n - 1) % b:
        return mpmath.mpf(0)
    with mpmath.workdps(dps):
        y0 = mpmath.power(mpmath.mpf(1) / ((b - 1) * a), mpmath.mpf(1) / b)
        x0 = 1 / x0_inverse(a, b, dps).value
        fx = 1 + a * y0**b
        fyy = x0 * a * b * (b - 1) * y0 ** (b - 2)
        lead = mpmath.sqrt(x0 * fx / (2 * mpmath.pi * fyy))
        return b * lead * x0 ** (-n) * mpmath.power(n, mpmath.mpf(-3) / 2)


@dataclass(frozen=True)
class GrowthEstimate:
    n: int
    plain_ratio: mpmath.mpf
    corrected_ratio: mpmath.mpf
    plain_log: mpmath.mpf
    corrected_log: mpmath.mpf


def growth_estimates(a: int, b: int, n: int, dps: int = WORKING_DPS) -> GrowthEstimate:
    """Estimates of x0^{-1} from the exact coefficients c_n = [x^n] y.

    ``n`` is moved down to the nearest index with n = 1 mod b.  The plain
    forms are (c_{n+b}/c_n)^{1/b} and exp(ln c_n / n); the corrected forms
    divide out the n^{-3/2} factor before taking the root or the log.
    """
    _require_lacunary(a, b)
    n -= (n - 1) % b
    if n < 1:
        raise SeriesError("n too small")
    c0 = lagrange_power_coeff(a, b, 1, n)
    c1 = lagrange_power_coeff(a, b, 1, n + b)
    with mpmath.workdps(dps):
        q = mpmath.mpf(c1) / c0
        plain = mpmath.root(q, b)
        corr = mpmath.root(q * mpmath.power(mpmath.mpf(n + b) / n, 1.5), b)
        ln_c = big_ln(c0, dps)
        plain_log = ln_c / n
        corr_log = (ln_c + mpmath.mpf(3) / 2 * mpmath.log(n)) / n
    return GrowthEstimate(n, plain, corr, plain_log, corr_log)
