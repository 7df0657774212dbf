"""Exact special functions for SU(2) recoupling.

Everything that involves factorials is evaluated over Python integers and
:class:`fractions.Fraction`; the only irrational step, a square root, is kept
symbolic in :class:`SqrtRational` until the caller asks for a float.

Phase convention: Condon-Shortley throughout.  Clebsch-Gordan coefficients of
the stretched state ``<j1 j1; j2 j2 | j1+j2, j1+j2>`` are ``+1`` and the
coefficient ``<j1 j1; j2 (J-j1) | J J>`` is positive.

Angular momenta are passed as :class:`HalfInt` or as plain numbers that are
integer multiples of one half (``1``, ``0.5``, ``Fraction(3, 2)``).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

__all__ = [
    "AngmomDomainError",
    "HalfInt",
    "YoungTwoRow",
    "SqrtRational",
    "factorial",
    "binomial",
    "clebsch_gordan",
    "wigner_d_stretched_sq",
    "wigner_6j",
    "gauss_2f1_terminating",
    "weyl_dim",
    "sym_dim",
]


class AngmomDomainError(ValueError):
    """Argument outside the domain of an angular-momentum function."""


@dataclass(frozen=True, order=True)
class HalfInt:
    """A half-integer stored as twice its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int) or isinstance(self.twice, bool):
            raise AngmomDomainError(f"twice must be an int, got {self.twice!r}")

    @classmethod
    def of(cls, value) -> HalfInt:
        """Coerce ``value`` (HalfInt, int, Fraction or float) to a HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise AngmomDomainError("bool is not a half-integer")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, Rational):
            tw = 2 * Fraction(value)
            if tw.denominator != 1:
                raise AngmomDomainError(f"{value} is not a multiple of 1/2")
            return cls(int(tw))
        if isinstance(value, Real):
            tw = 2.0 * float(value)
            if not math.isfinite(tw) or tw != round(tw):
                raise AngmomDomainError(f"{value} is not a multiple of 1/2")
            return cls(int(round(tw)))
        raise AngmomDomainError(f"cannot interpret {value!r} as a half-integer")

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self):
        return self.twice / 2

    def __repr__(self):
        if self.twice % 2 == 0:
            return f"HalfInt({self.twice // 2})"
        return f"HalfInt({self.twice}/2)"


@dataclass(frozen=True)
class YoungTwoRow:
    """Young diagram with at most two rows, ``[row1, row2]``."""

    row1: int
    row2: int = 0

    def __post_init__(self):
        if self.row2 < 0 or self.row1 < self.row2:
            raise AngmomDomainError(
                f"need row1 >= row2 >= 0, got [{self.row1}, {self.row2}]"
            )

    @property
    def size(self) -> int:
        return self.row1 + self.row2

    def cells(self):
        """Yield ``(row, col)`` for every box, rows counted from 0."""
        for c in range(self.row1):
            yield 0, c
        for c in range(self.row2):
            yield 1, c

    def hook(self, row: int, col: int) -> int:
        lengths = (self.row1, self.row2)
        arm = lengths[row] - col - 1
        leg = sum(1 for r in range(row + 1, 2) if lengths[r] > col)
        return arm + leg + 1


class SqrtRational:
    """Exact number ``sign * sqrt(num / den)``.

    The radicand is kept in lowest terms.  Products stay closed; sums do not
    (they are never needed), so only multiplication and squaring are provided.
    """

    __slots__ = ("sign", "radicand_num", "radicand_den")

    def __init__(self, sign: int, radicand_num: int, radicand_den: int = 1):
        if radicand_den <= 0:
            raise AngmomDomainError("radicand denominator must be positive")
        if radicand_num < 0:
            raise AngmomDomainError("radicand numerator must be non-negative")
        if radicand_num == 0 or sign == 0:
            sign, radicand_num, radicand_den = 0, 0, 1
        elif sign not in (-1, 1):
            raise AngmomDomainError(f"sign must be -1, 0 or +1, got {sign}")
        g = math.gcd(radicand_num, radicand_den)
        self.sign = sign
        self.radicand_num = radicand_num // g
        self.radicand_den = radicand_den // g

    @classmethod
    def from_parts(cls, factor: Fraction, radicand: Fraction) -> SqrtRational:
        """Build ``factor * sqrt(radicand)`` with ``factor`` rational."""
        factor = Fraction(factor)
        radicand = Fraction(radicand)
        if radicand < 0:
            raise AngmomDomainError("negative radicand")
        sq = factor * factor * radicand
        sgn = (factor > 0) - (factor < 0)
        return cls(sgn, sq.numerator, sq.denominator)

    @classmethod
    def zero(cls) -> SqrtRational:
        return cls(0, 0, 1)

    def square(self) -> Fraction:
        """Exact square as a rational."""
        return Fraction(self.radicand_num, self.radicand_den)

    def signed_square(self) -> Fraction:
        return self.sign * self.square()

    def is_zero(self) -> bool:
        return self.sign == 0

    def __float__(self):
        if self.sign == 0:
            return 0.0
        # Fraction -> float is correctly rounded even for huge operands.
        return self.sign * math.sqrt(Fraction(self.radicand_num, self.radicand_den))

    to_float = __float__

    def __mul__(self, other):
        if isinstance(other, SqrtRational):
            return SqrtRational(
                self.sign * other.sign,
                self.radicand_num * other.radicand_num,
                self.radicand_den * other.radicand_den,
            )
        if isinstance(other, (int, Fraction)):
            return self * SqrtRational.from_parts(Fraction(other), Fraction(1))
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return SqrtRational(-self.sign, self.radicand_num, self.radicand_den)

    def __abs__(self):
        return SqrtRational(abs(self.sign), self.radicand_num, self.radicand_den)

    def __eq__(self, other):
        if isinstance(other, SqrtRational):
            return (self.sign, self.radicand_num, self.radicand_den) == (
                other.sign,
                other.radicand_num,
                other.radicand_den,
            )
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            sgn = (other > 0) - (other < 0)
            return self.sign == sgn and self.square() == other * other
        return NotImplemented

    def __hash__(self):
        return hash((self.sign, self.radicand_num, self.radicand_den))

    def __repr__(self):
        if self.sign == 0:
            return "SqrtRational(0)"
        s = "-" if self.sign < 0 else "+"
        return f"SqrtRational({s}sqrt({self.radicand_num}/{self.radicand_den}))"


# --------------------------------------------------------------------------
# factorials

_fact_table = [1]
_fact_lock = threading.Lock()


def factorial(n: int) -> int:
    """Exact ``n!``, memoized in a table shared across threads."""
    if n < 0:
        raise AngmomDomainError(f"factorial of negative number {n}")
    table = _fact_table
    if n < len(table):
        return table[n]
    with _fact_lock:
        # list.append is atomic, readers only ever see a consistent prefix
        while len(_fact_table) <= n:
            _fact_table.append(_fact_table[-1] * len(_fact_table))
    return _fact_table[n]


def binomial(n: int, k: int) -> int:
    """``C(n, k)``; zero outside ``0 <= k <= n``."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def _tw(x) -> int:
    return HalfInt.of(x).twice


def _half(twice: int) -> int:
    # caller has already checked parity
    return twice // 2


def _triangle(ta: int, tb: int, tc: int) -> bool:
    """Triangle rule on doubled spins, including the integer-perimeter check."""
    if ta < 0 or tb < 0 or tc < 0:
        return False
    if (ta + tb + tc) % 2:
        return False
    return abs(ta - tb) <= tc <= ta + tb


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    a = _half(ta + tb - tc)
    b = _half(ta - tb + tc)
    c = _half(-ta + tb + tc)
    d = _half(ta + tb + tc) + 1
    return Fraction(factorial(a) * factorial(b) * factorial(c), factorial(d))


# --------------------------------------------------------------------------
# Clebsch-Gordan


def _check_projection(tj: int, tm: int, what: str):
    if tj < 0:
        raise AngmomDomainError(f"{what}: negative spin")
    if abs(tm) > tj:
        raise AngmomDomainError(f"{what}: |m| > j")
    if (tj + tm) % 2:
        raise AngmomDomainError(f"{what}: j and m must differ by an integer")


def clebsch_gordan(j1, m1, j2, m2, J, M) -> SqrtRational:
    """``<j1 m1; j2 m2 | J M>`` via Racah's single-sum formula.

    Returns an exact zero when ``M != m1 + m2`` or the triangle rule fails.
    """
    tj1, tm1, tj2, tm2, tJ, tM = map(_tw, (j1, m1, j2, m2, J, M))
    _check_projection(tj1, tm1, "j1,m1")
    _check_projection(tj2, tm2, "j2,m2")
    _check_projection(tJ, tM, "J,M")
    if tM != tm1 + tm2 or not _triangle(tj1, tj2, tJ):
        return SqrtRational.zero()

    a = _half(tj1 + tj2 - tJ)
    b = _half(tj1 - tm1)
    c = _half(tj2 + tm2)
    d = _half(tJ - tj2 + tm1)
    e = _half(tJ - tj1 - tm2)
    kmin = max(0, -d, -e)
    kmax = min(a, b, c)
    s = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(c - k)
            * factorial(d + k)
            * factorial(e + k)
        )
        s += Fraction(-1 if k % 2 else 1, den)
    if s == 0:
        return SqrtRational.zero()

    radicand = (tJ + 1) * _delta_sq(tj1, tj2, tJ)
    radicand *= (
        factorial(_half(tJ + tM))
        * factorial(_half(tJ - tM))
        * factorial(_half(tj1 - tm1))
        * factorial(_half(tj1 + tm1))
        * factorial(_half(tj2 - tm2))
        * factorial(_half(tj2 + tm2))
    )
    return SqrtRational.from_parts(s, radicand)


# --------------------------------------------------------------------------
# Wigner d


def wigner_d_stretched_sq(j, l, beta: float) -> float:
    """``|d^j_{l,j}(beta)|^2``, the weight of ``m = l`` in a rotated ``|j, j>``.

    Equals ``C(2j, j+l) cos(beta/2)^(2(j+l)) sin(beta/2)^(2(j-l))``.
    """
    tj, tl = _tw(j), _tw(l)
    if tj < 0 or abs(tl) > tj:
        raise AngmomDomainError(f"need |l| <= j, got j={tj}/2, l={tl}/2")
    if (tj + tl) % 2:
        raise AngmomDomainError("j - l must be an integer")
    up = _half(tj + tl)
    down = _half(tj - tl)
    c2 = math.cos(beta / 2.0) ** 2
    s2 = math.sin(beta / 2.0) ** 2
    return math.comb(tj, up) * c2**up * s2**down


# --------------------------------------------------------------------------
# 6j


def wigner_6j(j1, j2, j3, j4, j5, j6) -> SqrtRational:
    """Wigner 6j symbol ``{j1 j2 j3; j4 j5 j6}`` from Racah's formula.

    Zero (exactly) if any of the triads (j1 j2 j3), (j1 j5 j6), (j4 j2 j6),
    (j4 j5 j3) breaks the triangle rule.
    """
    t = list(map(_tw, (j1, j2, j3, j4, j5, j6)))
    if any(x < 0 for x in t):
        raise AngmomDomainError("6j arguments must be non-negative")
    t1, t2, t3, t4, t5, t6 = t
    triads = ((t1, t2, t3), (t1, t5, t6), (t4, t2, t6), (t4, t5, t3))
    if not all(_triangle(*tr) for tr in triads):
        return SqrtRational.zero()

    alphas = [_half(sum(tr)) for tr in triads]
    betas = [
        _half(t1 + t2 + t4 + t5),
        _half(t2 + t3 + t5 + t6),
        _half(t3 + t1 + t6 + t4),
    ]
    s = Fraction(0)
    for k in range(max(alphas), min(betas) + 1):
        den = 1
        for a in alphas:
            den *= factorial(k - a)
        for b in betas:
            den *= factorial(b - k)
        s += Fraction((-1) ** k * factorial(k + 1), den)
    if s == 0:
        return SqrtRational.zero()
    radicand = Fraction(1)
    for tr in triads:
        radicand *= _delta_sq(*tr)
    return SqrtRational.from_parts(s, radicand)


# --------------------------------------------------------------------------
# terminating 2F1


def gauss_2f1_terminating(a: int, b: int, z: float) -> float:
    """Terminating ``2F1(a, b; 1; z)`` for integer ``b <= 0``.

    Terms are generated by the ratio recurrence and accumulated with
    :func:`math.fsum`, so the result is the correctly rounded sum of the
    (individually rounded) terms.
    """
    if b > 0:
        raise AngmomDomainError("only the terminating case b <= 0 is supported")
    term = 1.0
    terms = [term]
    for j in range(-b):
        term *= (a + j) * (b + j) / ((j + 1) * (j + 1)) * z
        terms.append(term)
    return math.fsum(terms)


# --------------------------------------------------------------------------
# dimensions


def weyl_dim(diagram: YoungTwoRow, d: int) -> int:
    """Dimension of the U(d) irrep labelled by a two-row diagram.

    Hook-content formula: product over boxes of ``(d + col - row) / hook``.
    """
    if diagram.row2 > 0 and d < 2:
        raise AngmomDomainError("a two-row diagram needs d >= 2")
    if d < 1:
        raise AngmomDomainError("d must be positive")
    num = 1
    den = 1
    for r, c in diagram.cells():
        num *= d + c - r
        den *= diagram.hook(r, c)
    q, rem = divmod(num, den)
    assert rem == 0
    return q


def sym_dim(n: int, d: int) -> int:
    """Dimension of the symmetric subspace of ``n`` qudits, ``C(n+d-1, d-1)``."""
    if n < 0 or d < 1:
        raise AngmomDomainError(f"invalid (n, d) = ({n}, {d})")
    return math.comb(n + d - 1, d - 1)
