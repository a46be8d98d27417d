"""Numeric backend: exact rationals, directed-rounding bounds and enclosures.

Every quantity that reaches a verdict is either an exact rational (``gmpy2.mpq``)
or an :class:`Enclosure` whose endpoints were produced with outward rounding.
Long sums are accumulated in round-to-nearest and widened afterwards by an
a-priori error bound (:class:`PowerSum`); each elementary MPFR operation is
correctly rounded, which is what makes that bound rigorous.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterator, Union

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import InputError

DEFAULT_PRECISION = 128
MIN_PRECISION = 53

RoundDown = gmpy2.RoundDown
RoundUp = gmpy2.RoundUp
RoundNearest = gmpy2.RoundToNearest

Real = Union[int, Fraction, "mpq", "mpfr"]

_precision: contextvars.ContextVar[int | None] = contextvars.ContextVar(
    "hardylab_precision", default=None
)


def _env_precision() -> int:
    raw = os.environ.get("HARDYLAB_PRECISION")
    if not raw:
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError as exc:
        raise InputError(f"HARDYLAB_PRECISION must be an integer, got {raw!r}") from exc
    if bits < MIN_PRECISION:
        raise InputError(f"precision must be at least {MIN_PRECISION} bits")
    return bits


def get_precision() -> int:
    bits = _precision.get()
    return _env_precision() if bits is None else bits


@contextlib.contextmanager
def working_precision(bits: int) -> Iterator[int]:
    """Temporarily set the mantissa size (bits) used by all float evaluation."""
    if bits < MIN_PRECISION:
        raise InputError(f"precision must be at least {MIN_PRECISION} bits")
    token = _precision.set(int(bits))
    try:
        yield int(bits)
    finally:
        _precision.reset(token)


@lru_cache(maxsize=None)
def rounding_context(rnd, bits: int):
    return gmpy2.context(precision=bits, round=rnd)


def ctx(rnd=RoundNearest, bits: int | None = None):
    return rounding_context(rnd, bits or get_precision())


def unit_roundoff(bits: int | None = None) -> mpq:
    """Relative error bound of one correctly rounded round-to-nearest op."""
    return mpq(1, 2 ** (bits or get_precision()))


def opposite(rnd):
    return RoundUp if rnd == RoundDown else RoundDown


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def to_rational(x) -> mpq:
    """Exact rational value of ``x``.

    Floats and MPFR values are converted exactly (they are dyadic rationals).
    Strings accept integers, decimals, exponents and ``"a/b"``.
    """
    if isinstance(x, bool):
        raise InputError(f"boolean is not a number: {x!r}")
    if isinstance(x, (int, type(mpq(0)), type(gmpy2.mpz(0)))):
        return mpq(x)
    if isinstance(x, Rational):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InputError(f"non-finite value {x!r}")
        return mpq(*x.as_integer_ratio())
    if isinstance(x, type(mpfr(0))):
        if not gmpy2.is_finite(x):
            raise InputError(f"non-finite value {x!r}")
        return mpq(*x.as_integer_ratio())
    if isinstance(x, str):
        s = x.strip()
        try:
            f = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse {x!r} as a rational number") from exc
        return mpq(f.numerator, f.denominator)
    raise InputError(f"unsupported numeric value {x!r}")


def to_exponent(p) -> Fraction:
    """Exponents are read as decimals: ``1.1`` means 11/10, not its binary float."""
    if isinstance(p, float):
        if not math.isfinite(p):
            raise InputError(f"non-finite exponent {p!r}")
        return Fraction(repr(p))
    q = to_rational(p)
    return Fraction(int(q.numerator), int(q.denominator))


# ---------------------------------------------------------------------------
# directed bounds
# ---------------------------------------------------------------------------

def bound(x, rnd, bits: int | None = None) -> mpfr:
    """``x`` rounded to an MPFR value in direction ``rnd``."""
    return mpfr(x, 0, ctx(rnd, bits))


def rpow_bound(x, q: Fraction, rnd, bits: int | None = None):
    """Directed bound on ``x**q`` for ``x >= 0`` and rational ``q``.

    Integer exponents of rational bases are returned exactly as ``mpq``.
    Fractional exponents a/b go through an ``b``-th root followed by an integer
    power; both maps are increasing on x > 0 so rounding the same way at each
    step yields a bound in that direction.
    """
    if x < 0:
        raise InputError("rpow_bound needs a nonnegative base")
    a, b = q.numerator, q.denominator
    if x == 0:
        if a > 0:
            return mpq(0)
        raise InputError("zero raised to a non-positive power")
    exact = not isinstance(x, type(mpfr(0)))
    if b == 1 and exact:
        xq = mpq(x)
        return xq**a if a >= 0 else 1 / xq ** (-a)
    if a < 0:
        den = rpow_bound(x, -q, opposite(rnd), bits)
        return ctx(rnd, bits).div(1, den)
    c = ctx(rnd, bits)
    base = mpfr(x, 0, c)
    if b == 2:
        r = c.sqrt(base)
    elif b > 1:
        r = c.root(base, b)
    else:
        r = base
    return r if a == 1 else c.pow(r, a)


@lru_cache(maxsize=1024)
def pow_units(q: Fraction) -> int:
    """Relative-error budget, in unit roundoffs, of :func:`near_pow`."""
    a, b = abs(q.numerator), q.denominator
    if b == 1:
        return a + 3
    return math.ceil(a * (2 / b + 1)) + 3


def near_pow(num: int, den: int, q: Fraction, c) -> mpfr:
    """Round-to-nearest ``(num/den)**q`` with ``num, den > 0``.

    The result is within ``pow_units(q)`` unit roundoffs (relative) of the
    true value. ``c`` is a round-to-nearest gmpy2 context.
    """
    a, b = q.numerator, q.denominator
    if a < 0:
        num, den, a = den, num, -a
    if b == 1:
        return c.div(num**a, den**a)
    x = c.div(num, den)
    r = c.sqrt(x) if b == 2 else c.root(x, b)
    return r if a == 1 else c.pow(r, a)


# ---------------------------------------------------------------------------
# decimal rendering
# ---------------------------------------------------------------------------

def decimal_string(x, rnd=RoundNearest, digits: int | None = None) -> str:
    """Scientific decimal string of ``x`` with ``digits`` significant digits,
    rounded down / up / to nearest as requested."""
    q = to_rational(x)
    if digits is None:
        digits = int(get_precision() * 0.30103) + 2
    if q == 0:
        return "0"
    num, den = int(q.numerator), int(q.denominator)
    neg = num < 0
    num = abs(num)
    e = len(str(num)) - len(str(den))
    if num * 10 ** max(0, -e) < den * 10 ** max(0, e):
        e -= 1
    # scaled = num/den * 10^(digits-1-e), integer part has exactly `digits` digits
    shift = digits - 1 - e
    top = num * 10**shift if shift >= 0 else num
    bot = den if shift >= 0 else den * 10 ** (-shift)
    m, r = divmod(top, bot)
    if r:
        toward_up = (rnd == RoundUp and not neg) or (rnd == RoundDown and neg)
        if rnd == RoundNearest:
            if 2 * r >= bot:
                m += 1
        elif toward_up:
            m += 1
    if m == 10**digits:
        m //= 10
        e += 1
    s = str(m)
    mant = s[0] + ("." + s[1:].rstrip("0") if s[1:].rstrip("0") else "")
    return f"{'-' if neg else ''}{mant}e{e:+d}"


# ---------------------------------------------------------------------------
# enclosures
# ---------------------------------------------------------------------------

def _is_exact(x) -> bool:
    return not isinstance(x, type(mpfr(0)))


@dataclass(frozen=True)
class Enclosure:
    """Closed interval [lo, hi] certified to contain a real value."""

    lo: object
    hi: object

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x) -> "Enclosure":
        q = to_rational(x) if not isinstance(x, type(mpq(0))) else x
        return cls(q, q)

    @classmethod
    def point_bounds(cls, x) -> "Enclosure":
        """Outward-rounded enclosure of an exact value."""
        return cls(bound(x, RoundDown), bound(x, RoundUp))

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.lo) and _is_exact(self.hi) and self.lo == self.hi

    @property
    def width(self):
        if _is_exact(self.lo) and _is_exact(self.hi):
            return self.hi - self.lo
        return ctx(RoundUp).sub(self.hi, self.lo)

    @property
    def mid(self) -> mpfr:
        return ctx().div(ctx().add(self.lo, self.hi), 2)

    def rel_width(self):
        w = self.width
        if w == 0:
            return mpq(0)
        scale = max(abs(self.lo), abs(self.hi))
        return ctx(RoundUp).div(w, scale)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def _coerce(self, other) -> "Enclosure":
        return other if isinstance(other, Enclosure) else Enclosure.exact(other)

    def __add__(self, other) -> "Enclosure":
        o = self._coerce(other)
        return Enclosure(ctx(RoundDown).add(self.lo, o.lo), ctx(RoundUp).add(self.hi, o.hi))

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other) -> "Enclosure":
        o = self._coerce(other)
        return Enclosure(ctx(RoundDown).sub(self.lo, o.hi), ctx(RoundUp).sub(self.hi, o.lo))

    def __rsub__(self, other) -> "Enclosure":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Enclosure":
        o = self._coerce(other)
        d, u = ctx(RoundDown), ctx(RoundUp)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)]
        return Enclosure(min(d.mul(a, b) for a, b in pairs), max(u.mul(a, b) for a, b in pairs))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Enclosure":
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        d, u = ctx(RoundDown), ctx(RoundUp)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)]
        return Enclosure(min(d.div(a, b) for a, b in pairs), max(u.div(a, b) for a, b in pairs))

    def __rtruediv__(self, other) -> "Enclosure":
        return self._coerce(other) / self

    def pow(self, q) -> "Enclosure":
        """``x**q`` for a nonnegative enclosure and rational q > 0."""
        q = to_exponent(q)
        if self.lo < 0:
            raise InputError("pow of an enclosure reaching below zero")
        if q <= 0:
            raise InputError("pow needs a positive exponent")
        return Enclosure(rpow_bound(self.lo, q, RoundDown), rpow_bound(self.hi, q, RoundUp))

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def emax(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(max(self.lo, other.lo), max(self.hi, other.hi))

    def lo_str(self, digits: int | None = None) -> str:
        return decimal_string(self.lo, RoundDown, digits)

    def hi_str(self, digits: int | None = None) -> str:
        return decimal_string(self.hi, RoundUp, digits)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        if self.is_exact:
            return f"Enclosure({self.lo})"
        return f"Enclosure([{self.lo_str(20)}, {self.hi_str(20)}])"


ZERO = Enclosure(mpq(0), mpq(0))


# ---------------------------------------------------------------------------
# long sums of nonnegative terms
# ---------------------------------------------------------------------------

class PowerSum:
    """Accumulator for a sum of nonnegative terms.

    Terms given exactly are summed as rationals while the running denominator
    stays below ``exact_bits`` bits; later terms go into a round-to-nearest
    MPFR sum. The float part is widened at the end by
    ``rho = 2 * (delta + (k + 1) * u)``, where ``delta`` bounds the relative
    error of every float term and ``k`` counts float additions. Recursive
    summation of k nonnegative terms has relative error at most
    ``k u / (1 - k u)``, so the enclosure is rigorous while ``rho < 1/100``.
    """

    __slots__ = ("bits", "c", "exact_bits", "q", "f", "k", "units", "_open")

    def __init__(self, bits: int | None = None, exact_bits: int = 2048):
        self.bits = bits or get_precision()
        self.c = rounding_context(RoundNearest, self.bits)
        self.exact_bits = exact_bits
        self.q = mpq(0)
        self.f = mpfr(0)
        self.k = 0
        self.units = 0
        self._open = exact_bits > 0

    def add_ratio(self, num: int, den: int) -> None:
        """Add the exact term num/den (num >= 0, den > 0)."""
        if self._open:
            self.q += mpq(num, den)
            if self.exact_bits and self.q.denominator.bit_length() > self.exact_bits:
                self._open = False
            return
        self.f = self.c.add(self.f, self.c.div(num, den))
        self.k += 1
        if self.units < 2:
            self.units = 2

    @property
    def exact_open(self) -> bool:
        return self._open

    def add_rounded_ratios(self, nums, dens) -> None:
        """Add ``nums[i] / dens[i]`` in floating point (bulk fast path)."""
        c = self.c
        terms = list(map(c.div, nums, dens))
        if not terms:
            return
        terms.append(self.f)
        # fsum is correctly rounded; the k-term budget below is kept anyway
        self.f = c.fsum(terms)
        self.k += len(terms) - 1
        if self.units < 2:
            self.units = 2

    def add_exact(self, x) -> None:
        x = mpq(x)
        self.add_ratio(x.numerator, x.denominator)

    def add_approx(self, x: mpfr, units: int) -> None:
        """Add a float term known to within ``units`` unit roundoffs (relative)."""
        self.f = self.c.add(self.f, x)
        self.k += 1
        if units > self.units:
            self.units = units

    def add_pow(self, num: int, den: int, q: Fraction) -> None:
        """Add ``(num/den)**q``; exact when q is an integer."""
        if num == 0:
            return
        if q.denominator == 1:
            a = q.numerator
            if a >= 0:
                self.add_ratio(num**a, den**a)
            else:
                self.add_ratio(den ** (-a), num ** (-a))
        else:
            self.add_approx(near_pow(num, den, q, self.c), pow_units(q))

    def relative_slack(self) -> mpfr:
        u = unit_roundoff(self.bits)
        rho = 2 * (mpq(self.units) * u + (self.k + 1) * u)
        if rho >= mpq(1, 100):
            raise ArithmeticError("precision too low for the requested sum length")
        return bound(rho, RoundUp, 64)

    def result(self) -> Enclosure:
        if self.k == 0:
            return Enclosure(self.q, self.q)
        rho = self.relative_slack()
        d, u = rounding_context(RoundDown, self.bits), rounding_context(RoundUp, self.bits)
        flo = d.mul(self.f, d.sub(1, rho))
        fhi = u.mul(self.f, u.add(1, rho))
        if self.q == 0:
            return Enclosure(flo, fhi)
        return Enclosure(d.add(self.q, flo), u.add(self.q, fhi))


def sum_enclosures(items) -> Enclosure:
    total = ZERO
    for e in items:
        total = total + e
    return total
