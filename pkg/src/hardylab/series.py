"""Truncated power series with exact rational coefficients.

Used to expand the FKP weight in ``x = 1/n``::

    v_p(1/x) = (1 - (1 - x)**a)**(p-1) - ((1 + x)**a - 1)**(p-1),   a = (p-1)/p

For integer ``p >= 2`` the exponent ``p - 1`` is a positive integer and ``a``
is rational, so every coefficient is an exact rational.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConsistencyError, InputError
from .numeric import Enclosure, RoundDown, RoundUp, decimal_string, to_exponent
from .weights import vp_eval


class RationalPowerSeries:
    """``sum_k coeffs[k] x**k + O(x**(order+1))``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise InputError("truncation order must be nonnegative")
        cs = cs[: order + 1] + [Fraction(0)] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPowerSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPowerSeries({[str(c) for c in self.coeffs]})"

    def _same_order(self, other: "RationalPowerSeries") -> None:
        if self.order != other.order:
            raise InputError(f"truncation orders differ: {self.order} vs {other.order}")

    def __add__(self, other: "RationalPowerSeries") -> "RationalPowerSeries":
        self._same_order(other)
        return RationalPowerSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "RationalPowerSeries") -> "RationalPowerSeries":
        return series_sub(self, other)

    def __neg__(self) -> "RationalPowerSeries":
        return RationalPowerSeries([-a for a in self.coeffs])

    def __mul__(self, other: "RationalPowerSeries") -> "RationalPowerSeries":
        self._same_order(other)
        L = self.order
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (L + 1)
        for i, ai in enumerate(a):
            if ai:
                for j in range(L + 1 - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return RationalPowerSeries(out)

    def __pow__(self, k: int) -> "RationalPowerSeries":
        return series_pow(self, k)

    def reflect(self) -> "RationalPowerSeries":
        """Substitute ``x -> -x``."""
        return RationalPowerSeries([c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)])

    @classmethod
    def constant(cls, c, order: int) -> "RationalPowerSeries":
        return cls([c], order)


def binomial_series(alpha, L: int) -> RationalPowerSeries:
    """``(1 + x)**alpha`` to order L; coefficients are ``C(alpha, k)``."""
    if L < 0:
        raise InputError("L must be nonnegative")
    alpha = to_exponent(alpha)
    out = [Fraction(1)]
    c = Fraction(1)
    for k in range(1, L + 1):
        c = c * (alpha - k + 1) / k
        out.append(c)
    return RationalPowerSeries(out)


def series_pow(s: RationalPowerSeries, k: int) -> RationalPowerSeries:
    if k < 0:
        raise InputError("only nonnegative integer powers are supported")
    result = RationalPowerSeries.constant(1, s.order)
    base = s
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def series_sub(a: RationalPowerSeries, b: RationalPowerSeries) -> RationalPowerSeries:
    a._same_order(b)
    return RationalPowerSeries([x - y for x, y in zip(a.coeffs, b.coeffs)])


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients ``c_l`` (even l) of ``v_p(n) = sum_l c_l n**(-l-p)``."""

    p: int
    entries: tuple[tuple[int, Fraction], ...]
    max_l: int
    odd_nonzero: tuple[int, ...] = ()
    nonpositive: tuple[int, ...] = field(default=())

    @property
    def all_positive(self) -> bool:
        return not self.nonpositive

    def coefficient(self, l: int) -> Fraction:
        for k, c in self.entries:
            if k == l:
                return c
        raise KeyError(l)

    def partial_sum(self) -> Fraction:
        return sum((c for _, c in self.entries), Fraction(0))

    def to_json(self, digits: int = 40) -> list[dict]:
        return [
            {
                "l": l,
                "numerator": str(c.numerator),
                "denominator": str(c.denominator),
                "decimal": decimal_string(c, digits=digits),
            }
            for l, c in self.entries
        ]


def _as_int_p(p) -> int:
    q = to_exponent(p)
    if q.denominator != 1 or q < 2:
        raise InputError(f"p must be an integer >= 2 for the exact expansion, got {q}")
    return int(q)


def vp_series(p: int, order: int) -> RationalPowerSeries:
    """Series of ``v_p`` in ``x = 1/n`` through ``x**order``."""
    alpha = Fraction(p - 1, p)
    g = binomial_series(alpha, order) - RationalPowerSeries.constant(1, order)  # (1+x)^a - 1
    first = -g.reflect()  # 1 - (1-x)^a
    return series_pow(first, p - 1) - series_pow(g, p - 1)


def vp_coefficients(p, L: int) -> CoefficientTable:
    """Exact ``c_l = [x**(l+p)] v_p`` for ``l = 0..L``; entries keep even l."""
    p = _as_int_p(p)
    if L < 0:
        raise InputError("L must be nonnegative")
    f = vp_series(p, L + p)
    low = [k for k in range(p) if f[k] != 0]
    if low:
        raise ConsistencyError(f"nonzero coefficients below x^{p}: {low}")
    coeffs = [f[l + p] for l in range(L + 1)]
    c0 = Fraction(p - 1, p) ** p
    if coeffs[0] != c0:
        raise ConsistencyError(f"c_0 = {coeffs[0]} differs from ((p-1)/p)^p = {c0}")
    entries = tuple((l, c) for l, c in enumerate(coeffs) if l % 2 == 0)
    odd = tuple(l for l, c in enumerate(coeffs) if l % 2 == 1 and c != 0)
    nonpos = tuple(l for l, c in entries if c <= 0)
    max_l = L if L % 2 == 0 else L - 1
    return CoefficientTable(p, entries, max_l, odd, nonpos)


def cl_tail_sum(p, table: CoefficientTable, tol: float = 1e-30) -> Enclosure:
    """Enclosure of ``v_p(1) - sum_{l <= max_l} c_l``.

    The full coefficient sum equals ``v_p(1)``, so for positive coefficients
    this bounds ``sum_{l > max_l} c_l`` from above (use ``.hi``).
    """
    p = _as_int_p(p)
    if table.p != p:
        raise InputError(f"table is for p={table.p}, not p={p}")
    rest = vp_eval(p, 1) - table.partial_sum()
    if rest.hi < -tol:
        raise ConsistencyError(f"coefficient sum exceeds v_p(1): tail upper bound {rest.hi}")
    if table.all_positive and rest.lo < 0:
        rest = Enclosure(rest.lo * 0, rest.hi if rest.hi > 0 else rest.lo * 0)
    return rest


def dumps_table(table: CoefficientTable) -> str:
    return json.dumps(table.to_json(), indent=1)


__all__ = [
    "RationalPowerSeries",
    "CoefficientTable",
    "binomial_series",
    "series_pow",
    "series_sub",
    "vp_series",
    "vp_coefficients",
    "cl_tail_sum",
    "dumps_table",
    "RoundDown",
    "RoundUp",
]
