"""Weight functions and the Fischer-Keller-Pogorzelski weight ``v_p``.

A weight ``w`` is *valid* when it is strictly positive, non-decreasing and
``m * w(n) <= n * w(m)`` for ``n <= m`` (equivalently ``w(n)/n`` is
non-decreasing). Ratios ``s / w(m)`` are never evaluated in floating point for
ordering purposes: :meth:`WeightSpec.key` returns an exact integer pair whose
quotient is an increasing function of the ratio.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from gmpy2 import mpq

from .errors import InputError
from .numeric import (
    Enclosure,
    RoundDown,
    RoundUp,
    ctx,
    rpow_bound,
    to_exponent,
    to_rational,
)


@dataclass(frozen=True)
class WeightValidation:
    valid: bool
    witness: tuple[int, int] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class WeightSpec:
    """``linear`` (w(n) = n), ``power`` (w(n) = n**beta) or ``tabulated``."""

    kind: str
    beta: Fraction = Fraction(1)
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("linear", "power", "tabulated"):
            raise InputError(f"unknown weight kind {self.kind!r}")
        if self.kind == "tabulated":
            if not self.table:
                raise InputError("tabulated weight needs at least one value")
            if any(v <= 0 for v in self.table):
                raise InputError("tabulated weight values must be positive")

    @classmethod
    def linear(cls) -> "WeightSpec":
        return cls("linear")

    @classmethod
    def power(cls, beta) -> "WeightSpec":
        beta = to_exponent(beta)
        if beta == 1:
            return cls("linear")
        return cls("power", beta=beta)

    @classmethod
    def tabulated(cls, values) -> "WeightSpec":
        return cls("tabulated", table=tuple(to_rational(v) for v in values))

    @classmethod
    def parse(cls, text: str) -> "WeightSpec":
        """``"linear"``, ``"power:BETA"`` or a path to a JSON list of numbers."""
        text = text.strip()
        if text == "linear":
            return cls.linear()
        if text.startswith("power:"):
            return cls.power(text.split(":", 1)[1])
        path = Path(text)
        if not path.exists():
            raise InputError(f"weight must be 'linear', 'power:BETA' or a JSON file; got {text!r}")
        try:
            values = json.loads(path.read_text(encoding="utf-8"), parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(values, list):
            raise InputError(f"{path}: expected a JSON list of positive numbers")
        return cls.tabulated(values)

    def __str__(self) -> str:
        if self.kind == "power":
            return f"power:{self.beta}"
        if self.kind == "tabulated":
            return f"tabulated[{len(self.table)}]"
        return "linear"

    @property
    def exponent(self) -> Fraction | None:
        """The power ``beta`` for closed-form weights, ``None`` for tables."""
        if self.kind == "tabulated":
            return None
        return self.beta if self.kind == "power" else Fraction(1)

    @property
    def domain_max(self) -> int | None:
        return len(self.table) if self.kind == "tabulated" else None

    @property
    def root(self) -> int:
        """Keys represent ``(s / w(m)) ** root``."""
        return self.beta.denominator if self.kind == "power" else 1

    def _check_domain(self, m: int) -> None:
        if m < 1:
            raise InputError("weights are defined on positive integers")
        if self.kind == "tabulated" and m > len(self.table):
            raise InputError(f"tabulated weight has no value at n={m} (domain 1..{len(self.table)})")

    def value(self, n: int):
        """Exact ``w(n)`` when rational, otherwise an :class:`Enclosure`."""
        self._check_domain(n)
        if self.kind == "linear":
            return mpq(n)
        if self.kind == "tabulated":
            return self.table[n - 1]
        if self.beta.denominator == 1:
            return rpow_bound(mpq(n), self.beta, RoundDown)
        return Enclosure(rpow_bound(mpq(n), self.beta, RoundDown), rpow_bound(mpq(n), self.beta, RoundUp))

    def key(self, s: int, m: int) -> tuple[int, int]:
        """Integer pair (a, b) with a/b = (s / w(m)) ** root, for s >= 0."""
        if self.kind == "linear":
            return s, m
        if self.kind == "power":
            b = self.beta.denominator
            a = self.beta.numerator
            return (s**b, m**a) if a >= 0 else (s**b * m ** (-a), 1)
        self._check_domain(m)
        t = self.table[m - 1]
        return s * int(t.denominator), int(t.numerator)

    def keys(self, abs_nums: list[int]) -> tuple[list[int], list[int]]:
        if self.kind == "linear":
            return list(abs_nums), list(range(1, len(abs_nums) + 1))
        pairs = [self.key(s, m) for m, s in enumerate(abs_nums, start=1)]
        return [a for a, _ in pairs], [b for _, b in pairs]

    # -- validity -----------------------------------------------------------

    def _ratio_le(self, n: int, m: int) -> bool:
        """Exact test of ``m * w(n) <= n * w(m)``."""
        if self.kind == "linear":
            return True
        if self.kind == "tabulated":
            return m * self.table[n - 1] <= n * self.table[m - 1]
        a, b = self.beta.numerator, self.beta.denominator
        # raise m * n**beta <= n * m**beta to the b-th power
        if a >= 0:
            return m**b * n**a <= n**b * m**a
        return m ** (b - a) <= n ** (b - a)

    def _nondecreasing(self, n: int, m: int) -> bool:
        if self.kind == "tabulated":
            return self.table[n - 1] <= self.table[m - 1]
        return self.exponent >= 0 or n == m

    def validate(self, range_max: int) -> WeightValidation:
        """Positivity, monotonicity and the ratio condition on ``1..range_max``.

        Closed forms are decided analytically (``power(beta)`` is valid iff
        ``beta >= 1``); a violating pair is still searched for and reported.
        Tables are checked on adjacent pairs, which suffices because the ratio
        condition says ``w(k)/k`` is non-decreasing.
        """
        if range_max < 1:
            raise InputError("range_max must be at least 1")
        if self.kind == "linear":
            return WeightValidation(True)
        if self.kind == "power":
            if self.beta >= 1:
                return WeightValidation(True)
            for m in range(2, range_max + 1):
                for n in range(1, m):
                    if not self._nondecreasing(n, m):
                        return WeightValidation(False, (n, m), "w is decreasing")
                    if not self._ratio_le(n, m):
                        return WeightValidation(False, (n, m), "m*w(n) > n*w(m)")
            return WeightValidation(False, None, f"beta = {self.beta} < 1")
        top = min(range_max, len(self.table))
        for k in range(1, top):
            if not self._nondecreasing(k, k + 1):
                return WeightValidation(False, (k, k + 1), "w is decreasing")
            if not self._ratio_le(k, k + 1):
                return WeightValidation(False, (k, k + 1), "m*w(n) > n*w(m)")
        if range_max > len(self.table):
            return WeightValidation(False, None, f"table ends at n={len(self.table)}")
        return WeightValidation(True)


LINEAR = WeightSpec.linear()


def _common_ints(a) -> tuple[list[int], int]:
    qs = [to_rational(x) for x in a]
    den = 1
    for q in qs:
        d = int(q.denominator)
        if den % d:
            den = den * d // math.gcd(den, d)
    return [int(q.numerator) * (den // int(q.denominator)) for q in qs], den


def weighted_average_monotone_check(a, w: WeightSpec, n: int, m: int) -> bool:
    """Exact test of ``(1/w(m)) sum_{k<=m} a_k <= (1/w(n)) sum_{k<=n} a_k``.

    ``a`` must be nonnegative and non-increasing (entries past its end are 0),
    ``w`` valid and ``1 <= n <= m``.
    """
    if not 1 <= n <= m:
        raise InputError(f"need 1 <= n <= m, got n={n}, m={m}")
    nums, _ = _common_ints(a)
    if any(v < 0 for v in nums):
        raise InputError("sequence must be nonnegative")
    if any(x < y for x, y in zip(nums, nums[1:])):
        raise InputError("sequence must be non-increasing")
    if not w.validate(m):
        raise InputError(f"weight {w} is not valid on 1..{m}")
    sn = sum(nums[:n])
    sm = sum(nums[:m])
    an, bn = w.key(sn, n)
    am, bm = w.key(sm, m)
    return am * bn <= an * bm


# ---------------------------------------------------------------------------
# the FKP weight
# ---------------------------------------------------------------------------

def _check_p(p) -> Fraction:
    p = to_exponent(p)
    if p <= 1:
        raise InputError(f"p must exceed 1, got {p}")
    return p


def _vp_side(p: Fraction, n: int, rnd):
    """Directed bound on v_p(n); rnd=RoundDown gives a lower bound."""
    alpha = (p - 1) / p
    q = p - 1
    opp = RoundUp if rnd == RoundDown else RoundDown
    c, co = ctx(rnd), ctx(opp)
    # first = 1 - (1 - 1/n)^alpha, decreasing in the power term
    if n == 1:
        first = mpq(1)
    else:
        first = c.sub(1, rpow_bound(mpq(n - 1, n), alpha, opp))
    second = co.sub(rpow_bound(mpq(n + 1, n), alpha, opp), 1)
    return c.sub(rpow_bound(first, q, rnd), rpow_bound(second, q, opp))


def vp_eval(p, n: int) -> Enclosure:
    """Outward-rounded enclosure of
    ``(1 - (1 - 1/n)**a)**(p-1) - ((1 + 1/n)**a - 1)**(p-1)``, ``a = (p-1)/p``.
    """
    p = _check_p(p)
    if n < 1:
        raise InputError("n must be a positive integer")
    return Enclosure(_vp_side(p, n, RoundDown), _vp_side(p, n, RoundUp))


def vp_leading(p) -> Fraction:
    """``((p-1)/p)**p`` as an exact value when p is an integer."""
    p = _check_p(p)
    return ((p - 1) / p) ** p if p.denominator == 1 else None


def leading_constant(p) -> Enclosure:
    """Enclosure of ``((p-1)/p)**p``."""
    p = _check_p(p)
    base = mpq((p - 1) / p)
    return Enclosure(rpow_bound(base, p, RoundDown), rpow_bound(base, p, RoundUp))


@dataclass(frozen=True)
class LowerBoundReport:
    p: Fraction
    n_max: int
    passed: bool
    min_ratio: object  # certified lower bound of min_n v_p(n) n^p / ((p-1)/p)^p
    argmin: int
    first_failure: int | None


def vp_lower_bound_check(p, n_max: int) -> LowerBoundReport:
    """Certify ``v_p(n) > ((p-1)/p)**p / n**p`` for ``n = 1..n_max``.

    Only lower bounds of ``v_p(n) n^p`` are formed, so a pass is a proof at
    the working precision.
    """
    p = _check_p(p)
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    c0_hi = leading_constant(p).hi
    dn, up = ctx(RoundDown), ctx(RoundUp)
    alpha = (p - 1) / p
    aa, ab = alpha.numerator, alpha.denominator
    q = p - 1
    qa, qb = q.numerator, q.denominator
    pa, pb = p.numerator, p.denominator

    def upow(c, x, a, b):
        r = x if b == 1 else (c.sqrt(x) if b == 2 else c.root(x, b))
        return r if a == 1 else c.pow(r, a)

    best = None
    argmin = 1
    failure = None
    for n in range(1, n_max + 1):
        # same bound as _vp_side(p, n, RoundDown), inlined for speed
        first = 1 if n == 1 else dn.sub(1, upow(up, up.div(n - 1, n), aa, ab))
        second = up.sub(upow(up, up.div(n + 1, n), aa, ab), 1)
        v_lo = dn.sub(upow(dn, dn.add(first, 0), qa, qb), upow(up, second, qa, qb))
        npow = n**pa if pb == 1 else upow(dn, dn.add(n, 0), pa, pb)
        ratio = dn.div(dn.mul(v_lo, npow), c0_hi)
        if best is None or ratio < best:
            best, argmin = ratio, n
        if failure is None and not ratio > 1:
            failure = n
    return LowerBoundReport(p, n_max, failure is None, best, argmin, failure)
