"""Certified evaluation of the Hardy-type series.

Every evaluator returns an :class:`Enclosure` of an infinite sum over
``n >= 1``. Terms up to a finite *window* (at least the support bound N) are
summed explicitly; beyond it the inner quantities are frozen (prefix sums are
constant past N) and the remainder collapses to a multiple of a Hurwitz zeta
value, which is enclosed by an integral sandwich.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import InputError, TailNotComputable
from .numeric import (
    ZERO,
    Enclosure,
    PowerSum,
    RoundDown,
    RoundUp,
    ctx,
    decimal_string,
    get_precision,
    near_pow,
    pow_units,
    rpow_bound,
    to_exponent,
    to_rational,
)
from .seqcore import Sequence, forward_difference, prefix_sums, suffix_argmax
from .weights import LINEAR, WeightSpec, leading_constant, vp_eval

DEFAULT_REL_TOL = 1e-12
DEFAULT_L = 20

# Hurwitz zeta: beyond this many explicit terms a cached anchor is used.
_DIRECT_MAX = 4096
_ANCHOR_A_MAX = 4096

# explicit terms of the FKP series before the tail bracket takes over
_FKP_MIN_WINDOW = 16
_FKP_MIN_WINDOW_FRAC = 256


# ---------------------------------------------------------------------------
# Hurwitz zeta
# ---------------------------------------------------------------------------

def _tail_bounds(s: Fraction, x: mpq) -> Enclosure:
    """Enclosure of ``sum_{j>=0} (x+j)**-s`` for ``x >= 1``.

    Euler-Maclaurin through the B2 term: all derivatives of ``t**-s``
    alternate in sign, so the remainder has the sign of the B4 term and is
    smaller in size, giving ``base - s(s+1)(s+2) x**(-s-3)/720 <= sum <= base``
    with ``base = x**(1-s)/(s-1) + x**-s/2 + s x**(-s-1)/12``.
    """
    dn, up = ctx(RoundDown), ctx(RoundUp)
    sm1 = mpq(s.numerator - s.denominator, s.denominator)
    sq = mpq(s.numerator, s.denominator)

    def base(c, rnd):
        return c.add(
            c.add(c.div(rpow_bound(x, 1 - s, rnd), sm1), c.div(rpow_bound(x, -s, rnd), 2)),
            c.mul(rpow_bound(x, -s - 1, rnd), sq / 12),
        )

    b4 = up.mul(rpow_bound(x, -s - 3, RoundUp), sq * (sq + 1) * (sq + 2) / 720)
    return Enclosure(dn.sub(base(dn, RoundDown), b4), base(up, RoundUp))


def _partial(s: Fraction, a: mpq, count: int) -> Enclosure:
    """``sum_{k<count} (a+k)**-s``."""
    acc = PowerSum()
    an, ad = int(a.numerator), int(a.denominator)
    for k in range(count):
        acc.add_pow(ad, an + k * ad, s)
    return acc.result()


class _AnchorSum:
    """Running ``sum_{n<x} n**-s`` for one (s, precision), extended on demand."""

    def __init__(self, s: Fraction):
        self.s = s
        self.acc = PowerSum()
        self.x = 1

    def at(self, x: int) -> Enclosure:
        s = self.s
        for n in range(self.x, x):
            self.acc.add_pow(1, n, s)
        self.x = max(self.x, x)
        return self.acc.result()


@lru_cache(maxsize=64)
def _anchor_sum(s: Fraction, bits: int) -> _AnchorSum:
    return _AnchorSum(s)


def _anchor(s: Fraction, x: int, bits: int) -> Enclosure:
    """``zeta(s, 1)`` as a partial sum below ``x`` plus the sandwich at x."""
    run = _anchor_sum(s, bits)
    x = max(x, run.x)  # a longer sum already paid for is never worse
    return run.at(x) + _tail_bounds(s, mpq(x))


def _needed_x(s: Fraction, log_tol: float) -> float:
    # sandwich width is s(s+1)(s+2) x**(-s-3) / 720; aim for a quarter of tol
    sf = float(s)
    lx = (math.log(sf * (sf + 1) * (sf + 2) / 180) - log_tol) / (sf + 3)
    return math.exp(min(lx, 60.0))


def hurwitz_zeta(s, a=1, tol=None, rel_tol: float = DEFAULT_REL_TOL) -> Enclosure:
    """Enclosure of ``sum_{k>=0} (k + a)**-s`` for ``s > 1`` and ``a >= 1``.

    ``tol`` is an absolute width target; without it the width target is
    ``rel_tol`` times the value. Integer ``a`` with a long required partial
    sum reuses a cached enclosure of ``zeta(s)``.
    """
    s = to_exponent(s)
    if s <= 1:
        raise InputError(f"series diverges: s must exceed 1, got {s}")
    a = to_rational(a)
    if a < 1:
        raise InputError(f"a must be at least 1, got {a}")
    if tol is not None:
        if not tol > 0:
            raise InputError("tol must be positive")
        log_tol = float(gmpy2.log(mpfr(tol)))
    else:
        # the value is at least int_a^inf t**-s dt = a**(1-s) / (s-1)
        sf = float(s)
        log_tol = math.log(rel_tol) + (1 - sf) * float(gmpy2.log(mpfr(a))) - math.log(sf - 1)
    x = _needed_x(s, log_tol)
    bits = get_precision()
    for _ in range(8):
        count = max(0, math.ceil(x - float(a)))
        if count <= _DIRECT_MAX or a.denominator != 1 or a > _ANCHOR_A_MAX:
            count = min(count, 1 << 26)
            out = _partial(s, a, count) + _tail_bounds(s, a + count)
        else:
            anchor_x = 1 << max(12, math.ceil(math.log2(x)))
            out = _anchor(s, anchor_x, bits) - _partial(s, mpq(1), int(a) - 1)
        w = out.width
        if w == 0 or float(gmpy2.log(mpfr(w))) <= log_tol:
            return out
        x *= 2
    return out


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

def _check_p(p, strict: bool = True) -> Fraction:
    p = to_exponent(p)
    if strict and p <= 1:
        raise InputError(f"p must exceed 1, got {p}")
    if p < 1:
        raise InputError(f"p must be at least 1, got {p}")
    return p


def _abs_pow(num: int, den: int, p: Fraction) -> Enclosure:
    """Enclosure of ``(num/den)**p`` for num >= 0."""
    x = mpq(num, den)
    if x == 0:
        return ZERO
    return Enclosure(rpow_bound(x, p, RoundDown), rpow_bound(x, p, RoundUp))


def _window(window, N: int) -> int:
    if window is None:
        return N
    window = int(window)
    if window < N:
        raise InputError(f"window {window} is smaller than the support bound {N}")
    return window


def _tail_tol(finite: Enclosure, factor: Enclosure, rel_tol: float):
    """Absolute zeta tolerance making the tail error ``rel_tol`` of the total."""
    if not finite.lo > 0 or not factor.hi > 0:
        return None
    t = ctx(RoundDown).div(ctx(RoundDown).mul(finite.lo, rel_tol), factor.hi)
    return t if t > 0 and gmpy2.is_finite(t) else None


def _zeta_tail(factor: Enclosure, s: Fraction, start: int, finite: Enclosure, rel_tol: float) -> Enclosure:
    """``factor * zeta(s, start)`` with a width budget relative to ``finite``."""
    if factor.hi == 0:
        return ZERO
    tol = _tail_tol(finite, factor, rel_tol)
    return factor * hurwitz_zeta(s, start, tol=tol, rel_tol=rel_tol)


def _add_term(acc: PowerSum, num: int, den: int, e: Fraction) -> None:
    if num:
        acc.add_pow(num, den, e)


def _exact_or_near(num: int, den: int, e: Fraction):
    if num == 0:
        return Fraction(0)
    if e.denominator == 1:
        a = e.numerator
        return Fraction(num**a, den**a) if a >= 0 else Fraction(den ** (-a), num ** (-a))
    return near_pow(num, den, e, ctx())


# ---------------------------------------------------------------------------
# sup scans
# ---------------------------------------------------------------------------

def _winners(vals: list[int], w: WeightSpec) -> tuple[list[int], list[int]]:
    """Per n = 1..N, the key of ``max(max_{m<=n} v_m / w(n), max_{m>=n} v_m / w(m))``.

    Keys are ``(v / w(m)) ** w.root`` as exact integer pairs, returned as two
    lists (numerators, denominators).
    """
    kn, kd = w.keys(vals)
    arg = suffix_argmax(kn, kd)
    wa, wb = [], []
    best = 0
    if w.kind == "linear":
        n = 0
        for v, j in zip(vals, arg):
            n += 1
            if v > best:
                best = v
            if best * (j + 1) >= kn[j] * n:
                wa.append(best)
                wb.append(n)
            else:
                wa.append(kn[j])
                wb.append(j + 1)
        return wa, wb
    key = w.key
    for i, v in enumerate(vals):
        if v > best:
            best = v
        pa, pb = key(best, i + 1)
        j = arg[i]
        if pa * kd[j] >= kn[j] * pb:
            wa.append(pa)
            wb.append(pb)
        else:
            wa.append(kn[j])
            wb.append(kd[j])
    return wa, wb


def _sum_pows(acc: PowerSum, nums: list[int], dens: list[int], scale: int, e: Fraction) -> None:
    """Add ``(nums[i] / (dens[i] * scale)) ** e`` for every i with nums[i] != 0."""
    i, n = 0, len(nums)
    while i < n and acc.exact_open:
        _add_term(acc, nums[i], dens[i] * scale, e)
        i += 1
    if i == n:
        return
    if e.denominator == 1 and e > 0:
        a = e.numerator
        if scale == 1:
            acc.add_rounded_ratios([x**a for x in nums[i:]], [y**a for y in dens[i:]])
        else:
            acc.add_rounded_ratios([x**a for x in nums[i:]], [(y * scale) ** a for y in dens[i:]])
        return
    for x, y in zip(nums[i:], dens[i:]):
        _add_term(acc, x, y * scale, e)


def _sup_scan(vals, den: int, w: WeightSpec, p: Fraction, window, rel_tol: float) -> Enclosure:
    """``sum_n (sup_m min(1/w(n), 1/w(m)) v_m / den) ** p`` with ``v_m`` frozen past N."""
    N = len(vals)
    M = max(vals, default=0)
    if M == 0:
        return ZERO
    W = _window(window, N)
    if w.kind == "tabulated":
        raise TailNotComputable(
            "tabulated weight: the terms past the support bound need w(n) for all n"
        )
    root = w.root
    e = p / root
    dr = den**root
    acc = PowerSum()
    wa, wb = _winners(vals, w)
    _sum_pows(acc, wa, wb, dr, e)
    for n in range(N + 1, W + 1):
        ka, kb = w.key(M, n)
        _add_term(acc, ka, kb * dr, e)
    finite = acc.result()
    beta = w.exponent
    tail = _zeta_tail(_abs_pow(M, den, p), beta * p, W + 1, finite, rel_tol)
    return finite + tail


def sup_terms(values, den: int, w: WeightSpec, p) -> list:
    """Per-n values of ``sup_m |min(1/w(n), 1/w(m)) v_m / den| ** p`` for n = 1..N.

    Exact Fractions whenever ``p / w.root`` is an integer.
    """
    p = to_exponent(p)
    vals = [abs(int(v)) for v in values]
    root = w.root
    e = p / root
    wa, wb = _winners(vals, w)
    return [_exact_or_near(ka, kb * den**root, e) for ka, kb in zip(wa, wb)]


def f1_terms(seq: Sequence, p, w: WeightSpec = LINEAR) -> list:
    """Per-n terms of the improved Hardy functional, n = 1..N."""
    ps = prefix_sums(seq)
    return sup_terms(ps.nums, ps.den, w, p)


def f2_terms(seq: Sequence, p, l_shift: int = 0) -> list:
    """Per-n terms of the improved gradient functional, n = 1..N."""
    p = _check_p(p)
    return sup_terms(seq.nums, seq.den, _shift_weight(p, l_shift), p)


def _shift_weight(p: Fraction, l_shift: int) -> WeightSpec:
    if l_shift < 0 or l_shift % 2:
        raise InputError(f"l must be an even nonnegative integer, got {l_shift}")
    return WeightSpec.power((l_shift + p) / p)


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

def lp_norm_p(seq: Sequence, p) -> Enclosure:
    """``sum |psi(n)|**p``, summed in ascending order of ``|psi(n)|``.

    The fixed order makes the result depend only on the multiset of values,
    so a sequence and its rearrangement give identical enclosures.
    """
    p = _check_p(p, strict=False)
    acc = PowerSum()
    vals = sorted(seq.abs_nums())
    _sum_pows(acc, vals, [1] * len(vals), seq.den, p)
    return acc.result()


def grad_hardy_lhs(seq: Sequence, p) -> Enclosure:
    """``sum_n |psi(n)|**p / n**p`` (finite)."""
    p = _check_p(p)
    acc = PowerSum()
    _sum_pows(acc, seq.abs_nums(), list(range(1, seq.N + 1)), seq.den, p)
    return acc.result()


def hardy_classical_lhs(seq: Sequence, p, window=None, rel_tol: float = DEFAULT_REL_TOL) -> Enclosure:
    """``sum_n |S(n) / n|**p`` over all n >= 1."""
    p = _check_p(p)
    ps = prefix_sums(seq)
    N = ps.N
    W = _window(window, N)
    if N == 0:
        return ZERO
    acc = PowerSum()
    _sum_pows(acc, [abs(s) for s in ps.nums], list(range(1, N + 1)), ps.den, p)
    last = abs(ps.nums[-1])
    for n in range(N + 1, W + 1):
        _add_term(acc, last, ps.den * n, p)
    finite = acc.result()
    return finite + _zeta_tail(_abs_pow(last, ps.den, p), p, W + 1, finite, rel_tol)


def f1_improved(seq: Sequence, p, w: WeightSpec = LINEAR, window=None,
                rel_tol: float = DEFAULT_REL_TOL) -> Enclosure:
    """``sum_n sup_m |min(1/w(n), 1/w(m)) S(m)|**p``.

    For n <= N the sup is the larger of ``max_{m<=n} |S(m)| / w(n)`` and
    ``max_{n<=m<=N} |S(m)| / w(m)`` (|S(m)|/w(m) does not increase past N).
    Past N every term is ``(max |S| / w(n))**p``.
    """
    p = _check_p(p)
    ps = prefix_sums(seq)
    if w.kind == "tabulated":
        v = w.validate(len(w.table))
        if not v:
            raise InputError(f"weight is not valid: {v.reason}")
        if ps.N > len(w.table):
            raise InputError(f"tabulated weight covers 1..{len(w.table)} but N = {ps.N}")
    elif w.exponent < 1:
        raise InputError(f"weight power {w.exponent} < 1 is not valid")
    return _sup_scan([abs(v) for v in ps.nums], ps.den, w, p, window, rel_tol)


def f2_improved(seq: Sequence, p, l_shift: int = 0, window=None,
                rel_tol: float = DEFAULT_REL_TOL) -> Enclosure:
    """``sum_n max(sup_{m<=n} |psi(m)|**p / n**(l+p), sup_{m>=n} |psi(m)|**p / m**(l+p))``."""
    p = _check_p(p)
    return _sup_scan(seq.abs_nums(), seq.den, _shift_weight(p, l_shift), p, window, rel_tol)


@lru_cache(maxsize=64)
def _coeffs_at(p: int, L: int, bits: int):
    from .series import cl_tail_sum, vp_coefficients

    table = vp_coefficients(p, L)
    return table, cl_tail_sum(p, table)


def _coeffs(p: int, L: int):
    return _coeffs_at(p, L, get_precision())


def _int_p(p) -> int:
    p = _check_p(p)
    if p.denominator != 1:
        raise InputError(f"p must be an integer >= 2 here, got {p}")
    return int(p)


def _check_L(L: int) -> int:
    L = int(L)
    if L < 0 or L % 2:
        raise InputError(f"L must be an even nonnegative integer, got {L}")
    return L


def vp_tail(p, start: int, L: int = DEFAULT_L, rel_tol: float = DEFAULT_REL_TOL, tol=None) -> Enclosure:
    """Enclosure of ``sum_{n >= start} v_p(n)``.

    Integer p: the series ``sum_l c_l zeta(l+p, start)``, truncated at L, with
    the omitted coefficients bounded by ``v_p(1) - sum_{l<=L} c_l`` times
    ``zeta(L+2+p, start)``. Other p: below by ``((p-1)/p)**p zeta(p, start)``,
    above by ``v_p(start) start**p zeta(p, start)`` (``v_p(n) n**p`` decreases).
    """
    p = _check_p(p)
    if p.denominator == 1:
        table, rest = _coeffs(int(p), _check_L(L))
        lo_sum = ZERO
        for l, c in table.entries:
            lo_sum = lo_sum + Enclosure.exact(c) * hurwitz_zeta(l + p, start, tol=tol, rel_tol=rel_tol)
        extra = Enclosure(0, rest.hi) * hurwitz_zeta(L + 2 + p, start, tol=tol, rel_tol=rel_tol)
        return Enclosure(lo_sum.lo, (lo_sum + extra).hi)
    z = hurwitz_zeta(p, start, tol=tol, rel_tol=rel_tol)
    lower = leading_constant(p) * z
    upper = vp_eval(p, start) * _abs_pow(start, 1, p) * z
    return Enclosure(lower.lo, upper.hi)


def fkp_lhs(seq: Sequence, p, window=None, L: int = DEFAULT_L,
            rel_tol: float = DEFAULT_REL_TOL) -> Enclosure:
    """``sum_n v_p(n) |S(n)|**p``."""
    p = _check_p(p)
    ps = prefix_sums(seq)
    N = ps.N
    W = _window(window, N)
    if N == 0:
        return ZERO
    dn, up = ctx(RoundDown), ctx(RoundUp)
    lo, hi = mpfr(0), mpfr(0)
    last = abs(ps.nums[-1])
    if last:
        # the tail brackets are loose near n = 1; sum a few more terms explicitly
        W = max(W, _FKP_MIN_WINDOW if p.denominator == 1 else _FKP_MIN_WINDOW_FRAC)
    for n in range(1, W + 1):
        s = abs(ps.nums[n - 1]) if n <= N else last
        if s == 0:
            continue
        t = vp_eval(p, n) * _abs_pow(s, ps.den, p)
        lo, hi = dn.add(lo, t.lo), up.add(hi, t.hi)
    finite = Enclosure(lo, hi)
    factor = _abs_pow(last, ps.den, p)
    if factor.hi == 0:
        return finite
    tol = _tail_tol(finite, factor, rel_tol)
    return finite + factor * vp_tail(p, W + 1, L, rel_tol, tol)


def _improved_sum(terms, rest: Enclosure, floor: Enclosure, ceiling: Enclosure) -> Enclosure:
    """``sum c_l F_l`` over the evaluated l plus the omitted part.

    Every per-n term decreases in l and tends to the n = 1, m = 1 term, so
    each omitted ``F_l`` lies in ``[floor, ceiling]`` where ``ceiling`` is
    ``F`` at the first omitted index; the omitted coefficients sum to ``rest``.
    """
    total = ZERO
    for c, value in terms:
        total = total + Enclosure.exact(c) * value
    lo_part = Enclosure(rest.lo if rest.lo > 0 else 0, rest.lo if rest.lo > 0 else 0) * floor
    hi_part = Enclosure(0, rest.hi) * ceiling
    return Enclosure((total + lo_part).lo, (total + hi_part).hi)


def fkp_improved_lhs(seq: Sequence, p, L: int = DEFAULT_L, rel_tol: float = DEFAULT_REL_TOL) -> Enclosure:
    """``sum_{l even} c_l sum_n sup_m |min(n**-b, m**-b) S(m)|**p``, ``b = (l+p)/p``.

    Terms with l <= L are evaluated. The rest is bracketed using the
    coefficient tail sum and the functional at l = L + 2.
    """
    pi = _int_p(p)
    L = _check_L(L)
    table, rest = _coeffs(pi, L)
    P = mpq(pi)

    def f1_l(l):
        return f1_improved(seq, P, WeightSpec.power((l + P) / P), rel_tol=rel_tol)

    terms = [(c, f1_l(l)) for l, c in table.entries]
    ps = prefix_sums(seq)
    floor = _abs_pow(abs(ps.nums[0]), ps.den, P) if ps.nums else ZERO
    return _improved_sum(terms, rest, floor, f1_l(L + 2))


def fkp_improved_grad_lhs(seq: Sequence, p, L: int = DEFAULT_L, rel_tol: float = DEFAULT_REL_TOL) -> Enclosure:
    """``sum_{l even} c_l f2_improved(psi, p, l)``, remainder bracketed as above."""
    pi = _int_p(p)
    L = _check_L(L)
    table, rest = _coeffs(pi, L)
    P = mpq(pi)
    terms = [(c, f2_improved(seq, P, l, rel_tol=rel_tol)) for l, c in table.entries]
    floor = _abs_pow(abs(seq.nums[0]), seq.den, P) if seq.nums else ZERO
    return _improved_sum(terms, rest, floor, f2_improved(seq, P, L + 2, rel_tol=rel_tol))


def _root_of(x: Enclosure, q: Fraction) -> Enclosure:
    if x.hi == 0:
        return ZERO
    return x.pow(q)


def uncertainty_sides(seq: Sequence, p, branch: str = "suffix", truncation: int = 1000):
    """Both sides of the uncertainty inequality on one branch.

    suffix: ``lhs = ((p-1)/p) sum_n sup_{m>=n} |psi(m)|**p`` and
    ``rhs = ||grad psi||_p (sum_n sup_{m>=n} m**q |psi(m)|**p)**(1/q)``.
    prefix: the same with ``sup_{m<=n}`` (and ``n**q``), both sums cut at
    ``n <= truncation`` since the untruncated series diverge.
    """
    p = _check_p(p)
    if branch not in ("prefix", "suffix"):
        raise InputError(f"branch must be 'prefix' or 'suffix', got {branch!r}")
    if branch == "prefix" and truncation < 1:
        raise InputError("truncation must be at least 1")
    vals = seq.abs_nums()
    if not vals:
        return ZERO, ZERO
    den = seq.den
    r, s = p.numerator, p.denominator
    q = p / (p - 1)
    e_key = Fraction(r, s * (r - s))  # m**q |psi|**p = (m**s |psi|**(r-s)) ** e_key
    keys = [(m**s) * v ** (r - s) for m, v in enumerate(vals, start=1)]
    kden = den ** (r - s)
    sum_lhs, sum_rhs = PowerSum(), PowerSum()
    if branch == "suffix":
        best_v, best_k = 0, 0
        sup_v, sup_k = [0] * len(vals), [0] * len(vals)
        for i in range(len(vals) - 1, -1, -1):
            best_v = max(best_v, vals[i])
            best_k = max(best_k, keys[i])
            sup_v[i], sup_k[i] = best_v, best_k
        for v, k in zip(sup_v, sup_k):
            _add_term(sum_lhs, v, den, p)
            _add_term(sum_rhs, k, kden, e_key)
    else:
        best = 0
        top = max(vals)
        for n in range(1, truncation + 1):
            if best < top and n <= len(vals):
                best = max(best, vals[n - 1])
            _add_term(sum_lhs, best, den, p)
            _add_term(sum_rhs, (n**s) * best ** (r - s), kden, e_key)
    lhs = Enclosure.exact(mpq((p - 1) / p)) * sum_lhs.result()
    grad = lp_norm_p(forward_difference(seq), p)
    rhs = _root_of(grad, 1 / p) * _root_of(sum_rhs.result(), 1 / q)
    return lhs, rhs


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

FUNCTIONALS = ("hardy", "grad", "f1", "f2", "fkp", "fkp-improved", "fkp-improved-grad", "uncertainty")


@dataclass(frozen=True)
class FunctionalReport:
    name: str
    p: Fraction
    value: Enclosure
    window: int
    tail: str

    def to_json(self, digits: int | None = None) -> dict:
        return {
            "name": self.name,
            "p": str(self.p),
            "lo": decimal_string(self.value.lo, RoundDown, digits),
            "hi": decimal_string(self.value.hi, RoundUp, digits),
            "window": self.window,
            "tail": self.tail,
        }


def evaluate(name: str, seq: Sequence, p, w: WeightSpec = LINEAR, L: int = DEFAULT_L,
             l_shift: int = 0, window=None, truncation: int = 1000,
             rel_tol: float = DEFAULT_REL_TOL) -> list[FunctionalReport]:
    """Evaluate one named functional; ``uncertainty`` yields four reports."""
    p = _check_p(p)
    N = seq.N
    W = _window(window, N)
    if name == "hardy":
        v = hardy_classical_lhs(seq, p, W, rel_tol)
        return [FunctionalReport(name, p, v, W, f"|S(N)|^p * zeta({p}, {W + 1})")]
    if name == "grad":
        return [FunctionalReport(name, p, grad_hardy_lhs(seq, p), N, "none (finite sum)")]
    if name == "f1":
        v = f1_improved(seq, p, w, W, rel_tol)
        beta = w.exponent
        tail = f"max|S|^p * zeta({beta * p if beta else '?'}, {W + 1})"
        return [FunctionalReport(f"f1[{w}]", p, v, W, tail)]
    if name == "f2":
        v = f2_improved(seq, p, l_shift, W, rel_tol)
        return [FunctionalReport(f"f2[l={l_shift}]", p, v, W, f"max|psi|^p * zeta({l_shift + p}, {W + 1})")]
    if name == "fkp":
        v = fkp_lhs(seq, p, W, L, rel_tol)
        how = f"series through l={L} plus coefficient tail" if p.denominator == 1 else "monotone bracket of v_p(n) n^p"
        return [FunctionalReport(name, p, v, W, f"|S(N)|^p * sum_(n>{W}) v_p(n), {how}")]
    if name == "fkp-improved":
        v = fkp_improved_lhs(seq, p, L, rel_tol)
        return [FunctionalReport(f"{name}[L={L}]", p, v, N, f"per-l zeta tails; l>{L} bounded by coefficient tail")]
    if name == "fkp-improved-grad":
        v = fkp_improved_grad_lhs(seq, p, L, rel_tol)
        return [FunctionalReport(f"{name}[L={L}]", p, v, N, f"per-l zeta tails; l>{L} bounded by coefficient tail")]
    if name == "uncertainty":
        out = []
        for branch in ("suffix", "prefix"):
            lhs, rhs = uncertainty_sides(seq, p, branch, truncation)
            extent = N if branch == "suffix" else truncation
            tail = "none (terms vanish past N)" if branch == "suffix" else f"truncated at n={truncation}"
            out.append(FunctionalReport(f"uncertainty-{branch}-lhs", p, lhs, extent, tail))
            out.append(FunctionalReport(f"uncertainty-{branch}-rhs", p, rhs, extent, tail))
        return out
    raise InputError(f"unknown functional {name!r}; choose from {', '.join(FUNCTIONALS)}")
