"""Empirical probes of the sharp constant ``(p/(p-1))**p``.

Two tools:

* a sweep over the truncated power family ``a_n = n**(-(1+eps)/p)``, whose
  Hardy ratios creep up towards 1 as eps -> 0 and N -> infinity;
* a multiplicative coordinate hill climb that maximises the ratio directly.

Every reported ratio is a certified enclosure of ``LHS / (C * RHS)`` for the
exact sequence that was evaluated. Family members that are not rational are
rounded once to dyadic rationals; the rounded sequence is what gets certified.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np

from .errors import ConsistencyError, InputError
from .functionals import (
    f1_improved,
    f2_improved,
    grad_hardy_lhs,
    hardy_classical_lhs,
    lp_norm_p,
)
from .inequalities import hardy_constant
from .numeric import (Enclosure, RoundDown, RoundUp, ctx, decimal_string, get_precision,
                      to_exponent, working_precision)
from .seqcore import Sequence, forward_difference, from_values

SWEEP_FUNCTIONALS = ("hardy", "f1", "grad", "f2")
DEFAULT_EPSILONS = ("1", "0.3", "0.1", "0.03", "0.01")
DEFAULT_NS = (10**2, 10**3, 10**4, 10**5, 10**6)
SWEEP_COLUMNS = ("epsilon", "N", "lhs_lo", "lhs_hi", "rhs", "ratio")

# exact 1/n**k family members are kept only while lcm(1..N)**k stays small
_EXACT_MAX_N = 1000


def default_grid() -> list[tuple[Fraction, int]]:
    return [(Fraction(e), n) for e in DEFAULT_EPSILONS for n in DEFAULT_NS]


def parse_grid(text: str) -> list[tuple[Fraction, int]]:
    """``"eps:N,eps:N,..."``, or ``"eps1,eps2/N1,N2"`` for a product grid."""
    text = text.strip()
    if not text:
        raise InputError("empty grid")
    try:
        if "/" in text:
            es, ns = text.split("/", 1)
            grid = [(to_exponent(e), int(n)) for e in es.split(",") for n in ns.split(",")]
        else:
            grid = []
            for item in text.split(","):
                e, n = item.split(":")
                grid.append((to_exponent(e), int(n)))
    except (ValueError, InputError) as exc:
        raise InputError(f"malformed grid {text!r}: expected eps:N pairs or eps,../N,..") from exc
    for e, n in grid:
        if e <= 0 or n < 1:
            raise InputError(f"grid point ({e}, {n}) needs eps > 0 and N >= 1")
    return grid


# ---------------------------------------------------------------------------
# near-extremal family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    p: Fraction
    epsilon: Fraction
    N: int
    kind: str = "power_family"

    def __post_init__(self):
        if self.kind != "power_family":
            raise InputError(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "p", to_exponent(self.p))
        object.__setattr__(self, "epsilon", to_exponent(self.epsilon))
        if self.p <= 0:
            raise InputError("p must be positive")
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive")
        if self.N < 1:
            raise InputError("N must be at least 1")

    @property
    def exponent(self) -> Fraction:
        return (1 + self.epsilon) / self.p


def _smallest_prime_factors(N: int) -> np.ndarray:
    spf = np.zeros(N + 1, dtype=np.int64)
    for q in range(2, math.isqrt(N) + 1):
        if spf[q] == 0:
            block = spf[q * q :: q]
            block[block == 0] = q
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    return spf


def _power_nums(g: Fraction, N: int, bits: int) -> tuple[list[int], int]:
    """Numerators over ``2**K`` of ``n**(-g)``, n = 1..N, to about ``bits`` bits.

    ``n**(-g)`` is completely multiplicative, so exp/log is only needed at
    primes; composites are one product each (a few extra roundings at
    ``bits + 16`` bits, well below the final rounding).
    """
    K = bits + math.ceil(float(g) * math.log2(N)) + 2
    c = ctx(bits=bits + 16)
    ge = c.div(-g.numerator, g.denominator)
    exp, log, mul = c.exp, c.log, c.mul
    spf = _smallest_prime_factors(N).tolist()
    vals = [None, gmpy2.mpfr(1)]
    for n in range(2, N + 1):
        q = spf[n]
        vals.append(exp(mul(ge, log(n))) if q == n else mul(vals[q], vals[n // q]))
    nums = []
    for v in vals[1:]:
        m, e = v.as_mantissa_exp()
        e += K
        nums.append(int(m) << e if e >= 0 else (int(m) + (1 << (-e - 1))) >> -e)
    return nums, 2**K


def near_extremal(spec: FamilySpec, bits: int | None = None) -> Sequence:
    """``a_n = n**(-(1+eps)/p)`` for n <= N.

    Integer exponents with N <= 1000 are exact; otherwise every value is
    rounded to a dyadic rational with about ``bits`` significant bits.
    """
    g = spec.exponent
    if g.denominator == 1 and spec.N <= _EXACT_MAX_N:
        k = int(g)
        lcm = math.lcm(*range(1, spec.N + 1)) ** k
        seq = Sequence.of([lcm // n**k for n in range(1, spec.N + 1)], lcm)
    else:
        nums, den = _power_nums(g, spec.N, bits or get_precision())
        seq = Sequence.of(nums, den)
    if any(b >= a for a, b in zip(seq.nums, seq.nums[1:])) or seq.nums[-1] <= 0:
        raise ConsistencyError("family member is not positive and strictly decreasing")
    return seq


def _prefix(seq: Sequence, N: int) -> Sequence:
    return Sequence.of(seq.nums[:N], seq.den)


# ---------------------------------------------------------------------------
# certified ratios
# ---------------------------------------------------------------------------

def certified_sides(functional: str, seq: Sequence, p) -> tuple[Enclosure, Enclosure]:
    """``(LHS, RHS)`` of the chosen inequality; the constant is not applied."""
    p = to_exponent(p)
    if functional == "hardy":
        return hardy_classical_lhs(seq, p), lp_norm_p(seq, p)
    if functional == "f1":
        return f1_improved(seq, p), lp_norm_p(seq, p)
    if functional == "grad":
        return grad_hardy_lhs(seq, p), lp_norm_p(forward_difference(seq), p)
    if functional == "f2":
        return f2_improved(seq, p), lp_norm_p(forward_difference(seq), p)
    raise InputError(f"unknown functional {functional!r}; choose from {', '.join(SWEEP_FUNCTIONALS)}")


def certified_ratio(functional: str, seq: Sequence, p) -> tuple[Enclosure, Enclosure, Enclosure]:
    """``(LHS, C * RHS, LHS / (C * RHS))``."""
    lhs, rhs = certified_sides(functional, seq, p)
    if not rhs.lo > 0:
        raise InputError("right-hand side vanishes; the ratio is undefined")
    scaled = hardy_constant(p) * rhs
    return lhs, scaled, lhs / scaled


@dataclass(frozen=True)
class SweepRow:
    epsilon: Fraction
    N: int
    lhs: Enclosure
    rhs: Enclosure
    ratio: Enclosure

    def csv_row(self, digits: int | None = None) -> list:
        return [
            _decimal_param(self.epsilon),
            self.N,
            decimal_string(self.lhs.lo, RoundDown, digits),
            decimal_string(self.lhs.hi, RoundUp, digits),
            decimal_string(self.rhs.lo, RoundDown, digits),
            decimal_string(self.ratio.hi, RoundUp, digits),
        ]


def _decimal_param(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    # terminating decimals print as decimals, everything else as a/b
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return str(x)
    k = 0
    while (x * 10**k).denominator != 1:
        k += 1
    s = f"{int(x * 10**k):0{k + 1}d}"
    return f"{s[:-k]}.{s[-k:]}"


@dataclass
class RatioSweep:
    functional: str
    p: Fraction
    grid: list[tuple[Fraction, int]]
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def ratios(self) -> list[Enclosure]:
        return [r.ratio for r in self.rows]

    @property
    def exceeds(self) -> list[SweepRow]:
        """Rows whose ratio is certified above 1."""
        return [r for r in self.rows if r.ratio.lo > 1]

    def to_csv(self, digits: int | None = None) -> str:
        out = io.StringIO()
        wr = csv.writer(out, lineterminator="\n")
        wr.writerow(SWEEP_COLUMNS)
        for r in self.rows:
            wr.writerow(r.csv_row(digits))
        return out.getvalue()


def _sweep_group(args) -> list[SweepRow]:
    functional, p, eps, Ns, bits = args
    with working_precision(bits):
        # members for smaller N are prefixes of the largest one
        full = near_extremal(FamilySpec(p, eps, max(Ns)), bits)
        rows = []
        for N in Ns:
            seq = full if N == full.N else _prefix(full, N)
            lhs, rhs, ratio = certified_ratio(functional, seq, p)
            rows.append(SweepRow(eps, N, lhs, rhs, ratio))
    return rows


def ratio_sweep(functional: str, p, grid=None, workers: int = 1, bits: int | None = None) -> RatioSweep:
    """Certified ratios of the power family over ``grid`` (list of (eps, N))."""
    if functional not in SWEEP_FUNCTIONALS:
        raise InputError(f"unknown functional {functional!r}; choose from {', '.join(SWEEP_FUNCTIONALS)}")
    p = to_exponent(p)
    if p <= 1:
        raise InputError(f"p must exceed 1, got {p}")
    grid = default_grid() if grid is None else [(to_exponent(e), int(n)) for e, n in grid]
    if not grid:
        raise InputError("grid must be nonempty")
    bits = bits or get_precision()
    groups: dict[Fraction, list[int]] = {}
    for e, n in grid:
        groups.setdefault(e, []).append(n)
    jobs = [(functional, p, e, sorted(set(ns)), bits) for e, ns in groups.items()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_group, jobs))
    else:
        results = [_sweep_group(j) for j in jobs]
    by_point = {(r.epsilon, r.N): r for rows in results for r in rows}
    return RatioSweep(functional, p, grid, [by_point[(e, n)] for e, n in grid])


# ---------------------------------------------------------------------------
# adversarial search
# ---------------------------------------------------------------------------

def _zeta_tail_float(s: float, a: float) -> float:
    """Euler-Maclaurin estimate of ``zeta(s, a)`` for large ``a``."""
    return a ** (1 - s) / (s - 1) + 0.5 * a**-s + s * a ** (-s - 1) / 12


class _FloatRatio:
    """Float64 ratio used only to steer the search."""

    def __init__(self, functional: str, p: float, N: int):
        if functional not in SWEEP_FUNCTIONALS:
            raise InputError(f"unknown functional {functional!r}; choose from {', '.join(SWEEP_FUNCTIONALS)}")
        self.functional = functional
        self.p = p
        self.n = np.arange(1, N + 1, dtype=float)
        self.C = (p / (p - 1)) ** p
        self.tail = _zeta_tail_float(p, N + 1.0)

    def __call__(self, x: np.ndarray) -> float:
        p, n = self.p, self.n
        f = self.functional
        if f in ("hardy", "f1"):
            S = np.cumsum(x)
            if f == "hardy":
                lhs = np.sum((S / n) ** p)
            else:
                pre = S / n  # S is non-decreasing for x >= 0
                suf = np.maximum.accumulate((S / n)[::-1])[::-1]
                lhs = np.sum(np.maximum(pre, suf) ** p)
            lhs += S[-1] ** p * self.tail
            rhs = np.sum(x**p)
        else:
            if f == "grad":
                lhs = np.sum((x / n) ** p)
            else:
                pre = np.maximum.accumulate(x) / n
                suf = np.maximum.accumulate((x / n)[::-1])[::-1]
                lhs = np.sum(np.maximum(pre, suf) ** p) + x.max() ** p * self.tail
            rhs = np.sum(np.abs(np.diff(x, prepend=0.0)) ** p) + x[-1] ** p
        return float(lhs / (self.C * rhs))


@dataclass
class SearchResult:
    functional: str
    p: Fraction
    N: int
    seed: int
    iterations: int
    best_float: float
    lhs: Enclosure
    rhs: Enclosure
    ratio: Enclosure
    sequence: Sequence
    trajectory: list[tuple[int, float]]

    @property
    def exceeds(self) -> bool:
        return self.ratio.lo > 1


def adversarial_search(functional: str, p, N: int, iterations: int = 10_000, seed: int = 0,
                       delta: float = 0.5, min_delta: float = 1e-9) -> SearchResult:
    """Multiplicative coordinate hill climb on nonnegative sequences of support <= N.

    Each step scales one random coordinate by ``1 + delta`` or ``1 - delta``
    and keeps the change if the float ratio improves; ``delta`` halves after
    ``2N`` consecutive rejections. The best sequence is then certified exactly.
    """
    if N < 1:
        raise InputError("N must be at least 1")
    p = to_exponent(p)
    if p <= 1:
        raise InputError(f"p must exceed 1, got {p}")
    obj = _FloatRatio(functional, float(p), N)
    rng = np.random.default_rng(seed)
    x = np.ones(N)
    best = obj(x)
    trajectory = [(0, best)]
    stale = 0
    for it in range(1, iterations + 1):
        i = int(rng.integers(N))
        factor = 1 + delta if rng.random() < 0.5 else 1 - delta
        old = x[i]
        x[i] = old * factor
        r = obj(x)
        if r > best:
            best = r
            stale = 0
            trajectory.append((it, r))
        else:
            x[i] = old
            stale += 1
            if stale >= 2 * N:
                delta = max(delta / 2, min_delta)
                stale = 0
        if it % 1024 == 0:
            x /= x.max()  # ratios are scale invariant; keep values near 1
    seq = from_values(x.tolist())
    lhs, rhs, ratio = certified_ratio(functional, seq, p)
    return SearchResult(functional, p, N, seed, iterations, best, lhs, rhs, ratio, seq, trajectory)


__all__ = [
    "SWEEP_FUNCTIONALS",
    "SWEEP_COLUMNS",
    "DEFAULT_EPSILONS",
    "DEFAULT_NS",
    "FamilySpec",
    "RatioSweep",
    "SweepRow",
    "SearchResult",
    "default_grid",
    "parse_grid",
    "near_extremal",
    "certified_sides",
    "certified_ratio",
    "ratio_sweep",
    "adversarial_search",
]
