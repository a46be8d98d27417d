"""Finitely supported sequences on the positive integers.

A :class:`Sequence` holds ``psi(1..N)`` as integer numerators over one common
positive denominator, so prefix sums, differences and every comparison used by
the sup-scans are exact integer arithmetic. ``psi(0) = 0`` is implicit and
``psi(n) = 0`` for ``n > N``; ``N`` is always minimal.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from gmpy2 import mpq

from .errors import InputError
from .numeric import RoundNearest, rpow_bound, to_exponent, to_rational


def _trim(nums: list[int]) -> list[int]:
    end = len(nums)
    while end and nums[end - 1] == 0:
        end -= 1
    del nums[end:]
    return nums


def _normalise(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    _trim(nums)
    if not nums:
        return (), 1
    g = den
    for v in nums:
        if g == 1:
            break
        g = math.gcd(g, v)
    if g > 1:
        nums = [v // g for v in nums]
        den //= g
    return tuple(nums), den


@dataclass(frozen=True)
class Sequence:
    """``psi(n) = nums[n-1] / den`` for ``1 <= n <= N``."""

    nums: tuple[int, ...]
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise InputError("denominator must be positive")
        if self.nums and self.nums[-1] == 0:
            raise InputError("support bound must be minimal; use Sequence.of")

    @classmethod
    def of(cls, nums: Iterable[int], den: int = 1) -> "Sequence":
        """Build from integer numerators, trimming trailing zeros."""
        return cls(*_normalise([int(v) for v in nums], int(den)))

    @property
    def N(self) -> int:
        return len(self.nums)

    def __len__(self) -> int:
        return len(self.nums)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.den) for v in self.nums)

    def at(self, n: int):
        """Logical value psi(n) for any n >= 0."""
        if n < 0:
            raise IndexError(n)
        if n == 0 or n > self.N:
            return mpq(0)
        return mpq(self.nums[n - 1], self.den)

    def abs_nums(self) -> list[int]:
        return [-v if v < 0 else v for v in self.nums]

    def scaled(self, t) -> "Sequence":
        t = to_rational(t)
        return Sequence.of([v * int(t.numerator) for v in self.nums], self.den * int(t.denominator))

    def max_abs(self) -> mpq:
        return mpq(max(self.abs_nums(), default=0), self.den)

    def __repr__(self) -> str:
        vals = ", ".join(str(v) for v in self.values[:8])
        more = ", ..." if self.N > 8 else ""
        return f"Sequence(N={self.N}, [{vals}{more}])"


def from_values(raw: Iterable) -> Sequence:
    """Parse numbers (ints, floats, Fractions, ``"a/b"`` strings, MPFR values)."""
    qs = [to_rational(x) for x in raw]
    if not qs:
        return Sequence(())
    den = 1
    for q in qs:
        d = int(q.denominator)
        if d != 1 and den % d:
            den = den * d // math.gcd(den, d)
    nums = [int(q.numerator) * (den // int(q.denominator)) for q in qs]
    return Sequence.of(nums, den)


@dataclass(frozen=True)
class PrefixSums:
    """``S(m) = nums[m-1] / den``; ``S(m) = S(N)`` for m > N."""

    nums: tuple[int, ...]
    den: int

    @property
    def N(self) -> int:
        return len(self.nums)

    @property
    def sums(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.den) for v in self.nums)

    @property
    def total(self) -> mpq:
        return mpq(self.nums[-1], self.den) if self.nums else mpq(0)

    def at(self, m: int) -> mpq:
        if m <= 0:
            return mpq(0)
        if m > self.N:
            return self.total
        return mpq(self.nums[m - 1], self.den)


@dataclass(frozen=True)
class RearrangedSequence:
    """Absolute values in non-increasing order, multiplicities kept."""

    nums: tuple[int, ...]
    den: int = 1

    @property
    def N(self) -> int:
        return len(self.nums)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.den) for v in self.nums)

    def as_sequence(self) -> Sequence:
        return Sequence.of(self.nums, self.den)


def rearrange(seq: Sequence) -> RearrangedSequence:
    nums = sorted(seq.abs_nums(), reverse=True)
    return RearrangedSequence(tuple(nums), seq.den)


def prefix_sums(seq: Sequence) -> PrefixSums:
    return PrefixSums(tuple(itertools.accumulate(seq.nums)), seq.den)


def forward_difference(seq: Sequence) -> Sequence:
    """``(grad psi)(n) = psi(n) - psi(n-1)`` with ``psi(0) = 0``; support N+1."""
    prev = 0
    out = []
    for v in seq.nums:
        out.append(v - prev)
        prev = v
    out.append(-prev)
    return Sequence.of(out, seq.den)


def cumulative_sum(seq: Sequence) -> Sequence:
    """Inverse of :func:`forward_difference` on finitely supported sequences."""
    ps = prefix_sums(seq)
    if ps.nums and ps.nums[-1] != 0:
        raise InputError(
            f"not compactly supported antiderivative: total {ps.total} != 0"
        )
    return Sequence.of(ps.nums, seq.den)


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def running_max(values: Iterable[int]) -> list[int]:
    out = []
    best = 0
    for v in values:
        a = -v if v < 0 else v
        if a > best:
            best = a
        out.append(best)
    return out


def prefix_max_abs(ps: PrefixSums) -> list[Fraction]:
    """``max_{m <= n} |S(m)|`` for n = 1..N."""
    return [Fraction(v, ps.den) for v in running_max(ps.nums)]


def suffix_argmax(keys_num: list[int], keys_den: list[int]) -> list[int]:
    """For each position i, the index j >= i maximising ``keys_num[j]/keys_den[j]``.

    Ties keep the smallest index. Comparisons are exact cross-multiplications.
    """
    n = len(keys_num)
    out = [0] * n
    best = n - 1 if n else 0
    for i in range(n - 1, -1, -1):
        if keys_num[i] * keys_den[best] >= keys_num[best] * keys_den[i]:
            best = i
        out[i] = best
    return out


def scaled_keys(abs_nums: list[int], exponent: Fraction) -> tuple[list[int], list[int]]:
    """Exact order keys for ``a_m / m**exponent`` (m = 1..len).

    With exponent = a/b the map x -> x**b is increasing, so comparing
    ``a_m**b / m**a`` orders the original ratios exactly.
    """
    a, b = exponent.numerator, exponent.denominator
    if b == 1:
        return list(abs_nums), [m**a for m in range(1, len(abs_nums) + 1)]
    return [v**b for v in abs_nums], [m**a for m in range(1, len(abs_nums) + 1)]


def suffix_max_scaled(ps: PrefixSums, exponent=1) -> list:
    """``max_{n <= m <= N} |S(m)| / m**exponent`` for n = 1..N.

    Exact Fractions for integer exponents, otherwise round-to-nearest MPFR
    values at working precision.
    """
    e = to_exponent(exponent)
    if e < 1:
        raise InputError("exponent must be at least 1")
    abs_nums = [abs(v) for v in ps.nums]
    kn, kd = scaled_keys(abs_nums, e)
    arg = suffix_argmax(kn, kd)
    out = []
    for j in arg:
        m = j + 1
        if e.denominator == 1:
            out.append(Fraction(abs_nums[j], ps.den * m ** e.numerator))
        else:
            out.append(mpq(abs_nums[j], ps.den) / rpow_bound(mpq(m), e, RoundNearest))
    return out


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------

def _value_token(num: int, den: int):
    q = Fraction(num, den)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dumps_sequence(seq: Sequence) -> str:
    return json.dumps({"values": [_value_token(v, seq.den) for v in seq.nums]})


def loads_sequence(text: str) -> Sequence:
    """Parse the JSON ``{"values": [...]}`` format."""
    try:
        obj = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict) or "values" not in obj:
        raise InputError('expected a JSON object with field "values"')
    vals = obj["values"]
    if not isinstance(vals, list):
        raise InputError('field "values" must be a list')
    parsed = []
    for i, v in enumerate(vals):
        try:
            parsed.append(to_rational(v))
        except InputError as exc:
            raise InputError(f'field "values"[{i}]: {exc}') from exc
    return from_values(parsed)


def loads_sequence_csv(text: str) -> Sequence:
    """Parse CSV rows ``index,value`` (1-based; missing indices are 0)."""
    entries: dict[int, mpq] = {}
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise InputError(f"line {lineno}: expected 'index,value', got {len(row)} fields")
        idx_s, val_s = row[0].strip(), row[1].strip()
        if lineno == 1 and not idx_s.lstrip("+-").isdigit():
            continue  # header
        try:
            idx = int(idx_s)
        except ValueError as exc:
            raise InputError(f"line {lineno}, field index: {idx_s!r} is not an integer") from exc
        if idx < 1:
            raise InputError(f"line {lineno}, field index: indices start at 1")
        if idx in entries:
            raise InputError(f"line {lineno}, field index: duplicate index {idx}")
        try:
            entries[idx] = to_rational(val_s)
        except InputError as exc:
            raise InputError(f"line {lineno}, field value: {exc}") from exc
    if not entries:
        return Sequence(())
    n = max(entries)
    return from_values(entries.get(i, 0) for i in range(1, n + 1))


def load_sequence(path: str | Path) -> Sequence:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        return loads_sequence_csv(text)
    if not text.strip():
        return Sequence(())
    return loads_sequence(text)


def dumps_sequence_csv(seq: Sequence) -> str:
    """``index,value`` rows; zero entries are omitted."""
    rows = ["index,value"]
    rows += [f"{i},{_value_token(v, seq.den)}" for i, v in enumerate(seq.nums, start=1) if v]
    return "\n".join(rows) + "\n"


def save_sequence(seq: Sequence, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(dumps_sequence_csv(seq), encoding="utf-8")
    else:
        path.write_text(dumps_sequence(seq) + "\n", encoding="utf-8")
