"""Inequality checkers and the randomized suite harness.

A check pairs two enclosures, ``lhs`` and ``rhs_scaled`` (constant already
applied), and returns a verdict:

* ``pass`` when ``lhs.hi <= rhs.lo``, or when an exact certificate exists,
  or when both enclosures are narrower than the verdict tolerance (equality
  cases such as ``hardy == f1`` for a point mass);
* ``fail`` only when ``lhs.lo > rhs.hi``, a certified violation;
* ``inconclusive`` otherwise. The harness retries at doubled precision.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .errors import InputError
from .functionals import (
    DEFAULT_L,
    DEFAULT_REL_TOL,
    _abs_pow,
    _winners,
    f1_improved,
    f2_improved,
    fkp_improved_grad_lhs,
    fkp_improved_lhs,
    fkp_lhs,
    grad_hardy_lhs,
    hardy_classical_lhs,
    lp_norm_p,
    uncertainty_sides,
)
from .numeric import (
    ZERO,
    Enclosure,
    RoundDown,
    RoundUp,
    ctx,
    decimal_string,
    get_precision,
    rpow_bound,
    to_exponent,
    working_precision,
)
from .seqcore import Sequence, forward_difference, prefix_sums, rearrange
from .weights import LINEAR, WeightSpec, weighted_average_monotone_check

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
VERDICT_REL_TOL = 1e-9
MAX_RETRIES = 2

REAL_P_GRID = (Fraction(11, 10), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3), Fraction(5))
INT_P_GRID = (2, 3, 4, 5)


def hardy_constant(p) -> Enclosure:
    """Enclosure of ``(p/(p-1))**p``."""
    p = to_exponent(p)
    base = mpq(p / (p - 1))
    return Enclosure(rpow_bound(base, p, RoundDown), rpow_bound(base, p, RoundUp))


@dataclass
class CheckReport:
    theorem: str
    p: Fraction
    lhs: Enclosure
    rhs_scaled: Enclosure
    verdict: str
    constant: Enclosure | None = None
    witness: Sequence | None = None
    detail: str = ""
    links: list = field(default_factory=list)

    @property
    def margin(self):
        """``rhs_scaled.lo - lhs.hi`` rounded down."""
        return ctx(RoundDown).sub(self.rhs_scaled.lo, self.lhs.hi)

    @property
    def relative_margin(self) -> float:
        scale = max(abs(self.rhs_scaled.hi), abs(self.lhs.hi))
        if scale == 0:
            return 0.0
        return float(ctx(RoundDown).div(self.margin, scale))

    def to_json(self, digits: int = 25) -> dict:
        out = {
            "theorem": self.theorem,
            "p": str(self.p),
            "verdict": self.verdict,
            "lhs": [decimal_string(self.lhs.lo, RoundDown, digits), decimal_string(self.lhs.hi, RoundUp, digits)],
            "rhs_scaled": [
                decimal_string(self.rhs_scaled.lo, RoundDown, digits),
                decimal_string(self.rhs_scaled.hi, RoundUp, digits),
            ],
            "margin": decimal_string(self.margin, RoundDown, digits),
        }
        if self.constant is not None:
            out["constant"] = [decimal_string(self.constant.lo, RoundDown, digits),
                               decimal_string(self.constant.hi, RoundUp, digits)]
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = [str(v) for v in self.witness.values]
        if self.links:
            out["links"] = [l.to_json(digits) for l in self.links]
        return out


def decide(lhs: Enclosure, rhs: Enclosure, certificate: bool | None = None,
           rel_tol: float = VERDICT_REL_TOL) -> str:
    """Verdict for the claim ``lhs <= rhs``.

    ``certificate`` is an exact answer when the caller has one.
    """
    if certificate is True:
        return PASS
    if lhs.lo > rhs.hi:
        return FAIL
    if certificate is False:
        return FAIL
    if lhs.hi <= rhs.lo:
        return PASS
    scale = max(abs(lhs.hi), abs(rhs.hi))
    limit = ctx(RoundDown).mul(scale, rel_tol)
    if lhs.width <= limit and rhs.width <= limit:
        return PASS
    return INCONCLUSIVE


def _worst(verdicts) -> str:
    vs = list(verdicts)
    if FAIL in vs:
        return FAIL
    if INCONCLUSIVE in vs:
        return INCONCLUSIVE
    return PASS


def _report(name, p, lhs, rhs, constant=None, seq=None, certificate=None, detail="", rel_tol=VERDICT_REL_TOL):
    v = decide(lhs, rhs, certificate, rel_tol)
    return CheckReport(name, p, lhs, rhs, v, constant, seq if v != PASS else None, detail)


def _severity(r: CheckReport):
    return ({FAIL: 0, INCONCLUSIVE: 1}.get(r.verdict, 2), r.relative_margin)


def _combine(name, p, links, seq) -> CheckReport:
    worst = min(links, key=_severity)
    v = _worst(r.verdict for r in links)
    return CheckReport(name, p, worst.lhs, worst.rhs_scaled, v, worst.constant,
                       seq if v != PASS else None, worst.theorem, links)


def _real_p(p, strict=True) -> Fraction:
    p = to_exponent(p)
    if strict and p <= 1:
        raise InputError(f"p must exceed 1, got {p}")
    if p < 1:
        raise InputError(f"p must be at least 1, got {p}")
    return p


def _int_p(p) -> Fraction:
    p = _real_p(p)
    if p.denominator != 1:
        raise InputError(f"p must be an integer >= 2, got {p}")
    return p


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _prefix_power_sums(nums, den, p):
    """Enclosures of ``sum_{n<=m} (nums[n]/den)**p`` for m = 1..len."""
    dn, up = ctx(RoundDown), ctx(RoundUp)
    lo, hi = mpq(0), mpq(0)
    out = []
    for v in nums:
        t = _abs_pow(v, den, p)
        lo, hi = dn.add(lo, t.lo), up.add(hi, t.hi)
        out.append(Enclosure(lo, hi))
    return out


def check_lemma_rearrangement(seq: Sequence, p, rel_tol: float = DEFAULT_REL_TOL) -> CheckReport:
    """Norm equality for the rearrangement and partial-sum dominance for every m.

    Dominance is certified exactly: for each m the sorted first m values of
    ``|psi|`` are bounded entrywise by the first m values of the rearrangement,
    and ``x -> x**p`` is increasing. The enclosed partial sums are compared too.
    """
    p = _real_p(p, strict=False)
    tilde = rearrange(seq)
    a = lp_norm_p(seq, p)
    b = lp_norm_p(tilde.as_sequence(), p)
    norm_equal = a.lo == b.lo and a.hi == b.hi
    links = [_report("norm", p, a, b, certificate=norm_equal, seq=seq,
                     detail="norm equality (identical enclosures)")]
    absn = seq.abs_nums()
    left = _prefix_power_sums(absn, seq.den, p)
    right = _prefix_power_sums(tilde.nums, seq.den, p)
    partial = []
    running = []
    for m in range(1, seq.N + 1):
        running.append(absn[m - 1])
        srt = sorted(running, reverse=True)
        cert = all(x <= y for x, y in zip(srt, tilde.nums))
        partial.append(_report("partial dominance", p, left[m - 1], right[m - 1], certificate=cert,
                               seq=seq, detail=f"m={m}"))
    if partial:
        links.append(min(partial, key=_severity))
    return _combine("lemma21", p, links, seq)


def check_lemma_weighted_average(a, w: WeightSpec, n: int, m: int) -> CheckReport:
    """``(1/w(m)) sum_{k<=m} a_k <= (1/w(n)) sum_{k<=n} a_k`` for non-increasing a >= 0."""
    ok = weighted_average_monotone_check(a, w, n, m)
    vals = list(a)
    sm = sum((Fraction(x) for x in vals[:m]), Fraction(0))
    sn = sum((Fraction(x) for x in vals[:n]), Fraction(0))
    lhs = _div_weight(sm, w, m)
    rhs = _div_weight(sn, w, n)
    return _report("lemma22", Fraction(1), lhs, rhs, certificate=ok, detail=f"w={w}, n={n}, m={m}")


def _div_weight(s: Fraction, w: WeightSpec, m: int) -> Enclosure:
    wv = w.value(m)
    e = wv if isinstance(wv, Enclosure) else Enclosure.exact(wv)
    return Enclosure.exact(mpq(s.numerator, s.denominator)) / e


def _key_pow(ka: int, kb: int, den: int, w: WeightSpec, p: Fraction) -> Enclosure:
    """Enclosure of ``(ka / (kb den**root)) ** (p/root)``."""
    root = w.root
    return _abs_pow(ka, kb * den**root, p / root)


def check_prop31(seq: Sequence, p, w: WeightSpec = LINEAR, n: int = 1) -> CheckReport:
    """``sup_m |min(1/w(n), 1/w(m)) S(m)|**p <= ((1/w(n)) sum_{k<=n} rearranged)**p``.

    Both sides are p-th powers of ratios with exact order keys, so the
    comparison is decided exactly; the enclosures are for reporting.
    """
    p = _real_p(p, strict=False)
    if n < 1:
        raise InputError("n must be a positive integer")
    if w.kind != "tabulated" and w.exponent < 1:
        raise InputError(f"weight {w} is not valid")
    if w.kind == "tabulated" and not w.validate(len(w.table)):
        raise InputError(f"weight {w} is not valid")
    ps = prefix_sums(seq)
    vals = [abs(v) for v in ps.nums]
    N = len(vals)
    if N and n <= N:
        wa, wb = _winners(vals, w)
        la, lb = wa[n - 1], wb[n - 1]
    else:
        la, lb = w.key(max(vals, default=0), n)
    tilde = rearrange(seq).nums
    ra, rb = w.key(sum(tilde[:n]), n)
    cert = la * rb <= ra * lb
    lhs = _key_pow(la, lb, ps.den, w, p)
    rhs = _key_pow(ra, rb, ps.den, w, p)
    return _report("prop31", p, lhs, rhs, certificate=cert, seq=seq, detail=f"w={w}, n={n}")


def check_thm32(seq: Sequence, p, rel_tol: float = DEFAULT_REL_TOL) -> CheckReport:
    p = _real_p(p)
    C = hardy_constant(p)
    lhs = f1_improved(seq, p, LINEAR, rel_tol=rel_tol)
    rhs = C * lp_norm_p(seq, p)
    return _report("thm32", p, lhs, rhs, C, seq)


def check_thm33(seq: Sequence, p, rel_tol: float = DEFAULT_REL_TOL) -> CheckReport:
    p = _real_p(p)
    C = hardy_constant(p)
    lhs = f2_improved(seq, p, 0, rel_tol=rel_tol)
    rhs = C * lp_norm_p(forward_difference(seq), p)
    return _report("thm33", p, lhs, rhs, C, seq)


def check_chain_sharper(seq: Sequence, p, rel_tol: float = DEFAULT_REL_TOL) -> CheckReport:
    """classical <= improved <= C * norm, for both the plain and gradient forms."""
    p = _real_p(p)
    C = hardy_constant(p)
    hardy = hardy_classical_lhs(seq, p, rel_tol=rel_tol)
    f1 = f1_improved(seq, p, LINEAR, rel_tol=rel_tol)
    grad = grad_hardy_lhs(seq, p)
    f2 = f2_improved(seq, p, 0, rel_tol=rel_tol)
    links = [
        _report("hardy <= f1", p, hardy, f1, seq=seq),
        _report("f1 <= C norm", p, f1, C * lp_norm_p(seq, p), C, seq),
        _report("grad <= f2", p, grad, f2, seq=seq),
        _report("f2 <= C grad-norm", p, f2, C * lp_norm_p(forward_difference(seq), p), C, seq),
    ]
    return _combine("chain", p, links, seq)


def check_thm35(seq: Sequence, p, L: int = DEFAULT_L, rel_tol: float = DEFAULT_REL_TOL) -> CheckReport:
    p = _int_p(p)
    lhs = fkp_improved_lhs(seq, p, L, rel_tol)
    return _report("thm35", p, lhs, lp_norm_p(seq, p), seq=seq, detail=f"L={L}")


def check_thm36(seq: Sequence, p, L: int = DEFAULT_L, rel_tol: float = DEFAULT_REL_TOL) -> CheckReport:
    p = _int_p(p)
    lhs = fkp_improved_grad_lhs(seq, p, L, rel_tol)
    return _report("thm36", p, lhs, lp_norm_p(forward_difference(seq), p), seq=seq, detail=f"L={L}")


def check_fkp(seq: Sequence, p, L: int = DEFAULT_L, rel_tol: float = DEFAULT_REL_TOL) -> CheckReport:
    p = _real_p(p)
    lhs = fkp_lhs(seq, p, L=L, rel_tol=rel_tol)
    return _report("fkp", p, lhs, lp_norm_p(seq, p), seq=seq)


def check_thm41(seq: Sequence, p, truncation: int = 1000) -> CheckReport:
    """Suffix branch in full, prefix branch cut at ``n <= truncation``."""
    p = _real_p(p)
    links = []
    for branch in ("suffix", "prefix"):
        lhs, rhs = uncertainty_sides(seq, p, branch, truncation)
        detail = branch if branch == "suffix" else f"prefix, truncation={truncation}"
        links.append(_report(f"thm41 {branch}", p, lhs, rhs, seq=seq, detail=detail))
    return _combine("thm41", p, links, seq)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

GENERATORS = ("dense_uniform", "sparse", "signed_integer", "heavy_tail", "adversarial_sign")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str = "signed_integer"
    max_support: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GENERATORS and self.kind != "mixed":
            raise InputError(f"unknown generator {self.kind!r}; choose from {', '.join(GENERATORS)} or mixed")
        if self.max_support < 1:
            raise InputError("max_support must be at least 1")

    def rng(self, case: int, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, case, stream])

    def generate(self, case: int) -> Sequence:
        rng = self.rng(case)
        kind = self.kind
        if kind == "mixed":
            kind = GENERATORS[int(rng.integers(len(GENERATORS)))]
        N = int(rng.integers(1, self.max_support + 1))
        if kind == "dense_uniform":
            nums = rng.integers(-1000, 1001, size=N)
            return Sequence.of([int(v) for v in nums], 1000)
        if kind == "sparse":
            mask = rng.random(N) < 0.2
            vals = rng.integers(1, 11, size=N) * rng.choice([-1, 1], size=N)
            nums = [int(v) if keep else 0 for v, keep in zip(vals, mask)]
            nums[-1] = int(vals[-1])
            return Sequence.of(nums)
        if kind == "signed_integer":
            return Sequence.of([int(v) for v in rng.integers(-5, 6, size=N)])
        if kind == "heavy_tail":
            # truncated Pareto magnitudes, so large values land anywhere
            mags = np.minimum(np.floor((rng.pareto(1.2, size=N) + 1) * 4), 10**4).astype(np.int64)
            signs = rng.choice([-1, 1], size=N)
            return Sequence.of([int(m) * int(s) for m, s in zip(mags, signs)])
        # adversarial_sign: alternating signs, often with total zero so the
        # prefix sums cancel and the sup sits before the support edge
        mags = rng.integers(1, 21, size=N)
        nums = [int(m) * (-1) ** i for i, m in enumerate(mags)]
        if N > 1 and rng.random() < 0.5:
            nums[-1] -= sum(nums)
            if nums[-1] == 0:
                nums[-1] = 1
        return Sequence.of(nums)


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

CHECKS = ("lemma21", "lemma22", "prop31", "thm32", "thm33", "chain", "thm35", "thm36", "thm41", "fkp")
INTEGER_P_CHECKS = ("thm35", "thm36")
P_AT_LEAST_ONE_CHECKS = ("lemma21", "prop31")


def parse_checks(spec) -> tuple[str, ...]:
    if isinstance(spec, str):
        spec = [s.strip() for s in spec.split(",") if s.strip()]
    out = []
    for s in spec:
        if s == "all":
            out.extend(CHECKS)
        elif s in CHECKS:
            out.append(s)
        else:
            raise InputError(f"unknown check {s!r}; choose from all, {', '.join(CHECKS)}")
    return tuple(dict.fromkeys(out))


@dataclass(frozen=True)
class SuiteConfig:
    gen: GeneratorSpec
    p_grid: tuple = REAL_P_GRID
    int_p_grid: tuple = INT_P_GRID
    checks: tuple = CHECKS
    L: int = DEFAULT_L
    truncation: int = 1000
    retries: int = MAX_RETRIES


def _random_weight(rng: np.random.Generator) -> WeightSpec:
    if rng.random() < 0.3:
        return LINEAR
    # beta uniform on [1, 3] at resolution 1/8
    return WeightSpec.power(Fraction(8 + int(rng.integers(0, 17)), 8))


def _run_one(cfg: SuiteConfig, check: str, seq: Sequence, p, case: int, rel_tol: float) -> CheckReport:
    if check == "lemma21":
        return check_lemma_rearrangement(seq, p, rel_tol)
    if check in ("lemma22", "prop31"):
        rng = cfg.gen.rng(case, 1 + CHECKS.index(check))
        w = _random_weight(rng)
        n = int(rng.integers(1, seq.N + 3))
        if check == "prop31":
            return check_prop31(seq, p, w, n)
        m = int(rng.integers(n, seq.N + 4))
        return check_lemma_weighted_average(list(rearrange(seq).values), w, n, m)
    if check == "thm32":
        return check_thm32(seq, p, rel_tol)
    if check == "thm33":
        return check_thm33(seq, p, rel_tol)
    if check == "chain":
        return check_chain_sharper(seq, p, rel_tol)
    if check == "thm35":
        return check_thm35(seq, p, cfg.L, rel_tol)
    if check == "thm36":
        return check_thm36(seq, p, cfg.L, rel_tol)
    if check == "thm41":
        return check_thm41(seq, p, cfg.truncation)
    if check == "fkp":
        return check_fkp(seq, p, cfg.L, rel_tol)
    raise InputError(f"unknown check {check!r}")


def run_with_retry(fn, retries: int = MAX_RETRIES, bits: int | None = None):
    """Call ``fn(rel_tol)`` and retry inconclusive results at doubled precision."""
    bits = bits or get_precision()
    rel_tol = DEFAULT_REL_TOL
    report = None
    for attempt in range(retries + 1):
        with working_precision(bits << attempt):
            report = fn(rel_tol)
        if report.verdict != INCONCLUSIVE:
            break
        rel_tol *= 1e-3
    return report, attempt


def _p_list(cfg: SuiteConfig, check: str):
    if check in INTEGER_P_CHECKS:
        return [Fraction(p) for p in cfg.int_p_grid]
    if check == "lemma22":
        return [Fraction(1)]
    if check in P_AT_LEAST_ONE_CHECKS:
        return [Fraction(p) for p in cfg.p_grid]
    return [Fraction(p) for p in cfg.p_grid if p > 1]


def _run_case(args):
    cfg, case, bits = args
    seq = cfg.gen.generate(case)
    out = []
    with working_precision(bits):
        for check in cfg.checks:
            for p in _p_list(cfg, check):
                rep, retries = run_with_retry(
                    lambda tol: _run_one(cfg, check, seq, p, case, tol), cfg.retries, bits
                )
                out.append((check, str(p), rep.verdict, rep.relative_margin, retries,
                            [str(v) for v in seq.values] if rep.verdict != PASS else None,
                            rep.to_json() if rep.verdict != PASS else None))
    return case, out


@dataclass
class CheckStats:
    passed: int = 0
    failed: int = 0
    inconclusive: int = 0
    retried: int = 0
    worst_margin: float | None = None
    worst_case: int | None = None
    worst_p: str | None = None

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "fail": self.failed,
            "inconclusive": self.inconclusive,
            "retried": self.retried,
            "worst_relative_margin": self.worst_margin,
            "worst_case": self.worst_case,
            "worst_p": self.worst_p,
        }


@dataclass
class SuiteReport:
    generator: GeneratorSpec
    cases: int
    checks: tuple
    precision: int
    stats: dict
    failures: list
    inconclusive: list

    @property
    def exit_code(self) -> int:
        if self.failures:
            return 1
        if self.inconclusive:
            return 3
        return 0

    def to_json(self) -> dict:
        return {
            "generator": {"kind": self.generator.kind, "max_support": self.generator.max_support,
                          "seed": self.generator.seed},
            "cases": self.cases,
            "checks": list(self.checks),
            "precision": self.precision,
            "exit_code": self.exit_code,
            "results": {k: v.to_json() for k, v in self.stats.items()},
            "failures": self.failures,
            "inconclusive": self.inconclusive,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def run_suite(gen: GeneratorSpec, p_grid=REAL_P_GRID, checks=CHECKS, cases: int = 100,
              workers: int = 1, int_p_grid=INT_P_GRID, L: int = DEFAULT_L, truncation: int = 1000,
              retries: int = MAX_RETRIES) -> SuiteReport:
    """Run every check on ``cases`` generated sequences; deterministic per seed."""
    if cases < 0:
        raise InputError("cases must be nonnegative")
    checks = parse_checks(checks)
    cfg = SuiteConfig(gen, tuple(Fraction(to_exponent(p)) for p in p_grid),
                      tuple(int(p) for p in int_p_grid), checks, L, truncation, retries)
    for p in cfg.p_grid:
        if p < 1 or (p == 1 and not set(checks) <= set(P_AT_LEAST_ONE_CHECKS + ("lemma22",))):
            raise InputError(f"p must exceed 1, got {p}")
    bits = get_precision()
    jobs = [(cfg, c, bits) for c in range(cases)]
    if workers > 1 and cases > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case, jobs, chunksize=max(1, cases // (4 * workers))))
    else:
        results = [_run_case(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    stats = {c: CheckStats() for c in checks}
    failures, inconclusive = [], []
    for case, rows in results:
        for check, p, verdict, margin, retried, witness, detail in rows:
            st = stats[check]
            if verdict == PASS:
                st.passed += 1
            elif verdict == FAIL:
                st.failed += 1
                failures.append({"check": check, "p": p, "case": case, "witness": witness, "report": detail})
            else:
                st.inconclusive += 1
                inconclusive.append({"check": check, "p": p, "case": case, "witness": witness, "report": detail})
            if retried:
                st.retried += 1
            if st.worst_margin is None or margin < st.worst_margin:
                st.worst_margin, st.worst_case, st.worst_p = margin, case, p
    return SuiteReport(gen, cases, checks, bits, stats, failures, inconclusive)
