"""Command-line frontend: ``hardylab {eval,verify,coeffs,sharpness}``.

Exit codes: 0 pass, 1 certified violation, 2 input error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import ConsistencyError, InputError
from .functionals import DEFAULT_L, DEFAULT_REL_TOL, FUNCTIONALS, evaluate
from .inequalities import CHECKS, GENERATORS, INT_P_GRID, MAX_RETRIES, REAL_P_GRID, GeneratorSpec, run_suite
from .numeric import MIN_PRECISION, get_precision, to_exponent, working_precision
from .seqcore import from_values, load_sequence, save_sequence
from .series import vp_coefficients
from .sharpness import SWEEP_FUNCTIONALS, adversarial_search, parse_grid, ratio_sweep
from .weights import WeightSpec

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    precision: int
    tol: float
    L: int
    output: str | None
    fmt: str

    def __post_init__(self):
        if self.precision < MIN_PRECISION:
            raise InputError(f"precision must be at least {MIN_PRECISION} bits")
        if not self.tol > 0:
            raise InputError("tolerance must be positive")
        if self.L < 0 or self.L % 2:
            raise InputError(f"L must be a nonnegative even integer, got {self.L}")


def _p_list(text: str) -> list[Fraction]:
    try:
        return [to_exponent(s.strip()) for s in text.split(",") if s.strip()]
    except InputError as exc:
        raise InputError(f"--p: {exc}") from exc


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    out = io.StringIO()
    wr = csv.writer(out, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    return out.getvalue()


def _config(args) -> RunConfig:
    return RunConfig(args.command, args.precision, args.tol, args.L, args.output, args.format)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_eval(args) -> int:
    cfg = _config(args)
    seq = load_sequence(args.input)
    ps = _p_list(args.p)
    if not ps:
        raise InputError("--p needs at least one value")
    names = [s.strip() for s in args.functional.split(",") if s.strip()]
    for name in names:
        if name not in FUNCTIONALS:
            raise InputError(f"unknown functional {name!r}; choose from {', '.join(FUNCTIONALS)}")
    w = WeightSpec.parse(args.weight)
    reports = []
    for p in ps:
        for name in names:
            for rep in evaluate(name, seq, p, w, cfg.L, args.l_shift, args.window,
                                args.truncation, cfg.tol):
                if args.exact and not rep.value.is_exact and not args.outward:
                    raise InputError(
                        f"{rep.name} at p={p} is not an exact rational; add --outward for an enclosure"
                    )
                reports.append(rep)
    if args.save_sequence:
        save_sequence(seq, args.save_sequence)
    if cfg.fmt == "csv":
        rows = []
        for r in reports:
            d = r.to_json()
            rows.append([d["name"], d["p"], d["lo"], d["hi"], d["window"], d["tail"]])
        _emit(_csv_text(["name", "p", "lo", "hi", "window", "tail"], rows), cfg.output)
    else:
        out = []
        for r in reports:
            d = r.to_json()
            if r.value.is_exact:
                d["exact"] = str(Fraction(int(r.value.lo.numerator), int(r.value.lo.denominator)))
            out.append(d)
        _emit(json.dumps(out, indent=2) + "\n", cfg.output)
    return EXIT_OK


def _write_witnesses(report, directory: Path) -> list[str]:
    paths = []
    for kind, items in (("fail", report.failures), ("inconclusive", report.inconclusive)):
        for item in items:
            if item["witness"] is None:
                continue
            directory.mkdir(parents=True, exist_ok=True)
            p = item["p"].replace("/", "_")
            path = directory / f"{kind}-{item['check']}-case{item['case']}-p{p}.json"
            save_sequence(from_values(item["witness"]), path)
            item["witness_file"] = str(path)
            paths.append(str(path))
    return paths


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.cases < 0:
        raise InputError("--cases must be nonnegative")
    p_grid = _p_list(args.p) if args.p else REAL_P_GRID
    int_grid = [int(p) for p in _p_list(args.int_p)] if args.int_p else INT_P_GRID
    gen = GeneratorSpec(args.generator, args.max_support, args.seed)
    report = run_suite(gen, p_grid, args.suite, args.cases, args.workers, int_grid,
                       cfg.L, args.truncation, args.retries)
    if report.failures or report.inconclusive:
        wdir = Path(args.witness_dir) if args.witness_dir else (
            Path(cfg.output).parent if cfg.output else Path(".")) / "witnesses"
        _write_witnesses(report, wdir)
    _emit(report.dumps() + "\n", cfg.output)
    return report.exit_code


def cmd_coeffs(args) -> int:
    cfg = _config(args)
    p = to_exponent(args.p)
    if p.denominator != 1 or p < 2:
        raise InputError(f"coefficient tables need an integer p >= 2, got {p}")
    table = vp_coefficients(int(p), cfg.L)
    c0 = Fraction(int(p) - 1, int(p)) ** int(p)
    if table.coefficient(0) != c0:
        raise ConsistencyError(f"c_0 = {table.coefficient(0)} differs from ((p-1)/p)^p = {c0}")
    rows = table.to_json(digits=max(20, cfg.precision * 3 // 10))
    if cfg.fmt == "csv":
        _emit(_csv_text(["l", "numerator", "denominator", "decimal"],
                        [[r["l"], r["numerator"], r["denominator"], r["decimal"]] for r in rows]), cfg.output)
    else:
        _emit(json.dumps(rows, indent=1) + "\n", cfg.output)
    return EXIT_OK


def cmd_sharpness(args) -> int:
    cfg = _config(args)
    ps = _p_list(args.p)
    if len(ps) != 1:
        raise InputError("sharpness takes exactly one --p")
    p = ps[0]
    if args.functional not in SWEEP_FUNCTIONALS:
        raise InputError(f"unknown functional {args.functional!r}; choose from {', '.join(SWEEP_FUNCTIONALS)}")
    if args.search:
        results = [adversarial_search(args.functional, p, args.N, args.iterations, args.seed + k)
                   for k in range(args.seeds)]
        rows = [[r.seed, r.N, r.iterations, repr(r.best_float),
                 r.ratio.lo_str(), r.ratio.hi_str()] for r in results]
        _emit(_csv_text(["seed", "N", "iterations", "float_ratio", "ratio_lo", "ratio_hi"], rows), cfg.output)
        if args.save_sequence and results:
            best = max(results, key=lambda r: r.ratio.hi)
            save_sequence(best.sequence, args.save_sequence)
        return EXIT_VIOLATION if any(r.exceeds for r in results) else EXIT_OK
    grid = parse_grid(args.grid) if args.grid else None
    sweep = ratio_sweep(args.functional, p, grid, args.workers)
    _emit(sweep.to_csv(), cfg.output)
    return EXIT_VIOLATION if sweep.exceeds else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common(sp: argparse.ArgumentParser, default_p: str | None) -> None:
    sp.add_argument("--p", default=default_p, help="exponent(s), comma separated; decimals are exact")
    sp.add_argument("--precision", type=int, default=None,
                    help="float mantissa bits (default: HARDYLAB_PRECISION or 128)")
    sp.add_argument("--tol", type=float, default=DEFAULT_REL_TOL, help="relative tail tolerance")
    sp.add_argument("--L", type=int, default=DEFAULT_L, help="series truncation order (even)")
    sp.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardylab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate functionals of a sequence file")
    _common(ev, "2")
    ev.add_argument("--input", "-i", required=True, help="sequence file (.json or .csv)")
    ev.add_argument("--functional", default="hardy", help=f"comma list of {', '.join(FUNCTIONALS)}")
    ev.add_argument("--weight", default="linear", help="linear, power:BETA or a JSON list file")
    ev.add_argument("--l-shift", type=int, default=0, help="weight shift l for f2")
    ev.add_argument("--window", type=int, default=None, help="explicit summation window (>= N)")
    ev.add_argument("--truncation", type=int, default=1000, help="prefix-branch truncation T")
    ev.add_argument("--exact", action="store_true", help="require exact rational results")
    ev.add_argument("--outward", action="store_true", help="with --exact, accept outward enclosures")
    ev.add_argument("--save-sequence", default=None, help="write the parsed sequence back out")

    vf = sub.add_parser("verify", help="run randomized inequality suites")
    _common(vf, None)
    vf.add_argument("--suite", default="all", help=f"comma list of all, {', '.join(CHECKS)}")
    vf.add_argument("--int-p", default=None, help="integer p grid for series-based checks")
    vf.add_argument("--cases", type=int, default=100)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--generator", default="mixed", help=f"{', '.join(GENERATORS)} or mixed")
    vf.add_argument("--max-support", type=int, default=50)
    vf.add_argument("--truncation", type=int, default=1000)
    vf.add_argument("--retries", type=int, default=MAX_RETRIES)
    vf.add_argument("--workers", type=int, default=1)
    vf.add_argument("--witness-dir", default=None, help="where failing sequences are written")

    cf = sub.add_parser("coeffs", help="exact series coefficients of the FKP weight")
    _common(cf, "2")

    sh = sub.add_parser("sharpness", help="near-extremal sweeps and adversarial search")
    _common(sh, "2")
    sh.set_defaults(format="csv")
    sh.add_argument("--functional", default="hardy", help=f"one of {', '.join(SWEEP_FUNCTIONALS)}")
    sh.add_argument("--grid", default=None, help="eps:N,eps:N,... or eps,eps/N,N (default 5x5 grid)")
    sh.add_argument("--workers", type=int, default=1)
    sh.add_argument("--search", action="store_true", help="run the hill climb instead of the sweep")
    sh.add_argument("--N", type=int, default=64, help="support bound for --search")
    sh.add_argument("--iterations", type=int, default=10_000)
    sh.add_argument("--seed", type=int, default=0)
    sh.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds to search")
    sh.add_argument("--save-sequence", default=None, help="write the best searched sequence")
    return parser


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "coeffs": cmd_coeffs, "sharpness": cmd_sharpness}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.precision is None:
            args.precision = get_precision()
        with working_precision(args.precision):
            return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
