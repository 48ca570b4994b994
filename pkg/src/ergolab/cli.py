"""Command line interface.

Subcommands::

    norms    truncated norms of powers of a ladder operator
    orbit    sink readings of an orbit against the closed-form predicate
    cesaro   sup norms of Cesaro averages along a schedule
    block    block-diagonal average coefficients and deviations
    verify   run the acceptance criteria

Tabular commands emit CSV by default (header row, LF line endings); pass
``--format json`` for a structurally identical JSON document.  Every value
column carries the exact fraction and a decimal rendered from it, so exact
output is bit-reproducible across runs and parallelism levels.

Exit codes: 0 success, 1 a requested check failed, 2 usage error, 3 a
computation exceeded its configured budget.  The environment variable
ERGOLAB_THREADS (a positive integer, default 1) caps worker threads for the
block deviation sweep; results do not depend on it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import acceptance, blockdiag, ergodic, graphop, ladder, sweeps
from .core import ONE, SparseVector, fraction_str

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Output and resource settings shared by the tabular subcommands."""

    format: str = "csv"
    out: Optional[str] = None
    mode: str = "exact"
    max_support: Optional[int] = None
    threads: int = 1


def _threads_from_env() -> int:
    raw = os.environ.get("ERGOLAB_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"ERGOLAB_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise UsageError(f"ERGOLAB_THREADS must be a positive integer, got {raw!r}")
    return value


def _parse_fraction(raw: str, what: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what} must be a rational like 3/4, got {raw!r}")


def _require_positive(value: int, what: str) -> int:
    if value < 1:
        raise UsageError(f"{what} must be a positive integer, got {value}")
    return value


def _parse_int_list(raw: str, what: str) -> List[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated integers, got {raw!r}")
    if not values or any(v < 1 for v in values):
        raise UsageError(f"{what} must be positive integers, got {raw!r}")
    return values


def _decimal(value) -> str:
    return "%.12g" % float(value)


def _emit(cfg: RunConfig, columns: Sequence[str], rows: List[Tuple[str, ...]]) -> None:
    if cfg.format == "json":
        payload = {"columns": list(columns), "rows": [list(row) for row in rows]}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        text = buffer.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _make_graph(name: str, k: Optional[int]):
    if name == "g0":
        return ladder.make_g0()
    if name == "gk":
        if k is None or k < 1:
            raise UsageError("--graph gk needs --k with a copy index >= 1")
        return ladder.make_gk(k)
    if name == "combined":
        return ladder.make_counterexample()
    raise UsageError(f"unknown graph {name!r}")


def _cmd_norms(args, cfg: RunConfig) -> int:
    _require_positive(args.n_max, "--n-max")
    _require_positive(args.trunc, "--trunc")
    graph = _make_graph(args.graph, args.k)
    bound = _parse_fraction(args.bound, "--bound") if args.bound else None
    norms = graphop.power_norms_sweep(graph, args.n_max, args.trunc)
    rows = [
        (str(n), str(args.trunc), fraction_str(v), _decimal(v))
        for n, v in enumerate(norms, start=1)
    ]
    _emit(cfg, ("n", "trunc", "norm", "norm_decimal"), rows)
    if bound is not None and any(v > bound for v in norms):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_orbit(args, cfg: RunConfig) -> int:
    _require_positive(args.n_max, "--n-max")
    if args.k_max < 0:
        raise UsageError(f"--k-max must be nonnegative, got {args.k_max}")
    rows: List[Tuple[str, ...]] = []
    all_match = True
    if args.graph == "combined":
        for k in range(args.k_max + 1):
            spine = ladder.make_entry_spine(k)
            x = SparseVector.unit(ladder.SOURCE)
            target = ladder.sink(k)
            for n in range(1, args.n_max + 1):
                x = graphop.apply(spine, x)
                got = x[target]
                want = ladder.orbit_predicate("combined", k, n)
                match = got == want
                all_match = all_match and match
                rows.append((str(n), str(k), fraction_str(got), str(want), str(int(match))))
    else:
        graph = _make_graph(args.graph, args.k)
        k = graph.copy_index
        x = SparseVector.unit(ladder.entry(k))
        target = ladder.sink(k)
        for n in range(1, args.n_max + 1):
            x = graphop.apply(graph, x)
            got = x[target]
            want = ladder.orbit_predicate(graph.kind, k, n)
            match = got == want
            all_match = all_match and match
            rows.append((str(n), str(k), fraction_str(got), str(want), str(int(match))))
    rows.sort(key=lambda row: (int(row[0]), int(row[1])))
    _emit(cfg, ("n", "k", "simulated", "predicate", "match"), rows)
    return EXIT_OK if all_match else EXIT_CHECK_FAILED


_FACTORS = {"1": ONE, "-1": -ONE, "i": complex(0, 1), "-i": complex(0, -1)}


def _cmd_cesaro(args, cfg: RunConfig) -> int:
    schedule = _parse_int_list(args.schedule, "--schedule")
    powers = _parse_int_list(args.powers, "--powers")
    factor = _FACTORS[args.factor]
    bound = _parse_fraction(args.bound, "--bound") if args.bound else None
    graph = _make_graph(args.graph, args.k)
    start = args.start
    if args.x is not None:
        start = "source" if args.x == "e_s" else "entry"
    rows: List[Tuple[str, ...]] = []
    worst = None
    if args.graph == "combined" and start == "source":
        for power in powers:
            values = sweeps.combined_cesaro_sup_norms(schedule, step_power=power, factor=factor)
            for n in sorted(values):
                value = values[n]
                exact = isinstance(value, Fraction)
                rows.append(
                    (
                        str(power),
                        str(n),
                        fraction_str(value) if exact else _decimal(value),
                        _decimal(value),
                    )
                )
                if worst is None or value > worst:
                    worst = value
    else:
        if start == "source":
            raise UsageError("--start source needs --graph combined")
        if isinstance(factor, complex):
            raise UsageError("complex factors need --graph combined --start source")
        x = SparseVector.unit(ladder.entry(graph.copy_index))
        for power in powers:

            def stepped_apply(v, _p=power):
                for _ in range(_p):
                    v = graphop.apply(graph, v)
                return v if factor == ONE else v.scale(factor)

            handle = ergodic.OperatorHandle(
                apply=stepped_apply, description=f"{graph.description} ** {power}"
            )
            try:
                trace = ergodic.cesaro_trace(
                    handle, x, schedule, max_support=cfg.max_support, engine="generic"
                )
            except ergodic.BudgetExceeded:
                return EXIT_BUDGET
            for record in trace.records:
                value = record.sup_norm
                rows.append((str(power), str(record.n), fraction_str(value), _decimal(value)))
                if worst is None or value > worst:
                    worst = value
    _emit(cfg, ("power", "n", "sup_norm", "sup_norm_decimal"), rows)
    if bound is not None and worst is not None:
        exceeded = (
            float(worst) > float(bound) + ergodic.FLOAT_TOL
            if isinstance(worst, float)
            else worst > bound
        )
        if exceeded:
            return EXIT_CHECK_FAILED
    return EXIT_OK


# exact deviation of one block from its limit projection
def _exact_block_deviation(m: int, n: int, p: int) -> Fraction:
    return (blockdiag.block_cesaro(m, n, p) - blockdiag.U).inf_norm()


def _deviation_argmax(m_max: int, n: int, p: int, mode: str, threads: int):
    """(attaining m, deviation) for the worst block; deterministic in threads."""

    def scan(lo: int, hi: int):
        best_m, best_v = lo, None
        for m in range(lo, hi + 1):
            if mode == "float":
                a = 1.0 - 1.0 / m
                r = (-a) ** p
                value = 1.0 if r == 1.0 else abs((1.0 - r**n) / ((1.0 - r) * n))
            else:
                value = _exact_block_deviation(m, n, p)
            if best_v is None or value > best_v:
                best_m, best_v = m, value
        return best_m, best_v

    if threads <= 1 or m_max < 128:
        return scan(1, m_max)
    chunk = (m_max + threads - 1) // threads
    ranges = [(lo, min(lo + chunk - 1, m_max)) for lo in range(1, m_max + 1, chunk)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        partials = list(pool.map(lambda r: scan(*r), ranges))
    best_m, best_v = partials[0]
    for m, v in partials[1:]:
        if v > best_v:
            best_m, best_v = m, v
    return best_m, best_v


def _cmd_block(args, cfg: RunConfig) -> int:
    if args.sweep_diag and args.deviation:
        raise UsageError("--sweep-diag and --deviation are mutually exclusive")
    _require_positive(args.m_max, "--m-max")
    _require_positive(args.j, "--j")
    _require_positive(args.p, "--p")
    windows = _parse_int_list(args.windows, "--windows")
    at_least = _parse_fraction(args.at_least, "--at-least") if args.at_least else None
    at_most = _parse_fraction(args.at_most, "--at-most") if args.at_most else None
    rows: List[Tuple[str, ...]] = []
    values = []
    if args.deviation:
        p = args.p
        for n in sorted(set(windows)):
            m_at, value = _deviation_argmax(args.m_max, n, p, cfg.mode, cfg.threads)
            values.append(value)
            shown = _decimal(value) if cfg.mode == "float" else fraction_str(value)
            rows.append((str(m_at), str(n), str(p), shown, _decimal(value)))
    else:
        p = 2 * args.j
        for n in sorted(set(windows)):
            if cfg.mode == "float":
                a = 1.0 - 1.0 / n
                r = a**p
                value = 1.0 if r == 1.0 else (1.0 - r**n) / ((1.0 - r) * n)
                shown = _decimal(value)
            else:
                value = blockdiag.b_coeff(n, n, args.j)
                shown = fraction_str(value)
            values.append(value)
            rows.append((str(n), str(n), str(p), shown, _decimal(value)))
    _emit(cfg, ("m", "n", "p", "value", "value_decimal"), rows)
    tol = ergodic.FLOAT_TOL if cfg.mode == "float" else 0
    if at_least is not None and any(float(v) < float(at_least) - tol for v in values):
        return EXIT_CHECK_FAILED
    if at_most is not None and any(float(v) > float(at_most) + tol for v in values):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_verify(args, cfg: RunConfig) -> int:
    numbers = _parse_int_list(args.criteria, "--criteria") if args.criteria else None
    results = []

    def report(result):
        if cfg.format != "json":
            print(result.line(), flush=True)

    try:
        results = acceptance.run_all(numbers, report=report)
    except ValueError as exc:
        raise UsageError(str(exc))
    if cfg.format == "json":
        payload = [
            {
                "number": r.number,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
                "elapsed_seconds": round(r.elapsed, 3),
                "budget_seconds": r.budget,
            }
            for r in results
        ]
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergolab",
        description="exact Cesaro averaging checks for ladder graph operators "
        "and block-diagonal matrix families",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH", help="write output to a file")

    p = sub.add_parser("norms", help="truncated norms of operator powers")
    add_common(p)
    p.add_argument("--graph", choices=("g0", "gk", "combined"), default="combined")
    p.add_argument("--k", type=int, help="copy index for --graph gk")
    p.add_argument("--n-max", type=int, default=8, dest="n_max")
    p.add_argument("--trunc", type=int, default=500)
    p.add_argument("--bound", help="fail (exit 1) if any norm exceeds this rational")

    p = sub.add_parser("orbit", help="sink readings versus the orbit predicate")
    add_common(p)
    p.add_argument("--graph", choices=("g0", "gk", "combined"), default="combined")
    p.add_argument("--k", type=int, help="copy index for --graph gk")
    p.add_argument("--k-max", type=int, default=2, dest="k_max", help="sinks 0..k_max (combined)")
    p.add_argument("--n-max", type=int, default=64, dest="n_max")

    p = sub.add_parser("cesaro", help="sup norms of Cesaro averages")
    add_common(p)
    p.add_argument("--graph", choices=("g0", "gk", "combined"), default="combined")
    p.add_argument("--k", type=int, help="copy index for --graph gk")
    p.add_argument("--start", choices=("source", "entry"), default="source")
    p.add_argument(
        "--x",
        choices=("e_s", "e_o"),
        help="start vector by name: e_s is the source unit, e_o the entry unit",
    )
    p.add_argument("--powers", default="1", help="comma-separated step powers")
    p.add_argument("--schedule", default="128,256,512,1024", help="window lengths")
    p.add_argument("--factor", choices=tuple(_FACTORS), default="1")
    p.add_argument("--bound", help="fail (exit 1) if any norm exceeds this rational")
    p.add_argument(
        "--max-support",
        type=int,
        default=250000,
        dest="max_support",
        help="support cap for the generic engine (exit 3 when exceeded)",
    )

    p = sub.add_parser("block", help="block-diagonal averaging coefficients")
    add_common(p)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--windows", "--n", dest="windows", default="10,100,1000", help="window lengths n")
    p.add_argument("--j", type=int, default=1, help="half the even power (diagonal sweep)")
    p.add_argument(
        "--sweep-diag",
        action="store_true",
        dest="sweep_diag",
        help="diagonal m = n coefficient sweep (the default mode, named explicitly)",
    )
    p.add_argument("--deviation", action="store_true", help="sup deviation over blocks")
    p.add_argument("--m-max", type=int, default=1000, dest="m_max")
    p.add_argument("--p", type=int, default=1, help="step power for --deviation")
    p.add_argument("--at-least", dest="at_least", help="fail if any value is below this")
    p.add_argument("--at-most", dest="at_most", help="fail if any value is above this")

    p = sub.add_parser("verify", help="run the acceptance criteria")
    add_common(p)
    p.add_argument("--criteria", help="comma-separated criterion numbers (default all)")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            format=args.format,
            out=args.out,
            mode=getattr(args, "mode", "exact"),
            max_support=getattr(args, "max_support", None),
            threads=_threads_from_env(),
        )
        if args.command == "norms":
            return _cmd_norms(args, cfg)
        if args.command == "orbit":
            return _cmd_orbit(args, cfg)
        if args.command == "cesaro":
            return _cmd_cesaro(args, cfg)
        if args.command == "block":
            return _cmd_block(args, cfg)
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
