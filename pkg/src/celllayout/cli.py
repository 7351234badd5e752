"""Command-line driver.

Exit codes: 0 success, 1 usage or argument error, 2 I/O or parse error,
3 instance validation failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
import time
from pathlib import Path

from .errors import (
    CellLayoutError,
    DegenerateMatrix,
    InvalidInstance,
    ParseError,
)
from .instance import generate_random_instance, read_instance, serialize_instance
from .objective import Assignment, evaluate
from .solvers import SaParams, brute_force, greedy_descent, simulated_annealing

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVALID = 0, 1, 2, 3

CSV_FIELDS = (
    "instance", "n", "w", "solver", "seed", "total", "flow_term",
    "closeness_term", "perm", "evaluations", "wall_ms",
)
DEFAULT_SWEEP = "0.2,0.4,0.6,0.8"


@dataclasses.dataclass(frozen=True)
class RunRecord:
    instance_name: str
    n: int
    w: float
    solver: str
    seed: int
    total: float
    flow_term: float
    closeness_term: float
    perm: str
    evaluations: int
    wall_ms: int

    def as_row(self) -> list[str]:
        values = dataclasses.astuple(self)
        return [_fmt(v) for v in values]


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _json_value(value):
    return float(_fmt(value)) if isinstance(value, float) else value


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# record rendering


def render(records: list[RunRecord], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        writer.writerows(r.as_row() for r in records)
        return buf.getvalue()
    if fmt == "json":
        rows = [{k: _json_value(v) for k, v in dataclasses.asdict(r).items()} for r in records]
        return json.dumps(rows[0] if len(rows) == 1 else rows, indent=2) + "\n"
    blocks = []
    for r in records:
        blocks.append("\n".join(f"{k}: {_fmt(v)}" for k, v in dataclasses.asdict(r).items()))
    return "\n\n".join(blocks) + "\n"


def _record(instance, solver, seed, result, wall_ms) -> RunRecord:
    return RunRecord(
        instance_name=instance.name,
        n=instance.n,
        w=instance.w,
        solver=solver,
        seed=seed,
        total=result.cost.total,
        flow_term=result.cost.flow_term,
        closeness_term=result.cost.closeness_term,
        perm=str(result.best),
        evaluations=result.evaluations,
        wall_ms=wall_ms,
    )


def _timed(fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, int(round((time.perf_counter() - t) * 1000))


# ---------------------------------------------------------------------------
# commands


def _load(args):
    instance = read_instance(args.instance)
    if getattr(args, "w", None) is not None:
        _check_w(args.w)
        instance = instance.with_w(args.w)
    return instance


def _check_w(w):
    if not 0.0 <= w <= 1.0:
        raise UsageError(f"w = {w!r} is outside [0, 1]")


def _sa_params(args) -> SaParams:
    return SaParams(
        t0=args.t0,
        alpha=args.alpha,
        moves_per_temp=args.moves_per_temp,
        t_min=args.tmin,
        max_stages_without_improvement=args.patience,
        restarts=args.restarts,
        seed=args.seed,
    )


def _write_trace(path, trace):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("stage", "temperature", "incumbent_total"))
        for stage, temperature, incumbent in trace:
            writer.writerow((stage, _fmt(temperature), _fmt(incumbent)))


def cmd_solve(args, out):
    instance = _load(args)
    params = _sa_params(args)
    result, wall_ms = _timed(simulated_annealing, instance, params)
    if args.trace:
        _write_trace(args.trace, result.trace or [])
    out.write(render([_record(instance, "sa", args.seed, result, wall_ms)], args.out))
    return EXIT_OK


def cmd_exact(args, out):
    instance = _load(args)
    result, wall_ms = _timed(brute_force, instance, allow_large=args.force)
    out.write(render([_record(instance, "exact", args.seed, result, wall_ms)], args.out))
    return EXIT_OK


def _parse_w_list(text):
    ws = []
    for item in text.split(","):
        try:
            w = float(item)
        except ValueError:
            raise UsageError(f"w list entry {item!r} is not a number") from None
        _check_w(w)
        ws.append(w)
    return ws


def cmd_sweep(args, out):
    ws = _parse_w_list(args.w)
    base = read_instance(args.instance)
    params = _sa_params(args) if args.solver == "sa" else None
    records = []
    for w in ws:
        instance = base.with_w(w)
        if args.solver == "sa":
            result, wall_ms = _timed(simulated_annealing, instance, params)
        elif args.solver == "exact":
            result, wall_ms = _timed(brute_force, instance, allow_large=args.force)
        else:
            result, wall_ms = _timed(greedy_descent, instance, Assignment.identity(instance.n))
        records.append(_record(instance, args.solver, args.seed, result, wall_ms))
    out.write(render(records, args.out))
    return EXIT_OK


def cmd_eval(args, out):
    instance = _load(args)
    cost = evaluate(instance, Assignment.parse(args.perm))
    if args.out == "json":
        out.write(json.dumps({k: _json_value(v) for k, v in dataclasses.asdict(cost).items()}) + "\n")
    elif args.out == "csv":
        out.write("flow_term,closeness_term,total\n")
        out.write(",".join(_fmt(v) for v in dataclasses.astuple(cost)) + "\n")
    else:
        out.write(f"w: {_fmt(instance.w)}\n")
        for k, v in dataclasses.asdict(cost).items():
            out.write(f"{k}: {_fmt(v)}\n")
    return EXIT_OK


def cmd_gen(args, out):
    instance = generate_random_instance(args.n, args.seed, args.density, args.max_flow, w=args.w)
    text = serialize_instance(instance)
    if args.output == "-":
        out.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_validate(args, out):
    instance = read_instance(args.instance, validate=False)
    problems = instance.violations()
    if problems:
        for line in problems:
            out.write(line + "\n")
        return EXIT_INVALID
    out.write("OK\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_common(p, *, w_help="override the file's W value"):
    p.add_argument("instance", help="instance file path or bundled fixture name")
    p.add_argument("--w", type=float, default=None, help=w_help)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", choices=("text", "csv", "json"), default="text")


def _add_sa(p):
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.95)
    p.add_argument("--t0", type=float, default=0.0, help="initial temperature (0 = auto)")
    p.add_argument("--tmin", type=float, default=1e-6)
    p.add_argument("--moves-per-temp", type=int, default=None, help="default 20*n")
    p.add_argument("--patience", type=int, default=50, help="stages without improvement before stopping")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="celllayout", description="Inter-cell layout optimizer (weighted flow/closeness QAP).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="simulated annealing")
    _add_common(p)
    _add_sa(p)
    p.add_argument("--trace", metavar="PATH", help="write per-stage convergence CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="exhaustive search (n <= 10 unless --force)")
    _add_common(p)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("sweep", help="solve once per w value")
    p.add_argument("instance")
    p.add_argument("--w", default=DEFAULT_SWEEP, help=f"comma-separated w values (default {DEFAULT_SWEEP})")
    p.add_argument("--solver", choices=("sa", "exact", "greedy"), default="sa")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", choices=("text", "csv", "json"), default="csv")
    p.add_argument("--force", action="store_true")
    _add_sa(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval", help="cost breakdown of one assignment")
    p.add_argument("instance")
    p.add_argument("--perm", required=True, help="comma-separated location per cell, e.g. 2,0,1")
    p.add_argument("--w", type=float, default=None)
    p.add_argument("--out", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="write a reproducible random instance")
    p.add_argument("output", help="output path, '-' for stdout")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--max-flow", type=float, default=10.0)
    p.add_argument("--w", type=float, default=0.5)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="check instance invariants")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"parse error in {_instance_label(args)}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidInstance, DegenerateMatrix) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, CellLayoutError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _instance_label(args):
    return getattr(args, "instance", "<input>")


if __name__ == "__main__":
    sys.exit(main())
