"""Command-line front end.

Subcommands: solve, sweep, bounds, simulate, figure. Results go to stdout
(or --out) as CSV; diagnostics go to stderr. Exit codes: 0 ok, 1 usage
error, 2 infeasible specification, 3 simulation instability.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bounds as lb
from .errors import DomainError, InfeasibleSpecError, NoSolutionError, SimulationUnstable
from .fbl import from_db, to_db
from .sim import SimConfig, SimResult, simulate
from .solvers import Task, TaskSpec, convert_solution, solve

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_UNSTABLE = 0, 1, 2, 3

SWEEP_FIELDS = [
    "task", "k", "rho", "pd", "n_opt", "g_opt", "snr_db", "ebn0_db",
    "snr_converted_db", "ebn0_converted_db", "lb_snr_db", "lb_ebn0_db", "status",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class SweepSpec:
    task: Task
    axis: str
    values: list
    k: int | None = None
    rho: float | None = None
    pd: float | None = None
    emit_converted: bool = True
    emit_lower_bounds: bool = True

    def __post_init__(self):
        self.task = Task(self.task)
        if self.axis not in ("k", "rho"):
            raise UsageError(f"axis must be 'k' or 'rho', got {self.axis!r}")
        if not self.values:
            raise UsageError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise UsageError("sweep values must be strictly increasing")
        fixed = "rho" if self.axis == "k" else "k"
        if getattr(self, fixed) is None:
            raise UsageError(f"sweep over {self.axis} needs --{fixed}")
        if not self.task.retx and self.pd is None:
            raise UsageError(f"task {int(self.task)} requires --pd")


def _db(x):
    return f"{x:.4f}"


def sweep_row(task, k, rho, pd=None, *, emit_converted=True, emit_lower_bounds=True) -> dict:
    """Solve one task and flatten it into a CSV row.

    The minimised quantity goes in its own column (snr_db or ebn0_db); the
    other quantity, recomputed through the conversion formula, goes in the
    matching *_converted_db column.
    """
    task = Task(task)
    row = dict.fromkeys(SWEEP_FIELDS, "")
    row.update(task=int(task), k=k, rho=repr(float(rho)), pd="" if pd is None else repr(float(pd)))
    spec = TaskSpec(task, k, rho, None if task.retx else pd)
    try:
        sol = solve(spec)
    except (InfeasibleSpecError, NoSolutionError):
        row["status"] = "infeasible"
        return row
    snr_db, ebn0_db = convert_solution(sol)
    row["n_opt"] = sol.n_opt
    if task.retx:
        row["g_opt"] = repr(sol.g_opt)
    if task.minimizes_snr:
        row["snr_db"] = _db(sol.snr_db)
        if emit_converted:
            row["ebn0_converted_db"] = _db(ebn0_db)
    else:
        row["ebn0_db"] = _db(sol.ebn0_db)
        if emit_converted:
            row["snr_converted_db"] = _db(snr_db)
    if emit_lower_bounds:
        if task.retx:
            row["lb_snr_db"] = _db(to_db(lb.lb_snr_retx(rho)))
            row["lb_ebn0_db"] = _db(to_db(lb.lb_ebn0_retx(rho)[0]))
        else:
            row["lb_snr_db"] = _db(to_db(lb.lb_snr_no_retx(rho, pd)))
            row["lb_ebn0_db"] = _db(to_db(lb.lb_ebn0_no_retx(rho, pd)))
    row["status"] = "ok"
    return row


def run_sweep(spec: SweepSpec) -> list[dict]:
    rows = []
    for v in spec.values:
        k, rho = (int(v), spec.rho) if spec.axis == "k" else (spec.k, float(v))
        rows.append(sweep_row(spec.task, k, rho, spec.pd,
                              emit_converted=spec.emit_converted, emit_lower_bounds=spec.emit_lower_bounds))
    return rows


def figure_rows(fig_id: int) -> list[dict]:
    """Preconfigured sweeps behind the four published figures."""
    rows = []
    if fig_id in (1, 2):
        ks = [int(k) for k in np.unique(np.round(np.geomspace(20, 2000, 24)))]
        for rho in (0.1, 0.12):
            for task in (Task.T1, Task.T2):
                rows += run_sweep(SweepSpec(task, "k", ks, rho=rho, pd=0.9))
    elif fig_id in (3, 4):
        rhos = [round(r, 10) for r in np.linspace(0.02, 0.18, 17)]
        for task in Task:
            pd = None if task.retx else 0.65
            rows += run_sweep(SweepSpec(task, "rho", rhos, k=50, pd=pd))
    else:
        raise UsageError(f"figure id must be 1..4, got {fig_id}")
    return rows


def write_csv(rows, fields, out=None):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc


def _sim_row(res: SimResult) -> dict:
    return {k: repr(v) if isinstance(v, float) else v for k, v in res.as_dict().items()}


def cmd_solve(args):
    if args.task is None or args.k is None or args.rho is None:
        raise UsageError("solve needs --task, --k and --rho")
    task = Task(args.task)
    if not task.retx and args.pd is None:
        raise UsageError(f"task {args.task} requires --pd")
    row = sweep_row(task, args.k, args.rho, args.pd)
    write_csv([row], SWEEP_FIELDS, args.out)
    if args.out is not None:
        print(", ".join(f"{k}={v}" for k, v in row.items() if v != ""))
    return EXIT_OK if row["status"] == "ok" else EXIT_INFEASIBLE


def cmd_sweep(args):
    if args.task is None or args.axis is None or args.values is None:
        raise UsageError("sweep needs --task, --axis and --values")
    conv = int if args.axis == "k" else float
    try:
        values = [conv(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --values: {exc}") from exc
    spec = SweepSpec(Task(args.task), args.axis, values, k=args.k, rho=args.rho,
                     pd=None if Task(args.task).retx else args.pd,
                     emit_converted=not args.no_converted, emit_lower_bounds=not args.no_lower_bounds)
    write_csv(run_sweep(spec), SWEEP_FIELDS, args.out)
    return EXIT_OK


def cmd_bounds(args):
    if args.rho is None:
        raise UsageError("bounds needs --rho")
    b = lb.lower_bounds(args.rho, args.pd)
    rows = []
    for name in ("lb_snr_t1", "lb_ebn0_t2", "lb_snr_t3", "lb_ebn0_t4"):
        value = getattr(b, name)
        if value is None:
            rows.append({"quantity": name, "linear": "n/a", "db": "n/a"})
        else:
            rows.append({"quantity": name, "linear": repr(value), "db": _db(to_db(value))})
    rows.append({"quantity": "g_star_t4", "linear": repr(b.g_star_t4), "db": ""})
    write_csv(rows, ["quantity", "linear", "db"], args.out)
    return EXIT_OK


def cmd_simulate(args):
    if args.mode is None or args.lambda_ is None:
        raise UsageError("simulate needs --mode and --lambda")
    if args.pe is None and args.snr_db is None:
        raise UsageError("simulate needs --pe or --snr-db")
    mode = "retx" if args.mode == "retx" else "no_retx"
    cfg = SimConfig(
        mode=mode, k=args.k if args.k is not None else 50, n=args.n if args.n is not None else 100,
        lam=args.lambda_, snr=None if args.snr_db is None else from_db(args.snr_db), g=args.g,
        slots=args.slots, warmup_slots=args.warmup, seed=args.seed, pe_override=args.pe,
    )
    try:
        res = simulate(cfg)
    except SimulationUnstable as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    row = _sim_row(res)
    write_csv([row], list(row), args.out)
    return EXIT_OK


def cmd_figure(args):
    if args.id is None:
        raise UsageError("figure needs --id")
    write_csv(figure_rows(args.id), SWEEP_FIELDS, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mmtc-bounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config")
    common.add_argument("--out")
    common.add_argument("--task", type=int, choices=[1, 2, 3, 4])
    common.add_argument("--k", type=int)
    common.add_argument("--rho", type=float)
    common.add_argument("--pd", type=float)
    common.add_argument("--g", type=float)

    sub.add_parser("solve", parents=[common], help="solve one minimisation task")
    sw = sub.add_parser("sweep", parents=[common], help="solve a task over a list of k or rho values")
    sw.add_argument("--axis", choices=["k", "rho"])
    sw.add_argument("--values")
    sw.add_argument("--no-converted", action="store_true")
    sw.add_argument("--no-lower-bounds", action="store_true")
    sub.add_parser("bounds", parents=[common], help="print the Shannon lower bounds")
    sim = sub.add_parser("simulate", parents=[common], help="Monte-Carlo check of the ALOHA model")
    sim.add_argument("--mode", choices=["noretx", "no_retx", "retx"])
    sim.add_argument("--lambda", dest="lambda_", type=float)
    sim.add_argument("--n", type=int)
    sim.add_argument("--snr-db", type=float)
    sim.add_argument("--pe", type=float)
    sim.add_argument("--slots", type=int, default=10**6)
    sim.add_argument("--warmup", type=int)
    sim.add_argument("--seed", type=int, default=0)
    fig = sub.add_parser("figure", parents=[common], help="emit the CSV behind one of the four figures")
    fig.add_argument("--id", type=int, choices=[1, 2, 3, 4])
    return parser


def read_config(path) -> list[str]:
    """Turn flat ``key = value`` lines into flag arguments."""
    argv = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().lstrip("-").replace("_", "-")
        value = value.strip()
        if key in ("no-converted", "no-lower-bounds"):
            if value.lower() in ("1", "true", "yes"):
                argv.append(f"--{key}")
        else:
            argv += [f"--{key}", value]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if args.config:
            # config values first so explicit flags win
            args = parser.parse_args([argv[0], *read_config(args.config), *argv[1:]])
        handler = {"solve": cmd_solve, "sweep": cmd_sweep, "bounds": cmd_bounds,
                   "simulate": cmd_simulate, "figure": cmd_figure}[args.command]
        return handler(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleSpecError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
