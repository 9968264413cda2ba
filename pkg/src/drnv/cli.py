"""Command line interface: data ingestion, delta sweeps and report emission.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver infeasibility,
4 a ``verify`` check failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import errors
from .model import CostParams, MomentSpec, ProfitParams, make_instance
from .outer_solver import OuterConfig, profit_params_to_costs, scarf_solution, solve

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INFEASIBLE, EXIT_VERIFY_FAILED = 0, 1, 2, 3, 4
DEFAULT_DELTAS = (0.0, 1.0, 2.5, 5.0, 10.0, 15.0, 20.0)
CSV_COLUMNS = ("delta", "cost", "q_star", "xi_star", "lambda1", "lambda2", "lambda3", "mode",
               "oracle_gap", "runtime_ms", "status")
UNITS = {
    "demand": "thousands of units",
    "costs": "thousands of currency per unit",
    "cost": "millions of currency (thousands of units x thousands per unit)",
    "delta": "squared demand units (ground cost (x - y)^2)",
}


class UsageError(Exception):
    """Bad flags or configuration values (exit code 1)."""


# ------------------------------------------------------------------ ingestion
def _parse_number(text: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise errors.ParseError(f"not a number: {text!r}", line) from None
    if not math.isfinite(v):
        raise errors.ParseError(f"not a finite number: {text!r}", line)
    return v


def ingest_csv(path) -> np.ndarray:
    """Demand samples from a one-column file or a two-column ``period,value`` file.

    Blank lines and ``#`` comments are skipped.  A header row is allowed only in
    the two-column form (its value column is not numeric).
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such file: {p}")
    values: list = []
    width: Optional[int] = None
    seen_row = False
    with open(p, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            cells = [c.strip() for c in next(csv.reader([text]))]
            if len(cells) not in (1, 2):
                raise errors.ParseError(f"expected 1 or 2 columns, got {len(cells)}", lineno)
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise errors.ParseError(f"expected {width} columns, got {len(cells)}", lineno)
            if width == 2 and not seen_row:
                seen_row = True
                try:
                    float(cells[1])
                except ValueError:
                    continue  # header row
            seen_row = True
            values.append(_parse_number(cells[-1], lineno))
    if not values:
        raise errors.EmptyFile(f"no demand values in {p}")
    return np.asarray(values, dtype=float)


def write_samples_csv(samples, path) -> None:
    """Inverse of :func:`ingest_csv` (one value per line, shortest round-trip repr)."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in samples:
            fh.write(f"{float(v)!r}\n")


# ------------------------------------------------------------------ sweep
@dataclass(frozen=True)
class SweepConfig:
    input: Optional[str] = None
    samples: Optional[tuple] = None  # used instead of ``input`` when given
    c1: Optional[float] = None
    c2: Optional[float] = None
    p: Optional[float] = None
    c: Optional[float] = None
    s: Optional[float] = None
    mu: Optional[float] = None
    sigma: Optional[float] = None
    deltas: tuple = DEFAULT_DELTAS
    mode: str = "dd"
    verify: bool = False
    out: str = "out"
    workers: int = 1
    timings: bool = False
    outer: Optional[OuterConfig] = None

    def __post_init__(self):
        d = tuple(float(v) for v in self.deltas)
        if not d:
            raise UsageError("delta list must be nonempty")
        if any(not (math.isfinite(v) and v >= 0) for v in d):
            raise UsageError("delta values must be finite and >= 0")
        if any(b <= a for a, b in zip(d, d[1:])):
            raise UsageError("delta list must be strictly increasing")
        object.__setattr__(self, "deltas", d)
        if self.mode not in ("dd", "grid"):
            raise UsageError(f"--mode must be dd or grid, got {self.mode!r}")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        if (self.mu is None) != (self.sigma is None):
            raise UsageError("--mu and --sigma must be given together")

    def cost_params(self) -> CostParams:
        have_c = self.c1 is not None or self.c2 is not None
        have_p = any(v is not None for v in (self.p, self.c, self.s))
        if have_c and have_p:
            raise UsageError("give either --c1/--c2 or --p/--c/--s, not both")
        if have_p:
            if None in (self.p, self.c, self.s):
                raise UsageError("--p, --c and --s must be given together")
            return profit_params_to_costs(ProfitParams(self.p, self.c, self.s))
        if self.c1 is None or self.c2 is None:
            raise UsageError("cost parameters required: --c1 and --c2 (or --p --c --s)")
        return CostParams(self.c1, self.c2)

    def load_samples(self) -> np.ndarray:
        if self.samples is not None:
            return np.asarray(self.samples, dtype=float)
        if self.input is None:
            raise UsageError("--input is required")
        return ingest_csv(self.input)


@dataclass
class SweepRow:
    delta: float
    status: str
    mode: str
    cost: float = math.nan
    q_star: float = math.nan
    xi_star: float = math.nan
    lambda1: float = math.nan
    lambda2: float = math.nan
    lambda3: float = math.nan
    oracle_gap: Optional[float] = None
    primal_margin: Optional[float] = None
    runtime_ms: float = 0.0
    report: object = None
    error: Optional[str] = None
    error_kind: Optional[str] = None


@dataclass
class SweepTable:
    rows: list
    scarf_q: float
    scarf_cost: float
    config: SweepConfig
    instance: dict = field(default_factory=dict)


def _solve_row(args) -> SweepRow:
    samples, delta, costs, moments, mode, verify, outer = args
    t0 = time.perf_counter()
    mu, sigma = (moments.mu, moments.sigma) if moments is not None else (None, None)
    try:
        inst = make_instance(samples, delta, costs.c1, costs.c2, mu=mu, sigma=sigma)
        cfg = replace(outer or OuterConfig(), mode=mode)
        rep = solve(inst, cfg)
        row = SweepRow(
            delta=delta, status="ok", mode=mode, cost=rep.worst_case_cost, q_star=rep.q_star,
            xi_star=rep.xi_star, lambda1=rep.dual_point.lambda1, lambda2=rep.dual_point.lambda2,
            lambda3=rep.dual_point.lambda3, report=rep,
        )
        if verify:
            row.oracle_gap, row.primal_margin = _row_oracles(inst, rep)
    except errors.DrnvError as exc:
        row = SweepRow(delta=delta, status="failed", mode=mode, error=str(exc), error_kind=type(exc).__name__)
    row.runtime_ms = (time.perf_counter() - t0) * 1e3
    return row


def _row_oracles(inst, rep) -> tuple:
    from .dd_solver import dd_minimize
    from .oracle import SupportGrid, grid_minimize, primal_lp_value
    from .verify import ORACLE_GRID

    xi, Q = rep.xi_star, rep.q_star
    dd = dd_minimize(inst, xi, Q).f_value
    gr = grid_minimize(inst, xi, Q, ORACLE_GRID).f_value
    gap = abs(dd - gr) / (1.0 + abs(gr))
    m = max(2, min(200, 5000 // inst.n))
    try:
        primal = primal_lp_value(inst, Q, SupportGrid.for_instance(inst, m=m, Q=Q)).value
        margin = rep.worst_case_cost - primal
    except errors.DrnvError:
        margin = math.nan
    return gap, margin


def run_sweep(cfg: SweepConfig) -> SweepTable:
    samples = cfg.load_samples()
    costs = cfg.cost_params()
    moments = MomentSpec(cfg.mu, cfg.sigma) if cfg.mu is not None else None
    base = make_instance(samples, 0.0, costs.c1, costs.c2, mu=cfg.mu, sigma=cfg.sigma)
    q_sc, c_sc = scarf_solution(MomentSpec(base.mu, base.sigma), costs)
    jobs = [(tuple(samples.tolist()), d, costs, moments, cfg.mode, cfg.verify, cfg.outer) for d in cfg.deltas]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(jobs))) as ex:
            rows = list(ex.map(_solve_row, jobs))
    else:
        rows = [_solve_row(j) for j in jobs]
    info = {"n": base.n, "mu": base.mu, "sigma": base.sigma, "c1": costs.c1, "c2": costs.c2,
            "moments": "override" if moments is not None else "empirical"}
    return SweepTable(rows=rows, scarf_q=q_sc, scarf_cost=c_sc, config=cfg, instance=info)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, float) and math.isnan(v):
        return "NaN"
    return f"{float(v):.6g}"


def emit_report(table: SweepTable, out_dir) -> dict:
    """Write sweep.csv, report.json and figure2.svg; return their paths."""
    from .svg import render_figure2

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / "sweep.csv", "json": out / "report.json", "svg": out / "figure2.svg"}
    with open(paths["csv"], "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in table.rows:
            wr.writerow([
                _fmt(r.delta), _fmt(r.cost), _fmt(r.q_star), _fmt(r.xi_star), _fmt(r.lambda1),
                _fmt(r.lambda2), _fmt(r.lambda3), r.mode, _fmt(r.oracle_gap),
                _fmt(r.runtime_ms) if table.config.timings else "", r.status,
            ])
    doc = {
        "units": UNITS,
        "instance": table.instance,
        "scarf": {"delta": "inf", "q_star": table.scarf_q, "cost": table.scarf_cost},
        "rows": [
            {
                "delta": r.delta, "status": r.status, "mode": r.mode, "runtime_ms": r.runtime_ms,
                "oracle_gap": r.oracle_gap, "primal_margin": r.primal_margin,
                "error": r.error, "error_kind": r.error_kind,
                "report": r.report.to_dict() if r.report is not None else None,
            }
            for r in table.rows
        ],
    }
    with open(paths["json"], "w", encoding="utf-8") as fh:
        json.dump(_json_safe(doc), fh, indent=2)
    ok = [r for r in table.rows if r.status == "ok"]
    svg = render_figure2([r.delta for r in ok], [r.cost for r in ok], [r.q_star for r in ok],
                         table.scarf_cost, table.scarf_q)
    paths["svg"].write_text(svg, encoding="utf-8")
    return paths


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


# ------------------------------------------------------------------ argument parsing
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _delta_list(text: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid delta list: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("instance")
    g.add_argument("--input", help="demand CSV (one value per line, or period,value with header)")
    g.add_argument("--config", help="JSON file with SweepConfig keys; flags override it")
    for name in ("c1", "c2", "p", "c", "s", "mu", "sigma"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--delta", type=_delta_list, help="Wasserstein radius, or comma list for sweep")
    g.add_argument("--mode", choices=("dd", "grid"))
    g.add_argument("--verify", action="store_true", default=None, help="run oracle checks")
    g.add_argument("--out", help="output directory")
    g.add_argument("--workers", type=int)
    g.add_argument("--timings", action="store_true", default=None,
                   help="fill runtime_ms in sweep.csv (makes it run-dependent)")

    parser = _Parser(prog="drnv", description="Distributionally robust newsvendor solver (Wasserstein + moments).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("solve", parents=[common], help="solve at a single delta")
    p.add_argument("--geometry", action="store_true", help="also write geometry.json (DD cut lines)")
    sub.add_parser("sweep", parents=[common], help="delta sweep; writes sweep.csv, report.json, figure2.svg")
    p = sub.add_parser("verify", parents=[common], help="run the oracle cross-checks")
    p.add_argument("--quick", action="store_true", help="reduced sample sizes")
    sub.add_parser("scarf", parents=[common], help="print the moments-only (Scarf) baseline")
    p = sub.add_parser("primal-check", parents=[common], help="discretised primal LP vs dual at a given Q")
    p.add_argument("--Q", type=float, required=True, dest="q")
    p.add_argument("--m", type=int, default=None, help="support points (default min(200, 5000//n))")
    p.add_argument("--slack", type=float, default=None, help="moment slack band; 0 (default) imposes the moments exactly")
    return parser


CONFIG_KEYS = {"input", "c1", "c2", "p", "c", "s", "mu", "sigma", "deltas", "delta", "mode", "verify",
               "out", "workers", "timings"}


def config_from_args(args) -> SweepConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        if "delta" in data:
            data["deltas"] = data.pop("delta")
        if isinstance(data.get("deltas"), (int, float)):
            data["deltas"] = [data["deltas"]]
        if "input" in data and not os.path.isabs(data["input"]):
            data["input"] = str(Path(args.config).parent / data["input"])
    for key in ("input", "c1", "c2", "p", "c", "s", "mu", "sigma", "mode", "verify", "out", "workers", "timings"):
        v = getattr(args, key, None)
        if v is not None:
            data[key] = v
    if args.delta is not None:
        data["deltas"] = args.delta
    if "deltas" in data:
        data["deltas"] = tuple(data["deltas"])
    try:
        return SweepConfig(**data)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


# ------------------------------------------------------------------ commands
def _instance(cfg: SweepConfig, delta: float):
    samples = cfg.load_samples()
    costs = cfg.cost_params()
    return make_instance(samples, delta, costs.c1, costs.c2, mu=cfg.mu, sigma=cfg.sigma)


def _single_delta(cfg: SweepConfig) -> float:
    if len(cfg.deltas) != 1:
        raise UsageError("this command takes a single --delta value")
    return cfg.deltas[0]


def cmd_solve(cfg: SweepConfig, args, out) -> int:
    delta = _single_delta(cfg)
    inst = _instance(cfg, delta)
    rep = solve(inst, replace(cfg.outer or OuterConfig(), mode=cfg.mode))
    print(f"delta      {delta:.6g}", file=out)
    print(f"Q*         {rep.q_star:.6g}", file=out)
    print(f"cost       {rep.worst_case_cost:.6g}", file=out)
    print(f"xi*        {rep.xi_star:.6g}", file=out)
    dp = rep.dual_point
    print(f"lambda     ({dp.lambda1:.6g}, {dp.lambda2:.6g}, {dp.lambda3:.6g})", file=out)
    if rep.flags:
        print(f"flags      {', '.join(sorted(rep.flags))}", file=out)
    doc = rep.to_dict()
    if cfg.verify:
        gap, margin = _row_oracles(inst, rep)
        print(f"grid gap   {gap:.3g}", file=out)
        print(f"LP margin  {margin:.3g}", file=out)
        doc["oracle"] = {"grid_gap": gap, "primal_margin": margin}
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "report.json").write_text(json.dumps(_json_safe({"units": UNITS, "delta": delta, "report": doc}), indent=2),
                                       encoding="utf-8")
        if args.geometry:
            from .dd_solver import dump_geometry

            dump_geometry(d / "geometry.json", inst, rep.xi_star, rep.q_star)
    return EXIT_OK


def cmd_sweep(cfg: SweepConfig, args, out) -> int:
    table = run_sweep(cfg)
    paths = emit_report(table, cfg.out)
    print(f"{'delta':>8} {'cost':>12} {'Q*':>10} {'status':>8}", file=out)
    for r in table.rows:
        print(f"{r.delta:8.6g} {_fmt(r.cost):>12} {_fmt(r.q_star):>10} {r.status:>8}", file=out)
    print(f"{'Scarf':>8} {table.scarf_cost:12.6g} {table.scarf_q:10.6g}", file=out)
    print(f"wrote {paths['csv']}, {paths['json']}, {paths['svg']}", file=out)
    failed = [r for r in table.rows if r.status != "ok"]
    for r in failed:
        print(f"delta={r.delta:g} failed: {r.error}", file=sys.stderr)
    if any(r.error_kind == "Infeasible" for r in failed):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_verify(cfg: SweepConfig, args, out) -> int:
    from .verify import run_all

    samples = cfg.load_samples() if cfg.input or cfg.samples else None
    results = run_all(quick=args.quick, samples=samples, workers=cfg.workers)
    for r in results:
        print(r.line(), file=out)
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed", file=out)
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY_FAILED


def cmd_scarf(cfg: SweepConfig, args, out) -> int:
    costs = cfg.cost_params()
    if cfg.mu is not None:
        moments = MomentSpec(cfg.mu, cfg.sigma)
    else:
        inst = _instance(cfg, 0.0)
        moments = MomentSpec(inst.mu, inst.sigma)
    q, c = scarf_solution(moments, costs)
    print(f"mu={moments.mu:.6g} sigma={moments.sigma:.6g} c1={costs.c1:.6g} c2={costs.c2:.6g}", file=out)
    print(f"Q_scarf    {q:.6g}", file=out)
    print(f"cost_scarf {c:.6g}", file=out)
    return EXIT_OK


def cmd_primal_check(cfg: SweepConfig, args, out) -> int:
    from .oracle import SupportGrid, primal_lp_value
    from .outer_solver import minimize_xi

    delta = _single_delta(cfg)
    if args.q < 0:
        raise UsageError("--Q must be >= 0")
    inst = _instance(cfg, delta)
    m = args.m or max(2, min(200, 5000 // inst.n))
    if m < 2:
        raise UsageError("--m must be >= 2")
    slack = args.slack if args.slack is not None else 0.0
    if slack < 0:
        raise UsageError("--slack must be >= 0")
    res = primal_lp_value(inst, args.q, SupportGrid.for_instance(inst, m=m, Q=args.q), moment_slack=slack)
    dual = minimize_xi(inst, args.q, cfg.outer or OuterConfig()).h_value
    print(f"Q          {args.q:.6g}", file=out)
    print(f"primal     {res.value:.8g}  (m={res.grid.m} support points, moment slack={slack:.3g})", file=out)
    print(f"dual h(Q)  {dual:.8g}", file=out)
    print(f"gap        {(dual - res.value) / (1.0 + abs(dual)):.3g}", file=out)
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        res.write_plan_csv(d / "plan.csv")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "verify": cmd_verify, "scarf": cmd_scarf,
            "primal-check": cmd_primal_check}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg, args, out)
    except UsageError as exc:
        print(f"drnv: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except errors.Infeasible as exc:
        print(f"drnv: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (errors.InvalidInstance, errors.OrderingViolation, errors.ParseError, errors.EmptyFile,
            FileNotFoundError) as exc:
        print(f"drnv: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
