"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible or degenerate
input.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from grindmodm import __version__
from grindmodm.errors import (
    ConfigError,
    DegenerateMatrixError,
    DomainError,
    GrindError,
    InfeasibleError,
    MatrixParseError,
    NormalizationError,
    UsageError,
)
from grindmodm.process_model import (
    DecisionVector,
    ProcessConstants,
    evaluate,
    wear_constraint_residual,
    wear_ratio,
    within_bounds,
)
from grindmodm.scalarization import (
    DEFAULT_METHODS,
    IdealPoint,
    MethodKind,
    MethodSpec,
    parse_weights,
)
from grindmodm.solver import SolveOptions, SolveResult, ideal_point, solve
from grindmodm.topsis import (
    DEFAULT_WEIGHTS,
    REPORT_CRITERIA,
    DecisionMatrix,
    load_matrix,
    reference_matrix,
    topsis,
)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2

# fields that change from run to run even with a fixed seed
TIMING_FIELDS = ("wall_time", "generated_at")

FIGURES = (
    ("fig1_surface_roughness.csv", "R_a", lambda r: r.objectives.ra),
    ("fig2_production_cost.csv", "C_T", lambda r: r.objectives.ct),
    ("fig3_grinding_time.csv", "T", lambda r: r.objectives.t),
    ("fig4_cpu_time.csv", "CPU-Time", lambda r: r.wall_time),
)


@dataclass
class MethodRow:
    spec: str
    label: str
    result: Optional[SolveResult] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "method": self.spec,
            "label": self.label,
            "result": None if self.result is None else self.result.to_dict(),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MethodRow":
        result = None if d.get("result") is None else SolveResult.from_dict(d["result"])
        return cls(d["method"], d["label"], result, d.get("error"))


@dataclass
class RunReport:
    constants: ProcessConstants
    options: SolveOptions
    ideal: IdealPoint
    methods: list
    topsis_matrix: Optional[DecisionMatrix] = None
    topsis_result: Optional[dict] = None
    topsis_note: Optional[str] = None
    version: str = __version__
    generated_at: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    )

    def to_dict(self) -> dict:
        topsis_block = None
        if self.topsis_matrix is not None or self.topsis_note:
            topsis_block = {
                "matrix": None if self.topsis_matrix is None else self.topsis_matrix.to_dict(),
                "result": self.topsis_result,
                "note": self.topsis_note,
            }
        return {
            "version": self.version,
            "generated_at": self.generated_at,
            "seed": self.options.seed,
            "options": dict(vars(self.options)),
            "constants": self.constants.to_dict(),
            "ideal_point": self.ideal.to_dict(),
            "methods": [m.to_dict() for m in self.methods],
            "topsis": topsis_block,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        block = d.get("topsis") or {}
        return cls(
            constants=ProcessConstants.from_dict(d["constants"]),
            options=SolveOptions(**d["options"]),
            ideal=IdealPoint.from_dict(d["ideal_point"]),
            methods=[MethodRow.from_dict(m) for m in d["methods"]],
            topsis_matrix=None if not block.get("matrix") else DecisionMatrix.from_dict(block["matrix"]),
            topsis_result=block.get("result"),
            topsis_note=block.get("note"),
            version=d.get("version", __version__),
            generated_at=d.get("generated_at", ""),
        )


def run_compare(
    constants: ProcessConstants,
    methods: Sequence[MethodSpec] = DEFAULT_METHODS,
    opts: SolveOptions = SolveOptions(),
    topsis_weights=DEFAULT_WEIGHTS,
    renormalize: bool = False,
) -> RunReport:
    """Ideal point, every requested method, then TOPSIS over the solved rows."""
    fstar = ideal_point(constants, opts)
    rows = []
    for m in methods:
        if m.kind is MethodKind.INDIVIDUAL:
            continue
        try:
            rows.append(MethodRow(str(m), m.label, solve(m, constants, fstar, opts)))
        except InfeasibleError as exc:
            rows.append(MethodRow(str(m), m.label, error=str(exc)))
    report = RunReport(constants, opts, fstar, rows)
    solved = [r for r in rows if r.result is not None and r.result.feasible]
    if len(solved) < 2:
        report.topsis_note = "skipped: TOPSIS needs at least two solved methods"
        return report
    matrix = DecisionMatrix.all_cost(
        [r.label for r in solved],
        REPORT_CRITERIA,
        [[*r.result.objectives, r.result.wall_time] for r in solved],
    )
    report.topsis_matrix = matrix
    try:
        report.topsis_result = topsis(matrix, topsis_weights, renormalize).to_dict()
    except (DegenerateMatrixError, NormalizationError) as exc:
        report.topsis_note = f"skipped: {exc}"
    return report


# -- formatting ------------------------------------------------------------


def _dash_row(label, fstar: IdealPoint):
    dash = "-----"
    return [label, dash, dash, dash, f"{fstar.ra_star:.3f}", f"{fstar.t_star:.1f}", f"{fstar.ct_star:.3f}", dash]


def format_table(rows: list) -> str:
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for k, r in enumerate(rows):
        cells = [str(x).ljust(w) if i == 0 else str(x).rjust(w) for i, (x, w) in enumerate(zip(r, widths))]
        lines.append("  ".join(cells))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def results_table(report: RunReport) -> str:
    rows = [["Method", "V_w", "V_s", "a_w", "R_a", "T", "C_T", "CPU-Time"]]
    rows.append(_dash_row("Individual optimization", report.ideal))
    for m in report.methods:
        if m.result is None:
            rows.append([m.label, "infeasible", "", "", "", "", "", ""])
            continue
        r = m.result
        rows.append([
            m.label, f"{r.dv.vw:.2f}", f"{r.dv.vs:.1f}", f"{r.dv.aw:.3f}",
            f"{r.objectives.ra:.3f}", f"{r.objectives.t:.1f}", f"{r.objectives.ct:.3f}",
            f"{r.wall_time:.3f}",
        ])
    return format_table(rows)


def topsis_table(alternatives, result: dict) -> str:
    rows = [["Method", "d+", "d-", "Similarity", "Rank"]]
    for name, dp, dm, s, k in zip(
        alternatives, result["d_plus"], result["d_minus"], result["similarity"], result["ranking"]
    ):
        rows.append([name, f"{dp:.4f}", f"{dm:.4f}", f"{s:.4f}", str(k)])
    return format_table(rows)


def write_csv_outputs(report: RunReport, outdir: Path) -> list:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def dump(name, header, rows):
        path = outdir / name
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        written.append(path)

    solved = [m for m in report.methods if m.result is not None]
    fs = report.ideal
    table = [["Individual optimization", "", "", "", fs.ra_star, fs.t_star, fs.ct_star, ""]]
    table += [[m.label, *m.result.dv, *m.result.objectives, m.result.wall_time] for m in solved]
    dump("results.csv", ["method", "vw", "vs", "aw", "ra", "t", "ct", "cpu_time"], table)
    for name, metric, get in FIGURES:
        dump(name, ["method", "metric", "value"], [[m.label, metric, get(m.result)] for m in solved])
    if report.topsis_matrix is not None:
        (outdir / "decision_matrix.csv").write_text(report.topsis_matrix.to_csv())
        written.append(outdir / "decision_matrix.csv")
    if report.topsis_result is not None:
        res = report.topsis_result
        dump(
            "topsis.csv",
            ["method", "d_plus", "d_minus", "similarity", "rank"],
            zip(res["alternatives"], res["d_plus"], res["d_minus"], res["similarity"], res["ranking"]),
        )
    return written


# -- argument parsing ------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_globals(p, defaults: bool):
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--config", metavar="FILE", default=d(None), help="process constants JSON")
    p.add_argument("--grid", type=int, metavar="N", default=d(201), help="grid points per axis")
    p.add_argument("--starts", type=int, metavar="K", default=d(16), help="local refinements")
    p.add_argument("--penalty", type=float, metavar="X", default=d(1e6), help="wear penalty weight")
    p.add_argument("--seed", type=int, metavar="S", default=d(0), help="multistart RNG seed")
    p.add_argument("--json", metavar="PATH", default=d(None), help="write a JSON report")
    p.add_argument("--csv", metavar="DIR", default=d(None), help="write CSV tables here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grindmodm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, defaults=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, defaults=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", parents=[common], help="evaluate one parameter set")
    p.add_argument("vw", type=float, help="workpiece speed, m/min")
    p.add_argument("vs", type=float, help="wheel speed, m/min")
    p.add_argument("aw", type=float, help="total thickness of cut, mm")

    sub.add_parser("ideal", parents=[common], help="per-objective optima")

    p = sub.add_parser("solve", parents=[common], help="optimize one MODM method")
    p.add_argument("--method", required=True, help="e.g. wsm, lp-metric:2, goal-attainment:1,1,2")
    p.add_argument("--weights", help="w1,w2,w3 overriding the method's weights")
    p.add_argument("--normalized", action="store_true", help="weight relative deviations")

    p = sub.add_parser("compare", parents=[common], help="run every method and rank with TOPSIS")
    p.add_argument("--methods", nargs="+", metavar="M", help="subset of methods (default: all five)")
    p.add_argument("--normalized", action="store_true", help="weight relative deviations")
    p.add_argument("--topsis-weights", metavar="W", help="four TOPSIS criterion weights")
    p.add_argument("--renormalize-weights", action="store_true")

    p = sub.add_parser("topsis", parents=[common], help="rank alternatives of a decision matrix")
    p.add_argument("--matrix", metavar="FILE", help="CSV matrix or compare JSON report (default: reference matrix)")
    p.add_argument("--weights", metavar="W", help="comma-separated criterion weights")
    p.add_argument("--renormalize-weights", action="store_true", help="rescale weights to sum to 1")

    p = sub.add_parser("config", parents=[common], help="write or check a constants file")
    p.add_argument("output", nargs="?", help="destination (default: stdout)")
    p.add_argument("--check", metavar="FILE", help="validate FILE instead of writing")
    return parser


def _options(args) -> SolveOptions:
    return SolveOptions(
        grid_resolution=args.grid,
        multistart_count=args.starts,
        penalty_coefficient=args.penalty,
        seed=args.seed,
    )


def _constants(args) -> ProcessConstants:
    return ProcessConstants.load(args.config) if args.config else ProcessConstants()


def _write_json(path, payload):
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _with_normalized(m: MethodSpec, normalized: bool) -> MethodSpec:
    if not normalized:
        return m
    return MethodSpec(m.kind, m.r, m.weights, True, m.target)


def cmd_evaluate(args) -> int:
    c = _constants(args)
    dv = DecisionVector(args.vw, args.vs, args.aw)
    f, feasible = evaluate(dv, c)
    ratio = float(wear_ratio(dv, c))
    residual = float(wear_constraint_residual(dv, c))
    in_bounds = bool(within_bounds(dv, c))
    print(f"R_a      = {f.ra:.3f} um")
    print(f"T        = {f.t:.1f} min")
    print(f"C_T      = {f.ct:.3f} $")
    print(f"WRP/WWP  = {ratio:.4g}  (G = {c.g_ratio:g})")
    print(f"residual = {residual:.4g}")
    print(f"bounds   = {'ok' if in_bounds else 'violated'}")
    print(f"feasible = {'yes' if feasible else 'no'}")
    if args.json:
        _write_json(args.json, {
            "dv": dv._asdict(), "objectives": {k: float(v) for k, v in f._asdict().items()},
            "wear_ratio": ratio, "residual": residual, "within_bounds": in_bounds, "feasible": feasible,
        })
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def cmd_ideal(args) -> int:
    fs = ideal_point(_constants(args), _options(args))
    rows = [["Objective", "Optimum", "V_w", "V_s", "a_w"]]
    for name, value, dv in (
        ("R_a", f"{fs.ra_star:.3f}", fs.argmin_ra),
        ("T", f"{fs.t_star:.1f}", fs.argmin_t),
        ("C_T", f"{fs.ct_star:.3f}", fs.argmin_ct),
    ):
        rows.append([name, value, f"{dv.vw:.2f}", f"{dv.vs:.1f}", f"{dv.aw:.3f}"])
    print(format_table(rows))
    if args.json:
        _write_json(args.json, fs.to_dict())
    return EXIT_OK


def cmd_solve(args) -> int:
    c = _constants(args)
    opts = _options(args)
    m = MethodSpec.parse(args.method)
    if args.weights:
        m = MethodSpec(m.kind, m.r, parse_weights(args.weights, 3), m.normalized, m.target)
    m = _with_normalized(m, args.normalized)
    fstar = None if m.kind is MethodKind.INDIVIDUAL else ideal_point(c, opts)
    r = solve(m, c, fstar, opts)
    print(f"method   = {m}")
    print(f"V_w, V_s, a_w = {r.dv.vw:.4f}, {r.dv.vs:.2f}, {r.dv.aw:.5f}")
    print(f"R_a = {r.objectives.ra:.3f}  T = {r.objectives.t:.1f}  C_T = {r.objectives.ct:.3f}")
    print(f"scalar value = {r.scalar_value:.6g}")
    print(f"wear residual = {r.residual:.4g}  feasible = {'yes' if r.feasible else 'no'}")
    print(f"CPU-Time = {r.wall_time:.3f} s  evaluations = {r.evaluations}")
    if args.json:
        payload = r.to_dict()
        if fstar is not None:
            payload["ideal_point"] = fstar.to_dict()
        _write_json(args.json, payload)
    return EXIT_OK if r.feasible else EXIT_INFEASIBLE


def cmd_compare(args) -> int:
    c = _constants(args)
    methods = [MethodSpec.parse(s) for s in args.methods] if args.methods else list(DEFAULT_METHODS)
    methods = [_with_normalized(m, args.normalized) for m in methods]
    weights = parse_weights(args.topsis_weights, 4) if args.topsis_weights else DEFAULT_WEIGHTS
    report = run_compare(c, methods, _options(args), weights, args.renormalize_weights)
    print(results_table(report))
    if report.topsis_result is not None:
        print()
        print(topsis_table(report.topsis_result["alternatives"], report.topsis_result))
    elif report.topsis_note:
        print(f"\nTOPSIS {report.topsis_note}")
    if args.json:
        _write_json(args.json, report.to_json())
    if args.csv:
        write_csv_outputs(report, Path(args.csv))
    return EXIT_OK


def cmd_topsis(args) -> int:
    matrix = load_matrix(args.matrix) if args.matrix else reference_matrix()
    n = len(matrix.criteria)
    if args.weights:
        weights = parse_weights(args.weights, n)
    elif n == len(DEFAULT_WEIGHTS):
        weights = DEFAULT_WEIGHTS
    else:
        raise UsageError(f"matrix has {n} criteria; pass --weights with {n} values")
    result = topsis(matrix, weights, args.renormalize_weights).to_dict()
    print(topsis_table(matrix.alternatives, result))
    print("\nRanking: " + ", ".join(
        f"{k}. {name}" for k, name in sorted(zip(result["ranking"], matrix.alternatives))
    ))
    if args.json:
        _write_json(args.json, {"matrix": matrix.to_dict(), "result": result})
    return EXIT_OK


def cmd_config(args) -> int:
    if args.check:
        try:
            ProcessConstants.load(args.check)
        except ConfigError as exc:
            for name, msg in exc.issues:
                print(f"{args.check}: {name}: {msg}", file=sys.stderr)
            return EXIT_USAGE
        print(f"{args.check}: ok")
        return EXIT_OK
    text = ProcessConstants().to_json()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "evaluate": cmd_evaluate,
    "ideal": cmd_ideal,
    "solve": cmd_solve,
    "compare": cmd_compare,
    "topsis": cmd_topsis,
    "config": cmd_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (DomainError, InfeasibleError, DegenerateMatrixError, NormalizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, ConfigError, MatrixParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GrindError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
