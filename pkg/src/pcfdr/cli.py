"""Command-line front end.

Subcommands:
  combine    per-row combined (or partial conjunction) p-values, CSV out
  pc-test    step-up testing of a family of partial conjunction hypotheses
  replicate  two-step replicability analysis of a p-value matrix
  simulate   Monte Carlo estimation for a scenario file, report only
  verify     like simulate, but exits 3 if any estimate violates its bound

Matrices are headerless CSV, rows = features, columns = studies; a leading
non-numeric column is treated as feature identifiers. Reports are JSON with
a schema_version field. Exit status: 0 success, 2 validation failure,
3 bound violation in verify mode.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from .combine import CombiningMethod, DEFAULT_LAMBDA
from .partial_conjunction import pc_pvalue
from .pc_testing import GroupLayout, WeightScheme, compute_pc_pvalues
from .procedures import (
    IDENTITY,
    RECIPROCAL_SUM,
    ShapeFunction,
    ThresholdCollection,
    step_up,
)
from .replicability import SelectionRule, khat_bounds, select_features
from .simulation import (
    SimulationScenario,
    dcc_probe,
    mc_fdr_pc,
    mc_replicability_error,
)

SCHEMA_VERSION = 1

__all__ = ["main", "run"]


class CliError(Exception):
    """Validation failure with a user-facing diagnostic."""


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _parse_number(token: str, path: str, line: int, col: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise CliError(f"{path}:{line}:{col}: not a number: {token!r}") from None


def read_matrix(path: str) -> tuple[list[str] | None, list[list[float]]]:
    """Read a headerless CSV matrix; returns (ids or None, rows)."""
    try:
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    if not lines:
        raise CliError(f"{path}:1:1: empty input")
    first = lines[0].split(",")[0].strip()
    try:
        float(first)
        has_ids = False
    except ValueError:
        has_ids = True
    ids: list[str] | None = [] if has_ids else None
    rows: list[list[float]] = []
    width = None
    for ln_no, line in enumerate(lines, start=1):
        cells = [c.strip() for c in line.split(",")]
        if has_ids:
            ids.append(cells[0])
            cells = cells[1:]
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise CliError(f"{path}:{ln_no}:1: expected {width} values, got {len(cells)}")
        row = [_parse_number(c, path, ln_no, col + 1 + has_ids)
               for col, c in enumerate(cells)]
        for col, x in enumerate(row):
            if not 0.0 <= x <= 1.0:
                raise CliError(f"{path}:{ln_no}:{col + 1 + has_ids}: "
                               f"p-value {x} outside [0, 1]")
        rows.append(row)
    return ids, rows


def write_matrix(path, ids: list[str] | None, rows: list[list[float]]) -> None:
    out = sys.stdout if path is None else open(path, "w")
    try:
        for i, row in enumerate(rows):
            cells = [_fmt(x) for x in row]
            if ids is not None:
                cells.insert(0, ids[i])
            out.write(",".join(cells) + "\n")
    finally:
        if path is not None:
            out.close()


def read_weights(path: str, m: int) -> WeightScheme:
    """Two-column CSV: prior weight w, penalty weight v."""
    _, rows = read_matrix_raw(path)
    if any(len(r) != 2 for r in rows):
        raise CliError(f"{path}: weights file must have exactly two columns")
    if len(rows) != m:
        raise CliError(f"{path}: expected {m} weight rows, got {len(rows)}")
    try:
        return WeightScheme(tuple(r[0] for r in rows), tuple(r[1] for r in rows))
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None


def read_matrix_raw(path: str) -> tuple[list[str] | None, list[list[float]]]:
    # Like read_matrix but without the [0, 1] range check (weights files).
    try:
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    ids = None
    rows = []
    for ln_no, line in enumerate(lines, start=1):
        cells = [c.strip() for c in line.split(",")]
        rows.append([_parse_number(c, path, ln_no, col + 1)
                     for col, c in enumerate(cells)])
    return ids, rows


def _method(args) -> CombiningMethod:
    lam = getattr(args, "lam", None)
    if args.method == "simes_storey":
        return CombiningMethod("simes_storey", lam if lam is not None else DEFAULT_LAMBDA)
    if lam is not None:
        raise CliError("--lambda only applies to simes_storey")
    return CombiningMethod(args.method)


def _shape(name: str) -> ShapeFunction:
    if name == "identity":
        return IDENTITY
    if name == "reciprocal_sum":
        return RECIPROCAL_SUM
    raise CliError(f"unknown shape {name!r}")


def _write_json(path, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def cmd_combine(args) -> int:
    method = _method(args)
    ids, rows = read_matrix(args.input)
    out_rows = []
    for row in rows:
        u = args.u if args.u is not None else 1
        if not 1 <= u <= len(row):
            raise CliError(f"--u {u} outside [1, {len(row)}]")
        out_rows.append([pc_pvalue(row, u, method)])
    write_matrix(args.out, ids, out_rows)
    return 0


def cmd_pc_test(args) -> int:
    method = _method(args)
    ids, rows = read_matrix(args.input)
    if any(len(r) != 1 for r in rows):
        raise CliError(f"{args.input}: pc-test expects a single column of p-values")
    p = [r[0] for r in rows]
    try:
        with open(args.groups) as fh:
            labels = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise CliError(f"cannot read {args.groups}: {exc}") from None
    if len(labels) != len(p):
        raise CliError(f"{args.groups}: expected {len(p)} group labels, got {len(labels)}")
    order: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        order.setdefault(lab, []).append(i)
    names = list(order)
    groups = tuple(tuple(order[name]) for name in names)
    if args.u_proportion is not None:
        layout = GroupLayout.from_proportion(groups, args.u_proportion)
    else:
        u = args.u if args.u is not None else 1
        layout = GroupLayout(groups, tuple(min(u, len(g)) for g in groups))
    g = layout.n_groups
    ws = read_weights(args.weights, g) if args.weights else WeightScheme.unit(g)
    pc = compute_pc_pvalues(p, layout, method)
    tc = ThresholdCollection(alpha=args.alpha, m=g, prior_w=ws.prior_w,
                             shape=_shape(args.shape))
    rej = step_up(pc, tc, ws.penalty_v)
    _write_json(args.out, {
        "groups": names,
        "u": list(layout.u),
        "pc_pvalues": pc,
        "rejected_groups": sorted(names[i] for i in rej.indices),
        "fixed_point_volume": rej.fixed_point_volume,
    })
    return 0


def _parse_rule(spec: str, q: float, shape: ShapeFunction) -> SelectionRule:
    if spec == "step-up":
        return SelectionRule("step_up_on_combined", alpha=q, shape=shape)
    if spec.startswith("threshold="):
        return SelectionRule("fixed_threshold_on_combined",
                             threshold=float(spec.split("=", 1)[1]))
    if spec.startswith("column="):
        return SelectionRule("step_up_on_column", alpha=q, shape=shape,
                             column=int(spec.split("=", 1)[1]))
    raise CliError(f"unknown rule {spec!r}; use step-up, threshold=T, or column=J")


def cmd_replicate(args) -> int:
    method = _method(args)
    shape = _shape(args.shape)
    ids, rows = read_matrix(args.input)
    m = len(rows)
    ws = read_weights(args.weights, m) if args.weights else WeightScheme.unit(m)
    rule = _parse_rule(args.rule, args.q, shape)
    sel = select_features(rows, rule, method, ws)
    report = khat_bounds(rows, sel, method, ws, args.q, shape)
    name = (lambda i: ids[i]) if ids else (lambda i: str(i))
    _write_json(args.out, {
        "q": args.q,
        "selected": sorted(name(i) for i in report.selected),
        "khat": {name(i): report.khat[i] for i in sorted(report.selected)},
        "threshold_used": {name(i): report.threshold_used[i]
                           for i in sorted(report.selected)},
        "selection_volume": report.selection_volume,
    })
    return 0


def _run_scenario_file(args, enforce: bool) -> int:
    try:
        with open(args.scenario) as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {args.scenario}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.scenario}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    checks = spec["checks"] if "checks" in spec else [spec]
    records = []
    all_pass = True
    for chk in checks:
        try:
            sc_dict = dict(chk["scenario"])
            if args.reps is not None:
                sc_dict["reps"] = args.reps
            if args.seed is not None:
                sc_dict["seed"] = args.seed
            scenario = SimulationScenario.from_dict(sc_dict)
            kind = chk["check"]
            method = CombiningMethod(chk["method"], chk.get("lambda"))
            shape = _shape(chk.get("shape", "identity"))
            ws = WeightScheme.unit(scenario.m)
            if kind == "fdr_pc":
                u = int(chk["u"])
                alpha = float(chk.get("alpha", 0.05))
                adaptive = chk.get("adaptive_lambda")
                tc = ThresholdCollection(alpha=alpha, m=scenario.m, shape=shape,
                                         adaptive_lambda=adaptive)
                est = mc_fdr_pc(scenario, u, method, ws, tc)
                n_null = len(scenario.true_null_features(u))
                bound = alpha * n_null / scenario.m + 3 * est.se
                sub = [{"estimate": est.mean, "se": est.se, "bound": bound,
                        "pass": est.mean <= bound}]
            elif kind == "replicability":
                q = float(chk.get("q", 0.05))
                rule = _parse_rule(chk.get("rule", "step-up"), q, shape)
                est = mc_replicability_error(scenario, rule, method, ws, q, shape)
                bound = q + 3 * est.se
                sub = [{"estimate": est.mean, "se": est.se, "bound": bound,
                        "pass": est.mean <= bound}]
            elif kind == "dcc":
                u = int(chk["u"])
                grid = [float(c) for c in chk.get("c_grid", [0.02, 0.05, 0.1, 0.2, 0.5])]
                stat = chk.get("statistic", "rejection_volume")
                out = dcc_probe(scenario, u, method, grid, statistic=stat,
                                alpha=float(chk.get("alpha", 0.05)))
                sub = [{"c": c, "estimate": e.mean, "se": e.se,
                        "bound": c + 3 * e.se, "pass": e.mean <= c + 3 * e.se}
                       for c, e in out]
            else:
                raise CliError(f"unknown check kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"{args.scenario}: bad check spec: {exc}") from None
        ok = all(r["pass"] for r in sub)
        all_pass = all_pass and ok
        records.append({"check": chk["check"], "scenario": scenario.to_dict(),
                        "method": chk["method"], "results": sub, "pass": ok})
    _write_json(args.out, {"records": records, "pass": all_pass})
    if enforce and not all_pass:
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcfdr")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    methods = ["fisher", "stouffer", "simes", "bonferroni", "hommel", "simes_storey"]

    pc = sub.add_parser("combine", help="combine p-values row by row")
    pc.add_argument("input")
    pc.add_argument("--method", required=True, choices=methods)
    pc.add_argument("--lambda", dest="lam", type=float, default=None)
    pc.add_argument("--u", type=int, default=None)
    pc.add_argument("--out", default=None)
    pc.set_defaults(func=cmd_combine)

    pt = sub.add_parser("pc-test", help="step-up testing of partial conjunction family")
    pt.add_argument("input")
    pt.add_argument("--alpha", type=float, required=True)
    pt.add_argument("--method", required=True, choices=methods)
    pt.add_argument("--lambda", dest="lam", type=float, default=None)
    pt.add_argument("--groups", required=True)
    pt.add_argument("--u", type=int, default=None)
    pt.add_argument("--u-proportion", type=float, default=None)
    pt.add_argument("--shape", default="identity")
    pt.add_argument("--weights", default=None)
    pt.add_argument("--out", default=None)
    pt.set_defaults(func=cmd_pc_test)

    rp = sub.add_parser("replicate", help="two-step replicability analysis")
    rp.add_argument("input")
    rp.add_argument("--q", type=float, required=True)
    rp.add_argument("--rule", default="step-up")
    rp.add_argument("--method", required=True, choices=methods)
    rp.add_argument("--lambda", dest="lam", type=float, default=None)
    rp.add_argument("--shape", default="identity")
    rp.add_argument("--weights", default=None)
    rp.add_argument("--out", default=None)
    rp.set_defaults(func=cmd_replicate)

    for name, enforce in (("simulate", False), ("verify", True)):
        sm = sub.add_parser(name, help="Monte Carlo scenario run")
        sm.add_argument("--scenario", required=True)
        sm.add_argument("--reps", type=int, default=None)
        sm.add_argument("--seed", type=int, default=None)
        sm.add_argument("--out", default=None)
        sm.set_defaults(func=lambda a, e=enforce: _run_scenario_file(a, e))
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
