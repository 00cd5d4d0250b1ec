"""Command-line front end: run benchmarks, regenerate tables, self-verify.

Exit codes: 0 success, 2 invalid configuration (every violation reported at
once), 3 numerical failure (singular system), with the condition estimate
printed when available.  Output is deterministic and locale-independent;
``BKM_PRECISION`` overrides the number of decimals in table output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import cases as cases_mod
from .gensol import (Biharmonic2D, Biharmonic3D, ConvectionDiffusion2D,
                     Helmholtz2D, Helmholtz3D, ModifiedHelmholtz2D,
                     ModifiedHelmholtz3D, TransientDiffusion2D, TransientWave2D,
                     pde_residual)
from .kernels import linear_pair, mq_pair, tps_pair
from .linalg import SingularMatrixError

_RBF_CHOICES = ("mq", "tps", "linear")
_OUTPUT_CHOICES = ("table", "csv", "json")

_TABLE_CASES = {1: "helmholtz", 2: "laplace", 3: "convdiff_x", 4: "convdiff_xy",
                5: "nonlinear_poisson", 6: "burger"}
#: table index -> (boundary_n, interior_l) used for the published column
_TABLE_RUNS = {1: (11, 0), 2: (5, 0), 3: (7, 11), 4: (7, 11), 5: (5, 0), 6: (5, 0)}


def _precision(default=3):
    raw = os.environ.get("BKM_PRECISION")
    if raw is None:
        return default
    try:
        value = int(raw)
        if value < 0:
            raise ValueError
        return value
    except ValueError:
        print(f"warning: ignoring invalid BKM_PRECISION={raw!r}", file=sys.stderr)
        return default


def _parse_config_file(path: Path):
    """Flat key = value lines; '#' starts a comment."""
    options = {}
    errors = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        options[key.replace("-", "_")] = value
    return options, errors


def _load_eval_points(path: str):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip().lower() for c in rows[0][:2]] != ["x", "y"]:
        raise ValueError(f"{path}: evaluation-point CSV needs an 'x,y' header")
    pts = [(float(r[0]), float(r[1])) for r in rows[1:] if r]
    if not pts:
        raise ValueError(f"{path}: no evaluation points found")
    return np.array(pts)


def _validate_run(args) -> tuple:
    """Collect every violation before reporting; returns (settings, errors)."""
    errors = []
    settings = {
        "case": args.target,
        "boundary_knots": args.boundary_knots,
        "interior_knots": args.interior_knots,
        "rbf": args.rbf,
        "shape": args.shape,
        "output": args.output,
        "eval_points": args.eval_points,
    }

    target_path = Path(args.target)
    if args.target not in cases_mod.case_names() and target_path.is_file():
        settings["case"] = None
        file_opts, file_errors = _parse_config_file(target_path)
        errors.extend(file_errors)
        unknown = set(file_opts) - set(settings)
        for key in sorted(unknown):
            errors.append(f"config file: unknown key {key!r}")
        for key in set(file_opts) & set(settings):
            # command-line flags win over the file
            if settings[key] is None:
                settings[key] = file_opts[key]
        if settings["case"] is None:
            errors.append(f"config file {args.target}: missing 'case' entry")
            return settings, errors

    if settings["case"] not in cases_mod.case_names():
        errors.append(f"unknown case or config file {settings['case']!r}; "
                      f"valid cases: {', '.join(cases_mod.case_names())}")
        return settings, errors

    case = cases_mod.builtin(settings["case"])
    settings["_case_obj"] = case

    for key, low in (("boundary_knots", 1), ("interior_knots", 0)):
        if settings[key] is not None:
            try:
                settings[key] = int(settings[key])
                if settings[key] < low:
                    errors.append(f"--{key.replace('_', '-')} must be >= {low}, "
                                  f"got {settings[key]}")
            except (TypeError, ValueError):
                errors.append(f"--{key.replace('_', '-')} must be an integer, "
                              f"got {settings[key]!r}")
                settings[key] = None

    if settings["shape"] is not None:
        try:
            settings["shape"] = float(settings["shape"])
            if not settings["shape"] > 0:
                errors.append(f"--shape must be positive, got {settings['shape']}")
        except (TypeError, ValueError):
            errors.append(f"--shape must be a number, got {settings['shape']!r}")
            settings["shape"] = None

    if settings["rbf"] is not None and settings["rbf"] not in _RBF_CHOICES:
        errors.append(f"--rbf must be one of {', '.join(_RBF_CHOICES)}, "
                      f"got {settings['rbf']!r}")
    if settings["output"] is None:
        settings["output"] = "table"
    elif settings["output"] not in _OUTPUT_CHOICES:
        errors.append(f"--output must be one of {', '.join(_OUTPUT_CHOICES)}, "
                      f"got {settings['output']!r}")

    if case.problem.is_nonlinear and settings["interior_knots"] not in (None, 0):
        errors.append(f"case {case.name!r} is nonlinear and boundary-only: "
                      "interior knots are not allowed (drop --interior-knots)")
    if settings["rbf"] in ("mq", None) and settings["shape"] is not None \
            and case.problem.rbf_pair is None:
        errors.append(f"case {case.name!r} has no radial interpolation stage; "
                      "--shape has no effect there")

    if settings["eval_points"] is not None:
        try:
            settings["eval_points"] = _load_eval_points(settings["eval_points"])
        except (OSError, ValueError) as exc:
            errors.append(str(exc))
            settings["eval_points"] = None

    return settings, errors


def _format_cell(value, decimals):
    if value is None:
        return "-"
    return f"{value:.{decimals}f}"


def _print_report_table(report, decimals, paper_columns=None, show_rel=False):
    header = ["x", "y", "Exact", "BKM"]
    paper_columns = paper_columns or {}
    header += [f"{name} [paper]" for name in paper_columns]
    if show_rel:
        header.append("rel err %")
    widths = [max(10, len(h) + 2) for h in header]
    print("".join(h.rjust(w) for h, w in zip(header, widths)))
    for i, row in enumerate(report.rows):
        cells = [f"{row['x']:.2f}", f"{row['y']:.2f}",
                 _format_cell(row["exact"], decimals),
                 _format_cell(row["computed"], decimals)]
        for name, column in paper_columns.items():
            cells.append(_format_cell(column[i] if i < len(column) else None, decimals))
        if show_rel:
            cells.append(_format_cell(row["rel_err_pct"], 2))
        print("".join(c.rjust(w) for c, w in zip(cells, widths)))
    avg = report.summary["avg_abs_rel_err_pct"]
    if avg is not None:
        print(f"avg |rel err| = {avg:.2f}%")
    cond_drm = report.summary["condition_estimate_drm"]
    cond_bkm = report.summary["condition_estimate_bkm"]
    drm_text = f"{cond_drm:.2e}" if cond_drm is not None else "n/a"
    print(f"condition estimates: interpolation {drm_text}, collocation {cond_bkm:.2e}")


def _emit_csv(report, stream):
    w = csv.writer(stream)
    w.writerow(["x", "y", "exact", "computed", "rel_err_pct"])
    for row in report.rows:
        rel = "" if row["rel_err_pct"] is None else repr(row["rel_err_pct"])
        w.writerow([repr(row["x"]), repr(row["y"]), repr(row["exact"]),
                    repr(row["computed"]), rel])


def _emit_json(report, stream):
    payload = {
        "rows": report.rows,
        "summary": {
            "avg_abs_rel_err_pct": report.summary["avg_abs_rel_err_pct"],
            "condition_estimate_drm": report.summary["condition_estimate_drm"],
            "condition_estimate_bkm": report.summary["condition_estimate_bkm"],
        },
    }
    json.dump(payload, stream, indent=2, allow_nan=False)
    stream.write("\n")


def cmd_run(args) -> int:
    settings, errors = _validate_run(args)
    if errors:
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        return 2
    case = settings["_case_obj"]
    try:
        report = cases_mod.run_case(
            case,
            boundary_n=settings["boundary_knots"],
            interior_l=settings["interior_knots"],
            rbf=settings["rbf"],
            shape=settings["shape"],
            eval_points=settings["eval_points"],
        )
    except SingularMatrixError as exc:
        print(f"numerical failure: {exc} (condition estimate: inf)", file=sys.stderr)
        return 3
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    if settings["output"] == "csv":
        _emit_csv(report, sys.stdout)
    elif settings["output"] == "json":
        _emit_json(report, sys.stdout)
    else:
        print(f"case {case.name}: {case.description}")
        print(f"boundary knots {report.summary['n_boundary']}, "
              f"interior knots {report.summary['n_interior']}")
        _print_report_table(report, _precision(),
                            show_rel=case.problem.is_nonlinear)
    return 0


def cmd_table(args) -> int:
    index = args.index
    if index not in _TABLE_CASES:
        print(f"error: table index must be 1..6, got {index}", file=sys.stderr)
        return 2
    case = cases_mod.builtin(_TABLE_CASES[index])
    n, l = _TABLE_RUNS[index]
    try:
        report = cases_mod.run_case(case, boundary_n=n, interior_l=l)
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(f"table {index}: {case.description}")
    print(f"boundary knots {n}, interior knots {l}")
    _print_report_table(report, _precision(), paper_columns=case.paper_columns,
                        show_rel=index in (5, 6))
    return 0


def cmd_verify(args) -> int:
    failures = []
    rng = np.random.default_rng(20240915)

    print("kernel pair identities: phi == phi_p'' + phi_p'/r + phi_p "
          "(central differences)")
    for label, pair in (("cubic", linear_pair()), ("mq c=2", mq_pair(2.0)),
                        ("tps", tps_pair())):
        r = rng.uniform(0.05, 10.0, size=200)
        # eps^(1/4)-scaled step keeps the second difference above its
        # roundoff floor
        h = 1e-4 * np.maximum(r, 1.0)
        d2 = (pair.particular(r + h) - 2 * pair.particular(r)
              + pair.particular(r - h)) / h ** 2
        d1 = (pair.particular(r + h) - pair.particular(r - h)) / (2 * h)
        lhs = d2 + d1 / r + pair.particular(r)
        resid = float(np.max(np.abs(lhs - pair.rbf(r)) / (1.0 + np.abs(pair.rbf(r)))))
        status = "ok" if resid <= 1e-6 else "FAIL"
        if resid > 1e-6:
            failures.append(f"pair identity {label}")
        print(f"  {label:8s} residual {resid:.2e}  [{status}]")

    print("catalog kernels: finite-difference residual of the governing equation")
    t = np.linspace(0.3, 2.0, 8)
    pts2 = np.column_stack([rng.uniform(0.3, 2.5, 50), rng.uniform(0.3, 2.5, 50)])
    pts3 = np.column_stack([rng.uniform(0.3, 2.0, 30), rng.uniform(0.3, 2.0, 30),
                            rng.uniform(0.3, 2.0, 30)])
    checks = [
        ("Helmholtz2D(1)", Helmholtz2D(1.0), pts2, None, 1e-5, True),
        ("Helmholtz2D(2)", Helmholtz2D(2.0), pts2, None, 1e-5, True),
        ("ModifiedHelmholtz2D(2)", ModifiedHelmholtz2D(2.0), pts2, None, 1e-5, True),
        ("Helmholtz3D(1.5)", Helmholtz3D(1.5), pts3, None, 1e-5, True),
        ("ModifiedHelmholtz3D(1.5)", ModifiedHelmholtz3D(1.5), pts3, None, 1e-5, True),
        ("Biharmonic2D(1.3)", Biharmonic2D(1.3, 1.0, 0.5), pts2, None, 1e-5, True),
        ("Biharmonic3D(1.2)", Biharmonic3D(1.2, 1.0, 0.5), pts3, None, 1e-5, True),
        ("ConvectionDiffusion2D(v=0)", ConvectionDiffusion2D(1.0, (0.0, 0.0), 1.0),
         pts2, None, 1e-5, True),
        ("ConvectionDiffusion2D(v=(1,.5))",
         ConvectionDiffusion2D(1.5, (1.0, 0.5), 2.0), pts2, None, 1e-5, True),
        ("TransientDiffusion2D(0.7)", TransientDiffusion2D(0.7), pts2, t, 1e-5, True),
        ("TransientWave2D(3)", TransientWave2D(3.0, 1.0, 0.5), pts2, t, 1e-5, True),
    ]
    for label, kernel, pts, times, tol, mandatory in checks:
        resid = pde_residual(kernel, pts, times)
        status = "ok" if resid <= tol else "FAIL"
        if resid > tol and mandatory:
            failures.append(label)
        print(f"  {label:34s} residual {resid:.2e}  [{status}]")

    print("advection kernel convention: separation vector x - x_k with drift "
          "exp(-v.(x - x_k)/2D); the printed closed form solves the advection "
          "equation with reaction k + |v|^2/(2D) (equal to k when v = 0).")

    if failures:
        print(f"verification FAILED: {', '.join(failures)}")
        return 1
    print("all verification checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bkm",
        description="Boundary-knot collocation solver and its benchmark suite.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve a benchmark case (or a config file)")
    run.add_argument("target", help="case name or path to a key = value config file")
    run.add_argument("--boundary-knots", type=str, default=None,
                     help="number of boundary knots")
    run.add_argument("--interior-knots", type=str, default=None,
                     help="number of interior knots (linear cases only)")
    run.add_argument("--rbf", type=str, default=None,
                     help="radial family: mq, tps or linear")
    run.add_argument("--shape", type=str, default=None,
                     help="multiquadric shape parameter")
    run.add_argument("--output", type=str, default=None,
                     help="output format: table, csv or json")
    run.add_argument("--eval-points", type=str, default=None,
                     help="CSV file (header x,y) of custom evaluation points")
    run.set_defaults(func=cmd_run)

    table = sub.add_parser("table", help="regenerate one of the six benchmark tables")
    table.add_argument("index", type=int, help="table index, 1..6")
    table.set_defaults(func=cmd_table)

    verify = sub.add_parser("verify", help="self-check kernels and pair identities")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
