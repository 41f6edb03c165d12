"""Command-line front end.

Commands: solve, sweep, oned, limit-check, conjecture.  Each takes
--config <path> and --out <dir>; solve additionally accepts --n to override
the exponent.  Exit codes: 0 success, 1 numeric failure, 2 invalid config.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analytic
from .config import ConfigError, ExperimentConfig, load_config
from .grids import IndicatorDatum
from .operators import LinearSolveError
from .reporting import svg_line_plot, write_csv, write_json
from .solver import (NonlinearSolveError, linfty_certificate,
                     quasilinear_residual, solve_singular, to_quasilinear)
from .sweeps import (InconclusiveCheckError, conjecture_experiment,
                     extract_atoms, measure_histogram, run_sweep)

NUMERIC_ERRORS = (NonlinearSolveError, LinearSolveError,
                  analytic.ConstructionError, InconclusiveCheckError)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(config: ExperimentConfig, out: Path, n_override=None) -> int:
    spec = config.spec
    if n_override is not None:
        spec = replace(spec, gamma=float(n_override))
    sol = solve_singular(spec, config.m_schedule)
    u = sol.u
    v = to_quasilinear(u, spec.gamma)

    if spec.grid.dim == 1:
        header = ["t", "u (singular solution)", "v = u^(g+1)/(g+1)"]
        coords = spec.grid.axes()[0]
        rows = [(coords[i], u.values[i], v.values[i]) for i in range(len(coords))]
    else:
        header = ["x", "y", "u (singular solution)", "v = u^(g+1)/(g+1)"]
        xm, ym = spec.grid.meshes()
        rows = [(xm.flat[i], ym.flat[i], u.values.flat[i], v.values.flat[i])
                for i in range(u.values.size)]
    if "csv" in config.formats:
        write_csv(out / "solution.csv", header, rows)

    f = spec.datum_values()
    res = quasilinear_residual(v, spec.gamma, f, floor=config.residual_floor)
    summary = {
        "label": config.label,
        "tolerances": config.tolerances,
        "gamma": spec.gamma,
        "sup_norm_u": u.sup_norm(),
        "sup_norm_v": v.sup_norm(),
        "total_mass": sol.diagnostics["total_mass"],
        "stabilized": sol.stabilized,
        "schedule_gap": sol.diagnostics["gap"],
        "quasilinear_residual": res.masked_sup,
        "linfty_certificate": (linfty_certificate(u, spec.gamma, f)
                               if np.max(f) > 0 else None),
        "regularization_steps": [
            {"m": it.m, "iterations": it.iterations, "residual": it.residual}
            for it in sol.trace],
    }
    if "json" in config.formats:
        write_json(out / "summary.json", summary)
    if "svg" in config.formats:
        if spec.grid.dim == 1:
            t = list(spec.grid.axes()[0])
            series = {"u": (t, list(u.values)), "v": (t, list(v.values))}
            xlabel = "t"
        else:
            mid = spec.grid.shape[1] // 2      # centerline y = const
            x = list(spec.grid.axes()[0])
            series = {"u centerline": (x, list(u.values[:, mid])),
                      "v centerline": (x, list(v.values[:, mid]))}
            xlabel = "x"
        svg_line_plot(out / "profile.svg", series,
                      title=f"{config.label}: gamma = {spec.gamma:g}",
                      xlabel=xlabel, ylabel="value")
    return 0


def cmd_sweep(config: ExperimentConfig, out: Path) -> int:
    if not config.n_list:
        raise ConfigError("sweep requires a non-empty sweep.n_list")
    report = run_sweep(config.spec, config.n_list, config.compacta,
                       shell_distances=config.shell_distances,
                       m_schedule=config.m_schedule,
                       residual_floor=config.residual_floor)
    k = len(config.compacta)
    header = (["n (exponent)", "sup_norm_u", "total_mass (integral f/u^n)"]
              + [f"min_u_compactum_{i}" for i in range(k)]
              + [f"local_mass_compactum_{i}" for i in range(k)]
              + [f"fitted_depth_compactum_{i}" for i in range(k)]
              + ["quasilinear_residual", "linfty_certificate", "v_sup",
                 "v_h1_seminorm", "error"])
    rows = []
    for r in report.rows:
        rows.append([r.n, r.sup_norm, r.total_mass]
                    + list(r.compacta_min) + [float("nan")] * (k - len(r.compacta_min))
                    + list(r.local_masses) + [float("nan")] * (k - len(r.local_masses))
                    + list(r.fitted_depth) + [float("nan")] * (k - len(r.fitted_depth))
                    + [r.quasilinear_residual, r.certificate, r.v_sup,
                       r.v_h1_seminorm, r.error or ""])
    if "csv" in config.formats:
        write_csv(out / "sweep.csv", header, rows)
    summary = {
        "label": config.label,
        "tolerances": config.tolerances,
        "n_list": list(report.n_list),
        "failed_rows": [r.n for r in report.rows if r.failed],
        "total_masses": {str(r.n): r.total_mass for r in report.rows},
        "histogram_total": report.histogram.total if report.histogram else None,
        "shell_fractions": (report.histogram.shell_fractions
                            if report.histogram else None),
        "limit_equation_gap": report.limit_check,
    }
    if "json" in config.formats:
        write_json(out / "summary.json", summary)
    if "svg" in config.formats:
        ok = [r for r in report.rows if not r.failed]
        ns = [r.n for r in ok]
        svg_line_plot(out / "sweep.svg",
                      {"total mass": (ns, [r.total_mass for r in ok]),
                       "sup |u|": (ns, [r.sup_norm for r in ok])},
                      title=f"{config.label}: exponent sweep",
                      xlabel="n", ylabel="value")
    return 0 if any(not r.failed for r in report.rows) else 1


def cmd_oned(config: ExperimentConfig, out: Path) -> int:
    if not config.n_list:
        raise ConfigError("oned requires a non-empty sweep.n_list")
    geometry = config.oned_geometry
    radius = config.oned_radius
    rows = []
    sample_ts = [i / 8.0 for i in range(17)] if geometry == "matched" \
        else [radius * i / 8.0 for i in range(9)]
    profiles = {}
    for n in config.n_list:
        if geometry == "matched":
            prof = analytic.OneDProfile.for_matched(n)
        else:
            prof = analytic.OneDProfile.for_interval(radius, n)
        c_lo = analytic.lower_matching_bound(n)
        rows.append([n, prof.c, c_lo, analytic.upper_matching_bound(n),
                     prof.t_zero, prof.amplitude])
        evaluator = prof.y if geometry == "matched" else prof.w
        ts = [min(t, prof.t_zero) for t in sample_ts] if geometry != "matched" \
            else sample_ts
        profiles[f"n={n:g}"] = (ts, [float(evaluator(t)) for t in ts])
    header = ["n (exponent)", "c (profile strength)", "c_lower_bound",
              "c_upper_bound", "T (first zero)", "alpha (amplitude)"]
    if "csv" in config.formats:
        write_csv(out / "oned.csv", header, rows)
        prof_header = ["t"] + [k for k in profiles]
        ts0 = profiles[next(iter(profiles))][0]
        prof_rows = [[ts0[i]] + [profiles[k][1][i] for k in profiles]
                     for i in range(len(ts0))]
        write_csv(out / "profiles.csv", prof_header, prof_rows)
    if "json" in config.formats:
        write_json(out / "summary.json", {
            "label": config.label, "geometry": geometry,
            "rows": [dict(zip(["n", "c_n", "c_lower", "c_upper", "T_n", "alpha_n"],
                              r)) for r in rows]})
    if "svg" in config.formats:
        svg_line_plot(out / "profiles.svg", profiles,
                      title=f"{config.label}: shooting profiles ({geometry})",
                      xlabel="t", ylabel="profile")
    return 0


def cmd_limit_check(config: ExperimentConfig, out: Path) -> int:
    spec = config.spec
    if not isinstance(spec.datum, IndicatorDatum):
        raise ConfigError("limit-check requires an indicator datum")
    if not config.n_list:
        raise ConfigError("limit-check requires sweep.n_list (largest n is used)")
    n = config.n_list[-1]
    spec_n = replace(spec, gamma=float(n))
    sol = solve_singular(spec_n, config.m_schedule)
    hist = measure_histogram(sol.u, spec, n, config.shell_distances)
    atoms = extract_atoms(hist)
    from .operators import assemble, solve_measure
    op = assemble(spec.grid, spec.coefficients)
    reconstructed = solve_measure(op, atoms)
    gap = float(np.max(np.abs(reconstructed.values - sol.u.values)))
    payload = {
        "label": config.label,
        "n": n,
        "atoms": [{"location": list(loc), "mass": mass}
                  for loc, mass in atoms.atoms],
        "total_mass": hist.total,
        "shell_fractions": hist.shell_fractions,
        "reconstruction_gap": gap,
    }
    write_json(out / "limit_check.json", payload)
    return 0


def cmd_conjecture(config: ExperimentConfig, out: Path) -> int:
    if not config.n_list:
        raise ConfigError("conjecture requires sweep.n_list (largest n is used)")
    report = conjecture_experiment(config.spec, config.n_list[-1],
                                   m_schedule=config.m_schedule)
    write_json(out / "conjecture.json", {
        "label": config.label,
        "n": report.n,
        "harmonic_gap": report.harmonic_gap,
        "outer_v_sup": report.outer_v_sup,
        "inner_boundary_value": report.inner_boundary_value,
        "nodes_compared": report.nodes_compared,
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="singell",
        description="Singular elliptic solves, exponent sweeps and limit checks")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "sweep", "oned", "limit-check", "conjecture"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment JSON")
        p.add_argument("--out", required=True, help="output directory")
        if name == "solve":
            p.add_argument("--n", type=float, default=None,
                           help="override the exponent gamma")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = _out_dir(args)
    try:
        if args.command == "solve":
            return cmd_solve(config, out, args.n)
        if args.command == "sweep":
            return cmd_sweep(config, out)
        if args.command == "oned":
            return cmd_oned(config, out)
        if args.command == "limit-check":
            return cmd_limit_check(config, out)
        if args.command == "conjecture":
            return cmd_conjecture(config, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
