"""Command-line interface: check, simulate, certify, sweep, plot.

Exit codes are a total function of outcomes:
    0  success
    1  input error (malformed config, bad paths, unknown columns, bad grid)
    2  condition or certification failure (including infeasible auto-c)
    3  divergence (partial CSV retained)
    4  resolution insufficiency (trajectory too coarse to certify)

Configuration is a JSON document; adjacency is given row-major as n*n 0/1
integers. Random initial data (seed + ranges) uses numpy's default_rng
(PCG64); the drawn vectors and the seed are recorded in the run metadata,
so seeded runs are exactly reproducible.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, energy, run_io
from .digraph import Digraph, is_strongly_connected
from .energy import TheoryConfig
from .errors import DivergenceError, InfeasibleError, ResolutionError
from .integrator import IntegratorConfig, Trajectory, simulate
from .model import ModelParams, State

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONDITION = 2
EXIT_DIVERGENCE = 3
EXIT_RESOLUTION = 4

AUTO_SAMPLE_TARGET = 15000


@dataclass(frozen=True)
class ResolvedRun:
    """A config with every 'auto' expanded, ready to execute."""

    params: ModelParams
    theory: TheoryConfig
    integ: IntegratorConfig
    init: State
    description: str | None
    seed: int | None
    resolved_auto: dict


def load_config(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ValueError(f"config file not found: {path}")
    try:
        with open(p, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: top level must be an object")
    return doc


def _get(section: dict, key: str, where: str):
    if key not in section:
        raise ValueError(f"config field '{where}.{key}' is missing")
    return section[key]


def _section(doc: dict, name: str) -> dict:
    sec = _get(doc, name, "config")
    if not isinstance(sec, dict):
        raise ValueError(f"config field '{name}' must be an object")
    return sec


def _resolve_initial(doc: dict, n: int) -> tuple[np.ndarray, np.ndarray, int | None]:
    sec = _section(doc, "initial")
    explicit = "theta" in sec or "omega" in sec
    seeded = "seed" in sec
    if explicit == seeded:
        raise ValueError(
            "config field 'initial' must provide exactly one of "
            "explicit vectors {theta, omega} or {seed, theta_range, omega_range}"
        )
    if explicit:
        theta0 = np.asarray(_get(sec, "theta", "initial"), dtype=np.float64)
        omega0 = np.asarray(_get(sec, "omega", "initial"), dtype=np.float64)
        if theta0.shape != (n,) or omega0.shape != (n,):
            raise ValueError(f"initial vectors must have length n = {n}")
        return theta0, omega0, None
    seed = int(_get(sec, "seed", "initial"))
    t_lo, t_hi = _get(sec, "theta_range", "initial")
    w_lo, w_hi = _get(sec, "omega_range", "initial")
    rng = np.random.default_rng(seed)
    theta0 = rng.uniform(t_lo, t_hi, n)
    omega0 = rng.uniform(w_lo, w_hi, n)
    return theta0, omega0, seed


def resolve_config(doc: dict) -> ResolvedRun:
    """Validate a parsed config and expand auto values (c, dt, record_stride)."""
    mdl = _section(doc, "model")
    omega_nat = np.asarray(_get(mdl, "omega_nat", "model"), dtype=np.float64)
    n = int(mdl.get("n", omega_nat.shape[0]))
    if omega_nat.shape != (n,):
        raise ValueError(f"model.omega_nat must have length n = {n}")
    graph = Digraph.from_flat(n, _get(mdl, "adjacency", "model"))
    params = ModelParams(
        m=float(_get(mdl, "m", "model")),
        kappa=float(_get(mdl, "kappa", "model")),
        alpha=float(_get(mdl, "alpha", "model")),
        omega_nat=omega_nat,
        graph=graph,
    )

    theta0, omega0, seed = _resolve_initial(doc, n)
    init = State(t=0.0, theta=theta0, omega=omega0)

    th = _section(doc, "theory")
    gamma = float(_get(th, "gamma", "theory"))
    d_inf = float(_get(th, "d_inf", "theory"))
    epsilon = float(_get(th, "epsilon", "theory"))
    c_field = _get(th, "c", "theory")
    resolved_auto: dict = {}
    if c_field == "auto":
        c = energy.auto_select_c(params, gamma, d_inf, epsilon,
                                 energy.diameter(init.theta))
        resolved_auto["c"] = c
    else:
        c = int(c_field)
    theory = TheoryConfig(gamma=gamma, d_inf=d_inf, epsilon=epsilon, c=c)

    ig = _section(doc, "integrator")
    t_end = float(_get(ig, "t_end", "integrator"))
    dt_field = _get(ig, "dt", "integrator")
    if dt_field == "auto":
        dt = params.m / 4.0
        resolved_auto["dt"] = dt
    else:
        dt = float(dt_field)
    stride_field = ig.get("record_stride", "auto")
    if stride_field == "auto":
        n_steps = max(1, int(math.ceil(t_end / dt))) if t_end > 0 else 1
        stride = max(1, int(math.ceil(n_steps / AUTO_SAMPLE_TARGET)))
        resolved_auto["record_stride"] = stride
    else:
        stride = int(stride_field)
    integ = IntegratorConfig(
        dt=dt, t_end=t_end, record_stride=stride,
        max_steps=int(ig.get("max_steps", 50_000_000)),
        force_dt=bool(ig.get("force_dt", False)),
    )

    return ResolvedRun(
        params=params, theory=theory, integ=integ, init=init,
        description=doc.get("description"), seed=seed, resolved_auto=resolved_auto,
    )


def _require_connected(run: ResolvedRun, allow: bool) -> None:
    if allow or is_strongly_connected(run.params.graph):
        return
    raise ValueError(
        "the interaction digraph is not strongly connected (required hypothesis); "
        "pass --allow-disconnected to run anyway"
    )


def _base_meta(run: ResolvedRun) -> dict:
    doc: dict = {}
    if run.description:
        doc["description"] = run.description
    doc["config"] = run_io.config_section(run.params, run.theory, run.integ, run.init)
    if run.seed is not None:
        doc["config"]["initial"]["seed"] = run.seed
        doc["config"]["initial"]["rng"] = "numpy default_rng (PCG64)"
    if run.resolved_auto:
        doc["resolved_auto"] = dict(run.resolved_auto)
    return doc


def _print_conditions(report) -> None:
    for name, cond in report.conditions().items():
        flag = "pass" if cond.passed else "FAIL"
        print(f"  {name:16s} {flag}  margin = {cond.margin:+.6g}")
    print(f"  eta = {report.eta:.6g}  M_N = {report.m_n:.6g}  "
          f"Lambda = {report.lambda_:.6g}  Lambda~ = {report.lambda_tilde:.6g}")


def cmd_check(args) -> int:
    run = resolve_config(load_config(args.config))
    _require_connected(run, args.allow_disconnected)
    report = energy.check_conditions(run.params, run.init, run.theory)
    doc = _base_meta(run)
    doc["condition_report"] = report.to_dict()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    run_io.write_meta(out / "conditions.meta", doc)
    print(f"conditions: {'all pass' if report.all_pass else 'FAIL'}")
    _print_conditions(report)
    print(f"report written to {out / 'conditions.meta'}")
    return EXIT_OK if report.all_pass else EXIT_CONDITION


def _run_results(traj: Trajectory, theory: TheoryConfig) -> tuple[dict, "analysis.DiagnosticsSeries"]:
    series = analysis.diagnostics(traj, theory)
    t_star = analysis.detect_t_star(series, theory)
    d_omega0 = float(series.d_omega[0])
    fitted = None
    if t_star is not None and traj.n_samples >= 3:
        try:
            fitted = analysis.fit_decay_rate(series.times, series.d_omega,
                                             (t_star, float(series.times[-1])))
        except ValueError:
            fitted = None
    results = {
        "n_samples": int(traj.n_samples),
        "t_star": t_star,
        "fitted_rate": fitted,
        "lambda": energy.lambda_rate(traj.params, theory),
        "lambda_tilde": energy.lambda_tilde_rate(traj.params, theory, d_omega0),
        "d_theta_end": float(series.d_theta[-1]),
        "d_omega_end": float(series.d_omega[-1]),
        "d_theta_max": float(series.d_theta.max()),
    }
    return results, series


def cmd_simulate(args) -> int:
    run = resolve_config(load_config(args.config))
    _require_connected(run, args.allow_disconnected)
    if args.force_dt:
        run = ResolvedRun(
            params=run.params, theory=run.theory,
            integ=IntegratorConfig(dt=run.integ.dt, t_end=run.integ.t_end,
                                   record_stride=run.integ.record_stride,
                                   max_steps=run.integ.max_steps, force_dt=True),
            init=run.init, description=run.description, seed=run.seed,
            resolved_auto=run.resolved_auto,
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = _base_meta(run)
    doc["condition_report"] = energy.check_conditions(
        run.params, run.init, run.theory).to_dict()

    status = EXIT_OK
    try:
        traj = simulate(run.params, run.init, run.integ)
        doc["status"] = "completed"
    except DivergenceError as exc:
        traj = exc.partial
        doc["status"] = "diverged"
        doc["divergence_time"] = exc.t
        status = EXIT_DIVERGENCE
        print(f"divergence: {exc}", file=sys.stderr)

    if traj is not None and traj.n_samples > 0:
        results, series = _run_results(traj, run.theory)
        doc["results"] = results
        run_io.write_run_csv(out / "run.csv", traj, series)
    run_io.write_meta(out / "run.meta", doc)
    if status == EXIT_OK:
        res = doc["results"]
        print(f"run complete: {res['n_samples']} samples, "
              f"D_theta(end) = {res['d_theta_end']:.6g}, "
              f"D_omega(end) = {res['d_omega_end']:.6g}, t_star = {res['t_star']}")
    print(f"artifacts written to {out}")
    return status


def cmd_certify(args) -> int:
    target = Path(args.target)
    if target.suffix == ".csv":
        meta_path = Path(args.meta) if args.meta else target.with_name("run.meta")
        if not meta_path.exists():
            raise ValueError(
                f"metadata document {meta_path} not found next to {target}; pass --meta"
            )
        traj, theory = run_io.trajectory_from_csv(target, run_io.read_meta(meta_path))
        base: dict = {"source_csv": str(target)}
    else:
        run = resolve_config(load_config(target))
        _require_connected(run, args.allow_disconnected)
        traj = simulate(run.params, run.init, run.integ)
        theory = run.theory
        base = _base_meta(run)

    report = analysis.certify_inequalities(traj, theory, tol=args.tol)
    base["certificate"] = report.to_dict()
    base["threshold"] = args.threshold
    base["passed"] = report.passed(args.threshold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    run_io.write_meta(out / "certificate.meta", base)

    print(f"admissible samples: {report.admissible_fraction:.2%}  "
          f"t_star = {report.t_star}  fitted rate = {report.fitted_rate}")
    for name, stat in report.stats.items():
        if stat.skipped_reason is not None:
            print(f"  {name:16s} skipped ({stat.skipped_reason})")
        else:
            print(f"  {name:16s} {stat.fraction:8.4%}  worst residual {stat.worst_residual:+.3e}")
    for note in report.notices:
        print(f"  note: {note}")
    print(f"certificate written to {out / 'certificate.meta'}")
    return EXIT_OK if base["passed"] else EXIT_CONDITION


def _parse_grid(text: str | None, fallback: float) -> list[float]:
    if text is None:
        return [fallback]
    vals = [float(x) for x in text.split(",") if x.strip() != ""]
    return vals


SWEEP_COLUMNS = (
    "kappa", "m", "alpha", "status", "conditions_pass", "c", "dt",
    "t_star", "d_omega_end", "sync", "fitted_rate", "lambda", "lambda_tilde",
)


def _sweep_point(doc: dict, kappa: float, m: float, alpha: float,
                 sync_tol: float) -> dict:
    """One isolated simulate-and-measure pipeline; never raises."""
    row = {k: "" for k in SWEEP_COLUMNS}
    row.update({"kappa": kappa, "m": m, "alpha": alpha})
    point = json.loads(json.dumps(doc))  # deep copy
    point["model"]["kappa"] = kappa
    point["model"]["m"] = m
    point["model"]["alpha"] = alpha
    try:
        try:
            run = resolve_config(point)
        except InfeasibleError:
            # Auto-c unsatisfiable here: fall back to the structural bound so
            # diagnostics stay computable; the condition report records the failure.
            theory_sec = point.setdefault("theory", {})
            gamma = float(theory_sec["gamma"])
            d_inf = float(theory_sec["d_inf"])
            bound = energy._structural_c_bound(
                int(point["model"].get("n", len(point["model"]["omega_nat"]))),
                gamma, d_inf, alpha)
            theory_sec["c"] = max(3, math.floor(bound) + 1)
            run = resolve_config(point)
        report = energy.check_conditions(run.params, run.init, run.theory)
        row["conditions_pass"] = report.all_pass
        row["c"] = run.theory.c
        row["dt"] = run.integ.dt
        row["lambda"] = report.lambda_
        row["lambda_tilde"] = report.lambda_tilde
        traj = simulate(run.params, run.init, run.integ)
        results, _ = _run_results(traj, run.theory)
        row["t_star"] = results["t_star"] if results["t_star"] is not None else ""
        row["d_omega_end"] = results["d_omega_end"]
        row["sync"] = results["d_omega_end"] < sync_tol
        row["fitted_rate"] = results["fitted_rate"] if results["fitted_rate"] is not None else ""
        row["status"] = "ok"
    except DivergenceError:
        row["status"] = "diverged"
        row["sync"] = False
        row["d_omega_end"] = ""
        row["t_star"] = ""
    except (ValueError, InfeasibleError) as exc:
        row["status"] = f"error: {exc}"
        row["sync"] = False
    return row


def cmd_sweep(args) -> int:
    doc = load_config(args.config)
    base = resolve_config(doc)  # validates the base config up front
    _require_connected(base, args.allow_disconnected)
    kappas = _parse_grid(args.kappa, base.params.kappa)
    ms = _parse_grid(args.m, base.params.m)
    alphas = _parse_grid(args.alpha, base.params.alpha)
    grid = [(k, m, a) for k in kappas for m in ms for a in alphas]
    if not grid:
        raise ValueError("sweep grid is empty")

    rows: list[dict | None] = [None] * len(grid)
    if args.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.workers) as pool:
            futures = {
                pool.submit(_sweep_point, doc, k, m, a, args.threshold): i
                for i, (k, m, a) in enumerate(grid)
            }
            for fut in concurrent.futures.as_completed(futures):
                rows[futures[fut]] = fut.result()
    else:
        for i, (k, m, a) in enumerate(grid):
            rows[i] = _sweep_point(doc, k, m, a, args.threshold)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = out / "sweep.csv"
    with open(table, "w", encoding="utf-8") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_sweep_cell(row[c]) for c in SWEEP_COLUMNS) + "\n")
    n_ok = sum(1 for r in rows if r["status"] == "ok")
    print(f"sweep: {len(rows)} points, {n_ok} completed; table written to {table}")
    return EXIT_OK


def _sweep_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    text = str(value)
    if "," in text or "\n" in text:
        text = '"' + text.replace('"', '""') + '"'
    return text


def _plot_window(data, window):
    if window is None:
        return data, ""
    t_a, t_b = window
    t = data[:, 0]
    mask = (t >= t_a) & (t <= t_b)
    if not mask.any():
        raise ValueError(f"no samples inside the window [{t_a:g}, {t_b:g}]")
    return data[mask], f"_w{t_a:g}-{t_b:g}"


def cmd_plot(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names, data = run_io.read_run_csv(args.csv)
    col = {name: i for i, name in enumerate(names)}
    data, suffix = _plot_window(data, args.window)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t = data[:, 0]
    written = []

    def save(fig, stem):
        path = out / f"{stem}{suffix}.svg"
        fig.savefig(path, format="svg")
        plt.close(fig)
        written.append(path)

    if args.columns:
        wanted = [c.strip() for c in args.columns.split(",") if c.strip()]
        missing = [c for c in wanted if c not in col]
        if missing:
            raise ValueError(f"unknown column(s): {', '.join(missing)}; "
                             f"available: {', '.join(names)}")
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for c in wanted:
            ax.plot(t, data[:, col[c]], label=c, lw=1.0)
        ax.set_xlabel("t")
        ax.legend()
        if args.logy:
            ax.set_yscale("log")
        fig.tight_layout()
        save(fig, "columns")
    else:
        theta_cols = [c for c in names if c.startswith("theta_")]
        omega_cols = [c for c in names if c.startswith("omega_")]
        panels = [
            ("phases", theta_cols, False, "phase"),
            ("frequencies", omega_cols, False, "frequency"),
            ("diameters", ["D_theta", "D_omega"], True, "diameter"),
            ("energies", ["E1", "E2"], True, "energy"),
        ]
        for stem, cols, logy, ylabel in panels:
            fig, ax = plt.subplots(figsize=(7, 4.5))
            for c in cols:
                ax.plot(t, data[:, col[c]], label=c, lw=1.0)
            ax.set_xlabel("t")
            ax.set_ylabel(ylabel)
            if logy:
                positive = [data[:, col[c]] for c in cols]
                if all((v <= 0).all() for v in positive):
                    logy = False  # nothing positive to show on a log axis
            if logy:
                ax.set_yscale("log")
            ax.legend()
            fig.tight_layout()
            save(fig, stem)
    print("wrote " + ", ".join(str(p) for p in written))
    return EXIT_OK


def _window_arg(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except Exception as exc:
        raise argparse.ArgumentTypeError("window must be 't_a,t_b'") from exc
    if not a < b:
        raise argparse.ArgumentTypeError("window must satisfy t_a < t_b")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inertial-kuramoto",
        description="Simulate second-order coupled oscillators with inertia and "
                    "frustration on digraphs, check synchronization conditions, and "
                    "certify the decay inequalities numerically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="evaluate the sufficient-condition set")
    pc.add_argument("config")
    pc.add_argument("--out", default=".", help="output directory (default: .)")
    pc.add_argument("--allow-disconnected", action="store_true")
    pc.set_defaults(func=cmd_check)

    ps = sub.add_parser("simulate", help="run the integrator and write run.csv/run.meta")
    ps.add_argument("config")
    ps.add_argument("--out", default=".", help="output directory (default: .)")
    ps.add_argument("--allow-disconnected", action="store_true")
    ps.add_argument("--force-dt", action="store_true",
                    help="override the dt <= m/4 stiffness guard")
    ps.set_defaults(func=cmd_simulate)

    pf = sub.add_parser("certify", help="check the decay inequalities on a run")
    pf.add_argument("target", help="config JSON, or a run.csv produced by simulate")
    pf.add_argument("--meta", default=None, help="metadata path when target is a CSV")
    pf.add_argument("--out", default=".", help="output directory (default: .)")
    pf.add_argument("--tol", type=float, default=1e-6,
                    help="relative satisfaction tolerance (default 1e-6)")
    pf.add_argument("--threshold", type=float, default=0.99,
                    help="required satisfaction fraction per inequality (default 0.99)")
    pf.add_argument("--allow-disconnected", action="store_true")
    pf.set_defaults(func=cmd_certify)

    pw = sub.add_parser("sweep", help="grid sweep over kappa x m x alpha")
    pw.add_argument("config")
    pw.add_argument("--kappa", default=None, help="comma-separated kappa values")
    pw.add_argument("--m", default=None, help="comma-separated inertia values")
    pw.add_argument("--alpha", default=None, help="comma-separated frustration values")
    pw.add_argument("--threshold", type=float, default=1e-6,
                    help="sync criterion: D_omega(t_end) below this (default 1e-6)")
    pw.add_argument("--workers", type=int, default=1)
    pw.add_argument("--out", default=".", help="output directory (default: .)")
    pw.add_argument("--allow-disconnected", action="store_true")
    pw.set_defaults(func=cmd_sweep)

    pp = sub.add_parser("plot", help="render SVG panels from a run CSV")
    pp.add_argument("csv")
    pp.add_argument("--out", default=".", help="output directory (default: .)")
    pp.add_argument("--columns", default=None,
                    help="comma-separated columns for a single custom panel")
    pp.add_argument("--window", type=_window_arg, default=None,
                    help="restrict to a time window 't_a,t_b'")
    pp.add_argument("--logy", action="store_true", help="log y-axis for --columns")
    pp.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.hint:
            print(f"hint: {exc.hint}", file=sys.stderr)
        return EXIT_RESOLUTION
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
