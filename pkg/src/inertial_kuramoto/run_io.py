"""Run artifacts: the time-series CSV and the key-nested metadata documents.

CSV schema (header fixed): t, theta_1..theta_n, omega_1..omega_n, D_theta,
D_omega, Q, P, A, B, E1, E2. Floats are serialized with 17 significant
digits, which round-trips float64 losslessly, so certification from a CSV
reproduces in-process certification bit for bit.

Metadata is a single JSON document per run embedding the fully resolved
configuration (every "auto" expanded), sufficient to reproduce the run.
"""

from __future__ import annotations

import json
import numpy as np

from .analysis import DiagnosticsSeries
from .digraph import Digraph
from .energy import TheoryConfig
from .integrator import IntegratorConfig, Trajectory
from .model import ModelParams, State

__all__ = [
    "csv_header",
    "write_run_csv",
    "read_run_csv",
    "write_meta",
    "read_meta",
    "config_section",
    "params_from_meta",
    "trajectory_from_csv",
]

DIAGNOSTIC_COLUMNS = ("D_theta", "D_omega", "Q", "P", "A", "B", "E1", "E2")


def csv_header(n: int) -> list[str]:
    return (
        ["t"]
        + [f"theta_{i + 1}" for i in range(n)]
        + [f"omega_{i + 1}" for i in range(n)]
        + list(DIAGNOSTIC_COLUMNS)
    )


def write_run_csv(path, traj: Trajectory, series: DiagnosticsSeries) -> None:
    """Write the recorded samples plus diagnostic series; lossless float64 text."""
    n = traj.params.n
    cols = series.columns()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(csv_header(n)) + "\n")
        for k in range(traj.n_samples):
            row = [traj.times[k], *traj.thetas[k], *traj.omegas[k]]
            row += [cols[name][k] for name in DIAGNOSTIC_COLUMNS]
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def read_run_csv(path) -> tuple[list[str], np.ndarray]:
    """Read any run CSV back as (column names, row-major float array)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty CSV")
        names = header.split(",")
        body = fh.read()
    if not body.strip():
        raise ValueError(f"{path}: CSV has a header but no data rows")
    data = np.loadtxt(body.splitlines(), delimiter=",", ndmin=2)
    if data.shape[1] != len(names):
        raise ValueError(f"{path}: {len(names)} columns in header, {data.shape[1]} in rows")
    return names, data


def write_meta(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


def read_meta(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def config_section(params: ModelParams, theory: TheoryConfig,
                   integ: IntegratorConfig, init: State) -> dict:
    """Fully resolved configuration block embedded in every metadata document."""
    return {
        "model": {
            "n": params.n,
            "m": params.m,
            "kappa": params.kappa,
            "alpha": params.alpha,
            "omega_nat": params.omega_nat.tolist(),
            "adjacency": params.graph.adjacency.flatten().tolist(),
        },
        "theory": {
            "gamma": theory.gamma,
            "d_inf": theory.d_inf,
            "epsilon": theory.epsilon,
            "c": theory.c,
        },
        "integrator": {
            "dt": integ.dt,
            "t_end": integ.t_end,
            "record_stride": int(integ.record_stride),
            "max_steps": int(integ.max_steps),
            "force_dt": bool(integ.force_dt),
        },
        "initial": {
            "t": init.t,
            "theta": init.theta.tolist(),
            "omega": init.omega.tolist(),
        },
    }


def params_from_meta(doc: dict) -> tuple[ModelParams, TheoryConfig, IntegratorConfig, State]:
    """Rebuild the resolved objects from a metadata document."""
    try:
        cfg = doc["config"]
        mdl = cfg["model"]
        graph = Digraph.from_flat(int(mdl["n"]), mdl["adjacency"])
        params = ModelParams(
            m=float(mdl["m"]), kappa=float(mdl["kappa"]), alpha=float(mdl["alpha"]),
            omega_nat=np.asarray(mdl["omega_nat"], dtype=np.float64), graph=graph,
        )
        th = cfg["theory"]
        theory = TheoryConfig(gamma=float(th["gamma"]), d_inf=float(th["d_inf"]),
                              epsilon=float(th["epsilon"]), c=int(th["c"]))
        ig = cfg["integrator"]
        integ = IntegratorConfig(dt=float(ig["dt"]), t_end=float(ig["t_end"]),
                                 record_stride=int(ig["record_stride"]),
                                 max_steps=int(ig["max_steps"]),
                                 force_dt=bool(ig.get("force_dt", False)))
        ini = cfg["initial"]
        init = State(t=float(ini.get("t", 0.0)),
                     theta=np.asarray(ini["theta"], dtype=np.float64),
                     omega=np.asarray(ini["omega"], dtype=np.float64))
    except KeyError as exc:
        raise ValueError(f"metadata document is missing field {exc}") from exc
    return params, theory, integ, init


def trajectory_from_csv(csv_path, meta_doc: dict) -> tuple[Trajectory, TheoryConfig]:
    """Reassemble a Trajectory from a run CSV plus its metadata document."""
    names, data = read_run_csv(csv_path)
    params, theory, integ, _ = params_from_meta(meta_doc)
    n = params.n
    expected = csv_header(n)
    if names != expected:
        raise ValueError(
            f"{csv_path}: header does not match the run schema for n = {n}"
        )
    times = data[:, 0]
    thetas = data[:, 1:1 + n]
    omegas = data[:, 1 + n:1 + 2 * n]
    traj = Trajectory(params=params, cfg=integ, times=times, thetas=thetas, omegas=omegas)
    return traj, theory
