"""Scenario orchestration: analysis, simulation, monitors and file outputs.

``run_scenario`` chains the derived constants, the equilibrium search, the
per-mode stability classification and the PDE integration with monitors,
then writes fields.csv, summary.csv, stability.csv, report.txt and the
figures.  ``sweep`` repeats the analysis stage (no PDE runs) across values
of one parameter.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import lyapunov
from .equilibria import EquilibriumReport, equilibrium_report
from .errors import ConfigError
from .model import DerivedQuantities, ModelParams, derived
from .scenarios import PARAM_KEYS, Scenario, format_config
from .solver import Grid1D, Trajectory, comparison_bounds, run
from .stability import StabilityReport, classify, neumann_spectrum

# decay verdicts skip the fast initial transient
DECAY_TRANSIENT_TIME = 1.0
DECAY_TOL = 1e-8


@dataclass
class RunReport:
    """Everything a scenario run produced, with output file paths."""

    scenario: Scenario
    dq: DerivedQuantities
    eq: EquilibriumReport
    stability: StabilityReport
    trajectory: Trajectory
    final_summary: dict[str, float]
    monitor_verdicts: dict[str, bool]
    outputs: dict[str, Path]


def _make_monitors(scenario: Scenario, p: ModelParams, dq: DerivedQuantities,
                   eq: EquilibriumReport, init) -> dict:
    """Monitor callables keyed by name; each returns a fixed set of columns."""
    monitors: dict = {}
    sigma_tol = 1e-9 * max(dq.Hm, dq.Vm)
    s0max = float(np.max(init.H + init.I))
    v0max = float(np.max(init.V))
    restriction = lyapunov.restriction_ok(p)
    l2_defined = restriction and eq.Estar is not None
    positive_floor = 1e-12 * max(dq.Hm, dq.Vm)
    coef_l1 = (1.0 - p.epsilon) * p.k / (p.alpha + p.rho)

    def positivity(t, y, grid):
        return {"pos_min": float(np.min(y))}

    def sigma(t, y, grid):
        ok = (
            np.min(y) >= -sigma_tol
            and np.max(y[0]) <= dq.Hm + sigma_tol
            and np.max(y[1]) <= dq.Hm + sigma_tol
            and np.max(y[2]) <= dq.Vm + sigma_tol
        )
        return {"sigma_ok": 1.0 if ok else 0.0}

    def comparison(t, y, grid):
        sbar, vbar = comparison_bounds(p, dq, s0max, v0max, t)
        return {
            "splusi_max": float(np.max(y[0] + y[1])),
            "sbar": sbar,
            "vbar": vbar,
        }

    def lyap(t, y, grid):
        vals_l1 = float(np.trapezoid(coef_l1 * y[1] + y[2], dx=grid.h))
        l2 = math.nan
        if l2_defined and np.min(y) > positive_floor:
            g2v = lyapunov.g2_field(p, eq.Estar, y)
            l2 = float(np.trapezoid(g2v, dx=grid.h))
        return {"L1": vals_l1, "L2": l2}

    table = {
        "positivity": positivity,
        "sigma": sigma,
        "comparison": comparison,
        "lyapunov": lyap,
    }
    for name in scenario.monitors:
        monitors[name] = table[name]
    return monitors


def analyze(scenario: Scenario) -> tuple[DerivedQuantities, EquilibriumReport, StabilityReport]:
    """Thresholds, equilibria and stability; no time integration."""
    p = scenario.params
    init = scenario.initial_state()
    dq = derived(p, float(np.max(init.H)), float(np.max(init.I)), float(np.max(init.V)))
    eq = equilibrium_report(p)
    spectrum = neumann_spectrum(scenario.length, scenario.l_max)
    stab = classify(p, spectrum, eq)
    return dq, eq, stab


def run_scenario(scenario: Scenario, out_dir: str | Path | None = None,
                 figures: bool = True) -> RunReport:
    """Execute a scenario end to end; deterministic for identical inputs."""
    p = scenario.params
    grid = scenario.grid()
    init = scenario.initial_state()
    dq = derived(p, float(np.max(init.H)), float(np.max(init.I)), float(np.max(init.V)))
    eq = equilibrium_report(p)
    spectrum = neumann_spectrum(scenario.length, scenario.l_max)
    stab = classify(p, spectrum, eq)

    monitors = _make_monitors(scenario, p, dq, eq, init)
    traj = run(p, grid, init, scenario.solver_config(), monitors)

    final_summary = _final_summary(traj, eq)
    verdicts = _monitor_verdicts(scenario, traj, dq)

    outputs: dict[str, Path] = {}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        outputs["fields_csv"] = _write_fields_csv(out / "fields.csv", traj, grid)
        outputs["summary_csv"] = _write_summary_csv(out / "summary.csv", traj)
        outputs["stability_csv"] = _write_stability_csv(out / "stability.csv", stab)
        outputs["config"] = out / "scenario.cfg"
        outputs["config"].write_text(format_config(scenario))
        outputs["report_txt"] = _write_report_txt(
            out / "report.txt", scenario, dq, eq, stab, final_summary, verdicts, outputs
        )
        if figures:
            from .figures import render_figures

            outputs.update(render_figures(traj, scenario, eq, out))

    return RunReport(
        scenario=scenario, dq=dq, eq=eq, stability=stab, trajectory=traj,
        final_summary=final_summary, monitor_verdicts=verdicts, outputs=outputs,
    )


def _final_summary(traj: Trajectory, eq: EquilibriumReport) -> dict[str, float]:
    y = traj.states[-1]
    out: dict[str, float] = {"t_final": float(traj.times[-1])}
    for i, name in enumerate(("H", "I", "V")):
        out[f"{name}_min"] = float(np.min(y[i]))
        out[f"{name}_mean"] = float(np.mean(y[i]))
        out[f"{name}_max"] = float(np.max(y[i]))
    e0 = eq.E0.as_array()
    out["E0_sup_distance"] = float(np.max(np.abs(y - e0[:, None])))
    if eq.Estar is not None:
        es = eq.Estar.as_array()
        out["Estar_sup_distance"] = float(np.max(np.abs(y - es[:, None])))
        out["Estar_rel_distance"] = float(np.max(np.abs(y - es[:, None]) / es[:, None]))
    return out


def _monitor_verdicts(scenario: Scenario, traj: Trajectory,
                      dq: DerivedQuantities) -> dict[str, bool]:
    verdicts: dict[str, bool] = {}
    cols = traj.monitors
    scale = max(dq.Hm, dq.Vm)
    if "pos_min" in cols:
        verdicts["positivity_ok"] = bool(np.min(cols["pos_min"]) >= -1e-9 * scale)
    if "sigma_ok" in cols:
        verdicts["sigma_ok"] = bool(np.all(cols["sigma_ok"] > 0.5))
    if "splusi_max" in cols:
        verdicts["bounded_ok"] = bool(
            np.all(cols["splusi_max"] <= dq.Hm * (1 + 1e-6))
            and np.all(traj.states[:, 2, :].max(axis=1) <= dq.Vm * (1 + 1e-6))
        )
        vmax = traj.states[:, 2, :].max(axis=1)
        verdicts["comparison_ok"] = bool(
            np.all(cols["splusi_max"] <= cols["sbar"] + 1e-6)
            and np.all(vmax <= cols["vbar"] + 1e-6)
        )
    if "L1" in cols:
        sel = traj.times >= DECAY_TRANSIENT_TIME
        # L1 decays in the extinction regime only; in the persistence
        # regime the column is recorded without a verdict
        if dq.R0 <= 1.0 and np.count_nonzero(sel) >= 2:
            ok, _ = lyapunov.decay_check(cols["L1"][sel], DECAY_TOL)
            verdicts["l1_decay_ok"] = ok
        l2 = cols.get("L2")
        if l2 is not None:
            defined = sel & np.isfinite(l2)
            if np.count_nonzero(defined) >= 2:
                ok, _ = lyapunov.decay_check(l2[defined], DECAY_TOL)
                verdicts["l2_decay_ok"] = ok
    return verdicts


def _write_fields_csv(path: Path, traj: Trajectory, grid: Grid1D) -> Path:
    x = grid.x
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "H", "I", "V"])
        for i, t in enumerate(traj.times):
            y = traj.states[i]
            for j in range(grid.n_cells):
                w.writerow([repr(float(t)), repr(float(x[j])), repr(float(y[0, j])),
                            repr(float(y[1, j])), repr(float(y[2, j]))])
    return path


_SUMMARY_MONITOR_ORDER = (
    "pos_min", "sigma_ok", "splusi_max", "sbar", "vbar", "L1", "L2",
)


def _forward_diff(times: np.ndarray, vals: np.ndarray) -> np.ndarray:
    out = np.full_like(vals, np.nan)
    if vals.size >= 2:
        out[:-1] = np.diff(vals) / np.diff(times)
    return out


def _write_summary_csv(path: Path, traj: Trajectory) -> Path:
    cols = dict(traj.monitors)
    if "L1" in cols:
        cols["dL1dt"] = _forward_diff(traj.times, cols["L1"])
        cols["dL2dt"] = _forward_diff(traj.times, cols["L2"])
    names = [c for c in _SUMMARY_MONITOR_ORDER if c in cols]
    if "dL1dt" in cols:
        names += ["dL1dt", "dL2dt"]
    header = ["t"]
    for f in ("H", "I", "V"):
        header += [f"{f}_min", f"{f}_mean", f"{f}_max"]
    header += names
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, t in enumerate(traj.times):
            y = traj.states[i]
            row = [repr(float(t))]
            for fi in range(3):
                row += [repr(float(np.min(y[fi]))), repr(float(np.mean(y[fi]))),
                        repr(float(np.max(y[fi])))]
            row += [repr(float(cols[c][i])) for c in names]
            w.writerow(row)
    return path


def _write_stability_csv(path: Path, stab: StabilityReport) -> Path:
    rows = stab.csv_rows()
    header = ["equilibrium", "l", "mu_l", "lambda0_root", "B_coef", "C_coef",
              "a2", "a1", "a0", "A_lin", "B_lin", "verdict"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in header])
    return path


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_report_txt(path: Path, scenario: Scenario, dq: DerivedQuantities,
                      eq: EquilibriumReport, stab: StabilityReport,
                      final_summary: dict, verdicts: dict,
                      outputs: dict[str, Path]) -> Path:
    lines = [f"# run report: {scenario.name}", ""]
    lines.append("[derived]")
    for key in ("Lambda", "gamma", "delta1", "delta2", "Hm", "Vm", "R0", "tau0"):
        lines.append(f"{key} = {_fmt(getattr(dq, key))}")
    lines.append("")
    lines.append("[equilibria]")
    for key, val in eq.key_values():
        lines.append(f"{key} = {_fmt(val)}")
    lines.append("")
    lines.append("[stability]")
    for key, val in stab.key_values():
        lines.append(f"{key} = {_fmt(val)}")
    lines.append("")
    lines.append("[final_state]")
    for key, val in final_summary.items():
        lines.append(f"{key} = {_fmt(val)}")
    lines.append("")
    lines.append("[monitors]")
    for key, val in verdicts.items():
        lines.append(f"{key} = {val}")
    lines.append("")
    lines.append("[outputs]")
    for key, val in outputs.items():
        lines.append(f"{key} = {val}")
    lines.append("")
    path.write_text("\n".join(lines))
    return path


def sweep(base: Scenario, key: str, values) -> list[dict]:
    """Analysis-only rows across values of one model parameter.

    Each row carries the thresholds, the net yield and the stability
    verdicts; no PDE integration is performed.
    """
    if key not in PARAM_KEYS:
        raise ConfigError(f"unknown parameter key {key!r}; one of {sorted(PARAM_KEYS)}")
    fname = PARAM_KEYS[key]
    rows = []
    for value in values:
        if key == "u":
            value = int(value)
        params = replace(base.params, **{fname: value})
        scenario = replace(base, params=params)
        dq, eq, stab = analyze(scenario)
        rows.append({
            "value": value,
            "R0": dq.R0,
            "tau0": dq.tau0,
            "gamma": dq.gamma,
            "E0_verdict": stab.e0_verdict,
            "Estar_exists": eq.exists_Estar,
            "Estar_verdict": stab.estar_verdict,
        })
    return rows


def write_sweep_csv(rows: list[dict], path: str | Path) -> Path:
    path = Path(path)
    header = ["value", "R0", "tau0", "gamma", "E0_verdict", "Estar_exists", "Estar_verdict"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in header])
    return path
