"""Figure rendering for scenario runs (PNG files next to the CSV output)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

_FIELD_LABELS = ("healthy cells H", "infected cells I", "virions V")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def render_figures(traj, scenario, eq, out_dir: Path) -> dict[str, Path]:
    """Render time-series, space-time and Lyapunov figures for one run."""
    plt = _pyplot()
    out_dir = Path(out_dir)
    paths: dict[str, Path] = {}

    t = traj.times
    x = traj.grid.x
    states = traj.states

    # spatial min/mean/max of each field against time
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 8))
    for i, ax in enumerate(axes):
        lo = states[:, i, :].min(axis=1)
        mean = states[:, i, :].mean(axis=1)
        hi = states[:, i, :].max(axis=1)
        ax.fill_between(t, lo, hi, alpha=0.25, lw=0)
        ax.plot(t, mean, lw=1.5)
        e0v = eq.E0.as_array()[i]
        ax.axhline(e0v, color="k", ls=":", lw=0.8, label="uninfected equilibrium")
        if eq.Estar is not None:
            ax.axhline(eq.Estar.as_array()[i], color="r", ls="--", lw=0.8,
                       label="infected equilibrium")
        ax.set_ylabel(_FIELD_LABELS[i])
    axes[0].legend(loc="best", fontsize=8)
    axes[-1].set_xlabel("time (days)")
    fig.suptitle(f"{scenario.name}: spatial min/mean/max")
    fig.tight_layout()
    paths["fig_timeseries"] = out_dir / "timeseries.png"
    fig.savefig(paths["fig_timeseries"], dpi=150)
    plt.close(fig)

    # space-time surfaces
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.4), constrained_layout=True)
    for i, ax in enumerate(axes):
        pc = ax.pcolormesh(x, t, states[:, i, :], shading="auto")
        fig.colorbar(pc, ax=ax)
        ax.set_title(_FIELD_LABELS[i], fontsize=9)
        ax.set_xlabel("x")
        if i == 0:
            ax.set_ylabel("time (days)")
    fig.suptitle(f"{scenario.name}: space-time evolution")
    paths["fig_space_time"] = out_dir / "space_time.png"
    fig.savefig(paths["fig_space_time"], dpi=150)
    plt.close(fig)

    # Lyapunov series when monitored
    cols = traj.monitors
    if "L1" in cols:
        fig, ax = plt.subplots(figsize=(6, 4))
        l1 = cols["L1"]
        if np.all(l1 > 0):
            ax.semilogy(t, l1, label="L1")
        else:
            ax.plot(t, l1, label="L1")
        l2 = cols.get("L2")
        if l2 is not None and np.any(np.isfinite(l2)):
            sel = np.isfinite(l2)
            if np.all(l2[sel] > 0):
                ax.semilogy(t[sel], l2[sel], label="L2")
            else:
                ax.plot(t[sel], l2[sel], label="L2")
        ax.set_xlabel("time (days)")
        ax.set_ylabel("functional value")
        ax.legend()
        fig.suptitle(f"{scenario.name}: Lyapunov functionals")
        fig.tight_layout()
        paths["fig_lyapunov"] = out_dir / "lyapunov.png"
        fig.savefig(paths["fig_lyapunov"], dpi=150)
        plt.close(fig)

    return paths
