"""Method-of-lines integration of the reaction-diffusion system on an interval.

Space is discretized with second-order central differences; homogeneous
Neumann boundaries use mirror ghost nodes, which keeps the discrete
integral of every diffusion term at exactly zero.  Time stepping is
classical RK4 under an explicit stability bound on dt.  A pointwise RK4
integrator of the reaction system alone serves as the reference for
spatially homogeneous runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, SolverError
from .model import DerivedQuantities, ModelParams, derived, reaction


@dataclass(frozen=True)
class Grid1D:
    """Vertex-centered uniform grid on (0, length) including both endpoints."""

    length: float
    n_cells: int

    def __post_init__(self) -> None:
        if not (self.length > 0 and math.isfinite(self.length)):
            raise DomainError(f"grid length must be positive, got {self.length!r}")
        if self.n_cells < 3:
            raise DomainError(f"n_cells must be >= 3, got {self.n_cells!r}")

    @property
    def h(self) -> float:
        return self.length / (self.n_cells - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_cells)


@dataclass
class FieldState:
    """The three fields at one instant."""

    t: float
    H: np.ndarray
    I: np.ndarray
    V: np.ndarray

    def stack(self) -> np.ndarray:
        return np.array([self.H, self.I, self.V], dtype=float)

    @classmethod
    def from_stack(cls, t: float, y: np.ndarray) -> "FieldState":
        return cls(t=t, H=y[0].copy(), I=y[1].copy(), V=y[2].copy())


def validate_field_state(s: FieldState, grid: Grid1D) -> None:
    """Enforce array lengths, finiteness, and numerical nonnegativity."""
    for name in ("H", "I", "V"):
        arr = np.asarray(getattr(s, name), dtype=float)
        if arr.shape != (grid.n_cells,):
            raise DomainError(
                f"field {name} has shape {arr.shape}, expected ({grid.n_cells},)"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"field {name} contains non-finite values")
        scale = max(1.0, float(np.max(np.abs(arr))))
        if np.min(arr) < -1e-12 * scale:
            raise DomainError(f"field {name} is negative beyond numerical tolerance")


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping controls; ``dt=None`` selects the stability-bound step."""

    t_end: float
    dt: float | None = None
    snapshot_stride: int | None = None
    positivity_clamp: bool = False
    cfl_safety: float = 0.5

    def __post_init__(self) -> None:
        if not (self.t_end > 0):
            raise DomainError(f"t_end must be > 0, got {self.t_end!r}")
        if self.dt is not None and not (self.dt > 0):
            raise DomainError(f"dt must be > 0, got {self.dt!r}")
        if self.snapshot_stride is not None and self.snapshot_stride < 1:
            raise DomainError("snapshot_stride must be >= 1")
        if not (0 < self.cfl_safety <= 1):
            raise DomainError(f"cfl_safety must be in (0, 1], got {self.cfl_safety!r}")


@dataclass
class Trajectory:
    """Snapshots and monitor series produced by ``run``."""

    times: np.ndarray          # (S,)
    states: np.ndarray         # (S, 3, n)
    monitors: dict[str, np.ndarray]
    clamped: np.ndarray        # magnitude clamped since previous snapshot
    dt: float
    stride: int
    n_steps: int
    grid: Grid1D

    def state_at(self, i: int) -> FieldState:
        return FieldState.from_stack(self.times[i], self.states[i])

    def final_state(self) -> FieldState:
        return self.state_at(len(self.times) - 1)


def laplacian_neumann(field, h: float) -> np.ndarray:
    """Second difference with mirror ghost nodes (zero-flux boundaries).

    The trapezoid-weighted node sum of the result vanishes identically,
    mirroring the conservation property of the continuous operator.
    """
    f = np.asarray(field, dtype=float)
    if f.ndim != 1 or f.size < 3:
        raise DomainError("laplacian_neumann requires a 1-d field with >= 3 nodes")
    if not (h > 0):
        raise DomainError(f"spacing h must be > 0, got {h!r}")
    inv_h2 = 1.0 / (h * h)
    out = np.empty_like(f)
    out[1:-1] = (f[:-2] - 2.0 * f[1:-1] + f[2:]) * inv_h2
    out[0] = 2.0 * (f[1] - f[0]) * inv_h2
    out[-1] = 2.0 * (f[-2] - f[-1]) * inv_h2
    return out


def diffusion_dt_bound(p: ModelParams, grid: Grid1D) -> float:
    """Explicit stability bound h^2 / (2 max D) for the diffusion terms."""
    return grid.h**2 / (2.0 * max(p.D1, p.D2, p.D3))


def reaction_dt_bound(p: ModelParams, Vm: float) -> float:
    """Reciprocal of the stiffest local reaction rate on the invariant box."""
    rate = p.d + p.alpha + p.rho + p.mu + (1.0 - p.eta) * p.beta * Vm / p.alpha0
    return 1.0 / rate


def _rhs_numpy(p: ModelParams, grid: Grid1D, y: np.ndarray) -> np.ndarray:
    lap = np.empty_like(y)
    inv_h2 = 1.0 / (grid.h * grid.h)
    lap[:, 1:-1] = (y[:, :-2] - 2.0 * y[:, 1:-1] + y[:, 2:]) * inv_h2
    lap[:, 0] = 2.0 * (y[:, 1] - y[:, 0]) * inv_h2
    lap[:, -1] = 2.0 * (y[:, -2] - y[:, -1]) * inv_h2
    out = reaction(p, y)
    out[0] += p.D1 * lap[0]
    out[1] += p.D2 * lap[1]
    out[2] += p.D3 * lap[2]
    return out


def step(p: ModelParams, grid: Grid1D, s: FieldState, dt: float,
         positivity_clamp: bool = False) -> FieldState:
    """One classical RK4 step of the semi-discrete system (numpy reference).

    ``dt`` must respect the hard diffusion bound h^2/(2 max D); callers
    wanting a safety margin should scale it down themselves (``run`` does).
    """
    if not (dt > 0):
        raise DomainError(f"dt must be > 0, got {dt!r}")
    hard = diffusion_dt_bound(p, grid)
    if dt > hard * (1 + 1e-12):
        raise SolverError(f"dt = {dt} exceeds the diffusion stability bound {hard}")
    y = s.stack()
    k1 = _rhs_numpy(p, grid, y)
    k2 = _rhs_numpy(p, grid, y + 0.5 * dt * k1)
    k3 = _rhs_numpy(p, grid, y + 0.5 * dt * k2)
    k4 = _rhs_numpy(p, grid, y + dt * k3)
    ynew = y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    bad = ~np.isfinite(ynew).all(axis=0)
    if bad.any():
        raise SolverError(f"non-finite state after step at node {int(np.argmax(bad))}")
    if positivity_clamp:
        np.maximum(ynew, 0.0, out=ynew)
    return FieldState.from_stack(s.t + dt, ynew)


def _kernel_args(p: ModelParams) -> tuple:
    return (
        p.D1, p.D2, p.D3, p.lam, p.d, (1.0 - p.eta) * p.beta, p.rho,
        p.alpha + p.rho, (1.0 - p.epsilon) * p.k, p.mu, float(p.u),
        p.alpha0, p.alpha1, p.alpha2, p.alpha3,
    )


def run(p: ModelParams, grid: Grid1D, init: FieldState, cfg: SolverConfig,
        monitors: dict | None = None) -> Trajectory:
    """Integrate to ``cfg.t_end``, recording snapshots and monitor values.

    ``monitors`` maps a column name prefix to a callable
    ``fn(t, y, grid) -> dict[str, float]`` evaluated at every snapshot.
    The step count and stride are fixed up front from the config, so the
    trajectory is reproducible bit for bit.  Non-finite values are detected
    at snapshot granularity and raise with the offending node index.
    """
    validate_field_state(init, grid)
    monitors = monitors or {}

    h0 = float(np.max(init.H))
    i0 = float(np.max(init.I))
    v0 = float(np.max(init.V))
    dq = derived(p, h0, i0, v0)
    bound = min(diffusion_dt_bound(p, grid), reaction_dt_bound(p, dq.Vm))
    if cfg.dt is None:
        dt = cfg.cfl_safety * bound
    else:
        dt = cfg.dt
        if dt > cfg.cfl_safety * bound * (1 + 1e-12):
            raise SolverError(
                f"dt = {dt} exceeds cfl_safety * stability bound = {cfg.cfl_safety * bound}"
            )
    n_steps = max(1, math.ceil(cfg.t_end / dt - 1e-12))
    dt = cfg.t_end / n_steps
    stride = cfg.snapshot_stride or max(1, math.ceil(n_steps / 600))

    snap_steps = list(range(0, n_steps + 1, stride))
    if snap_steps[-1] != n_steps:
        snap_steps.append(n_steps)

    n = grid.n_cells
    states = np.empty((len(snap_steps), 3, n))
    times = np.array([k * dt for k in snap_steps])
    clamped = np.zeros(len(snap_steps))
    columns: dict[str, list[float]] = {}

    y = init.stack()
    args = _kernel_args(p)

    def record(idx: int, t: float) -> None:
        bad = ~np.isfinite(y).all(axis=0)
        if bad.any():
            raise SolverError(
                f"non-finite state at t = {t} (node {int(np.argmax(bad))})"
            )
        states[idx] = y
        for fn in monitors.values():
            for key, val in fn(t, y, grid).items():
                columns.setdefault(key, []).append(float(val))

    record(0, 0.0)
    for idx in range(1, len(snap_steps)):
        chunk = snap_steps[idx] - snap_steps[idx - 1]
        clamped[idx] = _kernels.pde_rk4_chunk(
            y, chunk, dt, grid.h, cfg.positivity_clamp, *args
        )
        record(idx, times[idx])

    return Trajectory(
        times=times, states=states,
        monitors={k: np.array(v) for k, v in columns.items()},
        clamped=clamped, dt=dt, stride=stride, n_steps=n_steps, grid=grid,
    )


@dataclass
class OdeTrajectory:
    """Reference solution of the homogeneous (reaction-only) system."""

    times: np.ndarray    # (S,)
    states: np.ndarray   # (S, 3)

    def final(self) -> np.ndarray:
        return self.states[-1]


def ode_reference(p: ModelParams, s0, t_end: float, dt: float,
                  stride: int = 1) -> OdeTrajectory:
    """High-accuracy RK4 solution of dS/dt = reaction(S).

    Serves as the oracle for spatially homogeneous PDE runs; recorded every
    ``stride`` steps plus the final state.
    """
    s0 = np.asarray(s0, dtype=float)
    if s0.shape != (3,):
        raise DomainError("s0 must be a length-3 state")
    if not np.all(np.isfinite(s0)) or np.any(s0 < 0):
        raise DomainError("s0 must be finite and nonnegative")
    if not (dt > 0 and t_end > 0):
        raise DomainError("dt and t_end must be > 0")
    if stride < 1:
        raise DomainError("stride must be >= 1")
    n_steps = max(1, math.ceil(t_end / dt - 1e-12))
    dt = t_end / n_steps
    out = np.empty((n_steps // stride + 2, 3))
    args = _kernel_args(p)[3:]   # drop the diffusion coefficients
    rows = _kernels.ode_rk4(s0, n_steps, dt, stride, out, *args)
    steps = [0] + [s for s in range(stride, n_steps + 1, stride)]
    if steps[-1] != n_steps:
        steps.append(n_steps)
    states = out[:rows]
    if not np.all(np.isfinite(states)):
        raise SolverError("non-finite value in the reference ODE solution")
    return OdeTrajectory(times=np.array([s * dt for s in steps]), states=states.copy())


def comparison_bounds(p: ModelParams, dq: DerivedQuantities, S0max: float,
                      V0max: float, t):
    """Closed-form supersolution envelopes for H+I and for V at time(s) t.

    The first dominates max_x (H+I), the second max_x V; at t = 0 they equal
    the initial maxima and they saturate at lam/delta2 and (1-eps)k Hm/mu.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("comparison_bounds requires t >= 0")
    sbar = p.lam / dq.delta2 * (1.0 - np.exp(-dq.delta2 * t)) + S0max * np.exp(-dq.delta2 * t)
    vbar = ((1.0 - p.epsilon) * p.k * dq.Hm / p.mu * (1.0 - np.exp(-p.mu * t))
            + V0max * np.exp(-p.mu * t))
    if t.ndim == 0:
        return float(sbar), float(vbar)
    return sbar, vbar
