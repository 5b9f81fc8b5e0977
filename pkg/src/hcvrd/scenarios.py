"""Scenario definitions and the flat key=value configuration format.

A scenario bundles model parameters, initial conditions, grid and solver
controls.  Initial conditions are either constants or expressions in the
spatial coordinate ``x`` (for instance ``5 + 0.5*cos(pi*x)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError
from .model import ModelParams
from .solver import FieldState, Grid1D, SolverConfig

# config key -> ModelParams field
PARAM_KEYS: dict[str, str] = {
    "lambda": "lam", "d": "d", "beta": "beta", "eta": "eta",
    "epsilon": "epsilon", "rho": "rho", "alpha": "alpha", "k": "k",
    "mu": "mu", "u": "u", "alpha0": "alpha0", "alpha1": "alpha1",
    "alpha2": "alpha2", "alpha3": "alpha3", "D1": "D1", "D2": "D2", "D3": "D3",
}

_SCENARIO_KEYS = (
    "name", "H0", "I0", "V0", "length", "n_cells", "dt", "t_end",
    "snapshot_stride", "positivity_clamp", "cfl_safety", "l_max", "monitors",
)

KNOWN_MONITORS = ("positivity", "sigma", "comparison", "lyapunov")

_EXPR_NAMESPACE = {
    "pi": math.pi, "e": math.e,
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "sqrt": np.sqrt, "log": np.log, "abs": np.abs,
}


@dataclass(frozen=True)
class InitialCondition:
    """Per-field profiles, kept as the original text for exact round trips."""

    H0: str
    I0: str
    V0: str

    def build(self, grid: Grid1D) -> FieldState:
        x = grid.x
        arrays = []
        for key, spec in (("H0", self.H0), ("I0", self.I0), ("V0", self.V0)):
            arrays.append(_eval_profile(key, spec, x))
        return FieldState(t=0.0, H=arrays[0], I=arrays[1], V=arrays[2])


def _eval_profile(key: str, spec: str, x: np.ndarray) -> np.ndarray:
    try:
        value = float(spec)
        return np.full_like(x, value)
    except ValueError:
        pass
    try:
        value = eval(spec, {"__builtins__": {}}, {**_EXPR_NAMESPACE, "x": x})
    except Exception as exc:
        raise ConfigError(f"cannot evaluate initial profile {key} = {spec!r}: {exc}") from exc
    arr = np.broadcast_to(np.asarray(value, dtype=float), x.shape).copy()
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"initial profile {key} = {spec!r} produced non-finite values")
    return arr


@dataclass(frozen=True)
class Scenario:
    """A complete, validated run description."""

    name: str
    params: ModelParams
    ic: InitialCondition
    length: float = 1.0
    n_cells: int = 101
    dt: float | None = None
    t_end: float = 10.0
    snapshot_stride: int | None = None
    positivity_clamp: bool = False
    cfl_safety: float = 0.5
    l_max: int = 64
    monitors: tuple[str, ...] = KNOWN_MONITORS

    def __post_init__(self) -> None:
        for m in self.monitors:
            if m not in KNOWN_MONITORS:
                raise ConfigError(f"unknown monitor {m!r}; known: {KNOWN_MONITORS}")
        if self.l_max < 1:
            raise ConfigError("l_max must be >= 1")

    def grid(self) -> Grid1D:
        return Grid1D(length=self.length, n_cells=self.n_cells)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            t_end=self.t_end, dt=self.dt, snapshot_stride=self.snapshot_stride,
            positivity_clamp=self.positivity_clamp, cfl_safety=self.cfl_safety,
        )

    def initial_state(self) -> FieldState:
        return self.ic.build(self.grid())


def _builtin_scenarios() -> dict[str, Scenario]:
    base = ModelParams(
        lam=50.0, d=5.0, beta=0.24, eta=0.00004, epsilon=0.5, rho=0.01,
        alpha=0.05, k=2.0, mu=20.0, u=1, alpha0=1.0, alpha1=0.1,
        alpha2=0.02, alpha3=0.03, D1=0.1, D2=0.1, D3=0.1,
    )
    set1 = Scenario(
        name="paper-set-1", params=base,
        ic=InitialCondition("5", "5", "5"), t_end=10.0,
    )
    set2 = Scenario(
        name="paper-set-2", params=replace(base, mu=2.0),
        ic=InitialCondition("15", "5", "5"), t_end=100.0,
    )
    # factorizable incidence with absorption off: the family in which the
    # infected-equilibrium Lyapunov functional is defined
    crowley = Scenario(
        name="crowley-martin",
        params=replace(base, mu=2.0, u=0, eta=0.0, alpha3=0.1 * 0.02),
        ic=InitialCondition("15", "5", "5"), t_end=200.0,
    )
    return {s.name: s for s in (set1, set2, crowley)}


BUILTIN_SCENARIOS: dict[str, Scenario] = _builtin_scenarios()


def builtin_scenario(name: str) -> Scenario:
    try:
        return BUILTIN_SCENARIOS[name]
    except KeyError:
        raise ConfigError(
            f"unknown scenario {name!r}; built-ins: {sorted(BUILTIN_SCENARIOS)}"
        ) from None


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blanks are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _float_for(key: str, value: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {value!r} as a number") from None
    return v


def _params_from_kv(kv: dict[str, str]) -> ModelParams:
    missing = [k for k in PARAM_KEYS if k not in kv]
    if missing:
        raise ConfigError(f"missing parameter keys: {missing}")
    values = {}
    for key, fname in PARAM_KEYS.items():
        v = _float_for(key, kv[key])
        if key == "u":
            if v not in (0.0, 1.0):
                raise ConfigError(f"key 'u': must be 0 or 1, got {kv['u']!r}")
            values[fname] = int(v)
        else:
            values[fname] = v
    try:
        return ModelParams(**values)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def parse_params(text: str) -> ModelParams:
    """Model parameters from key=value text with exactly the 17 keys."""
    kv = parse_key_values(text)
    unknown = [k for k in kv if k not in PARAM_KEYS]
    if unknown:
        raise ConfigError(f"unknown parameter keys: {unknown}")
    return _params_from_kv(kv)


def load_params(path: str | Path) -> ModelParams:
    return parse_params(Path(path).read_text())


def parse_config(text: str) -> Scenario:
    """A full scenario from key=value text.

    Required keys: the 17 model parameters plus H0, I0, V0.  Unknown keys
    are rejected by name.
    """
    kv = parse_key_values(text)
    unknown = [k for k in kv if k not in PARAM_KEYS and k not in _SCENARIO_KEYS]
    if unknown:
        raise ConfigError(f"unknown keys: {unknown}")
    params = _params_from_kv(kv)
    for key in ("H0", "I0", "V0"):
        if key not in kv:
            raise ConfigError(f"missing initial-condition key {key!r}")
    ic = InitialCondition(H0=kv["H0"], I0=kv["I0"], V0=kv["V0"])

    extras: dict[str, object] = {}
    if "name" in kv:
        extras["name"] = kv["name"]
    else:
        extras["name"] = "unnamed"
    if "length" in kv:
        extras["length"] = _float_for("length", kv["length"])
    if "n_cells" in kv:
        extras["n_cells"] = int(_float_for("n_cells", kv["n_cells"]))
    if "dt" in kv:
        extras["dt"] = None if kv["dt"] == "auto" else _float_for("dt", kv["dt"])
    if "t_end" in kv:
        extras["t_end"] = _float_for("t_end", kv["t_end"])
    if "snapshot_stride" in kv:
        extras["snapshot_stride"] = (
            None if kv["snapshot_stride"] == "auto"
            else int(_float_for("snapshot_stride", kv["snapshot_stride"]))
        )
    if "positivity_clamp" in kv:
        v = kv["positivity_clamp"].lower()
        if v not in ("true", "false", "0", "1"):
            raise ConfigError("key 'positivity_clamp': expected true/false")
        extras["positivity_clamp"] = v in ("true", "1")
    if "cfl_safety" in kv:
        extras["cfl_safety"] = _float_for("cfl_safety", kv["cfl_safety"])
    if "l_max" in kv:
        extras["l_max"] = int(_float_for("l_max", kv["l_max"]))
    if "monitors" in kv:
        extras["monitors"] = tuple(
            m.strip() for m in kv["monitors"].split(",") if m.strip()
        )
    try:
        scenario = Scenario(params=params, ic=ic, **extras)
        scenario.grid()
        scenario.solver_config()
    except (ConfigError, DomainError) as exc:
        raise ConfigError(str(exc)) from exc
    return scenario


def load_config(path: str | Path) -> Scenario:
    return parse_config(Path(path).read_text())


def format_config(sc: Scenario) -> str:
    """Emit a scenario as key=value text; load_config inverts it exactly."""
    lines = [f"name = {sc.name}"]
    for key, fname in PARAM_KEYS.items():
        lines.append(f"{key} = {getattr(sc.params, fname)!r}")
    lines += [
        f"H0 = {sc.ic.H0}",
        f"I0 = {sc.ic.I0}",
        f"V0 = {sc.ic.V0}",
        f"length = {sc.length!r}",
        f"n_cells = {sc.n_cells}",
        f"dt = {'auto' if sc.dt is None else repr(sc.dt)}",
        f"t_end = {sc.t_end!r}",
        f"snapshot_stride = {'auto' if sc.snapshot_stride is None else sc.snapshot_stride}",
        f"positivity_clamp = {'true' if sc.positivity_clamp else 'false'}",
        f"cfl_safety = {sc.cfl_safety!r}",
        f"l_max = {sc.l_max}",
        f"monitors = {','.join(sc.monitors)}",
    ]
    return "\n".join(lines) + "\n"


def save_config(sc: Scenario, path: Path) -> None:
    Path(path).write_text(format_config(sc))
