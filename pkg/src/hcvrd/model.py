"""Core model: parameters, incidence, reaction terms and derived constants.

The state is a triple (H, I, V) of healthy hepatocytes, infected hepatocytes
and free virions.  Infection follows a saturating incidence

    (1 - eta) * beta * H * V / (alpha0 + alpha1*H + alpha2*V + alpha3*H*V)

whose denominator constants select the classical special cases (mass action,
Holling II, Beddington-DeAngelis, Crowley-Martin) as parameter reductions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError, NotApplicableError


@dataclass(frozen=True)
class ModelParams:
    """Biological, therapy and diffusion constants.

    Rates are per day, densities per unit volume.  ``u`` switches the
    absorption effect (virions consumed when they infect a cell) on or off.
    Validation enforces positivity of the rates, drug efficacies in [0, 1),
    nonnegative incidence constants with ``alpha0 > 0``, and strictly
    positive diffusion coefficients.
    """

    lam: float       # production rate of healthy hepatocytes
    d: float         # healthy-cell death rate
    beta: float      # transmission rate
    eta: float       # infection-blocking drug efficacy
    epsilon: float   # production-blocking drug efficacy
    rho: float       # cure rate of infected cells
    alpha: float     # infected-cell death rate
    k: float         # virion production rate
    mu: float        # virion clearance rate
    u: int           # absorption flag, 0 or 1
    alpha0: float    # incidence denominator constants
    alpha1: float
    alpha2: float
    alpha3: float
    D1: float        # diffusion coefficient, healthy cells
    D2: float        # diffusion coefficient, infected cells
    D3: float        # diffusion coefficient, virions

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise DomainError(f"parameter {f.name!r} must be finite, got {v!r}")
        constraints = {
            "lam": self.lam > 0,
            "d": self.d > 0,
            "beta": self.beta >= 0,
            "eta": 0 <= self.eta < 1,
            "epsilon": 0 <= self.epsilon < 1,
            "rho": self.rho >= 0,
            "alpha": self.alpha > 0,
            "k": self.k > 0,
            "mu": self.mu > 0,
            "u": self.u in (0, 1),
            "alpha0": self.alpha0 > 0,
            "alpha1": self.alpha1 >= 0,
            "alpha2": self.alpha2 >= 0,
            "alpha3": self.alpha3 >= 0,
            "D1": self.D1 > 0,
            "D2": self.D2 > 0,
            "D3": self.D3 > 0,
        }
        for name, ok in constraints.items():
            if not ok:
                raise DomainError(
                    f"parameter {name!r} violates its admissible range "
                    f"(got {getattr(self, name)!r})"
                )


@dataclass(frozen=True)
class PointState:
    """One nonnegative (H, I, V) triple."""

    H: float
    I: float
    V: float

    def __post_init__(self) -> None:
        for name in ("H", "I", "V"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise DomainError(f"state component {name} must be finite and >= 0, got {v!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.H, self.I, self.V], dtype=float)


@dataclass(frozen=True)
class DerivedQuantities:
    """Constants computed from parameters and initial-data maxima.

    ``Hm`` bounds both H and I, ``Vm`` bounds V; together they delimit the
    positively-invariant box used by the runtime monitors.  ``R0`` is the
    basic reproduction number and ``tau0 >= R0`` the sufficient threshold
    for global extinction of the infection.
    """

    Lambda: float    # infection-free healthy-cell level lam/d
    gamma: float     # net virion yield per infected cell
    delta1: float    # max(D1, D2)
    delta2: float    # min(d, alpha)
    Hm: float
    Vm: float
    R0: float
    tau0: float


def _triple(s) -> tuple:
    """Accept a PointState, a length-3 sequence, or component arrays."""
    if isinstance(s, PointState):
        return s.H, s.I, s.V
    if len(s) != 3:
        raise DomainError(f"state must have exactly 3 components, got {len(s)}")
    return s[0], s[1], s[2]


def incidence(p: ModelParams, H, V):
    """Infection rate at densities H, V (scalars or arrays).

    Inputs must be finite; negative values are accepted so that
    finite-difference diagnostics can probe across the axes.
    """
    H = np.asarray(H, dtype=float)
    V = np.asarray(V, dtype=float)
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(V))):
        raise DomainError("incidence requires finite H and V")
    den = p.alpha0 + p.alpha1 * H + p.alpha2 * V + p.alpha3 * H * V
    out = (1.0 - p.eta) * p.beta * H * V / den
    return float(out) if out.ndim == 0 else out


def reaction(p: ModelParams, s) -> np.ndarray:
    """Reaction vector field (F1, F2, F3) at state ``s``.

    ``s`` may be a PointState, a (3,) triple, or a (3, n) stack of fields;
    the result has the matching shape.
    """
    H, I, V = _triple(s)
    H = np.asarray(H, dtype=float)
    I = np.asarray(I, dtype=float)
    V = np.asarray(V, dtype=float)
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(I)) and np.all(np.isfinite(V))):
        raise DomainError("reaction requires finite state components")
    f = incidence(p, H, V)
    F1 = p.lam - p.d * H - f + p.rho * I
    F2 = f - (p.alpha + p.rho) * I
    F3 = (1.0 - p.epsilon) * p.k * I - p.mu * V - p.u * f
    return np.array([F1, F2, F3])


def virion_net_yield(p: ModelParams) -> float:
    """Net virions produced per infected cell: (1-eps)k - u(alpha+rho)."""
    return (1.0 - p.epsilon) * p.k - p.u * (p.alpha + p.rho)


def basic_reproduction_number(p: ModelParams) -> float:
    """Spectral radius of the next-generation operator at the uninfected state."""
    Lam = p.lam / p.d
    num = (1.0 - p.eta) * (1.0 - p.epsilon) * p.k * p.beta * Lam
    den = (p.alpha + p.rho) * (
        p.mu * (p.alpha0 + p.alpha1 * Lam) + p.u * (1.0 - p.eta) * p.beta * Lam
    )
    return num / den


def global_extinction_threshold(p: ModelParams) -> float:
    """Threshold tau0; tau0 < 1 is sufficient for global clearance, R0 <= tau0."""
    Lam = p.lam / p.d
    return ((1.0 - p.epsilon) * p.k * (1.0 - p.eta) * p.beta * Lam
            / (p.mu * p.alpha0 * (p.alpha + p.rho)))


def derived(p: ModelParams, H0max: float, I0max: float, V0max: float) -> DerivedQuantities:
    """Derived constants for initial data bounded by the given maxima."""
    for name, v in (("H0max", H0max), ("I0max", I0max), ("V0max", V0max)):
        if not math.isfinite(v) or v < 0:
            raise DomainError(f"{name} must be finite and >= 0, got {v!r}")
    delta2 = min(p.d, p.alpha)
    Hm = max(p.lam / delta2, H0max + I0max)
    Vm = max((1.0 - p.epsilon) * p.k * Hm / p.mu, V0max)
    return DerivedQuantities(
        Lambda=p.lam / p.d,
        gamma=virion_net_yield(p),
        delta1=max(p.D1, p.D2),
        delta2=delta2,
        Hm=Hm,
        Vm=Vm,
        R0=basic_reproduction_number(p),
        tau0=global_extinction_threshold(p),
    )


def lipschitz_constants(p: ModelParams, Hm: float, Vm: float) -> np.ndarray:
    """Lipschitz matrix K[i][j] of the reaction components on the box.

    Row i bounds the variation of F_{i+1}; column j corresponds to H, I, V.
    The constants contain 1/alpha1 and 1/alpha2, so both must be positive.
    """
    if p.alpha1 <= 0 or p.alpha2 <= 0:
        raise NotApplicableError("lipschitz_constants requires alpha1 > 0 and alpha2 > 0")
    cb = (1.0 - p.eta) * p.beta
    kh = cb * (1.0 / p.alpha2 + Vm / p.alpha0)   # variation in H
    kv = cb * (1.0 / p.alpha1 + Hm / p.alpha0)   # variation in V
    return np.array([
        [p.d + kh, p.rho, kv],
        [kh, p.alpha + p.rho, kv],
        [p.u * kh, p.k * (1.0 - p.epsilon), p.mu + p.u * kv],
    ])


def in_sigma(s, dq: DerivedQuantities, tol: float | None = None) -> bool:
    """Membership in the invariant box 0 <= H, I <= Hm, 0 <= V <= Vm.

    ``tol`` is absolute slack on every face; the default is floating-point
    sized relative to the box, 1e-9 * max(Hm, Vm).
    """
    if tol is None:
        tol = 1e-9 * max(dq.Hm, dq.Vm)
    if tol < 0:
        raise DomainError("tol must be >= 0")
    H, I, V = _triple(s)
    return bool(
        H >= -tol and I >= -tol and V >= -tol
        and H <= dq.Hm + tol and I <= dq.Hm + tol and V <= dq.Vm + tol
    )
