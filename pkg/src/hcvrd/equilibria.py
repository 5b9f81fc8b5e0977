"""Spatially homogeneous equilibria and the scalar root problem locating E*."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SolverError
from .model import (
    ModelParams,
    PointState,
    basic_reproduction_number,
    incidence,
    reaction,
    virion_net_yield,
)

_BRACKET_WIDTH = 1e-14   # bisection stops at this width relative to Lambda
_MAX_ITER = 200


@dataclass(frozen=True)
class EquilibriumReport:
    """Equilibria of the homogeneous system with residual diagnostics.

    ``reaction_residual`` is the sup-norm of the reaction at E*, measured
    against ``residual_scale = max(lam, (alpha+rho)I*, mu V*)`` so that
    tolerances are dimension aware.
    """

    E0: PointState
    Estar: PointState | None
    psi_root_residual: float
    reaction_residual: float
    exists_Estar: bool
    gamma: float
    residual_scale: float
    estar_reason: str | None = None

    def key_values(self) -> list[tuple[str, object]]:
        items: list[tuple[str, object]] = [
            ("E0_H", self.E0.H), ("E0_I", self.E0.I), ("E0_V", self.E0.V),
            ("exists_Estar", self.exists_Estar),
            ("gamma", self.gamma),
        ]
        if self.Estar is not None:
            items += [
                ("Estar_H", self.Estar.H),
                ("Estar_I", self.Estar.I),
                ("Estar_V", self.Estar.V),
                ("psi_root_residual", self.psi_root_residual),
                ("reaction_residual", self.reaction_residual),
                ("residual_scale", self.residual_scale),
            ]
        elif self.estar_reason:
            items.append(("Estar_absent_reason", self.estar_reason))
        return items


def uninfected_equilibrium(p: ModelParams) -> PointState:
    """The infection-free state (lam/d, 0, 0)."""
    return PointState(p.lam / p.d, 0.0, 0.0)


def psi(p: ModelParams, x: float) -> float:
    """Scalar function whose root in (0, Lambda) is the healthy-cell level of E*.

    psi(0) = -(alpha+rho)*mu < 0 and sign(psi(Lambda)) = sign(R0 - 1);
    psi is strictly increasing on [0, Lambda] whenever gamma > 0.
    """
    Lam = p.lam / p.d
    if not math.isfinite(x) or x < 0 or x > Lam:
        raise DomainError(f"psi requires 0 <= x <= Lambda = {Lam}, got {x!r}")
    g = virion_net_yield(p)
    V = g * (p.lam - p.d * x) / (p.mu * p.alpha)
    den = p.alpha0 + p.alpha1 * x + p.alpha2 * V + p.alpha3 * x * V
    if den <= 0:
        raise DomainError("incidence denominator not positive along the equilibrium curve")
    return (1.0 - p.eta) * g * p.beta * x / den - (p.alpha + p.rho) * p.mu


def infected_equilibrium(p: ModelParams, tol: float = 1e-9) -> PointState | None:
    """Locate the infected equilibrium by bisection, or return None.

    Returns None when R0 <= 1 or the net virion yield is nonpositive.  The
    root bracket [0, Lambda] carries a guaranteed sign change when R0 > 1,
    and monotonicity of psi makes plain bisection reliable; the bracket is
    shrunk to 1e-14 * Lambda.  ``tol`` bounds the accepted residual
    |psi(H*)| relative to (alpha+rho)*mu.
    """
    if basic_reproduction_number(p) <= 1.0:
        return None
    if virion_net_yield(p) <= 0.0:
        return None
    Lam = p.lam / p.d
    if psi(p, Lam) <= 0.0:
        # R0 numerically indistinguishable from the threshold
        return None
    a, b = 0.0, Lam
    for _ in range(_MAX_ITER):
        if b - a <= _BRACKET_WIDTH * Lam:
            break
        mid = 0.5 * (a + b)
        if psi(p, mid) < 0.0:
            a = mid
        else:
            b = mid
    else:
        raise SolverError(
            f"bisection did not reach bracket width {_BRACKET_WIDTH * Lam} "
            f"after {_MAX_ITER} iterations"
        )
    H = 0.5 * (a + b)
    resid = abs(psi(p, H))
    if resid > tol * (p.alpha + p.rho) * p.mu:
        raise SolverError(f"psi residual {resid} exceeds tolerance at the bisection root")
    I = (p.lam - p.d * H) / p.alpha
    V = virion_net_yield(p) * I / p.mu
    return PointState(H, I, V)


def equilibrium_report(p: ModelParams, tol: float = 1e-9) -> EquilibriumReport:
    """Compute E0, locate E* when it exists, and attach residual diagnostics."""
    e0 = uninfected_equilibrium(p)
    g = virion_net_yield(p)
    r0 = basic_reproduction_number(p)
    reason = None
    estar = None
    if r0 <= 1.0:
        reason = f"R0 = {r0} <= 1"
    elif g <= 0.0:
        reason = f"net virion yield gamma = {g} <= 0"
    else:
        estar = infected_equilibrium(p, tol)
        if estar is None:
            reason = "psi has no sign change (R0 at threshold)"
    if estar is None:
        return EquilibriumReport(
            E0=e0, Estar=None, psi_root_residual=float("nan"),
            reaction_residual=float("nan"), exists_Estar=False, gamma=g,
            residual_scale=float("nan"), estar_reason=reason,
        )
    scale = max(p.lam, (p.alpha + p.rho) * estar.I, p.mu * estar.V)
    resid = float(np.max(np.abs(reaction(p, estar))))
    return EquilibriumReport(
        E0=e0, Estar=estar, psi_root_residual=abs(psi(p, estar.H)),
        reaction_residual=resid, exists_Estar=True, gamma=g,
        residual_scale=scale, estar_reason=None,
    )


def consistency_identities(p: ModelParams, estar: PointState) -> tuple[float, float, float]:
    """Relative errors of the three closed-form identities satisfied by E*.

    Returned in order: incidence(E*) = (alpha+rho)I*, lam = d H* + alpha I*,
    and (alpha+rho) mu / gamma = (alpha+rho) I* / V*.  The third reduces to
    (alpha+rho) mu / ((1-eps)k) exactly when absorption is off (u = 0).
    """
    lhs1 = incidence(p, estar.H, estar.V)
    rhs1 = (p.alpha + p.rho) * estar.I
    lhs2 = p.lam
    rhs2 = p.d * estar.H + p.alpha * estar.I
    lhs3 = (p.alpha + p.rho) * p.mu / virion_net_yield(p)
    rhs3 = (p.alpha + p.rho) * estar.I / estar.V
    return (
        abs(lhs1 - rhs1) / max(abs(rhs1), 1e-300),
        abs(lhs2 - rhs2) / max(abs(rhs2), 1e-300),
        abs(lhs3 - rhs3) / max(abs(rhs3), 1e-300),
    )
