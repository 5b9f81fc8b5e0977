"""Lyapunov functionals and decay diagnostics along trajectories.

Two functionals are monitored: a linear one certifying extinction when the
threshold tau0 is below 1, and a Volterra-type one for the infected
equilibrium, available only in the restricted family u = 0, alpha0 = 1,
alpha3 = alpha1*alpha2 where the incidence denominator factorizes as
(1 + alpha1 H)(1 + alpha2 V).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotApplicableError
from .model import ModelParams, PointState, _triple


@dataclass(frozen=True)
class LyapunovTrace:
    """Series of functional values along a trajectory.

    ``dL1dt``/``dL2dt`` are forward differences (L[i+1]-L[i])/(t[i+1]-t[i])
    stored at index i, NaN at the last sample.  L2 entries are NaN wherever
    the functional is undefined (restriction violated, no E*, or state not
    strictly positive yet).
    """

    times: np.ndarray
    L1_values: np.ndarray
    L2_values: np.ndarray
    dL1dt: np.ndarray
    dL2dt: np.ndarray
    restriction_ok: bool


def restriction_ok(p: ModelParams) -> bool:
    """True when the infected-equilibrium functional is defined: u = 0,
    alpha0 = 1 and alpha3 = alpha1*alpha2 (factorizable incidence)."""
    return (
        p.u == 0
        and p.alpha0 == 1.0
        and math.isclose(p.alpha3, p.alpha1 * p.alpha2, rel_tol=1e-12, abs_tol=0.0)
    )


def g1(p: ModelParams, s) -> float:
    """Extinction functional ((1-eps)k/(alpha+rho)) * I + V.

    Linear and nonnegative on nonnegative states; zero iff I = V = 0.
    """
    _, I, V = _triple(s)
    if not (math.isfinite(I) and math.isfinite(V)):
        raise DomainError("g1 requires finite state components")
    return (1.0 - p.epsilon) * p.k / (p.alpha + p.rho) * I + V


def l1(p: ModelParams, grid, s) -> float:
    """Spatial integral of g1 over the grid by the trapezoid rule.

    ``s`` is a FieldState; the quadrature matches the solver's nodes.
    """
    vals = (1.0 - p.epsilon) * p.k / (p.alpha + p.rho) * s.I + s.V
    return float(np.trapezoid(vals, dx=grid.h))


def _volterra_block(x: float, xstar: float, a: float) -> float:
    # antiderivative of 1 - xstar(1+a*t)/(t(1+a*xstar)) from xstar to x
    return x - xstar - xstar / (1.0 + a * xstar) * (math.log(x / xstar) + a * (x - xstar))


def g2(p: ModelParams, Estar: PointState, s) -> float:
    """Infected-equilibrium functional, in closed form.

    Only defined in the restricted family (see ``restriction_ok``); requires
    a strictly positive state.  Vanishes at E* and is nonnegative around it.
    """
    if not restriction_ok(p):
        raise NotApplicableError(
            "g2 requires u = 0, alpha0 = 1 and alpha3 = alpha1*alpha2"
        )
    H, I, V = _triple(s)
    if not all(math.isfinite(v) and v > 0 for v in (H, I, V)):
        raise DomainError("g2 requires strictly positive finite H, I, V")
    hb = _volterra_block(H, Estar.H, p.alpha1)
    ib = I - Estar.I - Estar.I * math.log(I / Estar.I)
    vb = _volterra_block(V, Estar.V, p.alpha2)
    cv = (p.alpha + p.rho) * (1.0 + p.alpha2 * Estar.V) / ((1.0 - p.epsilon) * p.k)
    return hb + ib + cv * vb


def g2_field(p: ModelParams, Estar: PointState, y: np.ndarray) -> np.ndarray:
    """Vectorized g2 over a (3, n) stack of strictly positive fields."""
    if not restriction_ok(p):
        raise NotApplicableError(
            "g2_field requires u = 0, alpha0 = 1 and alpha3 = alpha1*alpha2"
        )
    H, I, V = y[0], y[1], y[2]
    if np.any(H <= 0) or np.any(I <= 0) or np.any(V <= 0):
        raise DomainError("g2_field requires strictly positive fields")
    Hs, Is, Vs = Estar.H, Estar.I, Estar.V
    hb = H - Hs - Hs / (1.0 + p.alpha1 * Hs) * (np.log(H / Hs) + p.alpha1 * (H - Hs))
    ib = I - Is - Is * np.log(I / Is)
    vb = V - Vs - Vs / (1.0 + p.alpha2 * Vs) * (np.log(V / Vs) + p.alpha2 * (V - Vs))
    cv = (p.alpha + p.rho) * (1.0 + p.alpha2 * Vs) / ((1.0 - p.epsilon) * p.k)
    return hb + ib + cv * vb


def amgm_bracket_product(p: ModelParams, Estar: PointState, s) -> float:
    """Product of the four ratio terms appearing in the decay estimate of g2.

    The terms telescope, so the product is identically 1; by the
    AM-GM inequality their sum is then at least 4.
    """
    if not restriction_ok(p):
        raise NotApplicableError(
            "amgm_bracket_product requires u = 0, alpha0 = 1 and alpha3 = alpha1*alpha2"
        )
    H, I, V = _triple(s)
    if not all(math.isfinite(v) and v > 0 for v in (H, I, V)):
        raise DomainError("amgm_bracket_product requires strictly positive H, I, V")
    Hs, Is, Vs = Estar.H, Estar.I, Estar.V
    t1 = (Hs / H) * (1.0 + p.alpha1 * H) / (1.0 + p.alpha1 * Hs)
    t2 = (H * Is * V * (1.0 + p.alpha1 * Hs) * (1.0 + p.alpha2 * Vs)) / (
        Hs * I * Vs * (1.0 + p.alpha1 * H) * (1.0 + p.alpha2 * V)
    )
    t3 = (I / Is) * (Vs / V)
    t4 = (1.0 + p.alpha2 * V) / (1.0 + p.alpha2 * Vs)
    return t1 * t2 * t3 * t4


def amgm_bracket_terms(p: ModelParams, Estar: PointState, s) -> tuple[float, float, float, float]:
    """The four individual ratio terms (their product is 1)."""
    if not restriction_ok(p):
        raise NotApplicableError(
            "amgm_bracket_terms requires u = 0, alpha0 = 1 and alpha3 = alpha1*alpha2"
        )
    H, I, V = _triple(s)
    Hs, Is, Vs = Estar.H, Estar.I, Estar.V
    t1 = (Hs / H) * (1.0 + p.alpha1 * H) / (1.0 + p.alpha1 * Hs)
    t2 = (H * Is * V * (1.0 + p.alpha1 * Hs) * (1.0 + p.alpha2 * Vs)) / (
        Hs * I * Vs * (1.0 + p.alpha1 * H) * (1.0 + p.alpha2 * V)
    )
    t3 = (I / Is) * (Vs / V)
    t4 = (1.0 + p.alpha2 * V) / (1.0 + p.alpha2 * Vs)
    return t1, t2, t3, t4


def decay_check(values, tol: float) -> tuple[bool, int | None]:
    """Check that a series is nonincreasing up to tol * max|values|.

    Returns (True, None) when every successive difference is within the
    slack, else (False, i) with i the index of the first sample that rose
    above it.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DomainError("decay_check needs at least 2 samples")
    if tol < 0:
        raise DomainError("tol must be >= 0")
    scale = float(np.max(np.abs(v)))
    diffs = np.diff(v)
    bad = np.nonzero(diffs > tol * scale)[0]
    if bad.size:
        return False, int(bad[0]) + 1
    return True, None


def trace_from_series(times, l1_series, l2_series, restriction: bool) -> LyapunovTrace:
    """Assemble a LyapunovTrace, attaching forward-difference derivatives."""
    times = np.asarray(times, dtype=float)
    l1v = np.asarray(l1_series, dtype=float)
    l2v = np.asarray(l2_series, dtype=float)

    def fwd(vals: np.ndarray) -> np.ndarray:
        out = np.full_like(vals, np.nan)
        if vals.size >= 2:
            out[:-1] = np.diff(vals) / np.diff(times)
        return out

    return LyapunovTrace(
        times=times, L1_values=l1v, L2_values=l2v,
        dL1dt=fwd(l1v), dL2dt=fwd(l2v), restriction_ok=restriction,
    )
