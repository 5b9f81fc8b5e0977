"""Self-contained invariant checks, runnable from the CLI (``hcvrd check``).

Each check exercises one structural property of the model or the numerics
against an independent computation (closed forms, eigenvalue solvers,
Monte-Carlo sampling, grid refinement) and reports pass/fail with a detail
string.  The test suite reuses these functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .equilibria import infected_equilibrium, psi, uninfected_equilibrium
from .lyapunov import amgm_bracket_product, amgm_bracket_terms, g2
from .model import (
    ModelParams,
    basic_reproduction_number,
    derived,
    global_extinction_threshold,
    incidence,
    lipschitz_constants,
    reaction,
    virion_net_yield,
)
from .scenarios import builtin_scenario
from .solver import Grid1D, laplacian_neumann, ode_reference
from .stability import e0_characteristic, e0_mode1_scale, routh_hurwitz_cubic


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def random_params(rng: np.random.Generator, positive_alphas: bool = False) -> ModelParams:
    """A random admissible parameter set with moderate magnitudes."""

    def logu(lo, hi):
        return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))

    return ModelParams(
        lam=logu(0.5, 100.0),
        d=logu(0.05, 5.0),
        beta=logu(1e-3, 1.0),
        eta=float(rng.uniform(0.0, 0.9)),
        epsilon=float(rng.uniform(0.0, 0.9)),
        rho=float(rng.uniform(0.0, 0.5)),
        alpha=logu(0.01, 1.0),
        k=logu(0.1, 10.0),
        mu=logu(0.1, 30.0),
        u=int(rng.integers(0, 2)),
        alpha0=logu(0.1, 5.0),
        alpha1=logu(0.005, 0.5) if positive_alphas else float(rng.uniform(0.0, 0.5)),
        alpha2=logu(0.005, 0.5) if positive_alphas else float(rng.uniform(0.0, 0.5)),
        alpha3=float(rng.uniform(0.0, 0.1)),
        D1=logu(0.01, 1.0),
        D2=logu(0.01, 1.0),
        D3=logu(0.01, 1.0),
    )


def random_restricted_params(rng: np.random.Generator, target_R0: float = 2.0) -> ModelParams:
    """Random parameters in the factorizable family with R0 above 1."""
    p = random_params(rng, positive_alphas=True)
    p = replace(p, u=0, alpha0=1.0, alpha3=p.alpha1 * p.alpha2)
    r0 = basic_reproduction_number(p)
    # with u = 0 the reproduction number is proportional to beta
    p = replace(p, beta=p.beta * target_R0 / r0)
    return p


def check_threshold_order(n: int = 500, seed: int = 11) -> CheckResult:
    """R0 <= tau0 across random admissible parameter sets."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(n):
        p = random_params(rng)
        tau0 = global_extinction_threshold(p)
        # equality holds when alpha1 = 0 and u = 0, so compare relatively
        gap = (basic_reproduction_number(p) - tau0) / max(1.0, tau0)
        worst = max(worst, gap)
    return CheckResult("threshold order R0 <= tau0", worst <= 1e-12,
                       f"max scaled (R0 - tau0) = {worst:.3e} over {n} draws")


def check_quasi_positivity(n: int = 1000, seed: int = 12) -> CheckResult:
    """Reaction components are nonnegative on the boundary faces."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(n):
        p = random_params(rng)
        a, b = rng.uniform(0, 50, 2)
        f1 = reaction(p, (0.0, a, b))[0]
        f2 = reaction(p, (a, 0.0, b))[1]
        f3 = reaction(p, (a, b, 0.0))[2]
        worst = min(worst, f1, f2, f3)
    return CheckResult("quasi-positivity on boundary faces", worst >= 0.0,
                       f"min boundary component = {worst:.3e} over {n} draws")


def check_conservation_identity(n: int = 500, seed: int = 13) -> CheckResult:
    """F1 + F2 equals lam - d H - alpha I up to roundoff."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng)
        s = rng.uniform(0, 100, 3)
        F = reaction(p, s)
        lhs = F[0] + F[1]
        rhs = p.lam - p.d * s[0] - p.alpha * s[1]
        scale = max(1.0, abs(p.lam), p.d * s[0], p.alpha * s[1],
                    abs(float(incidence(p, s[0], s[2]))))
        worst = max(worst, abs(lhs - rhs) / scale)
    return CheckResult("conservation identity F1+F2", worst <= 1e-12,
                       f"max scaled deviation = {worst:.3e} over {n} draws")


def check_incidence_bounds(n: int = 500, seed: int = 14) -> CheckResult:
    """Incidence is nondecreasing in H and below each closed-form bound."""
    rng = np.random.default_rng(seed)
    ok = True
    detail = "bounds and monotonicity hold"
    for _ in range(n):
        p = random_params(rng, positive_alphas=True)
        H = np.sort(rng.uniform(0, 100, 8))
        V = float(rng.uniform(0, 100))
        vals = np.array([incidence(p, h, V) for h in H])
        cb = (1.0 - p.eta) * p.beta
        if np.any(np.diff(vals) < -1e-12 * max(1.0, vals.max())):
            ok, detail = False, "monotonicity in H violated"
            break
        bounds = np.minimum.reduce([
            cb * H * V / p.alpha0, np.full_like(H, cb * V / p.alpha1), cb * H / p.alpha2,
        ])
        if np.any(vals > bounds * (1 + 1e-12)):
            ok, detail = False, "closed-form upper bound violated"
            break
    return CheckResult("incidence bounds and monotonicity", ok, detail)


def check_equilibrium_dichotomy(n: int = 300, seed: int = 15) -> CheckResult:
    """E* exists exactly when R0 > 1 (and then gamma > 0 automatically)."""
    rng = np.random.default_rng(seed)
    for i in range(n):
        p = random_params(rng)
        r0 = basic_reproduction_number(p)
        if abs(r0 - 1) < 1e-6:
            continue
        estar = infected_equilibrium(p)
        expect = r0 > 1 and virion_net_yield(p) > 0
        if (estar is not None) != expect:
            return CheckResult("equilibrium existence dichotomy", False,
                               f"draw {i}: R0 = {r0}, exists = {estar is not None}")
        if estar is not None:
            Lam = p.lam / p.d
            if not (0 < estar.H < Lam and estar.I > 0 and estar.V > 0):
                return CheckResult("equilibrium existence dichotomy", False,
                                   f"draw {i}: E* outside the admissible box")
    return CheckResult("equilibrium existence dichotomy", True,
                       f"existence matched R0 > 1 on {n} draws")


def check_psi_monotonicity(n_params: int = 50, n_grid: int = 1000,
                           seed: int = 16) -> CheckResult:
    """psi is strictly increasing on (0, Lambda) whenever gamma > 0."""
    rng = np.random.default_rng(seed)
    tested = 0
    for _ in range(n_params):
        p = random_params(rng)
        if virion_net_yield(p) <= 0:
            continue
        tested += 1
        Lam = p.lam / p.d
        xs = np.linspace(Lam * 1e-6, Lam * (1 - 1e-6), n_grid)
        vals = np.array([psi(p, x) for x in xs])
        scale = max(1.0, float(np.max(np.abs(vals))))
        if np.any(np.diff(vals) <= -1e-14 * scale):
            return CheckResult("psi monotonicity", False, "non-increasing segment found")
    return CheckResult("psi monotonicity", True,
                       f"strictly increasing on {tested} parameter draws x {n_grid} points")


def check_sign_law(n: int = 1000, seed: int = 17) -> CheckResult:
    """sign(C at mode 1) = sign(1 - R0); the ratio matches the closed form."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng)
        r0 = basic_reproduction_number(p)
        if abs(1.0 - r0) < 1e-3:
            continue
        _, _, C = e0_characteristic(p, 0.0)
        if np.sign(C) != np.sign(1.0 - r0):
            return CheckResult("mode-1 sign law", False, f"sign mismatch at R0 = {r0}")
        const = C / (1.0 - r0)
        expected = e0_mode1_scale(p)
        worst = max(worst, abs(const - expected) / expected)
    return CheckResult("mode-1 sign law", worst <= 1e-12,
                       f"max relative deviation of the proportionality constant = {worst:.3e}")


def check_routh_oracle(n: int = 1000, seed: int = 18) -> CheckResult:
    """Routh-Hurwitz verdicts agree with companion-matrix eigenvalues."""
    rng = np.random.default_rng(seed)
    checked = 0
    for _ in range(n):
        a2, a1, a0 = rng.uniform(-5, 5, 3)
        roots = np.roots([1.0, a2, a1, a0])
        margin = float(np.max(roots.real))
        if abs(margin) < 1e-9:
            continue
        checked += 1
        if routh_hurwitz_cubic(a2, a1, a0) != (margin < 0):
            return CheckResult("Routh-Hurwitz root oracle", False,
                               f"disagreement at ({a2}, {a1}, {a0})")
    return CheckResult("Routh-Hurwitz root oracle", True,
                       f"agreed with np.roots on {checked} random cubics")


def check_laplacian(seed: int = 19) -> CheckResult:
    """Conservation to roundoff and second-order convergence on cos(pi x)."""
    rng = np.random.default_rng(seed)
    f = rng.uniform(0, 10, 101)
    h = 1.0 / 100
    lap = laplacian_neumann(f, h)
    w = np.full(101, h)
    w[0] = w[-1] = h / 2
    total = abs(float(np.dot(w, lap)))
    denom = float(np.dot(w, np.abs(lap)))
    if total > 1e-12 * max(denom, 1.0):
        return CheckResult("discrete Neumann conservation", False,
                           f"weighted sum = {total:.3e}")

    errs = []
    for n in (51, 101):
        g = Grid1D(1.0, n)
        fx = np.cos(np.pi * g.x)
        err = np.max(np.abs(laplacian_neumann(fx, g.h) + np.pi**2 * fx))
        errs.append(float(err))
    ratio = errs[0] / errs[1]
    ok = errs[1] < 1e-3 and 3.5 <= ratio <= 4.5
    return CheckResult("Laplacian order on cos(pi x)", ok,
                       f"errors (n=51, 101) = ({errs[0]:.2e}, {errs[1]:.2e}), ratio = {ratio:.2f}")


def check_rk4_order() -> CheckResult:
    """Global RK4 error drops about 16x when the step is halved."""
    p = builtin_scenario("paper-set-1").params
    s0 = (5.0, 5.0, 5.0)
    ref = ode_reference(p, s0, 1.0, 0.0001).final()
    e1 = np.max(np.abs(ode_reference(p, s0, 1.0, 0.01).final() - ref))
    e2 = np.max(np.abs(ode_reference(p, s0, 1.0, 0.005).final() - ref))
    ratio = float(e1 / e2)
    ok = 12.0 <= ratio <= 20.0
    return CheckResult("RK4 order on the homogeneous system", ok,
                       f"errors = ({e1:.2e}, {e2:.2e}), ratio = {ratio:.2f}")


def check_lipschitz(n_pairs: int = 10000, seed: int = 20) -> CheckResult:
    """Monte-Carlo verification of the Lipschitz matrix on the invariant box."""
    p = builtin_scenario("paper-set-1").params
    dq = derived(p, 5.0, 5.0, 5.0)
    K = lipschitz_constants(p, dq.Hm, dq.Vm)
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, (3, n_pairs)) * np.array([[dq.Hm], [dq.Hm], [dq.Vm]])
    y = rng.uniform(0, 1, (3, n_pairs)) * np.array([[dq.Hm], [dq.Hm], [dq.Vm]])
    Fx = reaction(p, x)
    Fy = reaction(p, y)
    lhs = np.abs(Fx - Fy)
    rhs = K @ np.abs(x - y)
    violations = int(np.count_nonzero(lhs > rhs))
    worst = float(np.max(lhs - rhs))
    return CheckResult("Lipschitz bound Monte-Carlo", violations == 0,
                       f"{violations} violations over {n_pairs} pairs (max excess {worst:.3e})")


def check_amgm(n_states: int = 1000, n_params: int = 100, seed: int = 21) -> CheckResult:
    """The four-term ratio product is 1 to machine precision."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_params):
        p = random_restricted_params(rng)
        estar = infected_equilibrium(p)
        if estar is None:
            return CheckResult("AM-GM bracket product", False, "restricted draw lost E*")
        states = estar.as_array()[:, None] * np.exp(rng.uniform(-1, 1, (3, n_states // n_params + 1)))
        for s in states.T:
            prod = amgm_bracket_product(p, estar, s)
            worst = max(worst, abs(prod - 1.0))
            terms = amgm_bracket_terms(p, estar, s)
            if 4.0 - sum(terms) > 1e-9:
                return CheckResult("AM-GM bracket product", False,
                                   "sum of terms fell below 4")
    return CheckResult("AM-GM bracket product", worst <= 1e-12,
                       f"max |product - 1| = {worst:.3e}")


def check_g2_positive(n: int = 1000, seed: int = 22) -> CheckResult:
    """g2 vanishes at E* and is positive on states near it."""
    rng = np.random.default_rng(seed)
    p = random_restricted_params(rng, target_R0=5.0)
    estar = infected_equilibrium(p)
    if estar is None:
        return CheckResult("g2 positivity near E*", False, "no E* for restricted draw")
    if g2(p, estar, estar) != 0.0:
        return CheckResult("g2 positivity near E*", False, "g2(E*) != 0")
    worst = np.inf
    for _ in range(n):
        s = estar.as_array() * rng.uniform(0.8, 1.2, 3)
        if np.allclose(s, estar.as_array()):
            continue
        worst = min(worst, g2(p, estar, s))
    return CheckResult("g2 positivity near E*", worst > 0.0,
                       f"min g2 over {n} perturbed states = {worst:.3e}")


def check_monotone_stabilization(n: int = 100, seed: int = 23) -> CheckResult:
    """C and a2 never decrease along the mode spectrum."""
    from .stability import estar_characteristic, neumann_spectrum

    rng = np.random.default_rng(seed)
    spectrum = neumann_spectrum(1.0, 32)
    for _ in range(n):
        p = random_params(rng)
        cs = [e0_characteristic(p, m)[2] for m in spectrum.mu]
        if np.any(np.diff(cs) < 0):
            return CheckResult("monotone stabilization in mu_l", False, "C decreased")
        estar = infected_equilibrium(p)
        if estar is not None:
            a2s = [estar_characteristic(p, estar, m)[0] for m in spectrum.mu]
            if np.any(np.diff(a2s) < 0):
                return CheckResult("monotone stabilization in mu_l", False, "a2 decreased")
    return CheckResult("monotone stabilization in mu_l", True,
                       f"C and a2 nondecreasing over {n} draws x {spectrum.l_max} modes")


def check_e0_equilibrium(n: int = 200, seed: int = 24) -> CheckResult:
    """The reaction vanishes identically at the uninfected state."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng)
        e0 = uninfected_equilibrium(p)
        worst = max(worst, float(np.max(np.abs(reaction(p, e0)))) / max(1.0, p.lam))
    return CheckResult("uninfected state is an equilibrium", worst <= 1e-14,
                       f"max scaled residual = {worst:.3e}")


ALL_CHECKS = (
    check_threshold_order,
    check_quasi_positivity,
    check_conservation_identity,
    check_incidence_bounds,
    check_equilibrium_dichotomy,
    check_psi_monotonicity,
    check_sign_law,
    check_routh_oracle,
    check_laplacian,
    check_rk4_order,
    check_lipschitz,
    check_amgm,
    check_g2_positive,
    check_monotone_stabilization,
    check_e0_equilibrium,
)


_FAST_KWARGS = {
    check_threshold_order: {"n": 100},
    check_quasi_positivity: {"n": 200},
    check_conservation_identity: {"n": 100},
    check_incidence_bounds: {"n": 100},
    check_equilibrium_dichotomy: {"n": 60},
    check_psi_monotonicity: {"n_params": 10, "n_grid": 200},
    check_sign_law: {"n": 200},
    check_routh_oracle: {"n": 200},
    check_lipschitz: {"n_pairs": 1000},
    check_amgm: {"n_states": 100, "n_params": 10},
    check_g2_positive: {"n": 100},
    check_monotone_stabilization: {"n": 20},
    check_e0_equilibrium: {"n": 50},
}


def run_all(fast: bool = False) -> list[CheckResult]:
    """Run every check; ``fast`` shrinks the sampled counts."""
    results = []
    for fn in ALL_CHECKS:
        kwargs = _FAST_KWARGS.get(fn, {}) if fast else {}
        results.append(fn(**kwargs))
    return results
