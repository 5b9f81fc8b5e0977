import math
from dataclasses import replace

import numpy as np
import pytest

from hcvrd import (
    DomainError,
    basic_reproduction_number,
    equilibrium_report,
    incidence,
    infected_equilibrium,
    psi,
    reaction,
    uninfected_equilibrium,
    virion_net_yield,
)
from hcvrd.checks import check_equilibrium_dichotomy, check_psi_monotonicity
from hcvrd.equilibria import consistency_identities

from oracles import quadratic_estar_healthy_level


def test_uninfected_equilibrium_values(set1_params, set2_params):
    assert uninfected_equilibrium(set1_params).as_array() == pytest.approx([10.0, 0.0, 0.0])
    assert uninfected_equilibrium(set2_params).as_array() == pytest.approx([10.0, 0.0, 0.0])
    unit = replace(set1_params, lam=3.0, d=3.0)
    assert uninfected_equilibrium(unit).H == 1.0


def test_psi_at_zero_is_minus_clearance_rate(set1_params, set2_params):
    for p in (set1_params, set2_params):
        assert psi(p, 0.0) == -(p.alpha + p.rho) * p.mu


def test_psi_sign_at_lambda_tracks_r0(set1_params, set2_params):
    # R0 < 1 for set 1, > 1 for set 2
    assert psi(set1_params, 10.0) < 0
    assert psi(set2_params, 10.0) > 0


def test_psi_domain_error(set1_params):
    with pytest.raises(DomainError):
        psi(set1_params, -0.5)
    with pytest.raises(DomainError):
        psi(set1_params, 10.0 + 1e-9)


def test_psi_monotonicity():
    result = check_psi_monotonicity()
    assert result.ok, result.detail


def test_infected_equilibrium_absent_below_threshold(set1_params):
    assert infected_equilibrium(set1_params) is None
    report = equilibrium_report(set1_params)
    assert not report.exists_Estar
    assert report.Estar is None
    assert "R0" in report.estar_reason


def test_infected_equilibrium_set2_against_quadratic_oracle(set2_params):
    estar = infected_equilibrium(set2_params)
    assert estar is not None
    h_oracle = quadratic_estar_healthy_level(set2_params)
    assert estar.H == pytest.approx(h_oracle, rel=1e-10)
    assert estar.H == pytest.approx(8.8997499, abs=1e-6)
    # closed-form back substitution
    p = set2_params
    g = virion_net_yield(p)
    assert g == pytest.approx(0.94, rel=1e-14)
    assert estar.I == pytest.approx((p.lam - p.d * estar.H) / p.alpha, rel=1e-14)
    assert estar.V == pytest.approx(g * estar.I / p.mu, rel=1e-14)
    assert 0 < estar.H < 10 and estar.I > 0 and estar.V > 0


def test_infected_equilibrium_residuals(set2_params, crowley_params):
    for p in (set2_params, crowley_params):
        report = equilibrium_report(p)
        assert report.exists_Estar
        assert report.reaction_residual <= 1e-9 * report.residual_scale
        assert report.psi_root_residual <= 1e-9 * (p.alpha + p.rho) * p.mu


def test_consistency_identities_at_estar(set2_params, crowley_params):
    for p in (set2_params, crowley_params):
        estar = infected_equilibrium(p)
        errs = consistency_identities(p, estar)
        assert max(errs) <= 1e-9
        assert incidence(p, estar.H, estar.V) == pytest.approx(
            (p.alpha + p.rho) * estar.I, rel=1e-12
        )
    # without absorption the yield identity takes its production-rate form
    p = crowley_params
    estar = infected_equilibrium(p)
    lhs = (p.alpha + p.rho) * p.mu / ((1 - p.epsilon) * p.k)
    assert lhs == pytest.approx((p.alpha + p.rho) * estar.I / estar.V, rel=1e-12)


def test_existence_dichotomy_random_sweep():
    result = check_equilibrium_dichotomy()
    assert result.ok, result.detail


def test_crowley_estar_closed_form(crowley_params):
    # with alpha3 = alpha1*alpha2 the quadratic coefficients are exact
    estar = infected_equilibrium(crowley_params)
    h_oracle = quadratic_estar_healthy_level(crowley_params)
    assert estar.H == pytest.approx(h_oracle, rel=1e-10)
    assert basic_reproduction_number(crowley_params) == pytest.approx(10.0, rel=1e-10)


def test_report_serialization_roundtrip(set2_params):
    report = equilibrium_report(set2_params)
    kv = dict(report.key_values())
    assert kv["E0_H"] == 10.0
    assert kv["exists_Estar"] is True
    e = np.array([kv["Estar_H"], kv["Estar_I"], kv["Estar_V"]])
    resid = np.max(np.abs(reaction(set2_params, e)))
    assert resid <= 1e-9 * kv["residual_scale"]


def test_report_gamma_diagnostic_when_yield_nonpositive(set1_params):
    # force gamma <= 0; R0 is then necessarily below 1
    p = replace(set1_params, epsilon=0.98, u=1, k=0.05, alpha=0.2)
    assert virion_net_yield(p) <= 0
    assert basic_reproduction_number(p) < 1
    report = equilibrium_report(p)
    assert not report.exists_Estar
